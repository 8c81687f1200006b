#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "curveflow/config.hpp"
#include "curveflow/experiments.hpp"
#include "curveflow/io.hpp"
#include "curveflow/parallel.hpp"

using namespace curveflow;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Subset of JSON Schema used by schemas/summary.schema.json: type, enum,
// required, properties, additionalProperties (bool), items.
bool type_ok(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  if (t == "null") return v.is_null();
  return false;
}

void validate(const json& v, const json& schema, const std::string& at, std::vector<std::string>& errs) {
  if (auto t = schema.find("type"); t != schema.end()) {
    bool ok = false;
    if (t->is_string()) ok = type_ok(v, *t);
    else
      for (const auto& s : *t) ok = ok || type_ok(v, s);
    if (!ok) errs.push_back(at + ": wrong type");
  }
  if (auto e = schema.find("enum"); e != schema.end())
    if (std::find(e->begin(), e->end(), v) == e->end()) errs.push_back(at + ": not in enum");
  if (v.is_object()) {
    for (const auto& r : schema.value("required", json::array()))
      if (!v.contains(r.get<std::string>())) errs.push_back(at + ": missing " + r.get<std::string>());
    const json props = schema.value("properties", json::object());
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (props.contains(it.key())) validate(*it, props[it.key()], at + "." + it.key(), errs);
      else if (schema.value("additionalProperties", true) == false)
        errs.push_back(at + ": unexpected " + it.key());
    }
  }
  if (v.is_array() && schema.contains("items"))
    for (std::size_t k = 0; k < v.size(); ++k) validate(v[k], schema["items"], at + "[" + std::to_string(k) + "]", errs);
}

json load_schema() {
  std::ifstream is(std::string(CURVEFLOW_SOURCE_DIR) + "/schemas/summary.schema.json");
  REQUIRE(is);
  return json::parse(is);
}

json base_config() {
  return json::parse(R"({
    "source": {"preset": "tent", "center": 2.0},
    "grid": {"dr": 0.1, "r_max": 8.0, "dx": 0.1, "L": 2.0},
    "T": 1.0, "seed": 3, "options": {"snapshots": 3}})");
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("curveflow_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 1e22}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
}

TEST_CASE("csv") {
  CsvTable t({"a", "b"});
  t.add_row({1.0, 0.5});
  t.add_row(std::vector<std::string>{"x", "y"});
  CHECK(t.str() == "a,b\n1,0.5\nx,y\n");
  CHECK_THROWS_AS(t.add_row(std::vector<double>{1.0}), ConfigError);
  CHECK_THROWS_AS(CsvTable({}), ConfigError);
  CHECK_THROWS_AS(t.write("/nonexistent-dir/x.csv"), IoError);
}

TEST_CASE("plots") {
  const std::string svg = line_plot_svg({{"psi", {0, 1, 2}, {0, -1, -3}}}, {"t", "r", "psi"});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find(">r</text>") != std::string::npos);
  CHECK(svg.find(">psi</text>") != std::string::npos);
  CHECK(svg.find("<path") != std::string::npos);
  CHECK_THROWS_AS(line_plot_svg({}, {}), ConfigError);
  CHECK_THROWS_AS(line_plot_svg({{"e", {}, {}}}, {}), ConfigError);

  const auto g = Grid2D::make(1.0, 0.1);
  const auto u = LevelSetField2D::from_function(g, [](Point2 x) { return 0.5 - x.norm(); });
  LevelCurve c{0.0, {{0.5, 0}, {0, 0.5}, {-0.5, 0}}, false};
  const std::string heat = heat_map_svg(u, {c}, {"u", "x1", "x2"});
  CHECK(heat.find("<rect") != std::string::npos);
  CHECK(heat.find("stroke=\"black\"") != std::string::npos);
  CHECK(heat.find(">x1</text>") != std::string::npos);
}

TEST_CASE("config validation names the field") {
  auto expect_field = [](json j, const std::string& field) {
    try {
      config_from_json(j);
      FAIL("accepted an invalid config");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  json j = base_config();
  j["grid"].erase("dr");
  expect_field(j, "grid.dr");
  j = base_config();
  j["T"] = -1.0;
  expect_field(j, "T");
  j = base_config();
  j["grid"]["dx"] = 0.0;
  expect_field(j, "grid.dx");
  j = base_config();
  j["seed"] = 0;
  expect_field(j, "seed");
  j = base_config();
  j["source"]["preset"] = "wave";
  expect_field(j, "source.preset");
  j = base_config();
  j["source"]["half_width"] = -1.0;
  expect_field(j, "source.half_width");
  j = base_config();
  j["experiment"] = "nope";
  expect_field(j, "experiment");
  j = base_config();
  j["epsilon"] = -0.1;
  expect_field(j, "epsilon");
}

TEST_CASE("config presets") {
  json j = base_config();
  const RunConfig cfg = config_from_json(j);
  CHECK(cfg.grid.dr == 0.1);
  CHECK(cfg.seed == 3);
  CHECK(asymptotic_speed(make_source(cfg.source)).c == doctest::Approx(1.0));
  j["source"] = json::parse(R"({"preset": "multi_tent", "tents": [[2, 1, 1], [5, 1, 1]]})");
  CHECK(make_source(config_from_json(j).source).profile(5.0) == doctest::Approx(1.0));
  j["source"] = json::parse(R"({"preset": "stadium", "a": 0.5})");
  const RunConfig st = config_from_json(j);
  CHECK(stadium_of(st.source).a == 0.5);
  CHECK(make_planar_source(st.source).kind() == SourceKind::planar);
  j["source"] = json::parse(R"({"preset": "table", "r": [0, 1, 2], "values": [0, 1, 0]})");
  CHECK(make_source(config_from_json(j).source).profile(0.5) == doctest::Approx(0.5));
  CHECK(config_from_json(config_from_json(base_config()).to_json()).to_json() == config_from_json(base_config()).to_json());
}

TEST_CASE("bundled configs parse") {
  for (const char* name : {"default", "radial_tent", "two_tent", "stadium", "disk"})
    CHECK_NOTHROW(load_config(std::string(CURVEFLOW_SOURCE_DIR) + "/configs/" + name + ".json"));
  CHECK_THROWS_AS(load_config("/nonexistent.json"), ConfigError);
}

TEST_CASE("experiments write valid summaries and are reproducible") {
  const json schema = load_schema();
  const json src_stadium = json::parse(R"({"preset": "stadium"})");
  struct Case {
    const char* experiment;
    json source;
  };
  const std::vector<Case> cases = {{"radial-evolve", base_config()["source"]},
                                   {"ergodic-profile", base_config()["source"]},
                                   {"dp-profile", base_config()["source"]},
                                   {"levelset2d", base_config()["source"]},
                                   {"stadium", src_stadium}};
  for (const auto& c : cases) {
    CAPTURE(c.experiment);
    json j = base_config();
    j["experiment"] = c.experiment;
    j["source"] = c.source;
    if (std::string(c.experiment) == "stadium") j["T"] = 0.1;
    const RunConfig cfg = config_from_json(j);
    const fs::path a = scratch(std::string(c.experiment) + "_a"), b = scratch(std::string(c.experiment) + "_b");
    RunOptions oa, ob;
    oa.out_dir = a.string();
    ob.out_dir = b.string();
    set_thread_count(1);
    const json summary = run_experiment(cfg, oa);
    set_thread_count(4);
    run_experiment(cfg, ob);
    set_thread_count(1);

    std::vector<std::string> errs;
    validate(summary, schema, "$", errs);
    for (const auto& e : errs) CHECK_MESSAGE(false, e);
    const json on_disk = json::parse(slurp(a / "summary.json"));
    CHECK(on_disk == summary);
    for (const auto& art : summary["artifacts"]) {
      const std::string name = art.get<std::string>();
      CAPTURE(name);
      REQUIRE(fs::exists(a / name));
      CHECK(slurp(a / name) == slurp(b / name));
      if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") {
        const std::string text = slurp(a / name);
        CHECK(std::isalpha(static_cast<unsigned char>(text[0])));
      }
    }
  }
}

TEST_CASE("radial-evolve CSV columns") {
  json j = base_config();
  j["experiment"] = "radial-evolve";
  const fs::path out = scratch("radial_cols");
  RunOptions o;
  o.out_dir = out.string();
  run_experiment(config_from_json(j), o);
  std::ifstream is(out / "radial_evolve.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,r,phi,phi_minus_ct");
}

TEST_CASE("stadium needs the stadium preset") {
  json j = base_config();
  j["experiment"] = "stadium";
  RunOptions o;
  o.out_dir = scratch("stadium_bad").string();
  CHECK_THROWS_AS(run_experiment(config_from_json(j), o), ConfigError);
}
