#include "curveflow/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace curveflow {

using nlohmann::json;

namespace {

const char* kExperiments[] = {"radial-evolve", "ergodic-profile", "dp-profile",
                              "levelset2d",    "stadium",         "verify"};

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config: " + field + " " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "is missing");
  return *it;
}

double positive(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) fail(path, "must be a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) fail(path, "must be positive");
  return x;
}

double param(const json& p, const std::string& key, double fallback, bool allow_zero = false) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (!it->is_number()) fail("source." + key, "must be a number");
  const double x = it->get<double>();
  if (!std::isfinite(x) || x < 0.0 || (!allow_zero && x == 0.0))
    fail("source." + key, allow_zero ? "must be nonnegative" : "must be positive");
  return x;
}

int dimension(const json& p) {
  auto it = p.find("n");
  if (it == p.end()) return 2;
  if (!it->is_number_integer() || it->get<int>() < 2) fail("source.n", "must be an integer >= 2");
  return it->get<int>();
}

}  // namespace

bool is_experiment(const std::string& name) {
  for (const char* e : kExperiments)
    if (name == e) return true;
  return false;
}

json RunConfig::to_json() const {
  json src = source.params;
  src["preset"] = source.preset;
  json j = {{"source", src},
            {"grid", {{"dr", grid.dr}, {"r_max", grid.r_max}, {"dx", grid.dx}, {"L", grid.L}}},
            {"T", T},
            {"output_dir", output_dir},
            {"seed", seed}};
  if (!experiment.empty()) j["experiment"] = experiment;
  if (epsilon > 0.0) j["epsilon"] = epsilon;
  if (!extra.empty()) j["options"] = extra;
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) fail("<root>", "must be a JSON object");
  RunConfig cfg;
  if (j.contains("experiment")) {
    const json& exp = j["experiment"];
    if (!exp.is_string() || !is_experiment(exp.get<std::string>()))
      fail("experiment", "must be one of radial-evolve, ergodic-profile, dp-profile, levelset2d, "
                         "stadium, verify");
    cfg.experiment = exp.get<std::string>();
  }

  const json& src = require(j, "source", "source");
  if (!src.is_object()) fail("source", "must be an object");
  const json& preset = require(src, "preset", "source.preset");
  if (!preset.is_string()) fail("source.preset", "must be a string");
  cfg.source.preset = preset.get<std::string>();
  cfg.source.params = src;
  cfg.source.params.erase("preset");

  const json& grid = require(j, "grid", "grid");
  if (!grid.is_object()) fail("grid", "must be an object");
  cfg.grid.dr = positive(grid, "dr", "grid.dr");
  cfg.grid.r_max = positive(grid, "r_max", "grid.r_max");
  cfg.grid.dx = positive(grid, "dx", "grid.dx");
  cfg.grid.L = positive(grid, "L", "grid.L");
  if (cfg.grid.r_max <= 2.0 * cfg.grid.dr) fail("grid.r_max", "must exceed 2 * grid.dr");
  if (cfg.grid.L <= cfg.grid.dx) fail("grid.L", "must exceed grid.dx");

  cfg.T = positive(j, "T", "T");
  if (j.contains("epsilon")) cfg.epsilon = positive(j, "epsilon", "epsilon");
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty())
      fail("output_dir", "must be a nonempty string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  const json& seed = require(j, "seed", "seed");
  if (!seed.is_number_unsigned() || seed.get<std::uint64_t>() == 0)
    fail("seed", "must be a positive integer");
  cfg.seed = seed.get<std::uint64_t>();
  if (j.contains("options")) {
    if (!j["options"].is_object()) fail("options", "must be an object");
    cfg.extra = j["options"];
  }

  make_source(cfg.source).validate();  // surfaces bad preset parameters now
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot read " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error in ") + path + ": " + e.what());
  }
  return config_from_json(j);
}

SourceModel make_source(const SourceConfig& cfg) {
  const json& p = cfg.params;
  const std::string& k = cfg.preset;
  if (k == "stadium") return stadium_source(stadium_of(cfg), param(p, "c", 1.0, true), param(p, "width", 0.5));
  const int n = dimension(p);
  if (k == "tent")
    return tent_source(param(p, "center", 2.0), param(p, "height", 1.0, true),
                       param(p, "half_width", 1.0), n);
  if (k == "bump")
    return smooth_bump_source(param(p, "center", 2.0), param(p, "height", 1.0, true),
                              param(p, "half_width", 1.0), n);
  if (k == "plateau")
    return plateau_source(param(p, "lo", 2.0), param(p, "hi", 3.0), param(p, "value", 1.0, true),
                          param(p, "width", 0.5), n);
  if (k == "zero") return zero_source(n);
  if (k == "multi_tent") {
    auto it = p.find("tents");
    if (it == p.end()) fail("source.tents", "is missing");
    if (!it->is_array() || it->empty()) fail("source.tents", "must be a nonempty array");
    std::vector<std::array<double, 3>> tents;
    for (const auto& t : *it) {
      if (!t.is_array() || t.size() != 3) fail("source.tents", "entries must be [center, height, half_width]");
      tents.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
    }
    return multi_tent_source(tents, n);
  }
  if (k == "table") {
    auto r = p.find("r");
    auto v = p.find("values");
    if (r == p.end()) fail("source.r", "is missing");
    if (v == p.end()) fail("source.values", "is missing");
    try {
      return SourceModel::from_table(n, r->get<std::vector<double>>(), v->get<std::vector<double>>());
    } catch (const json::exception&) {
      fail("source.r/values", "must be arrays of numbers");
    }
  }
  fail("source.preset", "unknown preset '" + k + "'");
}

SourceModel make_planar_source(const SourceConfig& cfg) {
  SourceModel src = make_source(cfg);
  if (src.kind() == SourceKind::planar) return src;
  if (src.dimension() != 2) throw ConfigError("config: source.n must be 2 for the 2D solver");
  return as_planar(src);
}

StadiumSpec stadium_of(const SourceConfig& cfg) {
  StadiumSpec s;
  if (cfg.preset == "stadium") s.a = param(cfg.params, "a", 1.0);
  return s;
}

}  // namespace curveflow
