#include "curveflow/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "curveflow/ergodic.hpp"
#include "curveflow/geometry.hpp"
#include "curveflow/io.hpp"
#include "curveflow/levelset2d.hpp"
#include "curveflow/radial_hj.hpp"
#include "curveflow/reachability.hpp"

namespace curveflow {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Output {
  fs::path dir;
  json artifacts = json::array();

  std::string path(const std::string& name) {
    artifacts.push_back(name);
    return (dir / name).string();
  }
};

double option(const RunConfig& cfg, const char* key, double fallback) {
  auto it = cfg.extra.find(key);
  if (it == cfg.extra.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("config: options.") + key + " must be a number");
  return it->get<double>();
}

std::vector<double> option_list(const RunConfig& cfg, const char* key, std::vector<double> fallback) {
  auto it = cfg.extra.find(key);
  if (it == cfg.extra.end()) return fallback;
  try {
    return it->get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: options.") + key + " must be an array of numbers");
  }
}

SourceModel radial_source(const RunConfig& cfg) {
  SourceModel src = make_source(cfg.source);
  if (src.kind() != SourceKind::radial)
    throw ConfigError("config: source.preset must be radial for " + cfg.experiment);
  return src;
}

json radial_evolve(const RunConfig& cfg, Output& out) {
  const SourceModel src = radial_source(cfg);
  const SpeedReport speed = asymptotic_speed(src);
  const double c = speed.c;
  const RadialGrid grid = RadialGrid::make(cfg.grid.dr, cfg.grid.r_max);
  const RadialHJSolver solver(src, grid, -c);
  const int snaps = static_cast<int>(option(cfg, "snapshots", 11));
  if (snaps < 2) throw ConfigError("config: options.snapshots must be >= 2");

  CsvTable csv({"t", "r", "phi", "phi_minus_ct"});
  std::vector<LineSeries> series;
  RadialField phi = RadialField::from_function(grid, [](double) { return 0.0; });
  for (int k = 0; k < snaps; ++k) {
    const double t = cfg.T * k / (snaps - 1);
    if (t > phi.time) phi = solver.evolve(phi, t - phi.time);
    phi.time = t;  // pin the label against rounding in the sum of steps
    LineSeries s{"t=" + format_number(t), {}, {}};
    for (std::size_t i = 0; i < grid.size; ++i) {
      const double r = grid.node(i);
      csv.add_row({t, r, phi.values[i], phi.values[i] - c * t});
      s.x.push_back(r);
      s.y.push_back(phi.values[i] - c * t);
    }
    if (k == 0 || k == snaps - 1 || k == (snaps - 1) / 2) series.push_back(std::move(s));
  }
  csv.write(out.path("radial_evolve.csv"));
  emit_line_plot(out.path("radial_evolve.svg"), series, {"phi - c t", "r", "phi - c t"});

  const double peak = speed.argmax_radii.empty() ? grid.r_max : speed.argmax_radii.front();
  return {{"c", c},
          {"argmax_radius", peak},
          {"speed_estimate", phi.sample(peak) / cfg.T},
          {"max_slope", phi.max_slope()},
          {"min_phi_minus_ct", num(*std::min_element(phi.values.begin(), phi.values.end()) - c * cfg.T)},
          {"max_phi_minus_ct", num(*std::max_element(phi.values.begin(), phi.values.end()) - c * cfg.T)}};
}

json ergodic_profile(const RunConfig& cfg, Output& out) {
  const SourceModel src = radial_source(cfg);
  const double c = asymptotic_speed(src).c;
  const ErgodicProfile psi = build_psi(src, c, {cfg.grid.dr, cfg.grid.r_max});
  CsvTable csv({"r", "psi", "dpsi", "tag"});
  for (std::size_t i = 0; i < psi.size(); ++i)
    csv.add_row({format_number(psi.r[i]), format_number(psi.psi[i]), format_number(psi.dpsi[i]),
                 to_string(psi.tag[i])});
  csv.write(out.path("ergodic_profile.csv"));
  emit_line_plot(out.path("ergodic_profile.svg"), {{"psi", psi.r, psi.psi}},
                 {"ergodic profile", "r", "psi"});
  const CornerReport audit = corner_audit(psi, src, c);
  json corners = json::array();
  for (double r : psi.corner_radii) corners.push_back(r);
  return {{"c", c},
          {"r0", psi.r0},
          {"residual", residual(psi, src, c)},
          {"growth_rate", growth_rate(psi)},
          {"corner_radii", corners},
          {"corner_audit_ok", audit.ok()}};
}

json dp_profile(const RunConfig& cfg, Output& out) {
  const SourceModel src = radial_source(cfg);
  const double c = asymptotic_speed(src).c;
  std::string starts = "all";
  if (auto it = cfg.extra.find("starts"); it != cfg.extra.end()) {
    if (!it->is_string() || (*it != "all" && *it != "equilibria"))
      throw ConfigError("config: options.starts must be \"all\" or \"equilibria\"");
    starts = it->get<std::string>();
  }
  const ReachGrid grid{cfg.grid.dr, cfg.grid.r_max};
  const ProfileResult prof = compute_psi_inf(src, [](double) { return 0.0; }, grid, c);
  CsvTable csv({"r", "v0", "psi_inf", "argmax"});
  for (std::size_t i = 1; i < prof.r.size(); ++i)
    csv.add_row({prof.r[i], prof.v0[i], prof.psi_inf[i], prof.argmax[i]});
  csv.write(out.path("dp_profile.csv"));

  const DistanceTable table =
      starts == "all" ? prof.table : compute_d(src, c, grid, StartSet::equilibria);
  CsvTable dcsv({"start", "r", "d"});
  for (std::size_t k = 0; k < table.starts.size(); ++k)
    for (std::size_t i = 1; i < table.size(); ++i)
      dcsv.add_row({table.r[table.starts[k]], table.r[i], table.at(i, k)});
  dcsv.write(out.path("dp_distance.csv"));

  std::vector<double> x(prof.r.begin() + 1, prof.r.end()), y(prof.psi_inf.begin() + 1, prof.psi_inf.end());
  emit_line_plot(out.path("dp_profile.svg"), {{"psi_inf", x, y}}, {"psi_inf", "r", "psi"});
  json eq = json::array();
  for (std::size_t s : table.equilibrium_nodes) eq.push_back(table.r[s]);
  return {{"c", c}, {"starts", starts}, {"equilibrium_nodes", eq},
          {"psi_inf_at_r_max", num(prof.psi_inf.back())}};
}

std::vector<LevelCurve> curves_at(const LevelSetField2D& u, const std::vector<double>& levels,
                                  const CellMask& mask = {}) {
  std::vector<LevelCurve> all;
  for (double b : levels)
    for (auto& c : extract_level_curves(u, b, mask)) all.push_back(std::move(c));
  return all;
}

void write_curves(const std::vector<LevelCurve>& curves, const std::string& path) {
  CsvTable csv({"level", "curve", "closed", "x", "y"});
  for (std::size_t k = 0; k < curves.size(); ++k)
    for (const Point2& p : curves[k].points)
      csv.add_row({curves[k].level, static_cast<double>(k), curves[k].closed ? 1.0 : 0.0, p.x, p.y});
  csv.write(path);
}

void write_field(const LevelSetField2D& u, const std::string& path) {
  CsvTable csv({"x", "y", "u"});
  const Grid2D& g = u.grid;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) csv.add_row({g.coord(i), g.coord(j), u.at(i, j)});
  csv.write(path);
}

json levelset2d(const RunConfig& cfg, Output& out) {
  const SourceModel src = make_planar_source(cfg.source);
  const Grid2D g = Grid2D::make(cfg.grid.L, cfg.grid.dx);
  const double r0 = option(cfg, "initial_radius", 0.0);
  const auto u0 = LevelSetField2D::from_function(g, [r0](Point2 x) { return r0 > 0.0 ? r0 - x.norm() : 0.0; });
  Evolve2DOptions eo;
  eo.epsilon = cfg.epsilon;
  const LevelSetField2D u = evolve2d(u0, cfg.T, src, eo);
  write_field(u, out.path("levelset2d.csv"));
  const auto levels = option_list(cfg, "levels", r0 > 0.0 ? std::vector<double>{0.0} : std::vector<double>{});
  const auto curves = curves_at(u, levels);
  write_curves(curves, out.path("levelset2d_curves.csv"));
  emit_heat_map(out.path("levelset2d.svg"), u, curves, {"u(x, T)", "x1", "x2"});
  const auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
  json j = {{"epsilon", u.epsilon}, {"min_u", *lo}, {"max_u", *hi}, {"curves", curves.size()}};
  if (r0 > 0.0) {
    json radii = json::array();
    for (const auto& c : curves)
      if (c.level == 0.0 && c.points.size() >= 8) radii.push_back(circle_fit(c.points).radius);
    j["zero_level_radii"] = radii;
    j["ode_radius"] = radial_front_radius(r0, cfg.T);
  }
  if (cfg.source.preset == "stadium") {
    const double c = asymptotic_speed(src).c;
    j["flatness_on_U"] = flatness_on_U(u, stadium_of(cfg.source), c);
  }
  return j;
}

json stadium(const RunConfig& cfg, Output& out) {
  if (cfg.source.preset != "stadium") throw ConfigError("config: stadium needs source.preset = stadium");
  const StadiumSpec spec = stadium_of(cfg.source);
  const double dx = cfg.grid.dx;
  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : dx * dx;
  const Grid2D g = Grid2D::make(cfg.grid.L, dx);
  const auto v = explicit_solution_field(g, spec);
  const auto v3 = explicit_solution_field(g, spec, [](double s) { return s * s * s; });

  std::vector<double> levels, cubes;
  for (int k = 1; k <= 9; ++k) {
    levels.push_back(-0.1 * k);
    cubes.push_back(std::pow(-0.1 * k, 3));
  }
  const double m = 2.0 * dx;
  const CellMask mask = [&](Point2 x) {
    return x.x > m && std::abs(x.y) <= 1.0 - m && spec.contains(x, m);
  };
  const auto curves = curves_at(v, levels, mask);
  write_curves(curves, out.path("stadium_level_curves.csv"));
  CsvTable fits({"level", "center_x", "center_y", "radius", "rms"});
  double worst = 0.0;
  for (const auto& c : curves) {
    const CircleFit f = circle_fit(c.points);
    fits.add_row({c.level, f.center.x, f.center.y, f.radius, f.rms});
    worst = std::max(worst, std::abs(f.radius - 1.0));
  }
  fits.write(out.path("stadium_circle_fits.csv"));
  emit_heat_map(out.path("stadium.svg"), v, curves, {"explicit stadium solution", "x1", "x2"});

  const FoliationReport self = foliation_check(v, v, spec, levels);
  const FoliationReport cube = foliation_check(v3, v, spec, cubes);

  const SourceModel src = make_source(cfg.source);
  const double c = asymptotic_speed(src).c;
  Evolve2DOptions eo;
  eo.epsilon = cfg.epsilon;
  const LevelSetField2D u = evolve2d(LevelSetField2D::from_function(g, [](Point2) { return 0.0; }),
                                     cfg.T, src, eo);
  emit_heat_map(out.path("stadium_flatness.svg"), u, {}, {"u(x, T) from u0 = 0", "x1", "x2"});
  return {{"a", spec.a},
          {"epsilon", eps},
          {"residual_v", residual_on_U(v, spec, eps)},
          {"residual_theta_v", residual_on_U(v3, spec, eps)},
          {"residual_bound", 10.0 * (dx + eps)},
          {"level_curves", curves.size()},
          {"max_radius_error", worst},
          {"foliation_self", self.max_distance},
          {"foliation_cube", cube.max_distance},
          {"foliation_ok", self.ok() && cube.ok()},
          {"flatness_on_U", flatness_on_U(u, spec, c)}};
}

json verify(const RunConfig& cfg, const RunOptions& opt, Output& out, json& summary) {
  AcceptanceOptions ao;
  ao.resolution = opt.resolution;
  ao.seed = cfg.seed;
  const auto results = run_acceptance(ao, opt.on_criterion);
  json criteria = json::array();
  CsvTable csv({"id", "name", "passed", "known_failure"});
  bool all = true;
  int failed = 0;
  for (const auto& r : results) {
    criteria.push_back(to_json(r));
    csv.add_row({std::to_string(r.id), r.name, r.passed() ? "1" : "0", r.known_failure ? "1" : "0"});
    all = all && r.passed();
    failed += r.passed() ? 0 : 1;
  }
  csv.write(out.path("acceptance.csv"));
  summary["criteria"] = criteria;
  summary["passed"] = all;
  return {{"criteria_total", results.size()}, {"criteria_failed", failed}};
}

}  // namespace

json run_experiment(const RunConfig& cfg, const RunOptions& opt) {
  Output out;
  out.dir = opt.out_dir.empty() ? cfg.output_dir : opt.out_dir;
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec) throw IoError("cannot create " + out.dir.string() + ": " + ec.message());

  json summary = {{"experiment", cfg.experiment}, {"resolution", to_string(opt.resolution)},
                  {"config", cfg.to_json()}};
  json metrics;
  const std::string& e = cfg.experiment;
  if (e == "radial-evolve") metrics = radial_evolve(cfg, out);
  else if (e == "ergodic-profile") metrics = ergodic_profile(cfg, out);
  else if (e == "dp-profile") metrics = dp_profile(cfg, out);
  else if (e == "levelset2d") metrics = levelset2d(cfg, out);
  else if (e == "stadium") metrics = stadium(cfg, out);
  else if (e == "verify") metrics = verify(cfg, opt, out, summary);
  else throw ConfigError("config: unknown experiment " + e);

  out.artifacts.push_back("summary.json");
  summary["metrics"] = metrics;
  summary["artifacts"] = out.artifacts;
  write_text((out.dir / "summary.json").string(), summary.dump(2) + "\n");
  return summary;
}

}  // namespace curveflow
