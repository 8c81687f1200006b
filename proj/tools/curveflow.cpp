// Command line front end: one subcommand per experiment.
//
//   curveflow <subcommand> --config PATH [--out DIR] [--threads N] [--resolution coarse|fine]
//
// Exit codes: 0 ok, 1 config or I/O error, 2 numeric failure, 3 acceptance failure.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "curveflow/experiments.hpp"
#include "curveflow/io.hpp"
#include "curveflow/parallel.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericError = 2;
constexpr int kAcceptanceFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curveflow: level-set curvature flow with source, radial and 2D solvers"};
  app.require_subcommand(1);

  std::string config_path, out_dir, resolution = "fine";
  int threads = 0;
  const char* names[] = {"radial-evolve", "ergodic-profile", "dp-profile",
                         "levelset2d",    "stadium",         "verify"};
  const char* help[] = {"evolve the radial equation; CSV t, r, phi, phi_minus_ct",
                        "explicit ergodic profile psi with its A/B/C tags",
                        "reachability table d(r, s), v0 and psi_inf",
                        "2D level-set evolution with a heat map",
                        "explicit stadium solutions, level curves and flatness",
                        "run the acceptance suite"};
  for (int k = 0; k < 6; ++k) {
    CLI::App* sub = app.add_subcommand(names[k], help[k]);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--threads", threads, "worker threads (default: CURVEFLOW_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--resolution", resolution, "acceptance resolution")
        ->check(CLI::IsMember({"coarse", "fine"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  if (threads <= 0) threads = curveflow::thread_count_from_env();
  curveflow::set_thread_count(threads > 0 ? threads : 1);

  try {
    curveflow::RunConfig cfg = curveflow::load_config(config_path);
    cfg.experiment = cmd;  // the subcommand decides what runs
    curveflow::RunOptions opt;
    opt.out_dir = out_dir;
    opt.resolution = curveflow::parse_resolution(resolution);
    if (cmd == "verify")
      opt.on_criterion = [](const curveflow::CriterionResult& r) {
        std::cout << curveflow::format_line(r) << std::endl;
      };
    const nlohmann::json summary = curveflow::run_experiment(cfg, opt);
    std::cout << "wrote " << (out_dir.empty() ? cfg.output_dir : out_dir) << "/summary.json\n";
    if (cmd == "verify" && !summary.value("passed", false)) {
      std::cerr << "acceptance: at least one criterion failed\n";
      return kAcceptanceFailure;
    }
    return 0;
  } catch (const curveflow::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const curveflow::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const curveflow::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  }
}
