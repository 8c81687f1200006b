#pragma once

#include <string>

#include "json.hpp"

#include "curveflow/acceptance.hpp"
#include "curveflow/config.hpp"

namespace curveflow {

struct RunOptions {
  std::string out_dir;  // empty: cfg.output_dir
  Resolution resolution = Resolution::fine;
  CriterionObserver on_criterion;  // verify only
};

/// Runs cfg.experiment, writes its CSV/SVG artifacts and summary.json into
/// the output directory and returns the summary. For verify the summary
/// carries "passed".
nlohmann::json run_experiment(const RunConfig& cfg, const RunOptions& opt = {});

}  // namespace curveflow
