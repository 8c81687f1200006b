#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace curveflow {

enum class Resolution { coarse, fine };

Resolution parse_resolution(const std::string& s);
const char* to_string(Resolution r);

struct Measurement {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", "<", ">=", ">", "=="
  bool passed = false;
  bool timing = false;  // wall-clock budget; value left out of summaries
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Measurement> measurements;
  std::string detail;
  double seconds = 0.0;
  bool known_failure = false;  // documented as unattainable; still reported as FAIL

  bool passed() const;
};

struct AcceptanceOptions {
  Resolution resolution = Resolution::fine;
  std::uint64_t seed = 20240917;
  std::vector<int> only;  // empty: all criteria
};

using CriterionObserver = std::function<void(const CriterionResult&)>;

inline constexpr int kCriterionCount = 13;

CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const CriterionObserver& observer = {});

/// "[PASS] 3 profile uniqueness: sup_tent=0.0094 <= 0.05; ..." style line.
std::string format_line(const CriterionResult& r);

/// Summary entries; timing values are omitted so that summaries are
/// reproducible byte for byte.
nlohmann::json to_json(const CriterionResult& r);

/// Criteria whose pinned contract cannot be met by the implemented scheme.
bool is_known_failure(int id);

}  // namespace curveflow
