#pragma once

// Desk-scale acceptance suite. Each criterion returns one verdict plus the
// numbers behind it; the CLI and the acceptance test binary share this runner.

#include <functional>
#include <string>
#include <vector>

#include "dftrap/config.hpp"

namespace dftrap::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// "[PASS] 3 dynamics-floquet (12.1 s): detail"
std::string format_line(const CriterionResult& r);

CriterionResult stability_parameters(const config::RunConfig& cfg);   // 1
CriterionResult mathieu_boundary(const config::RunConfig& cfg);       // 2
CriterionResult dynamics_floquet(const config::RunConfig& cfg);       // 3
CriterionResult micromotion(const config::RunConfig& cfg);            // 4
CriterionResult equilibrium_case3(const config::RunConfig& cfg);      // 5
CriterionResult mode_table(const config::RunConfig& cfg);             // 6
CriterionResult cooling_temperatures(const config::RunConfig& cfg);   // 7
CriterionResult properties(const config::RunConfig& cfg);             // 8

inline constexpr int kCriterionCount = 8;

/// Runs the selected criteria (all when `only` is empty) in order. A criterion
/// that throws is reported as failed with the exception text. `on_result` is
/// called after each criterion, e.g. to stream lines.
std::vector<CriterionResult> run(const config::RunConfig& cfg, const std::vector<int>& only = {},
                                 const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace dftrap::acceptance
