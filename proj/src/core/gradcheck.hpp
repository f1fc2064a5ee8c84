#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mmt {

// Repo-wide gradient contract: every analytic gradient must match central
// finite differences at this step within this relative error.
inline constexpr double kGradCheckStep = 1e-4;
inline constexpr double kGradCheckTolerance = 1e-3;

struct GradCheckEntry {
  std::string op;
  std::size_t checked = 0;  // number of coordinates compared
  double max_rel_err = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  bool pass = false;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  bool all_pass = false;
};

std::vector<std::string> gradcheck_scopes();

// Runs every registered gradient check in `scope` ("all" or a module
// prefix) on fixed small instances derived from `seed`. `corrupt_op`
// deliberately perturbs that op's analytic gradient; it exists so tests
// can prove the harness catches a wrong gradient.
GradCheckReport run_gradcheck(const std::string& scope, std::uint64_t seed,
                              const std::string& corrupt_op = "");

std::string format_gradcheck_report(const GradCheckReport& report);

}  // namespace mmt
