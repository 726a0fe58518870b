#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "brokenpde/solver.hpp"

namespace brokenpde {

struct CriterionResult {
  std::string id;     ///< "AC-1" .. "AC-9"
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  std::string summary;     ///< one line with the measured quantities
  nlohmann::json details;  ///< every measured number, for report.json
};

/// A converged (or not) solve shared between criteria.
struct SolveRun {
  BrokenProblem problem;
  SolveReport report;
  double seconds = 0.0;
};

/// Runs the acceptance experiments. Solves are cached by name so criteria
/// that reuse another criterion's runs (sign measures, transform bounds,
/// nodal length) do not repeat them.
class AcceptanceSuite {
public:
  explicit AcceptanceSuite(std::uint64_t seed = 42);

  static const std::vector<std::string>& all_ids();
  /// "all", "constant-coeff" (AC-1..AC-3), "frequency", "nodal",
  /// "transforms" or a single id such as "AC-4". InvalidArgument otherwise.
  static std::vector<std::string> ids_for(const std::string& suite);

  CriterionResult run(const std::string& id);

  /// Cached picard_solve of p under `name`.
  const SolveRun& solve(const std::string& name, const BrokenProblem& p);

private:
  CriterionResult ac1();
  CriterionResult ac2();
  CriterionResult ac3();
  CriterionResult ac4();
  CriterionResult ac5();
  CriterionResult ac6();
  CriterionResult ac7();
  CriterionResult ac8();
  CriterionResult ac9();

  std::uint64_t seed_;
  std::map<std::string, std::unique_ptr<SolveRun>> runs_;
};

/// JSON document listing every result and the overall verdict.
nlohmann::json suite_report(const std::vector<CriterionResult>& results);

}  // namespace brokenpde
