#pragma once

// End-to-end experiment driver: synthesize data for the observational and
// interventional conditions from a known theta, then run inference under a
// ladder of nested evidence sets.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ministan/inference.hpp"
#include "ministan/serialization.hpp"

namespace ministan {

struct PlanCondition {
  std::string name;
  std::optional<Intervention> intervention;
  std::size_t n = 10;
};

struct ExperimentPlan {
  GlobalTheta theta_true;
  std::vector<PlanCondition> conditions;
  std::vector<std::string> observed_vars;
  /// Each entry is a set of condition names; entries must nest.
  std::vector<std::vector<std::string>> evidence_ladder;
  SMCConfig smc;

  /// Throws InvalidConfig.
  void validate() const;
};

/// theta* = (-0.013, 0.776, 0.646, 0.734, 0.717, edge), ten records in each
/// of observational / belief_pill / encouragement / assessment, b and o
/// observed, and the four-step ladder adding one condition at a time.
ExperimentPlan default_plan();

Json plan_to_json(const ExperimentPlan& plan);
/// Keys absent from `j` keep their default_plan() values.
ExperimentPlan plan_from_json(const Json& j);

std::vector<ConditionSpec> generate_data(const ExperimentPlan& plan,
                                         std::uint64_t seed);

struct LadderEntryReport {
  std::string name;
  std::vector<std::string> conditions;
  std::size_t n_records = 0;
  PosteriorSummary summary;
  SmcStats stats;
};

struct LadderReport {
  std::vector<LadderEntryReport> entries;
};

/// "observational+belief_pill"; "prior" for the empty set.
std::string ladder_entry_name(const std::vector<std::string>& conditions);

/// Runs SMC for every ladder entry with seeds derived from plan.smc.seed.
/// When out_dir is set, writes summary.json plus posterior_<entry>.csv and
/// lambda_bo_<entry>.csv per entry. DegenerateWeights is rethrown with the
/// entry named.
LadderReport run_ladder(const ExperimentPlan& plan,
                        const std::vector<ConditionSpec>& data,
                        const std::optional<std::filesystem::path>& out_dir);

/// generate_data + run_ladder driven entirely by `seed`; also writes the
/// resolved plan.json and the dataset as data.json.
LadderReport replicate(ExperimentPlan plan, std::uint64_t seed,
                       const std::filesystem::path& out_dir);

Json ladder_report_to_json(const LadderReport& report);

}  // namespace ministan
