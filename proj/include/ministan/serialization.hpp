#pragma once

// JSON and CSV forms of the library's data types.

#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "ministan/inference.hpp"
#include "ministan/interpreter.hpp"
#include "ministan/interventions.hpp"
#include "ministan/prior.hpp"

namespace ministan {

using Json = nlohmann::ordered_json;

/// {"kind": "do"|"shift"|"variance_scale"|"compose", ...}. variance_scale
/// accepts either "factor" or "divisor" (the std divisor, 1 / factor).
Json intervention_to_json(const Intervention& i);
Intervention intervention_from_json(const Json& j);

Json theta_to_json(const GlobalTheta& t);
GlobalTheta theta_from_json(const Json& j);

/// Flat object of variable -> value in program order.
Json trace_to_json(const Trace& t);
Env env_from_json(const Json& j);

/// {"condition", "intervention", "observed", "records"}.
Json condition_to_json(const ConditionSpec& c);
ConditionSpec condition_from_json(const Json& j);
Json dataset_to_json(const std::vector<ConditionSpec>& conds);
std::vector<ConditionSpec> dataset_from_json(const Json& j);

Json smc_config_to_json(const SMCConfig& cfg);
/// Missing keys keep the values already in `base`.
SMCConfig smc_config_from_json(const Json& j, SMCConfig base = {});

Json posterior_summary_to_json(const PosteriorSummary& s);
Json oracle_summary_to_json(const OracleSummary& s);

/// Columns: particle_id, weight, mu_s, sigma_s, sigma_b, lambda_so,
/// lambda_bo, edge.
void write_posterior_csv(std::ostream& out,
                         const std::vector<ParticleState>& particles);
/// Long format: sample_id, lambda_bo, weight (edge = true particles only).
void write_lambda_bo_csv(std::ostream& out, const PosteriorSummary& s);

/// NaN and infinities become null.
Json number_or_null(double x);

}  // namespace ministan
