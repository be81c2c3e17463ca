#include "ministan/serialization.hpp"

#include <cmath>
#include <ostream>

#include "ministan/error.hpp"

namespace ministan {

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorKind::InvalidConfig, "", what);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    bad(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) bad(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string identifier(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string() || !is_identifier(v.get<std::string>())) {
    bad(std::string("field '") + key + "' must be an identifier");
  }
  return v.get<std::string>();
}

}  // namespace

Json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json intervention_to_json(const Intervention& i) {
  return std::visit(
      [](const auto& op) -> Json {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, intervention::Do>) {
          return {{"kind", "do"}, {"var", op.var}, {"value", op.value}};
        } else if constexpr (std::is_same_v<T, intervention::Shift>) {
          return {{"kind", "shift"}, {"var", op.var}, {"delta", op.delta}};
        } else if constexpr (std::is_same_v<T, intervention::VarianceScale>) {
          return {{"kind", "variance_scale"}, {"var", op.var}, {"factor", op.factor}};
        } else {
          return {{"kind", "compose"},
                  {"first", intervention_to_json(*op.first)},
                  {"then", intervention_to_json(*op.then)}};
        }
      },
      i.op);
}

Intervention intervention_from_json(const Json& j) {
  const Json& kind_json = field(j, "kind");
  if (!kind_json.is_string()) bad("intervention 'kind' must be a string");
  std::string kind = kind_json.get<std::string>();
  if (kind == "do") return make_do(identifier(j, "var"), number(j, "value"));
  if (kind == "shift") return make_shift(identifier(j, "var"), number(j, "delta"));
  if (kind == "variance_scale") {
    bool has_factor = j.contains("factor"), has_divisor = j.contains("divisor");
    if (has_factor == has_divisor) {
      bad("variance_scale needs exactly one of 'factor' or 'divisor'");
    }
    double factor = has_factor ? number(j, "factor") : 1.0 / number(j, "divisor");
    return make_variance_scale(identifier(j, "var"), factor);
  }
  if (kind == "compose") {
    return compose(intervention_from_json(field(j, "first")),
                   intervention_from_json(field(j, "then")));
  }
  bad("unknown intervention kind '" + kind + "'");
}

Json theta_to_json(const GlobalTheta& t) {
  return {{"mu_s", t.mu_s},           {"sigma_s", t.sigma_s},
          {"sigma_b", t.sigma_b},     {"lambda_so", t.lambda_so},
          {"lambda_bo", t.lambda_bo}, {"edge", t.edge}};
}

GlobalTheta theta_from_json(const Json& j) {
  GlobalTheta t;
  t.mu_s = number(j, "mu_s");
  t.sigma_s = number(j, "sigma_s");
  t.sigma_b = number(j, "sigma_b");
  t.lambda_so = number(j, "lambda_so");
  t.lambda_bo = number(j, "lambda_bo");
  const Json& e = field(j, "edge");
  if (!e.is_boolean()) bad("field 'edge' must be a boolean");
  t.edge = e.get<bool>();
  if (!in_support(t)) bad("theta lies outside the prior's support");
  return t;
}

Json trace_to_json(const Trace& t) {
  Json out = Json::object();
  for (const auto& [k, v] : t.bindings) out[k] = v;
  return out;
}

Env env_from_json(const Json& j) {
  if (!j.is_object()) bad("expected a JSON object of variable -> number");
  Env env;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) bad("value of '" + k + "' must be a number");
    env[k] = v.get<double>();
  }
  return env;
}

Json condition_to_json(const ConditionSpec& c) {
  Json records = Json::array();
  for (const auto& r : c.records) {
    Json rec = Json::object();
    for (const auto& v : c.observed_vars) rec[v] = r.at(v);
    records.push_back(std::move(rec));
  }
  return {{"condition", c.name},
          {"intervention", c.intervention ? intervention_to_json(*c.intervention)
                                          : Json(nullptr)},
          {"observed", c.observed_vars},
          {"records", std::move(records)}};
}

ConditionSpec condition_from_json(const Json& j) {
  ConditionSpec c;
  const Json& name = field(j, "condition");
  if (!name.is_string()) bad("'condition' must be a string");
  c.name = name.get<std::string>();
  if (j.contains("intervention") && !j.at("intervention").is_null()) {
    c.intervention = intervention_from_json(j.at("intervention"));
  }
  const Json& observed = field(j, "observed");
  if (!observed.is_array()) bad("'observed' must be an array");
  for (const auto& v : observed) {
    if (!v.is_string()) bad("'observed' entries must be strings");
    c.observed_vars.push_back(v.get<std::string>());
  }
  const Json& records = field(j, "records");
  if (!records.is_array()) bad("'records' must be an array");
  for (const auto& r : records) c.records.push_back(env_from_json(r));
  return c;
}

Json dataset_to_json(const std::vector<ConditionSpec>& conds) {
  Json out = Json::array();
  for (const auto& c : conds) out.push_back(condition_to_json(c));
  return out;
}

std::vector<ConditionSpec> dataset_from_json(const Json& j) {
  if (!j.is_array()) bad("dataset must be a JSON array of conditions");
  std::vector<ConditionSpec> out;
  for (const auto& c : j) out.push_back(condition_from_json(c));
  return out;
}

Json smc_config_to_json(const SMCConfig& cfg) {
  Json steps = Json::object();
  for (const auto& [k, v] : cfg.rw_step_sizes) steps[k] = v;
  return {{"n_particles", cfg.n_particles},
          {"ess_threshold", cfg.ess_threshold},
          {"rejuvenation_sweeps", cfg.rejuvenation_sweeps},
          {"rw_step_sizes", std::move(steps)},
          {"seed", cfg.seed}};
}

SMCConfig smc_config_from_json(const Json& j, SMCConfig cfg) {
  if (!j.is_object()) bad("smc config must be an object");
  auto count = [&](const char* key) {
    const Json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      bad(std::string("field '") + key + "' must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  };
  if (j.contains("n_particles")) cfg.n_particles = count("n_particles");
  if (j.contains("ess_threshold")) cfg.ess_threshold = number(j, "ess_threshold");
  if (j.contains("rejuvenation_sweeps")) {
    cfg.rejuvenation_sweeps = count("rejuvenation_sweeps");
  }
  if (j.contains("seed")) cfg.seed = count("seed");
  if (j.contains("rw_step_sizes")) {
    for (const auto& [k, v] : env_from_json(j.at("rw_step_sizes"))) {
      cfg.rw_step_sizes[k] = v;
    }
  }
  cfg.validate();
  return cfg;
}

Json posterior_summary_to_json(const PosteriorSummary& s) {
  Json means = Json::object();
  for (const auto& [k, v] : s.theta_means) means[k] = v;
  return {{"p_edge", s.p_edge},
          {"lambda_bo_mean", number_or_null(s.lambda_bo_mean)},
          {"lambda_bo_sd", number_or_null(s.lambda_bo_sd)},
          {"edge_posterior_empty", s.edge_posterior_empty},
          {"theta_means", std::move(means)}};
}

Json oracle_summary_to_json(const OracleSummary& s) {
  return {{"p_edge", s.p_edge},
          {"lambda_bo_mean", s.lambda_bo_mean},
          {"lambda_bo_mean_given_edge", number_or_null(s.lambda_bo_mean_given_edge)},
          {"log_marginal_likelihood", s.log_marginal_likelihood},
          {"ess", s.ess}};
}

void write_posterior_csv(std::ostream& out,
                         const std::vector<ParticleState>& particles) {
  out << "particle_id,weight,mu_s,sigma_s,sigma_b,lambda_so,lambda_bo,edge\n";
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const auto& p = particles[i];
    const auto& t = p.theta;
    out << i << ',' << format_number(std::exp(p.log_weight)) << ','
        << format_number(t.mu_s) << ',' << format_number(t.sigma_s) << ','
        << format_number(t.sigma_b) << ',' << format_number(t.lambda_so) << ','
        << format_number(t.lambda_bo) << ',' << (t.edge ? 1 : 0) << '\n';
  }
}

void write_lambda_bo_csv(std::ostream& out, const PosteriorSummary& s) {
  out << "sample_id,lambda_bo,weight\n";
  for (std::size_t i = 0; i < s.lambda_bo_weighted_samples.size(); ++i) {
    const auto& [v, w] = s.lambda_bo_weighted_samples[i];
    out << i << ',' << format_number(v) << ',' << format_number(w) << '\n';
  }
}

}  // namespace ministan
