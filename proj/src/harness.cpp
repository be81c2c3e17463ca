#include "ministan/harness.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ministan/error.hpp"

namespace ministan {

namespace {

constexpr std::uint64_t kDataTag = 11;

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorKind::InvalidConfig, "", what);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, path.string(), "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::Io, path.string(), "cannot write " + path.string());
}

std::vector<std::string> string_list(const Json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) bad(std::string(what) + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

void ExperimentPlan::validate() const {
  if (!in_support(theta_true)) bad("theta_true lies outside the prior's support");
  smc.validate();
  std::set<std::string> names;
  for (const auto& c : conditions) {
    if (c.name.empty()) bad("condition names must be nonempty");
    if (!names.insert(c.name).second) bad("duplicate condition '" + c.name + "'");
    if (c.n == 0) bad("condition '" + c.name + "' must have N > 0");
    ConditionSpec spec{c.name, c.intervention, observed_vars, {}};
    validate_conditions({spec});
  }
  std::set<std::string> previous;
  for (const auto& entry : evidence_ladder) {
    std::set<std::string> current(entry.begin(), entry.end());
    if (current.size() != entry.size()) bad("ladder entry lists a condition twice");
    for (const auto& n : entry) {
      if (!names.count(n)) bad("ladder names unknown condition '" + n + "'");
    }
    if (!std::includes(current.begin(), current.end(), previous.begin(), previous.end())) {
      bad("evidence ladder entries must nest");
    }
    previous = std::move(current);
  }
}

ExperimentPlan default_plan() {
  ExperimentPlan plan;
  plan.theta_true = GlobalTheta{-0.013, 0.776, 0.646, 0.734, 0.717, true};
  plan.conditions = {
      {"observational", std::nullopt, 10},
      {"belief_pill", make_do("b", 5.0), 10},
      {"encouragement", make_shift("b", 3.0), 10},
      {"assessment",
       compose(make_shift("s", 2.0), make_variance_scale("b", 1.0 / 100.0)), 10},
  };
  plan.observed_vars = {"b", "o"};
  plan.evidence_ladder = {
      {"observational"},
      {"observational", "belief_pill"},
      {"observational", "belief_pill", "encouragement"},
      {"observational", "belief_pill", "encouragement", "assessment"},
  };
  plan.smc.n_particles = 2000;
  plan.smc.ess_threshold = 0.5;
  plan.smc.rejuvenation_sweeps = 5;
  plan.smc.seed = 0;
  return plan;
}

Json plan_to_json(const ExperimentPlan& plan) {
  Json conds = Json::array();
  for (const auto& c : plan.conditions) {
    conds.push_back({{"name", c.name},
                     {"intervention", c.intervention
                                          ? intervention_to_json(*c.intervention)
                                          : Json(nullptr)},
                     {"n", c.n}});
  }
  return {{"theta_true", theta_to_json(plan.theta_true)},
          {"conditions", std::move(conds)},
          {"observed_vars", plan.observed_vars},
          {"evidence_ladder", plan.evidence_ladder},
          {"smc", smc_config_to_json(plan.smc)}};
}

ExperimentPlan plan_from_json(const Json& j) {
  if (!j.is_object()) bad("plan must be a JSON object");
  ExperimentPlan plan = default_plan();
  if (j.contains("theta_true")) plan.theta_true = theta_from_json(j.at("theta_true"));
  if (j.contains("conditions")) {
    const Json& arr = j.at("conditions");
    if (!arr.is_array()) bad("'conditions' must be an array");
    plan.conditions.clear();
    for (const auto& c : arr) {
      PlanCondition pc;
      if (!c.is_object() || !c.contains("name") || !c.at("name").is_string()) {
        bad("each condition needs a string 'name'");
      }
      pc.name = c.at("name").get<std::string>();
      if (c.contains("intervention") && !c.at("intervention").is_null()) {
        pc.intervention = intervention_from_json(c.at("intervention"));
      }
      if (c.contains("n")) {
        if (!c.at("n").is_number_integer() || c.at("n").get<long long>() <= 0) {
          bad("condition 'n' must be a positive integer");
        }
        pc.n = c.at("n").get<std::size_t>();
      }
      plan.conditions.push_back(std::move(pc));
    }
  }
  if (j.contains("observed_vars")) {
    plan.observed_vars = string_list(j.at("observed_vars"), "'observed_vars'");
  }
  if (j.contains("evidence_ladder")) {
    const Json& ladder = j.at("evidence_ladder");
    if (!ladder.is_array()) bad("'evidence_ladder' must be an array");
    plan.evidence_ladder.clear();
    for (const auto& e : ladder) {
      plan.evidence_ladder.push_back(string_list(e, "ladder entries"));
    }
  }
  if (j.contains("smc")) plan.smc = smc_config_from_json(j.at("smc"), plan.smc);
  plan.validate();
  return plan;
}

std::vector<ConditionSpec> generate_data(const ExperimentPlan& plan,
                                         std::uint64_t seed) {
  plan.validate();
  std::vector<ConditionSpec> out;
  for (std::size_t ci = 0; ci < plan.conditions.size(); ++ci) {
    const PlanCondition& pc = plan.conditions[ci];
    ConditionSpec spec{pc.name, pc.intervention, plan.observed_vars, {}};
    Program p = condition_program(plan.theta_true, spec);
    for (std::size_t r = 0; r < pc.n; ++r) {
      Rng rng = make_rng(seed, {kDataTag, ci, r});
      Trace t = simulate(p, rng);
      Observation rec;
      for (const auto& v : plan.observed_vars) rec[v] = t.at(v);
      spec.records.push_back(std::move(rec));
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::string ladder_entry_name(const std::vector<std::string>& conditions) {
  if (conditions.empty()) return "prior";
  std::string out;
  for (const auto& c : conditions) {
    if (!out.empty()) out += '+';
    out += c;
  }
  return out;
}

LadderReport run_ladder(const ExperimentPlan& plan,
                        const std::vector<ConditionSpec>& data,
                        const std::optional<std::filesystem::path>& out_dir) {
  plan.validate();
  if (out_dir) std::filesystem::create_directories(*out_dir);
  LadderReport report;
  for (std::size_t e = 0; e < plan.evidence_ladder.size(); ++e) {
    const auto& members = plan.evidence_ladder[e];
    std::vector<ConditionSpec> conds;
    std::vector<std::string> ordered;
    // plan order, not ladder-entry order
    for (const auto& pc : plan.conditions) {
      if (std::find(members.begin(), members.end(), pc.name) == members.end()) continue;
      auto it = std::find_if(data.begin(), data.end(),
                             [&](const ConditionSpec& c) { return c.name == pc.name; });
      if (it == data.end()) bad("no data for condition '" + pc.name + "'");
      conds.push_back(*it);
      ordered.push_back(pc.name);
    }

    LadderEntryReport entry;
    entry.name = ladder_entry_name(ordered);
    entry.conditions = ordered;
    for (const auto& c : conds) entry.n_records += c.records.size();

    SMCConfig cfg = plan.smc;
    cfg.seed = derive_seed(plan.smc.seed, {e});
    std::vector<ParticleState> particles;
    try {
      SmcSampler sampler(conds, cfg);
      sampler.run();
      particles = sampler.particles();
      entry.stats = sampler.stats();
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::DegenerateWeights) throw;
      throw Error(ErrorKind::DegenerateWeights, entry.name,
                  "ladder entry '" + entry.name + "': " + err.what());
    }
    entry.summary = posterior_summary(particles);

    if (out_dir) {
      std::ostringstream posterior, lambda;
      write_posterior_csv(posterior, particles);
      write_lambda_bo_csv(lambda, entry.summary);
      write_file(*out_dir / ("posterior_" + entry.name + ".csv"), posterior.str());
      write_file(*out_dir / ("lambda_bo_" + entry.name + ".csv"), lambda.str());
    }
    report.entries.push_back(std::move(entry));
  }
  if (out_dir) {
    write_file(*out_dir / "summary.json", ladder_report_to_json(report).dump(2) + "\n");
  }
  return report;
}

LadderReport replicate(ExperimentPlan plan, std::uint64_t seed,
                       const std::filesystem::path& out_dir) {
  plan.smc.seed = seed;
  plan.validate();
  std::filesystem::create_directories(out_dir);
  auto data = generate_data(plan, seed);
  write_file(out_dir / "plan.json", plan_to_json(plan).dump(2) + "\n");
  write_file(out_dir / "data.json", dataset_to_json(data).dump(2) + "\n");
  return run_ladder(plan, data, out_dir);
}

Json ladder_report_to_json(const LadderReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    const auto& s = e.summary;
    entries.push_back(
        {{"entry", e.name},
         {"conditions", e.conditions},
         {"n_records", e.n_records},
         {"p_edge", s.p_edge},
         {"lambda_bo_mean", number_or_null(s.lambda_bo_mean)},
         {"lambda_bo_sd", number_or_null(s.lambda_bo_sd)},
         {"edge_posterior_empty", s.edge_posterior_empty},
         {"theta_means", posterior_summary_to_json(s).at("theta_means")},
         {"resamples", e.stats.resamples},
         {"acceptance",
          {{"theta", e.stats.theta_moves.rate()},
           {"edge_flip", e.stats.edge_flips.rate()},
           {"latent", e.stats.latent_moves.rate()}}}});
  }
  return {{"entries", std::move(entries)}};
}

}  // namespace ministan
