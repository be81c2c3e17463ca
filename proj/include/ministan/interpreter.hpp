#pragma once

// Forward simulation and scoring of MiniStan programs.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ministan/dsl.hpp"
#include "ministan/random.hpp"

namespace ministan {

using Env = std::map<std::string, double>;
using Observation = Env;

struct Trace {
  /// Program order.
  std::vector<std::pair<std::string, double>> bindings;
  /// One entry per Sample statement.
  std::map<std::string, double> logp_by_var;

  double total_log_density() const;
  /// Throws MissingVariable.
  double at(const std::string& name) const;
  Env as_env() const;
};

double eval_expr(const Expr& e, const Env& env);

Trace simulate(const Program& p, Rng& rng);

double log_density(const Program& p, const Env& full);

double log_joint_with_latents(const Program& p, const Observation& obs,
                              const Env& latents);

/// Likelihood weighting: runs the program in order, clamping observed
/// Sample variables to their observed values and drawing the rest.
/// `log_weight` is the summed log density of the clamped Sample statements.
/// Observed values for Assign variables are ignored.
struct WeightedTrace {
  Trace trace;
  double log_weight = 0.0;
};
WeightedTrace simulate_conditioned(const Program& p, const Observation& obs,
                                   Rng& rng);

/// Sample-defined variables of `p`, in program order.
std::vector<std::string> sample_vars(const Program& p);

// Closed-form log densities. Out-of-support values give -inf.
double normal_logpdf(double x, double mean, double std);
double uniform_logpdf(double x, double lo, double hi);
double bernoulli_logpmf(double x, double prob);

}  // namespace ministan
