#pragma once

// Program-generating prior over the two candidate causal models
// (skill -> belief -> outcome with or without the belief -> outcome edge).

#include <array>
#include <string>

#include "ministan/dsl.hpp"
#include "ministan/random.hpp"

namespace ministan {

struct GlobalTheta {
  double mu_s = 0.0;
  double sigma_s = 0.5;
  double sigma_b = 0.5;
  double lambda_so = 0.5;
  /// Present even when edge is false; it is simply unused by the program.
  double lambda_bo = 0.5;
  bool edge = false;

  friend bool operator==(const GlobalTheta&, const GlobalTheta&) = default;
};

/// Names of the continuous parameters, in GlobalTheta field order. These
/// are also the free variables of the symbolic template.
inline const std::array<std::string, 5> kThetaParameterNames = {
    "mu_s", "sigma_s", "sigma_b", "lambda_so", "lambda_bo"};

std::array<double, 5> continuous_values(const GlobalTheta& theta);
double& continuous_component(GlobalTheta& theta, std::size_t index);

/// mu_s ~ Normal(0, 1); sigma_s, sigma_b, lambda_so, lambda_bo ~ Uniform(0, 1)
/// (zero sigmas redrawn); edge ~ Bernoulli(0.5).
GlobalTheta sample_theta(Rng& rng);

double log_prior(const GlobalTheta& theta);

bool in_support(const GlobalTheta& theta);

/// The observational causal program with theta's values baked in as
/// literals.
Program render_program(const GlobalTheta& theta);

/// The same program with the continuous parameters left symbolic
/// (mu_s, sigma_s, ...). Substituting theta's values for those names gives
/// render_program(theta).
Program render_template(bool edge);

}  // namespace ministan
