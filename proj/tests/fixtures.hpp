#pragma once

// Golden program texts in their hand-written layout; comparisons go through
// the canonical printer.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ministan/dsl.hpp"

namespace fixtures {

inline const char* kEdgeTemplate =
    "s ~ normal(mu_s, sigma_s)\n"
    "b ~ normal(s, sigma_b)\n"
    "logit_o = s * lambda_so + b * lambda_bo\n"
    "o ~ bernoulli(1/(1+exp(-logit_o)))\n";

inline const char* kNoEdgeTemplate =
    "s ~ normal(mu_s, sigma_s)\n"
    "b ~ normal(s, sigma_b)\n"
    "logit_o = s * lambda_so\n"
    "o ~ bernoulli(1/(1+exp(-logit_o)))\n";

// belief pill
inline const char* kBeliefPillEdge =
    "s ~ normal(mu_s, sigma_s)\n"
    "b = 5\n"
    "logit_o = s * lambda_so + b * lambda_bo\n"
    "o ~ bernoulli(1/(1+exp(-logit_o)))\n";
inline const char* kBeliefPillNoEdge =
    "s ~ normal(mu_s, sigma_s)\n"
    "b = 5\n"
    "logit_o = s * lambda_so\n"
    "o ~ bernoulli(1/(1+exp(-logit_o)))\n";

// encouragement
inline const char* kEncouragementEdge =
    "s ~ normal(mu_s, sigma_s)\n"
    "b ~ normal(s + 3, sigma_b)\n"
    "logit_o = s * lambda_so + b * lambda_bo\n"
    "o ~ bernoulli(1/(1+exp(-logit_o)))\n";
inline const char* kEncouragementNoEdge =
    "s ~ normal(mu_s, sigma_s)\n"
    "b ~ normal(s + 3, sigma_b)\n"
    "logit_o = s * lambda_so\n"
    "o ~ bernoulli(1/(1+exp(-logit_o)))\n";

// assessment
inline const char* kAssessmentEdge =
    "s ~ normal(mu_s + 2, sigma_s)\n"
    "b ~ normal(s, sigma_b / 100)\n"
    "logit_o = s * lambda_so + b * lambda_bo\n"
    "o ~ bernoulli(1/(1+exp(-logit_o)))\n";
inline const char* kAssessmentNoEdge =
    "s ~ normal(mu_s + 2, sigma_s)\n"
    "b ~ normal(s, sigma_b / 100)\n"
    "logit_o = s * lambda_so\n"
    "o ~ bernoulli(1/(1+exp(-logit_o)))\n";

// Three draws from the program-generating prior.
inline const char* kPriorSample1 =
    "s ~ normal(0.237, 0.449)\n"
    "b ~ normal(s, 0.913)\n"
    "logit_o = s * 0.137 + b * 0.852\n"
    "o ~ bernoulli(1/(1 + exp(-logit_o)))\n";
inline const char* kPriorSample2 =
    "s ~ normal(-0.592, 0.302)\n"
    "b ~ normal(s, 0.724)\n"
    "logit_o = s * 0.503 + b * 0.491\n"
    "o ~ bernoulli(1/(1 + exp(-logit_o)))\n";
inline const char* kPriorSample3 =
    "s ~ normal(1.892, 0.108)\n"
    "b ~ normal(s, 0.301)\n"
    "logit_o = s * 0.542\n"
    "o ~ bernoulli(1/(1 + exp(-logit_o)))\n";

inline std::string canonical(const std::string& text) {
  return ministan::print_program(
      ministan::parse_program(text, {.allow_free_variables = true}));
}

inline std::string strip_whitespace(std::string s) {
  std::erase_if(s, [](char c) { return c == ' ' || c == '\t' || c == '\n'; });
  return s;
}

// Independent closed forms used as oracles.
inline double normal_logpdf_oracle(double x, double mu, double sd) {
  double density = std::exp(-(x - mu) * (x - mu) / (2 * sd * sd)) /
                   (sd * std::sqrt(2 * std::numbers::pi));
  return std::log(density);
}

// Random expression over `vars` (hand-rolled generator for round-trip
// properties). Literals include negatives, zero, tiny and huge magnitudes.
inline ministan::Expr random_expr(std::mt19937_64& rng,
                                  const std::vector<std::string>& vars,
                                  int depth) {
  using namespace ministan;
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
  int k = pick(rng);
  if (k == 0 || (k == 1 && vars.empty())) {
    static const double lits[] = {0.0, 1.0, 5.0, -0.592, 0.237, 1e-05, 3e21,
                                  -2.5, 100.0, 0.1, 123456.789, -7.0};
    std::uniform_int_distribution<std::size_t> li(0, std::size(lits) - 1);
    double v = lits[li(rng)];
    if (std::bernoulli_distribution(0.3)(rng)) {
      v = std::uniform_real_distribution<double>(-10, 10)(rng);
    }
    return num(v);
  }
  if (k == 1) {
    std::uniform_int_distribution<std::size_t> vi(0, vars.size() - 1);
    return var(vars[vi(rng)]);
  }
  if (k == 2) return neg(random_expr(rng, vars, depth - 1));
  if (k == 3) return exp(random_expr(rng, vars, depth - 1));
  BinaryOp op = static_cast<BinaryOp>(std::uniform_int_distribution<int>(0, 3)(rng));
  return binary(op, random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1));
}

inline ministan::Program random_program(std::mt19937_64& rng) {
  using namespace ministan;
  Program p;
  std::vector<std::string> defined;
  int n = std::uniform_int_distribution<int>(1, 6)(rng);
  for (int i = 0; i < n; ++i) {
    std::string name = "v" + std::to_string(i);
    int kind = std::uniform_int_distribution<int>(0, 3)(rng);
    auto e = [&] { return random_expr(rng, defined, 3); };
    switch (kind) {
      case 0: p.stmts.push_back(Assign{name, e()}); break;
      case 1: p.stmts.push_back(Sample{name, Normal{e(), e()}}); break;
      case 2: p.stmts.push_back(Sample{name, Uniform{e(), e()}}); break;
      default: p.stmts.push_back(Sample{name, Bernoulli{e()}}); break;
    }
    defined.push_back(name);
  }
  return p;
}

}  // namespace fixtures

#include <functional>
#include <optional>

#include "ministan/error.hpp"

namespace fixtures {

/// Kind of the ministan::Error thrown by fn, or nullopt if nothing is thrown.
inline std::optional<ministan::ErrorKind> error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ministan::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline std::string error_subject(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ministan::Error& e) {
    return e.subject();
  }
  return {};
}

}  // namespace fixtures
