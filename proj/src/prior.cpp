#include "ministan/prior.hpp"

#include <cmath>
#include <limits>

#include "ministan/interpreter.hpp"

namespace ministan {

std::array<double, 5> continuous_values(const GlobalTheta& t) {
  return {t.mu_s, t.sigma_s, t.sigma_b, t.lambda_so, t.lambda_bo};
}

double& continuous_component(GlobalTheta& t, std::size_t index) {
  switch (index) {
    case 0: return t.mu_s;
    case 1: return t.sigma_s;
    case 2: return t.sigma_b;
    case 3: return t.lambda_so;
    default: return t.lambda_bo;
  }
}

namespace {

double draw_positive_unit(Rng& rng) {
  double x = 0.0;
  while (x == 0.0) x = draw_uniform(rng, 0.0, 1.0);
  return x;
}

bool unit_open(double x) { return x > 0.0 && x < 1.0; }
bool unit_closed(double x) { return x >= 0.0 && x <= 1.0; }

Program build(const Expr& mu_s, const Expr& sigma_s, const Expr& sigma_b,
              const Expr& lambda_so, const Expr& lambda_bo, bool edge) {
  Expr logit = var("s") * lambda_so;
  if (edge) logit = logit + var("b") * lambda_bo;
  Program p;
  p.stmts.push_back(Sample{"s", Normal{mu_s, sigma_s}});
  p.stmts.push_back(Sample{"b", Normal{var("s"), sigma_b}});
  p.stmts.push_back(Assign{"logit_o", logit});
  p.stmts.push_back(
      Sample{"o", Bernoulli{num(1) / (num(1) + exp(neg(var("logit_o"))))}});
  return p;
}

}  // namespace

GlobalTheta sample_theta(Rng& rng) {
  GlobalTheta t;
  t.mu_s = draw_normal(rng, 0.0, 1.0);
  t.sigma_s = draw_positive_unit(rng);
  t.sigma_b = draw_positive_unit(rng);
  t.lambda_so = draw_uniform(rng, 0.0, 1.0);
  t.lambda_bo = draw_uniform(rng, 0.0, 1.0);
  t.edge = draw_bernoulli(rng, 0.5);
  return t;
}

bool in_support(const GlobalTheta& t) {
  return std::isfinite(t.mu_s) && unit_open(t.sigma_s) && unit_open(t.sigma_b) &&
         unit_closed(t.lambda_so) && unit_closed(t.lambda_bo);
}

double log_prior(const GlobalTheta& t) {
  if (!in_support(t)) return -std::numeric_limits<double>::infinity();
  // Uniform(0, 1) components contribute log 1 = 0.
  return normal_logpdf(t.mu_s, 0.0, 1.0) + std::log(0.5);
}

Program render_program(const GlobalTheta& t) {
  return build(num(t.mu_s), num(t.sigma_s), num(t.sigma_b), num(t.lambda_so),
               num(t.lambda_bo), t.edge);
}

Program render_template(bool edge) {
  return build(var("mu_s"), var("sigma_s"), var("sigma_b"), var("lambda_so"),
               var("lambda_bo"), edge);
}

}  // namespace ministan
