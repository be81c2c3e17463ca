#include "ministan/interpreter.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ministan/error.hpp"

namespace ministan {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void invalid(std::size_t index, const std::string& var,
                          const std::string& reason) {
  throw Error(ErrorKind::InvalidParameter, std::to_string(index),
              "statement " + std::to_string(index) + " ('" + var + "'): " + reason);
}

struct Params {
  double a = 0.0;
  double b = 0.0;
};

// Evaluates and validates distribution parameters.
Params eval_params(const Dist& d, const Env& env, std::size_t index,
                   const std::string& var) {
  return std::visit(
      overloaded{
          [&](const Normal& n) {
            Params p{eval_expr(n.mean, env), eval_expr(n.std, env)};
            if (!std::isfinite(p.a)) invalid(index, var, "normal mean is not finite");
            if (!std::isfinite(p.b) || !(p.b > 0.0))
              invalid(index, var, "normal std must be finite and positive");
            return p;
          },
          [&](const Uniform& u) {
            Params p{eval_expr(u.lo, env), eval_expr(u.hi, env)};
            if (!std::isfinite(p.a) || !std::isfinite(p.b))
              invalid(index, var, "uniform bounds must be finite");
            if (!(p.a < p.b)) invalid(index, var, "uniform requires lo < hi");
            return p;
          },
          [&](const Bernoulli& b) {
            Params p{eval_expr(b.prob, env), 0.0};
            if (!std::isfinite(p.a) || p.a < 0.0 || p.a > 1.0)
              invalid(index, var, "bernoulli probability must lie in [0, 1]");
            return p;
          },
      },
      d);
}

double dist_logpdf(const Dist& d, const Params& p, double x) {
  switch (d.index()) {
    case 0: return normal_logpdf(x, p.a, p.b);
    case 1: return uniform_logpdf(x, p.a, p.b);
    default: return bernoulli_logpmf(x, p.a);
  }
}

double dist_draw(const Dist& d, const Params& p, Rng& rng) {
  switch (d.index()) {
    case 0: return draw_normal(rng, p.a, p.b);
    case 1: return draw_uniform(rng, p.a, p.b);
    default: return draw_bernoulli(rng, p.a) ? 1.0 : 0.0;
  }
}

}  // namespace

double normal_logpdf(double x, double mean, double std) {
  if (!std::isfinite(x)) return kNegInf;
  double z = (x - mean) / std;
  return -0.5 * z * z - std::log(std) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double uniform_logpdf(double x, double lo, double hi) {
  if (!(x >= lo && x <= hi)) return kNegInf;
  return -std::log(hi - lo);
}

double bernoulli_logpmf(double x, double prob) {
  if (x == 1.0) return std::log(prob);
  if (x == 0.0) return std::log1p(-prob);
  return kNegInf;
}

double Trace::total_log_density() const {
  double total = 0.0;
  for (const auto& [_, lp] : logp_by_var) total += lp;
  return total;
}

double Trace::at(const std::string& name) const {
  for (const auto& [k, v] : bindings) {
    if (k == name) return v;
  }
  throw Error(ErrorKind::MissingVariable, name, "trace has no variable '" + name + "'");
}

Env Trace::as_env() const { return Env(bindings.begin(), bindings.end()); }

double eval_expr(const Expr& e, const Env& env) {
  return std::visit(
      overloaded{
          [](const NumLit& n) { return n.value; },
          [&](const VarRef& v) {
            auto it = env.find(v.name);
            if (it == env.end()) {
              throw Error(ErrorKind::UnboundVariable, v.name,
                          "unbound variable '" + v.name + "'");
            }
            return it->second;
          },
          [&](const BinOp& b) {
            double l = eval_expr(b.lhs, env);
            double r = eval_expr(b.rhs, env);
            switch (b.op) {
              case BinaryOp::Add: return l + r;
              case BinaryOp::Sub: return l - r;
              case BinaryOp::Mul: return l * r;
              case BinaryOp::Div: return l / r;
            }
            return 0.0;
          },
          [&](const Neg& n) { return -eval_expr(n.operand, env); },
          [&](const Exp& x) { return std::exp(eval_expr(x.operand, env)); },
      },
      e.node());
}

Trace simulate(const Program& p, Rng& rng) {
  Trace trace;
  Env env;
  for (std::size_t i = 0; i < p.stmts.size(); ++i) {
    std::visit(overloaded{
                   [&](const Assign& a) {
                     double v = eval_expr(a.value, env);
                     env[a.var] = v;
                     trace.bindings.emplace_back(a.var, v);
                   },
                   [&](const Sample& s) {
                     Params params = eval_params(s.dist, env, i, s.var);
                     double v = dist_draw(s.dist, params, rng);
                     env[s.var] = v;
                     trace.bindings.emplace_back(s.var, v);
                     trace.logp_by_var[s.var] = dist_logpdf(s.dist, params, v);
                   },
               },
               p.stmts[i]);
  }
  return trace;
}

double log_density(const Program& p, const Env& full) {
  Env env;
  double total = 0.0;
  for (std::size_t i = 0; i < p.stmts.size(); ++i) {
    std::visit(overloaded{
                   [&](const Assign& a) { env[a.var] = eval_expr(a.value, env); },
                   [&](const Sample& s) {
                     auto it = full.find(s.var);
                     if (it == full.end()) {
                       throw Error(ErrorKind::MissingVariable, s.var,
                                   "no value supplied for '" + s.var + "'");
                     }
                     Params params = eval_params(s.dist, env, i, s.var);
                     total += dist_logpdf(s.dist, params, it->second);
                     env[s.var] = it->second;
                   },
               },
               p.stmts[i]);
  }
  return total;
}

double log_joint_with_latents(const Program& p, const Observation& obs,
                              const Env& latents) {
  Env merged = obs;
  for (const auto& [k, v] : latents) {
    if (!merged.emplace(k, v).second) {
      throw Error(ErrorKind::OverlappingAssignment, k,
                  "'" + k + "' is bound by both the observation and the latents");
    }
  }
  return log_density(p, merged);
}

WeightedTrace simulate_conditioned(const Program& p, const Observation& obs,
                                   Rng& rng) {
  WeightedTrace out;
  Env env;
  for (std::size_t i = 0; i < p.stmts.size(); ++i) {
    std::visit(overloaded{
                   [&](const Assign& a) {
                     double v = eval_expr(a.value, env);
                     env[a.var] = v;
                     out.trace.bindings.emplace_back(a.var, v);
                   },
                   [&](const Sample& s) {
                     Params params = eval_params(s.dist, env, i, s.var);
                     auto it = obs.find(s.var);
                     double v = it != obs.end() ? it->second
                                                : dist_draw(s.dist, params, rng);
                     double lp = dist_logpdf(s.dist, params, v);
                     if (it != obs.end()) out.log_weight += lp;
                     env[s.var] = v;
                     out.trace.bindings.emplace_back(s.var, v);
                     out.trace.logp_by_var[s.var] = lp;
                   },
               },
               p.stmts[i]);
  }
  return out;
}

std::vector<std::string> sample_vars(const Program& p) {
  std::vector<std::string> out;
  for (const auto& s : p.stmts) {
    if (const auto* sample = std::get_if<Sample>(&s)) out.push_back(sample->var);
  }
  return out;
}

}  // namespace ministan
