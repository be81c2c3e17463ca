#include "ministan/interventions.hpp"

#include <cmath>
#include <optional>

#include "ministan/error.hpp"

namespace ministan {

namespace intervention {

bool operator==(const Compose& a, const Compose& b) {
  return *a.first == *b.first && *a.then == *b.then;
}

}  // namespace intervention

Intervention make_do(std::string var, double value) {
  return {intervention::Do{std::move(var), value}};
}

Intervention make_shift(std::string var, double delta) {
  return {intervention::Shift{std::move(var), delta}};
}

Intervention make_variance_scale(std::string var, double factor) {
  return {intervention::VarianceScale{std::move(var), factor}};
}

Intervention compose(Intervention first, Intervention then) {
  return {intervention::Compose{
      std::make_shared<const Intervention>(std::move(first)),
      std::make_shared<const Intervention>(std::move(then))}};
}

namespace {

// Index of the defining statement; nullopt means "leave unchanged" in
// lenient mode.
std::optional<std::size_t> locate(const Program& p, const std::string& var,
                                  const InterventionOptions& options) {
  std::size_t idx = p.find(var);
  if (idx != Program::npos) return idx;
  if (options.lenient) return std::nullopt;
  throw Error(ErrorKind::NoSuchVariable, var,
              "program does not define '" + var + "'");
}

void require_finite(const std::string& var, double value, const char* what) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::InvalidValue, var,
                std::string(what) + " for '" + var + "' must be finite");
  }
}

}  // namespace

Program apply_do(const Program& p, const std::string& var, double value,
                 const InterventionOptions& options) {
  require_finite(var, value, "do value");
  auto idx = locate(p, var, options);
  Program out = p;
  if (idx) out.stmts[*idx] = Assign{var, num(value)};
  return out;
}

Program apply_shift(const Program& p, const std::string& var, double delta,
                    const InterventionOptions& options) {
  require_finite(var, delta, "shift");
  auto idx = locate(p, var, options);
  Program out = p;
  if (!idx) return out;
  Stmt& stmt = out.stmts[*idx];
  if (auto* a = std::get_if<Assign>(&stmt)) {
    a->value = a->value + num(delta);
    return out;
  }
  Dist& d = std::get<Sample>(stmt).dist;
  if (auto* n = std::get_if<Normal>(&d)) {
    n->mean = n->mean + num(delta);
  } else if (auto* u = std::get_if<Uniform>(&d)) {
    u->lo = u->lo + num(delta);
    u->hi = u->hi + num(delta);
  } else {
    throw Error(ErrorKind::UnsupportedIntervention, var,
                "shift on bernoulli variable '" + var + "'");
  }
  return out;
}

Program apply_variance_scale(const Program& p, const std::string& var,
                             double factor, const InterventionOptions& options) {
  if (!std::isfinite(factor) || !(factor > 0.0)) {
    throw Error(ErrorKind::InvalidFactor, var,
                "variance-scale factor for '" + var + "' must be positive");
  }
  auto idx = locate(p, var, options);
  Program out = p;
  if (!idx) return out;
  auto* s = std::get_if<Sample>(&out.stmts[*idx]);
  Normal* n = s ? std::get_if<Normal>(&s->dist) : nullptr;
  if (!n) {
    throw Error(ErrorKind::UnsupportedIntervention, var,
                "variance scaling requires a normal variable, '" + var +
                    "' is not one");
  }
  n->std = n->std / num(1.0 / factor);
  return out;
}

Program apply_intervention(const Program& p, const Intervention& i,
                           const InterventionOptions& options) {
  return std::visit(
      [&](const auto& op) -> Program {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, intervention::Do>) {
          return apply_do(p, op.var, op.value, options);
        } else if constexpr (std::is_same_v<T, intervention::Shift>) {
          return apply_shift(p, op.var, op.delta, options);
        } else if constexpr (std::is_same_v<T, intervention::VarianceScale>) {
          return apply_variance_scale(p, op.var, op.factor, options);
        } else {
          return apply_intervention(apply_intervention(p, *op.first, options),
                                    *op.then, options);
        }
      },
      i.op);
}

std::string describe(const Intervention& i) {
  return std::visit(
      [](const auto& op) -> std::string {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, intervention::Do>) {
          return "do(" + op.var + " = " + format_number(op.value) + ")";
        } else if constexpr (std::is_same_v<T, intervention::Shift>) {
          return "shift(" + op.var + ", " + format_number(op.delta) + ")";
        } else if constexpr (std::is_same_v<T, intervention::VarianceScale>) {
          return "variance_scale(" + op.var + ", " + format_number(op.factor) + ")";
        } else {
          return describe(*op.first) + " ; " + describe(*op.then);
        }
      },
      i.op);
}

}  // namespace ministan
