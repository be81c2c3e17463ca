#include "ministan/compiled_program.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ministan/error.hpp"
#include "ministan/interpreter.hpp"

namespace ministan {

namespace {

constexpr std::size_t kInlineStack = 64;

[[noreturn]] void invalid(std::size_t index, const std::string& var,
                          const std::string& reason) {
  throw Error(ErrorKind::InvalidParameter, std::to_string(index),
              "statement " + std::to_string(index) + " ('" + var + "'): " + reason);
}

}  // namespace

CompiledProgram::CompiledProgram(const Program& p,
                                 std::span<const std::string> parameters)
    : names_(parameters.begin(), parameters.end()), n_params_(parameters.size()) {
  for (const auto& stmt : p.stmts) {
    std::size_t limit = names_.size();
    Statement out{};
    if (const auto* a = std::get_if<Assign>(&stmt)) {
      out.kind = Kind::Assign;
      out.args[0] = emit_arg(a->value, limit);
    } else {
      const auto& d = std::get<Sample>(stmt).dist;
      if (const auto* n = std::get_if<Normal>(&d)) {
        out.kind = Kind::Normal;
        out.args[0] = emit_arg(n->mean, limit);
        out.args[1] = emit_arg(n->std, limit);
      } else if (const auto* u = std::get_if<Uniform>(&d)) {
        out.kind = Kind::Uniform;
        out.args[0] = emit_arg(u->lo, limit);
        out.args[1] = emit_arg(u->hi, limit);
      } else {
        out.kind = Kind::Bernoulli;
        out.args[0] = emit_arg(std::get<Bernoulli>(d).prob, limit);
      }
    }
    const std::string& v = defined_var(stmt);
    if (slot_of(v) != npos) {
      throw Error(ErrorKind::Redefinition, v, "variable '" + v + "' defined more than once");
    }
    out.slot = static_cast<std::uint32_t>(names_.size());
    names_.push_back(v);
    stmts_.push_back(out);
  }
}

std::size_t CompiledProgram::slot_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? npos : static_cast<std::size_t>(it - names_.begin());
}

bool CompiledProgram::is_sample(std::size_t slot) const {
  if (slot < n_params_) return false;
  return stmts_[slot - n_params_].kind != Kind::Assign;
}

std::vector<std::size_t> CompiledProgram::sample_slots() const {
  std::vector<std::size_t> out;
  for (const auto& s : stmts_) {
    if (s.kind != Kind::Assign) out.push_back(s.slot);
  }
  return out;
}

CompiledProgram::Range CompiledProgram::emit_arg(const Expr& e,
                                                 std::size_t defined_limit) {
  Range r;
  r.begin = static_cast<std::uint32_t>(code_.size());
  emit(e, 1, defined_limit);
  r.end = static_cast<std::uint32_t>(code_.size());
  return r;
}

void CompiledProgram::emit(const Expr& e, std::size_t depth,
                           std::size_t defined_limit) {
  max_depth_ = std::max(max_depth_, depth);
  if (const auto* n = e.as<NumLit>()) {
    code_.push_back({Op::Const, 0, n->value});
  } else if (const auto* v = e.as<VarRef>()) {
    std::size_t slot = slot_of(v->name);
    if (slot == npos || slot >= defined_limit) {
      throw Error(ErrorKind::Scope, v->name,
                  "variable '" + v->name + "' used before definition");
    }
    code_.push_back({Op::Load, static_cast<std::uint32_t>(slot), 0.0});
  } else if (const auto* b = e.as<BinOp>()) {
    emit(b->lhs, depth, defined_limit);
    emit(b->rhs, depth + 1, defined_limit);
    Op op = Op::Add;
    switch (b->op) {
      case BinaryOp::Add: op = Op::Add; break;
      case BinaryOp::Sub: op = Op::Sub; break;
      case BinaryOp::Mul: op = Op::Mul; break;
      case BinaryOp::Div: op = Op::Div; break;
    }
    code_.push_back({op, 0, 0.0});
  } else if (const auto* n = e.as<Neg>()) {
    emit(n->operand, depth, defined_limit);
    code_.push_back({Op::Neg, 0, 0.0});
  } else {
    emit(e.as<Exp>()->operand, depth, defined_limit);
    code_.push_back({Op::Exp, 0, 0.0});
  }
}

double CompiledProgram::eval(Range r, std::span<const double> slots) const {
  std::array<double, kInlineStack> inline_stack{};
  std::vector<double> heap_stack;
  double* stack = inline_stack.data();
  if (max_depth_ > kInlineStack) {
    heap_stack.resize(max_depth_);
    stack = heap_stack.data();
  }
  std::size_t top = 0;
  for (std::uint32_t i = r.begin; i < r.end; ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Op::Const: stack[top++] = in.value; break;
      case Op::Load: stack[top++] = slots[in.slot]; break;
      case Op::Add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
      case Op::Sub: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
      case Op::Mul: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
      case Op::Div: --top; stack[top - 1] = stack[top - 1] / stack[top]; break;
      case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
    }
  }
  return stack[0];
}

void CompiledProgram::params(const Statement& s, std::size_t index,
                             std::span<const double> slots, double& a,
                             double& b) const {
  const std::string& var = names_[s.slot];
  switch (s.kind) {
    case Kind::Normal:
      a = eval(s.args[0], slots);
      b = eval(s.args[1], slots);
      if (!std::isfinite(a)) invalid(index, var, "normal mean is not finite");
      if (!std::isfinite(b) || !(b > 0.0))
        invalid(index, var, "normal std must be finite and positive");
      break;
    case Kind::Uniform:
      a = eval(s.args[0], slots);
      b = eval(s.args[1], slots);
      if (!std::isfinite(a) || !std::isfinite(b))
        invalid(index, var, "uniform bounds must be finite");
      if (!(a < b)) invalid(index, var, "uniform requires lo < hi");
      break;
    case Kind::Bernoulli:
      a = eval(s.args[0], slots);
      if (!std::isfinite(a) || a < 0.0 || a > 1.0)
        invalid(index, var, "bernoulli probability must lie in [0, 1]");
      break;
    case Kind::Assign:
      break;
  }
}

double CompiledProgram::log_density(std::span<double> slots) const {
  double total = 0.0;
  for (std::size_t i = 0; i < stmts_.size(); ++i) {
    const Statement& s = stmts_[i];
    if (s.kind == Kind::Assign) {
      slots[s.slot] = eval(s.args[0], slots);
      continue;
    }
    double a = 0.0, b = 0.0;
    params(s, i, slots, a, b);
    double x = slots[s.slot];
    switch (s.kind) {
      case Kind::Normal: total += normal_logpdf(x, a, b); break;
      case Kind::Uniform: total += uniform_logpdf(x, a, b); break;
      default: total += bernoulli_logpmf(x, a); break;
    }
  }
  return total;
}

double CompiledProgram::forward_fill(std::span<double> slots,
                                     std::span<const std::uint8_t> observed,
                                     Rng& rng) const {
  double weight = 0.0;
  for (std::size_t i = 0; i < stmts_.size(); ++i) {
    const Statement& s = stmts_[i];
    if (s.kind == Kind::Assign) {
      slots[s.slot] = eval(s.args[0], slots);
      continue;
    }
    double a = 0.0, b = 0.0;
    params(s, i, slots, a, b);
    if (observed[s.slot]) {
      double x = slots[s.slot];
      switch (s.kind) {
        case Kind::Normal: weight += normal_logpdf(x, a, b); break;
        case Kind::Uniform: weight += uniform_logpdf(x, a, b); break;
        default: weight += bernoulli_logpmf(x, a); break;
      }
    } else {
      switch (s.kind) {
        case Kind::Normal: slots[s.slot] = draw_normal(rng, a, b); break;
        case Kind::Uniform: slots[s.slot] = draw_uniform(rng, a, b); break;
        default: slots[s.slot] = draw_bernoulli(rng, a) ? 1.0 : 0.0; break;
      }
    }
  }
  return weight;
}

}  // namespace ministan
