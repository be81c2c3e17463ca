#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ministan/dsl.hpp"
#include "ministan/random.hpp"

namespace ministan {

/// Slot-indexed form of a Program used on the inference hot path.
///
/// Slots [0, parameter_count()) hold externally bound parameters (free
/// variables of a symbolic template); the remaining slots hold program
/// variables in statement order. Expressions are flattened to postfix code.
/// Results are bit-identical to the tree-walking interpreter.
class CompiledProgram {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  CompiledProgram() = default;
  /// Throws ScopeError if `p` references a name that is neither a parameter
  /// nor defined earlier in the program.
  explicit CompiledProgram(const Program& p,
                           std::span<const std::string> parameters = {});

  std::size_t slot_count() const noexcept { return names_.size(); }
  std::size_t parameter_count() const noexcept { return n_params_; }
  std::size_t slot_of(std::string_view name) const;
  const std::string& name_of(std::size_t slot) const { return names_[slot]; }
  bool is_sample(std::size_t slot) const;
  std::vector<std::size_t> sample_slots() const;

  /// Recomputes Assign slots in place and returns the joint log density of
  /// the Sample slots. Throws InvalidParameter like log_density().
  double log_density(std::span<double> slots) const;

  /// Likelihood weighting: Sample slots with observed[slot] != 0 keep their
  /// value and contribute to the returned log weight; others are drawn.
  double forward_fill(std::span<double> slots,
                      std::span<const std::uint8_t> observed, Rng& rng) const;

 private:
  enum class Op : std::uint8_t { Const, Load, Add, Sub, Mul, Div, Neg, Exp };
  struct Instr {
    Op op;
    std::uint32_t slot;
    double value;
  };
  struct Range {
    std::uint32_t begin;
    std::uint32_t end;
  };
  enum class Kind : std::uint8_t { Assign, Normal, Uniform, Bernoulli };
  struct Statement {
    Kind kind;
    std::uint32_t slot;
    Range args[2];
  };

  void emit(const Expr& e, std::size_t depth, std::size_t defined_limit);
  Range emit_arg(const Expr& e, std::size_t defined_limit);
  double eval(Range r, std::span<const double> slots) const;
  void params(const Statement& s, std::size_t index,
              std::span<const double> slots, double& a, double& b) const;

  std::vector<std::string> names_;
  std::size_t n_params_ = 0;
  std::vector<Instr> code_;
  std::vector<Statement> stmts_;
  std::size_t max_depth_ = 0;
};

}  // namespace ministan
