#pragma once

// MiniStan abstract syntax, parser, and canonical printer.
//
// A program is a straight-line list of statements, each either a
// deterministic assignment `x = E` or a random choice `x ~ D`. Expressions
// are a closed arithmetic subset: literals, variable references, the four
// binary operators, unary minus, and exp(.).

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ministan {

struct NumLit;
struct VarRef;
struct BinOp;
struct Neg;
struct Exp;

/// Immutable expression tree. Copies share structure; equality is structural.
class Expr {
 public:
  using Node = std::variant<NumLit, VarRef, BinOp, Neg, Exp>;

  explicit Expr(Node node);

  const Node& node() const noexcept;

  template <class T>
  const T* as() const noexcept;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const Node> node_;
};

enum class BinaryOp { Add, Sub, Mul, Div };

struct NumLit {
  double value;
  friend bool operator==(const NumLit&, const NumLit&) = default;
};

struct VarRef {
  std::string name;
  friend bool operator==(const VarRef&, const VarRef&) = default;
};

struct BinOp {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
  friend bool operator==(const BinOp&, const BinOp&) = default;
};

struct Neg {
  Expr operand;
  friend bool operator==(const Neg&, const Neg&) = default;
};

struct Exp {
  Expr operand;
  friend bool operator==(const Exp&, const Exp&) = default;
};

inline const Expr::Node& Expr::node() const noexcept { return *node_; }

template <class T>
const T* Expr::as() const noexcept {
  return std::get_if<T>(node_.get());
}

// Construction helpers.
Expr num(double value);
Expr var(std::string name);
Expr binary(BinaryOp op, Expr lhs, Expr rhs);
Expr neg(Expr operand);
Expr exp(Expr operand);
Expr operator+(Expr lhs, Expr rhs);
Expr operator-(Expr lhs, Expr rhs);
Expr operator*(Expr lhs, Expr rhs);
Expr operator/(Expr lhs, Expr rhs);

struct Normal {
  Expr mean;
  Expr std;
  friend bool operator==(const Normal&, const Normal&) = default;
};

struct Uniform {
  Expr lo;
  Expr hi;
  friend bool operator==(const Uniform&, const Uniform&) = default;
};

struct Bernoulli {
  Expr prob;
  friend bool operator==(const Bernoulli&, const Bernoulli&) = default;
};

using Dist = std::variant<Normal, Uniform, Bernoulli>;

struct Assign {
  std::string var;
  Expr value;
  friend bool operator==(const Assign&, const Assign&) = default;
};

struct Sample {
  std::string var;
  Dist dist;
  friend bool operator==(const Sample&, const Sample&) = default;
};

using Stmt = std::variant<Assign, Sample>;

const std::string& defined_var(const Stmt& stmt);

struct Program {
  std::vector<Stmt> stmts;
  friend bool operator==(const Program&, const Program&) = default;

  /// Index of the statement defining `name`, or npos.
  std::size_t find(std::string_view name) const;
  std::vector<std::string> variables() const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

struct ParseOptions {
  /// Templates such as the symbolic causal model reference parameters
  /// (mu_s, sigma_s, ...) that are not defined in the program itself.
  bool allow_free_variables = false;
};

bool is_identifier(std::string_view s);

/// Throws SyntaxError, ScopeError (Error with kind Scope), or
/// RedefinitionError.
Program parse_program(std::string_view text, const ParseOptions& options = {});
Expr parse_expr(std::string_view text);

std::string print_expr(const Expr& e);
std::string print_program(const Program& p);
/// Shortest round-trip decimal form.
std::string format_number(double value);

/// Variables used before their definition, in first-use order, without
/// duplicates.
std::vector<std::string> free_check(const Program& p);

/// Variable names referenced by `e`, in left-to-right order (may repeat).
void collect_refs(const Expr& e, std::vector<std::string>& out);

}  // namespace ministan
