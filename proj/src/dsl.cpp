#include "ministan/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <string>

#include "ministan/error.hpp"

namespace ministan {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Expr::Expr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

bool operator==(const Expr& a, const Expr& b) {
  return a.node_ == b.node_ || *a.node_ == *b.node_;
}

Expr num(double value) { return Expr(NumLit{value}); }
Expr var(std::string name) { return Expr(VarRef{std::move(name)}); }
Expr binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(BinOp{op, std::move(lhs), std::move(rhs)});
}
Expr neg(Expr operand) { return Expr(Neg{std::move(operand)}); }
Expr exp(Expr operand) { return Expr(Exp{std::move(operand)}); }
Expr operator+(Expr lhs, Expr rhs) {
  return binary(BinaryOp::Add, std::move(lhs), std::move(rhs));
}
Expr operator-(Expr lhs, Expr rhs) {
  return binary(BinaryOp::Sub, std::move(lhs), std::move(rhs));
}
Expr operator*(Expr lhs, Expr rhs) {
  return binary(BinaryOp::Mul, std::move(lhs), std::move(rhs));
}
Expr operator/(Expr lhs, Expr rhs) {
  return binary(BinaryOp::Div, std::move(lhs), std::move(rhs));
}

const std::string& defined_var(const Stmt& stmt) {
  return std::visit([](const auto& s) -> const std::string& { return s.var; },
                    stmt);
}

std::size_t Program::find(std::string_view name) const {
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    if (defined_var(stmts[i]) == name) return i;
  }
  return npos;
}

std::vector<std::string> Program::variables() const {
  std::vector<std::string> out;
  out.reserve(stmts.size());
  for (const auto& s : stmts) out.push_back(defined_var(s));
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
  Ident,
  Number,
  Plus,
  Minus,
  Star,
  Slash,
  LParen,
  RParen,
  Comma,
  Equals,
  Tilde,
  Separator,  // newline or ';'
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Tilde: return "'~'";
    case Tok::Separator: return "statement separator";
    case Tok::End: return "end of input";
  }
  return "token";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blanks();
      Token t;
      t.line = line_;
      t.column = column_;
      if (pos_ >= text_.size()) {
        t.kind = Tok::End;
        out.push_back(std::move(t));
        return out;
      }
      char c = text_[pos_];
      if (c == '\n' || c == ';') {
        t.kind = Tok::Separator;
        advance();
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_')) {
          advance();
        }
        t.text = std::string(text_.substr(start, pos_ - start));
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        t.kind = Tok::Number;
        lex_number(t);
      } else {
        switch (c) {
          case '+': t.kind = Tok::Plus; break;
          case '-': t.kind = Tok::Minus; break;
          case '*': t.kind = Tok::Star; break;
          case '/': t.kind = Tok::Slash; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case ',': t.kind = Tok::Comma; break;
          case '=': t.kind = Tok::Equals; break;
          case '~': t.kind = Tok::Tilde; break;
          default:
            throw SyntaxError(line_, column_,
                              std::string("unexpected character '") + c + "'");
        }
        advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blanks() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) {
      advance();
    }
  }

  bool digit_at(std::size_t i) const {
    return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
  }

  // decimal: digits [. digits] [e [+-] digits], or . digits
  void lex_number(Token& t) {
    std::size_t start = pos_;
    std::size_t line = line_, column = column_;
    bool any_digits = false;
    while (digit_at(pos_)) {
      advance();
      any_digits = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      while (digit_at(pos_)) {
        advance();
        any_digits = true;
      }
    }
    if (!any_digits) throw SyntaxError(line, column, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_ + 1;
      if (mark < text_.size() && (text_[mark] == '+' || text_[mark] == '-')) ++mark;
      if (!digit_at(mark)) throw SyntaxError(line_, column_, "malformed exponent");
      while (pos_ < mark) advance();
      while (digit_at(pos_)) advance();
    }
    std::string_view lexeme = text_.substr(start, pos_ - start);
    t.text = std::string(lexeme);
    auto [ptr, ec] =
        std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), t.number);
    if (ec != std::errc() || ptr != lexeme.data() + lexeme.size() ||
        !std::isfinite(t.number)) {
      throw SyntaxError(line, column, "numeric literal out of range: " + t.text);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program p;
    skip_separators();
    while (peek().kind != Tok::End) {
      p.stmts.push_back(statement());
      if (peek().kind != Tok::End) {
        expect(Tok::Separator);
        skip_separators();
      }
    }
    if (p.stmts.empty()) {
      const Token& t = peek();
      throw SyntaxError(t.line, t.column, "empty program");
    }
    return p;
  }

  Expr standalone_expr() {
    Expr e = expr();
    expect(Tok::End);
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const Token& t, const std::string& what) const {
    std::string found = std::string(describe(t.kind));
    if (!t.text.empty()) found += " '" + t.text + "'";
    throw SyntaxError(t.line, t.column, "expected " + what + ", found " + found);
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) fail(peek(), std::string(describe(kind)));
    return next();
  }

  void skip_separators() {
    while (peek().kind == Tok::Separator) next();
  }

  Stmt statement() {
    const Token& name = expect(Tok::Ident);
    std::string var = name.text;
    if (peek().kind == Tok::Equals) {
      next();
      return Assign{std::move(var), expr()};
    }
    if (peek().kind == Tok::Tilde) {
      next();
      return Sample{std::move(var), dist()};
    }
    fail(peek(), "'=' or '~'");
  }

  Dist dist() {
    const Token& head = expect(Tok::Ident);
    std::string family = head.text;
    expect(Tok::LParen);
    std::vector<Expr> args;
    args.push_back(expr());
    while (peek().kind == Tok::Comma) {
      next();
      args.push_back(expr());
    }
    expect(Tok::RParen);
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        throw SyntaxError(head.line, head.column,
                          family + " takes " + std::to_string(n) +
                              " argument(s), got " + std::to_string(args.size()));
      }
    };
    if (family == "normal") {
      arity(2);
      return Normal{args[0], args[1]};
    }
    if (family == "uniform") {
      arity(2);
      return Uniform{args[0], args[1]};
    }
    if (family == "bernoulli") {
      arity(1);
      return Bernoulli{args[0]};
    }
    throw SyntaxError(head.line, head.column, "unknown distribution '" + family + "'");
  }

  Expr expr() {
    Expr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      BinaryOp op = next().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      BinaryOp op = next().kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      lhs = binary(op, std::move(lhs), unary());
    }
    return lhs;
  }

  // A minus sign directly followed by a literal is folded into a negative
  // literal so that programs rendered with negative constants round-trip.
  Expr unary() {
    if (peek().kind == Tok::Minus) {
      next();
      if (peek().kind == Tok::Number) return num(-next().number);
      return neg(unary());
    }
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        return num(next().number);
      case Tok::Ident: {
        std::string name = next().text;
        if (name == "exp" && peek().kind == Tok::LParen) {
          next();
          Expr inner = expr();
          expect(Tok::RParen);
          return exp(std::move(inner));
        }
        return var(std::move(name));
      }
      case Tok::LParen: {
        next();
        Expr inner = expr();
        expect(Tok::RParen);
        return inner;
      }
      default:
        fail(t, "expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::vector<std::string> stmt_refs(const Stmt& stmt) {
  std::vector<std::string> refs;
  std::visit(overloaded{
                 [&](const Assign& a) { collect_refs(a.value, refs); },
                 [&](const Sample& s) {
                   std::visit(overloaded{
                                  [&](const Normal& d) {
                                    collect_refs(d.mean, refs);
                                    collect_refs(d.std, refs);
                                  },
                                  [&](const Uniform& d) {
                                    collect_refs(d.lo, refs);
                                    collect_refs(d.hi, refs);
                                  },
                                  [&](const Bernoulli& d) { collect_refs(d.prob, refs); },
                              },
                              s.dist);
                 },
             },
             stmt);
  return refs;
}

void check_definitions(const Program& p, bool allow_free) {
  std::set<std::string> defined;
  for (const auto& stmt : p.stmts) {
    std::vector<std::string> refs = stmt_refs(stmt);
    if (!allow_free) {
      for (const auto& r : refs) {
        if (!defined.count(r)) {
          throw Error(ErrorKind::Scope, r,
                      "variable '" + r + "' used before definition");
        }
      }
    }
    const std::string& v = defined_var(stmt);
    if (!defined.insert(v).second) {
      throw Error(ErrorKind::Redefinition, v,
                  "variable '" + v + "' defined more than once");
    }
  }
}

}  // namespace

void collect_refs(const Expr& e, std::vector<std::string>& out) {
  std::visit(overloaded{
                 [](const NumLit&) {},
                 [&](const VarRef& v) { out.push_back(v.name); },
                 [&](const BinOp& b) {
                   collect_refs(b.lhs, out);
                   collect_refs(b.rhs, out);
                 },
                 [&](const Neg& n) { collect_refs(n.operand, out); },
                 [&](const Exp& x) { collect_refs(x.operand, out); },
             },
             e.node());
}

Program parse_program(std::string_view text, const ParseOptions& options) {
  Program p = Parser(Lexer(text).run()).program();
  check_definitions(p, options.allow_free_variables);
  return p;
}

Expr parse_expr(std::string_view text) {
  std::vector<Token> toks = Lexer(text).run();
  // newlines inside a standalone expression are not separators
  std::erase_if(toks, [](const Token& t) { return t.kind == Tok::Separator; });
  return Parser(std::move(toks)).standalone_expr();
}

// ---------------------------------------------------------------------------
// Printer

namespace {

constexpr int kAdditive = 1;
constexpr int kMultiplicative = 2;
constexpr int kUnary = 3;
constexpr int kAtom = 4;

int precedence(const Expr& e) {
  return std::visit(overloaded{
                        [](const NumLit&) { return kAtom; },
                        [](const VarRef&) { return kAtom; },
                        [](const BinOp& b) {
                          return b.op == BinaryOp::Add || b.op == BinaryOp::Sub
                                     ? kAdditive
                                     : kMultiplicative;
                        },
                        [](const Neg&) { return kUnary; },
                        [](const Exp&) { return kAtom; },
                    },
                    e.node());
}

char symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
  }
  return '?';
}

void print_into(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print_into(e, out);
  if (parens) out += ')';
}

void print_into(const Expr& e, std::string& out) {
  std::visit(overloaded{
                 [&](const NumLit& n) { out += format_number(n.value); },
                 [&](const VarRef& v) { out += v.name; },
                 [&](const BinOp& b) {
                   int p = precedence(e);
                   print_wrapped(b.lhs, precedence(b.lhs) < p, out);
                   out += ' ';
                   out += symbol(b.op);
                   out += ' ';
                   print_wrapped(b.rhs, precedence(b.rhs) <= p, out);
                 },
                 [&](const Neg& n) {
                   // a bare literal after '-' would be folded on reparse
                   bool parens = precedence(n.operand) < kUnary ||
                                 n.operand.as<NumLit>() != nullptr;
                   out += '-';
                   print_wrapped(n.operand, parens, out);
                 },
                 [&](const Exp& x) {
                   out += "exp(";
                   print_into(x.operand, out);
                   out += ')';
                 },
             },
             e.node());
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string print_expr(const Expr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

std::string print_program(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.stmts.size(); ++i) {
    if (i) out += '\n';
    std::visit(
        overloaded{
            [&](const Assign& a) { out += a.var + " = " + print_expr(a.value); },
            [&](const Sample& s) {
              out += s.var + " ~ ";
              std::visit(overloaded{
                             [&](const Normal& d) {
                               out += "normal(" + print_expr(d.mean) + ", " +
                                      print_expr(d.std) + ")";
                             },
                             [&](const Uniform& d) {
                               out += "uniform(" + print_expr(d.lo) + ", " +
                                      print_expr(d.hi) + ")";
                             },
                             [&](const Bernoulli& d) {
                               out += "bernoulli(" + print_expr(d.prob) + ")";
                             },
                         },
                         s.dist);
            },
        },
        p.stmts[i]);
  }
  return out;
}

std::vector<std::string> free_check(const Program& p) {
  std::set<std::string> defined;
  std::set<std::string> reported;
  std::vector<std::string> out;
  for (const auto& stmt : p.stmts) {
    for (auto& r : stmt_refs(stmt)) {
      if (!defined.count(r) && reported.insert(r).second) out.push_back(r);
    }
    defined.insert(defined_var(stmt));
  }
  return out;
}

}  // namespace ministan
