#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "ministan/dsl.hpp"
#include "ministan/error.hpp"

using namespace ministan;
using fixtures::error_kind;

TEST_CASE("parses a single assignment") {
  Program p = parse_program("x = 1");
  REQUIRE(p.stmts.size() == 1);
  Program expected{{Assign{"x", num(1.0)}}};
  CHECK(p == expected);
}

TEST_CASE("parses the prior sample listing into four statements") {
  Program p = parse_program(fixtures::kPriorSample1);
  REQUIRE(p.stmts.size() == 4);
  CHECK(std::holds_alternative<Sample>(p.stmts[0]));
  CHECK(std::holds_alternative<Sample>(p.stmts[1]));
  CHECK(std::holds_alternative<Assign>(p.stmts[2]));
  CHECK(std::holds_alternative<Sample>(p.stmts[3]));
  const auto& s = std::get<Sample>(p.stmts[0]);
  CHECK(s.var == "s");
  CHECK(s.dist == Dist{Normal{num(0.237), num(0.449)}});
  const auto& o = std::get<Sample>(p.stmts[3]);
  Expr sig = num(1) / (num(1) + exp(neg(var("logit_o"))));
  CHECK(o.dist == Dist{Bernoulli{sig}});
}

TEST_CASE("semicolons separate statements") {
  CHECK(parse_program("x = 1; y = x * 2") == parse_program("x = 1\ny = x * 2"));
}

TEST_CASE("blank lines and comments-free whitespace are tolerated") {
  Program p = parse_program("\n\n  x   =  1  \n\n y ~ normal( x , 2 )\n");
  CHECK(p.stmts.size() == 2);
}

TEST_CASE("use before definition is a scope error") {
  CHECK(error_kind([] { parse_program("y ~ normal(x, 1)"); }) == ErrorKind::Scope);
  CHECK(fixtures::error_subject([] { parse_program("y ~ normal(x, 1)"); }) == "x");
  CHECK(error_kind([] { parse_program("x = x + 1"); }) == ErrorKind::Scope);
}

TEST_CASE("redefinition is rejected") {
  CHECK(error_kind([] { parse_program("x = 1\nx ~ normal(0, 1)"); }) ==
        ErrorKind::Redefinition);
}

TEST_CASE("free variables are accepted in template mode") {
  Program p = parse_program(fixtures::kEdgeTemplate, {.allow_free_variables = true});
  CHECK(free_check(p) == std::vector<std::string>{"mu_s", "sigma_s", "sigma_b",
                                                  "lambda_so", "lambda_bo"});
  CHECK(error_kind([] { parse_program("x = 1\nx = 2", {.allow_free_variables = true}); }) ==
        ErrorKind::Redefinition);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_program("x = 1\ny = (2 + ");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() >= 1);
    CHECK(e.kind() == ErrorKind::Syntax);
  }
  for (const char* bad : {"", "x", "x =", "x ~ normal(1)", "x ~ gamma(1, 2)",
                          "x ~ bernoulli(0.5, 1)", "1 = x", "x = 1 +* 2",
                          "x = exp 1", "x = 1 2", "x ~ uniform(0 1)", "x = @"}) {
    CAPTURE(bad);
    CHECK(error_kind([&] { parse_program(bad); }) == ErrorKind::Syntax);
  }
}

TEST_CASE("printing an assignment") {
  Program p{{Assign{"b", num(5.0)}}};
  CHECK(print_program(p) == "b = 5");
}

TEST_CASE("canonical printing of the causal template") {
  std::string printed = fixtures::canonical(fixtures::kEdgeTemplate);
  CHECK(printed ==
        "s ~ normal(mu_s, sigma_s)\n"
        "b ~ normal(s, sigma_b)\n"
        "logit_o = s * lambda_so + b * lambda_bo\n"
        "o ~ bernoulli(1 / (1 + exp(-logit_o)))");
}

TEST_CASE("precedence and associativity") {
  auto rt = [](const char* s) { return print_expr(parse_expr(s)); };
  CHECK(rt("a + b * c") == "a + b * c");
  CHECK(rt("(a + b) * c") == "(a + b) * c");
  CHECK(rt("a - (b - c)") == "a - (b - c)");
  CHECK(rt("(a - b) - c") == "a - b - c");
  CHECK(rt("a / (b * c)") == "a / (b * c)");
  CHECK(rt("a * b / c") == "a * b / c");
  CHECK(rt("-(a + b)") == "-(a + b)");
  CHECK(rt("- -a") == "--a");
  CHECK(rt("exp(-x) * 2") == "exp(-x) * 2");
  CHECK(rt("((((x))))") == "x");
  CHECK(parse_expr("a - b - c") == (var("a") - var("b")) - var("c"));
  CHECK(parse_expr("a / b / c") == (var("a") / var("b")) / var("c"));
}

TEST_CASE("negative literals") {
  CHECK(parse_expr("-0.592") == num(-0.592));
  CHECK(print_expr(num(-0.592)) == "-0.592");
  CHECK(print_expr(var("a") - num(-1)) == "a - -1");
  CHECK(parse_expr(print_expr(var("a") - num(-1))) == var("a") - num(-1));
  CHECK(print_expr(neg(num(2))) == "-(2)");
  CHECK(parse_expr("-(2)") == neg(num(2)));
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(5.0) == "5");
  CHECK(format_number(100.0) == "100");
  CHECK(format_number(0.237) == "0.237");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(std::stod(format_number(3e21)) == 3e21);
  CHECK(std::stod(format_number(1e-7)) == 1e-7);
}

TEST_CASE("free_check reports use-before-definition in first-use order") {
  Program ok = parse_program("x = 1\ny ~ normal(x, 1)");
  CHECK(free_check(ok).empty());
  Program bad{{Sample{"y", Normal{var("z") + var("x"), var("z")}},
               Assign{"x", num(1)}}};
  CHECK(free_check(bad) == std::vector<std::string>{"z", "x"});
}

TEST_CASE("identifiers") {
  CHECK(is_identifier("logit_o"));
  CHECK(is_identifier("_x1"));
  CHECK_FALSE(is_identifier("1x"));
  CHECK_FALSE(is_identifier(""));
  CHECK_FALSE(is_identifier("a-b"));
}

TEST_CASE("program accessors") {
  Program p = parse_program(fixtures::kPriorSample3);
  CHECK(p.find("logit_o") == 2);
  CHECK(p.find("nope") == Program::npos);
  CHECK(p.variables() == std::vector<std::string>{"s", "b", "logit_o", "o"});
}

TEST_CASE("property: parse(print(p)) == p for random programs") {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 2000; ++i) {
    Program p = fixtures::random_program(rng);
    std::string text = print_program(p);
    CAPTURE(text);
    Program back = parse_program(text);
    CHECK(back == p);
    CHECK(print_program(back) == text);
  }
}

TEST_CASE("property: expression printing round-trips") {
  std::mt19937_64 rng(7);
  std::vector<std::string> vars = {"a", "b", "c"};
  for (int i = 0; i < 5000; ++i) {
    Expr e = fixtures::random_expr(rng, vars, 5);
    std::string text = print_expr(e);
    CAPTURE(text);
    CHECK(parse_expr(text) == e);
  }
}

TEST_CASE("hand-written programs equal their canonical form modulo whitespace") {
  for (const char* text : {fixtures::kEdgeTemplate, fixtures::kNoEdgeTemplate,
                           fixtures::kBeliefPillEdge, fixtures::kEncouragementEdge, fixtures::kAssessmentEdge,
                           fixtures::kPriorSample1, fixtures::kPriorSample2}) {
    CHECK(fixtures::strip_whitespace(fixtures::canonical(text)) ==
          fixtures::strip_whitespace(text));
  }
}
