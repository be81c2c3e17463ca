#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "ministan/interpreter.hpp"
#include "ministan/interventions.hpp"
#include "ministan/prior.hpp"
#include "ministan/serialization.hpp"

using namespace ministan;
using fixtures::canonical;
using fixtures::error_kind;

namespace {

const Intervention kBeliefPill = make_do("b", 5.0);
const Intervention kEncouragement = make_shift("b", 3.0);
const Intervention kAssessment =
    compose(make_shift("s", 2.0), make_variance_scale("b", 1.0 / 100.0));

std::string intervened(bool edge, const Intervention& i) {
  return print_program(apply_intervention(render_template(edge), i));
}

}  // namespace

TEST_CASE("golden intervened programs") {
  CHECK(intervened(true, kBeliefPill) == canonical(fixtures::kBeliefPillEdge));
  CHECK(intervened(false, kBeliefPill) == canonical(fixtures::kBeliefPillNoEdge));
  CHECK(intervened(true, kEncouragement) == canonical(fixtures::kEncouragementEdge));
  CHECK(intervened(false, kEncouragement) == canonical(fixtures::kEncouragementNoEdge));
  CHECK(intervened(true, kAssessment) == canonical(fixtures::kAssessmentEdge));
  CHECK(intervened(false, kAssessment) == canonical(fixtures::kAssessmentNoEdge));
  CHECK(fixtures::strip_whitespace(intervened(true, kAssessment)) ==
        fixtures::strip_whitespace(fixtures::kAssessmentEdge));
}

TEST_CASE("do replaces the defining statement with a constant") {
  Program p = parse_program(fixtures::kPriorSample1);
  Program q = apply_do(p, "b", 5.0);
  REQUIRE(q.stmts.size() == p.stmts.size());
  CHECK(q.stmts[1] == Stmt{Assign{"b", num(5.0)}});
  CHECK(q.stmts[0] == p.stmts[0]);
  CHECK(q.stmts[2] == p.stmts[2]);
  CHECK(q.stmts[3] == p.stmts[3]);
  CHECK(apply_do(parse_program("x = 1\ny = x"), "y", 2.0) ==
        parse_program("x = 1\ny = 2"));
  CHECK(error_kind([&] { apply_do(p, "b", std::nan("")); }) == ErrorKind::InvalidValue);
}

TEST_CASE("missing targets") {
  Program p = parse_program(fixtures::kPriorSample1);
  CHECK(error_kind([&] { apply_do(p, "z", 1.0); }) == ErrorKind::NoSuchVariable);
  CHECK(error_kind([&] { apply_shift(p, "z", 1.0); }) == ErrorKind::NoSuchVariable);
  CHECK(error_kind([&] { apply_variance_scale(p, "z", 2.0); }) == ErrorKind::NoSuchVariable);
  CHECK(apply_do(p, "z", 1.0, {.lenient = true}) == p);
  CHECK(apply_intervention(p, compose(make_do("z", 1), make_do("b", 2)), {.lenient = true}) ==
        apply_do(p, "b", 2.0));
}

TEST_CASE("shift") {
  CHECK(print_program(apply_shift(parse_program("x = 1"), "x", 2.0)) == "x = 1 + 2");
  CHECK(print_program(apply_shift(parse_program("x ~ uniform(0, 1)"), "x", 0.5)) ==
        "x ~ uniform(0 + 0.5, 1 + 0.5)");
  CHECK(print_program(apply_shift(parse_program("x ~ normal(0, 1)"), "x", -1.0)) ==
        "x ~ normal(0 + -1, 1)");
  CHECK(error_kind([] { apply_shift(parse_program("x ~ bernoulli(0.5)"), "x", 1.0); }) ==
        ErrorKind::UnsupportedIntervention);
}

TEST_CASE("variance scale") {
  Program p = parse_program("x ~ normal(0, 2)");
  CHECK(print_program(apply_variance_scale(p, "x", 0.01)) == "x ~ normal(0, 2 / 100)");
  CHECK(print_program(apply_variance_scale(p, "x", 4.0)) == "x ~ normal(0, 2 / 0.25)");
  for (double bad : {0.0, -1.0, std::nan(""), std::numeric_limits<double>::infinity()}) {
    CHECK(error_kind([&] { apply_variance_scale(p, "x", bad); }) == ErrorKind::InvalidFactor);
  }
  CHECK(error_kind([] { apply_variance_scale(parse_program("x ~ uniform(0, 1)"), "x", 2); }) ==
        ErrorKind::UnsupportedIntervention);
  CHECK(error_kind([] { apply_variance_scale(parse_program("x = 1"), "x", 2); }) ==
        ErrorKind::UnsupportedIntervention);
}

TEST_CASE("variance scale by one leaves the distribution unchanged") {
  Program p = parse_program(fixtures::kPriorSample1);
  Program q = apply_variance_scale(p, "b", 1.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng r1(seed), r2(seed);
    Trace a = simulate(p, r1), b = simulate(q, r2);
    CHECK(a.bindings == b.bindings);
    CHECK(a.logp_by_var == b.logp_by_var);
  }
}

TEST_CASE("composition applies left to right") {
  Program p = parse_program(fixtures::kPriorSample1);
  CHECK(apply_intervention(p, compose(make_do("b", 5), make_do("b", 7))) ==
        apply_do(p, "b", 7.0));
  CHECK(apply_intervention(p, compose(make_do("b", 5), make_shift("b", 1))) ==
        apply_shift(apply_do(p, "b", 5.0), "b", 1.0));
}

TEST_CASE("interventions do not modify their input") {
  Program p = parse_program(fixtures::kPriorSample2);
  Program copy = p;
  (void)apply_intervention(p, kAssessment);
  (void)apply_intervention(p, kBeliefPill);
  CHECK(p == copy);
}

TEST_CASE("property: structure is preserved outside the target") {
  Rng rng(8);
  const std::vector<std::string> targets = {"s", "b"};
  for (int i = 0; i < 500; ++i) {
    Program p = render_program(sample_theta(rng));
    std::string v = targets[rng() % 2];
    Intervention iv = (rng() % 3 == 0)   ? make_do(v, draw_normal(rng, 0, 3))
                      : (rng() % 2 == 0) ? make_shift(v, draw_normal(rng, 0, 3))
                                         : make_variance_scale(v, draw_uniform(rng, 0.01, 10));
    Program q = apply_intervention(p, iv);
    REQUIRE(q.stmts.size() == p.stmts.size());
    for (std::size_t k = 0; k < p.stmts.size(); ++k) {
      CHECK(defined_var(q.stmts[k]) == defined_var(p.stmts[k]));
      if (defined_var(p.stmts[k]) != v) CHECK(q.stmts[k] == p.stmts[k]);
    }
    CHECK(parse_program(print_program(q)) == q);
  }
}

TEST_CASE("shift moves the mean of the target") {
  Program p = parse_program("s ~ normal(0.3, 0.5)\nb ~ normal(s, 0.8)");
  Program q = apply_shift(p, "b", 3.0);
  const int n = 20000;
  double sum_p = 0, sum_q = 0;
  Rng rng(12);
  for (int i = 0; i < n; ++i) {
    sum_p += simulate(p, rng).at("b");
    sum_q += simulate(q, rng).at("b");
  }
  double sd = std::sqrt(0.25 + 0.64);
  double se = sd * std::sqrt(2.0 / n);
  CHECK(std::abs((sum_q - sum_p) / n - 3.0) < 4 * se);
}

TEST_CASE("descriptor JSON round trip") {
  for (const Intervention& i : {kBeliefPill, kEncouragement, kAssessment,
                                compose(kAssessment, make_do("s", -2.5))}) {
    Json j = intervention_to_json(i);
    CAPTURE(j.dump());
    CHECK(intervention_from_json(j) == i);
    CHECK(intervention_from_json(Json::parse(j.dump())) == i);
  }
  CHECK(intervention_from_json(Json::parse(
            R"({"kind":"variance_scale","var":"b","divisor":100})")) ==
        make_variance_scale("b", 0.01));
  CHECK(error_kind([] { intervention_from_json(Json::parse(R"({"kind":"nope","var":"b"})")); })
            .has_value());
  CHECK(error_kind([] { intervention_from_json(Json::parse(R"({"kind":"do"})")); }).has_value());
}

TEST_CASE("describe") {
  CHECK(describe(kBeliefPill).find("b") != std::string::npos);
  CHECK(describe(kAssessment).find(";") != std::string::npos);
}
