#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "stackcalc/frontend.hpp"
#include "stackcalc/reduction.hpp"

using namespace stackcalc;

namespace {

TermExpr identityTerm() {
  return mu(Name{"a"}, proc(car(svar(Name{"a"})), scdr(svar(Name{"a"}))));
}
TermExpr omegaTerm() { return mu(Name{"a"}, proc(car(svar(Name{"a"})), svar(Name{"a"}))); }

}  // namespace

TEST_CASE("car projects the head of a cons") {
  // car((mu a. car(a) * a) :: nil) -> mu a. car(a) * a
  TermExpr e = car(scons(omegaTerm(), snil()));
  auto steps = oneStepReducts(Expr{e}, false);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].rule == RuleName::Car);
  CHECK(alphaEq(steps[0].after, Expr{omegaTerm()}));
}

TEST_CASE("eta0 applies only in extensional mode") {
  // mu b. car(g) * b  ->  car(g)
  TermExpr e = mu(Name{"b"}, proc(car(svar(Name{"g"})), svar(Name{"b"})));
  CHECK(oneStepReducts(Expr{e}, false).empty());
  auto steps = oneStepReducts(Expr{e}, true);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].rule == RuleName::Eta0);
  CHECK(alphaEq(steps[0].after, Expr{car(svar(Name{"g"}))}));

  // binder free in the body blocks the rule
  TermExpr blocked = mu(Name{"b"}, proc(car(svar(Name{"b"})), svar(Name{"b"})));
  CHECK(oneStepReducts(Expr{blocked}, true).empty());
}

TEST_CASE("eta1 requires alpha-equal argument occurrences") {
  StackExpr pi1 = scons(identityTerm(), snil());
  StackExpr pi2 = scons(mu(Name{"z"}, proc(car(svar(Name{"z"})), scdr(svar(Name{"z"})))), snil());
  // alpha-equal but not identical occurrences: the rule fires
  StackExpr e = scons(car(pi1), scdr(pi2));
  auto steps = oneStepReducts(Expr{e}, true);
  bool sawEta1 = false;
  for (auto& s : steps) sawEta1 |= s.rule == RuleName::Eta1;
  CHECK(sawEta1);

  StackExpr different = scons(car(pi1), scdr(scons(omegaTerm(), snil())));
  for (auto& s : oneStepReducts(Expr{different}, true)) CHECK(s.rule != RuleName::Eta1);
}

TEST_CASE("omega self-loop: exactly one reduct, back to itself in two steps") {
  ProcExpr om = proc(omegaTerm(), scons(omegaTerm(), snil()));
  auto steps = oneStepReducts(Expr{om}, false);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].rule == RuleName::Beta);
  // the beta step exposes the head projection; contracting it closes the loop
  auto steps2 = oneStepReducts(steps[0].after, false);
  REQUIRE(steps2.size() == 1);
  CHECK(steps2[0].rule == RuleName::Car);
  CHECK(alphaEq(steps2[0].after, Expr{om}));
}

TEST_CASE("normalize the identity self-application to car(nil) * cdr(nil)") {
  ProcExpr p = proc(identityTerm(), scons(identityTerm(), snil()));
  NormalizeResult res = normalize(Expr{p}, false);
  REQUIRE(res.normalForm.has_value());
  CHECK(printExpr(*res.normalForm) == "car(nil) * cdr(nil)");
  CHECK(res.trace.size() == 5);
  // each trace entry stores the whole expressions around the step
  for (std::size_t i = 0; i + 1 < res.trace.size(); ++i)
    CHECK(alphaEq(res.trace[i].after, res.trace[i + 1].before));
}

TEST_CASE("normalize detects the step limit") {
  ProcExpr om = proc(omegaTerm(), scons(omegaTerm(), snil()));
  NormalizeResult res = normalize(Expr{om}, false, 100);
  CHECK(res.limited());
  CHECK(res.trace.size() == 100);
}

TEST_CASE("normalize of a normal form is empty") {
  NormalizeResult res = normalize(Expr{snil()}, true);
  REQUIRE(res.normalForm.has_value());
  CHECK(res.trace.empty());
  CHECK(alphaEq(*res.normalForm, Expr{snil()}));
}

TEST_CASE("joinable finds common reducts") {
  ProcExpr left = proc(identityTerm(), snil());
  ProcExpr right = proc(car(snil()), scdr(snil()));
  // sanity: the expected witness is the normal form of the left side
  NormalizeResult nf = normalize(Expr{left}, false);
  REQUIRE(nf.normalForm.has_value());
  CHECK(alphaEq(*nf.normalForm, Expr{right}));

  auto j = joinable(Expr{left}, Expr{right}, false);
  REQUIRE(j.has_value());
  CHECK(alphaEq(*j, Expr{right}));

  auto refl = joinable(Expr{left}, Expr{left}, false);
  REQUIRE(refl.has_value());
  CHECK(alphaEq(*refl, Expr{left}));
}

TEST_CASE("joinable covers the named-term translation example") {
  // car(y) * g  joins  Te([b] \x. mu a. [g] y)
  auto r = parseLmu("[b] \\x. mu a. [g] y");
  REQUIRE(std::holds_alternative<LExpr>(r));
  Expr translated = translate(std::get<LExpr>(r));
  Expr target = Expr{proc(car(svar(Name{"y"})), svar(Name{"g"}))};
  auto j = joinable(target, translated, true);
  CHECK(j.has_value());
}

TEST_CASE("free variables never grow along a reduction step") {
  testgen::Rng rng(555);
  for (int i = 0; i < 200; ++i) {
    Expr e = testgen::randomExpr(rng, 4, true);
    NameSet before = freeVars(e);
    for (auto& s : oneStepReducts(e, true)) {
      for (const Name& n : freeVars(s.after)) {
        INFO(printExpr(e) << "  ->  " << printExpr(s.after));
        CHECK(before.contains(n));
      }
    }
  }
}

TEST_CASE("local confluence on random expressions") {
  testgen::Rng rng(2024);
  for (bool ext : {false, true}) {
    for (int i = 0; i < 120; ++i) {
      Expr e = testgen::randomExpr(rng, 4, true);
      auto steps = oneStepReducts(e, ext);
      for (std::size_t a = 0; a < steps.size(); ++a)
        for (std::size_t b = a + 1; b < steps.size(); ++b) {
          if (alphaEq(steps[a].after, steps[b].after)) continue;
          auto j = joinable(steps[a].after, steps[b].after, ext);
          INFO(printExpr(e) << " diverges to " << printExpr(steps[a].after) << " and "
                            << printExpr(steps[b].after));
          CHECK(j.has_value());
        }
    }
  }
}

TEST_CASE("leftmost-outermost and random strategies reach the same normal form") {
  testgen::Rng rng(777);
  int compared = 0;
  for (int i = 0; i < 150 && compared < 60; ++i) {
    Expr e = testgen::randomExpr(rng, 4, false);
    NormalizeResult lo = normalize(e, false, 400);
    if (!lo.normalForm) continue;
    NormalizeResult rnd = normalizeWith(e, false, 2000, [&](const auto& steps) {
      return static_cast<std::size_t>(rng.range(0, static_cast<int>(steps.size()) - 1));
    });
    if (!rnd.normalForm) continue;  // random walks may wander longer
    ++compared;
    CHECK(alphaEq(*lo.normalForm, *rnd.normalForm));
  }
  CHECK(compared >= 30);
}

TEST_CASE("reducts come in leftmost-outermost order") {
  // car(I :: nil) * cdr(I :: nil): redexes at the head first, then the tail
  TermExpr i = identityTerm();
  ProcExpr p = proc(car(scons(i, snil())), scdr(scons(i, snil())));
  auto steps = oneStepReducts(Expr{p}, false);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].position < steps[1].position);
  CHECK(steps[0].rule == RuleName::Car);
  CHECK(steps[1].rule == RuleName::Cdr);
}
