#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "stackcalc/frontend.hpp"
#include "stackcalc/machine.hpp"
#include "stackcalc/reduction.hpp"
#include "stackcalc/typesys.hpp"

using namespace stackcalc;

namespace {

TermExpr identityTerm() {
  return mu(Name{"a"}, proc(car(svar(Name{"a"})), scdr(svar(Name{"a"}))));
}
TermExpr omegaTerm() { return mu(Name{"a"}, proc(car(svar(Name{"a"})), svar(Name{"a"}))); }

bool isNilProbe(const MachineOutcome& o) {
  auto* s = std::get_if<Stuck>(&o);
  return s && std::holds_alternative<NilProbe>(s->reason);
}

}  // namespace

TEST_CASE("car/cdr normal forms") {
  // car((mu a.P) :: nil) is the mu-form itself
  TermExpr i = identityTerm();
  CarCdrNF nf1 = carCdrNF(car(scons(i, snil())));
  auto* m = std::get_if<MuForm>(&nf1);
  REQUIRE(m);
  CHECK(m->binder == Name{"a"});

  // car(cdr(a)) probes variable a at depth 1
  CarCdrNF nf2 = carCdrNF(car(scdr(svar(Name{"a"}))));
  auto* p2 = std::get_if<Probe>(&nf2);
  REQUIRE(p2);
  CHECK(p2->depth == 1);
  CHECK(std::get<Name>(p2->base) == Name{"a"});

  // car(cdr(M :: nil)): cdr fires, car(nil) probes nil at depth 0
  CarCdrNF nf3 = carCdrNF(car(scdr(scons(i, snil()))));
  auto* p3 = std::get_if<Probe>(&nf3);
  REQUIRE(p3);
  CHECK(p3->depth == 0);
  CHECK(std::holds_alternative<NilBase>(p3->base));
}

TEST_CASE("the mu transition binds the context") {
  TermExpr i = identityTerm();
  ProcExpr p = proc(i, scons(i, snil()));
  MachineState s0 = initialState(p);
  StepResult r = step(s0);
  auto* s1 = std::get_if<MachineState>(&r);
  REQUIRE(s1);
  CHECK(printExpr(s1->focus.term) == "car(a)");
  CHECK(printExpr(s1->context.stack) == "cdr(a)");
  CHECK(s1->focus.env.get() == s1->context.env.get());
  const StackClosure* bound = envLookup(s1->focus.env, Name{"a"});
  REQUIRE(bound);
  CHECK(alphaEq(Expr{bound->stack}, Expr{scons(i, snil())}));
  // the previous environment is shared, not copied
  CHECK(s1->focus.env->next.get() == s0.focus.env.get());
}

TEST_CASE("I * I::nil sticks on a nil probe with the hand trace") {
  TermExpr i = identityTerm();
  RunResult res = run(proc(i, scons(i, snil())), 100);
  CHECK(isNilProbe(res.outcome));
  CHECK(res.steps <= 8);
  REQUIRE(res.trace.size() == 6);
  CHECK(printExpr(res.trace[0].focus.term) == "mu a. car(a) * cdr(a)");
  CHECK(printExpr(res.trace[1].focus.term) == "car(a)");
  CHECK(printExpr(res.trace[2].focus.term) == "car((mu a. car(a) * cdr(a)) :: nil)");
  CHECK(printExpr(res.trace[3].focus.term) == "car(a)");
  CHECK(printExpr(res.trace[4].focus.term) == "car(cdr(a))");
  CHECK(printExpr(res.trace[5].focus.term) == "car(cdr((mu a. car(a) * cdr(a)) :: nil))");
  // final readback mirrors the reduction endpoint car(nil) * cdr(nil)
  NormalizeResult nf = normalize(Expr{readback(res.trace.back())}, false);
  REQUIRE(nf.normalForm.has_value());
  CHECK(printExpr(*nf.normalForm) == "car(nil) * cdr(nil)");
}

TEST_CASE("omega * omega::nil never sticks") {
  TermExpr om = omegaTerm();
  RunResult res = run(proc(om, scons(om, snil())), 50);
  CHECK(std::holds_alternative<StepLimit>(res.outcome));
  CHECK(res.steps == 50);
}

TEST_CASE("omega * nil sticks after the nil lookup") {
  RunResult res = run(proc(omegaTerm(), snil()), 100);
  CHECK(isNilProbe(res.outcome));
  CHECK(res.steps == 2);
}

TEST_CASE("unbound variables are reported") {
  ProcExpr p = proc(car(svar(Name{"z"})), snil());
  RunResult res = run(p, 10);
  auto* stuck = std::get_if<Stuck>(&res.outcome);
  REQUIRE(stuck);
  auto* uv = std::get_if<UnboundVariable>(&stuck->reason);
  REQUIRE(uv);
  CHECK(uv->name == Name{"z"});
}

TEST_CASE("readback resolves environments") {
  Env e = envBind(nullptr, Name{"a"}, StackClosure{snil(), nullptr});
  MachineState s{{car(svar(Name{"a"})), e}, {snil(), nullptr}};
  CHECK(printExpr(readback(s)) == "car(nil) * nil");

  ProcExpr p = proc(identityTerm(), scons(identityTerm(), snil()));
  CHECK(alphaEq(Expr{readback(initialState(p))}, Expr{p}));
}

TEST_CASE("readback simulation along machine traces") {
  TermExpr i = identityTerm();
  std::vector<ProcExpr> programs{
      proc(i, scons(i, snil())),
      proc(omegaTerm(), scons(omegaTerm(), snil())),
      proc(labelTerm(Name{"e"}, i), scons(i, snil())),
      proc(tryCatchTerm(Name{"e"}, raiseTerm(Name{"e"}, i), i), snil()),
  };
  for (const auto& p : programs) {
    RunResult res = run(p, 40);
    for (std::size_t k = 0; k + 1 < res.trace.size(); ++k) {
      INFO(printExpr(p) << " at step " << k);
      CHECK(testgen::machineSimulates(res.trace[k], res.trace[k + 1]));
    }
  }
}

TEST_CASE("step is deterministic") {
  TermExpr i = identityTerm();
  ProcExpr p = proc(labelTerm(Name{"e"}, i), scons(i, snil()));
  RunResult r1 = run(p, 30);
  RunResult r2 = run(p, 30);
  REQUIRE(r1.trace.size() == r2.trace.size());
  for (std::size_t k = 0; k < r1.trace.size(); ++k)
    CHECK(alphaEq(Expr{readback(r1.trace[k])}, Expr{readback(r2.trace[k])}));
}

TEST_CASE("trace retention is bounded by the ring buffer") {
  TermExpr om = omegaTerm();
  RunResult res = run(proc(om, scons(om, snil())), 50, 8);
  CHECK(res.trace.size() == 8);
  CHECK(res.steps == 50);
}

TEST_CASE("try/catch routes the raised value to the handler") {
  TermExpr v = identityTerm();
  TermExpr handler = identityTerm();
  Name eps{"e"};
  TermExpr tc = tryCatchTerm(eps, raiseTerm(eps, v), handler);
  RunResult res = run(proc(tc, snil()), 40);

  // some state has the handler in execution position with car(d)::b as its
  // evaluation context and the raised value bound under d
  bool found = false;
  for (const auto& s : res.trace) {
    if (s.focus.term.get() != handler.get()) continue;
    auto* cons = asCons(s.context.stack);
    if (!cons) continue;
    auto* probe = asCar(cons->head);
    if (!probe) continue;
    auto* dvar = asVar(probe->arg);
    if (!dvar) continue;
    const StackClosure* bound = envLookup(s.context.env, dvar->name);
    if (!bound) continue;
    auto* vcons = asCons(bound->stack);
    if (!vcons) continue;
    if (alphaEq(Expr{vcons->head}, Expr{v}) && isNil(vcons->tail)) found = true;
  }
  CHECK(found);
}

TEST_CASE("label without resume behaves as its body") {
  TermExpr body = identityTerm();
  StackExpr ctx = scons(identityTerm(), snil());
  RunResult withLabel = run(proc(labelTerm(Name{"e"}, body), ctx), 40);
  RunResult plain = run(proc(body, ctx), 40);
  REQUIRE(withLabel.trace.size() >= plain.trace.size() + 2);

  // after the two installation steps the readbacks coincide, modulo the
  // variable-indirection steps that leave the readback unchanged
  auto collapsed = [](const std::vector<MachineState>& trace, std::size_t from) {
    std::vector<ProcExpr> out;
    for (std::size_t k = from; k < trace.size(); ++k) {
      ProcExpr r = readback(trace[k]);
      if (out.empty() || !alphaEq(out.back(), r)) out.push_back(std::move(r));
    }
    return out;
  };
  auto a = collapsed(withLabel.trace, 2);
  auto b = collapsed(plain.trace, 0);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    INFO("collapsed step " << k);
    CHECK(alphaEq(a[k], b[k]));
  }
  CHECK(isNilProbe(withLabel.outcome) == isNilProbe(plain.outcome));
}

TEST_CASE("resume re-installs the labelled context") {
  TermExpr v = identityTerm();
  Name eps{"e"};
  StackExpr original = snil();
  TermExpr lab = labelTerm(eps, resumeTerm(eps, v));
  RunResult res = run(proc(lab, original), 40);

  // the resumed value eventually executes against the original context
  bool found = false;
  for (const auto& s : res.trace) {
    auto* c = asCar(s.focus.term);
    if (!c) continue;
    auto* cons = asCons(c->arg);
    if (!cons || !alphaEq(Expr{cons->head}, Expr{v})) continue;
    if (alphaEq(Expr{readbackStack(s.context.stack, s.context.env)}, Expr{original}))
      found = true;
  }
  CHECK(found);
}

TEST_CASE("control builders type-check when their payloads do") {
  TermExpr i = identityTerm();
  Name eps{"e"};

  auto labelT = inferTerm(labelTerm(eps, i), Context{});
  CHECK(std::holds_alternative<Formula>(labelT));

  auto tcT = inferTerm(tryCatchTerm(eps, i, i), Context{});
  CHECK(std::holds_alternative<Formula>(tcT));

  // raise/resume keep the label variable free; give it a matching stream type
  Formula idT = farrow(fatom(Name{"a"}), fatom(Name{"a"}));
  Context ctx;
  ctx.entries.emplace_back(eps, farrow(farrow(idT, ffalsum()), fatom(Name{"s"})));
  CHECK(std::holds_alternative<Formula>(inferTerm(raiseTerm(eps, i), ctx)));

  Context ctx2;
  ctx2.entries.emplace_back(eps, farrow(farrow(idT, fatom(Name{"g"})), fatom(Name{"s"})));
  CHECK(std::holds_alternative<Formula>(inferTerm(resumeTerm(eps, i), ctx2)));
}

TEST_CASE("callccTerm is the reduced translation of call/cc") {
  CHECK(printExpr(callccTerm()) == "mu a. car(a) * (mu b. car(b) * cdr(a)) :: cdr(a)");
  Expr te = Expr{translate(testgen::callccSource())};
  NormalizeResult nf = normalize(te, false);
  REQUIRE(nf.normalForm.has_value());
  CHECK(alphaEq(*nf.normalForm, Expr{callccTerm()}));
  // typed at Peirce's law
  Formula a = fatom(Name{"a"}), b = fatom(Name{"b"});
  CHECK(checkTerm(callccTerm(), farrow(farrow(farrow(a, b), a), a), Context{}));
}
