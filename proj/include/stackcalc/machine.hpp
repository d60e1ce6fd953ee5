#pragma once

// The Krivine machine for the stack calculus. States pair a term closure
// with a stack closure; environments are persistent maps from stack
// variables to stack closures. The machine has no accepting halt: a run ends
// stuck (probing nil, or an unbound variable) or out of budget.

#include <deque>
#include <optional>
#include <variant>
#include <vector>

#include "stackcalc/syntax.hpp"

namespace stackcalc {

struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

struct StackClosure {
  StackExpr stack;
  Env env;
};

struct TermClosure {
  TermExpr term;
  Env env;
};

struct EnvNode {
  Name name;
  StackClosure value;
  Env next;
};

inline Env envBind(Env e, Name n, StackClosure v) {
  return std::make_shared<EnvNode>(EnvNode{std::move(n), std::move(v), std::move(e)});
}

inline const StackClosure* envLookup(const Env& e, const Name& n) {
  for (const EnvNode* cur = e.get(); cur; cur = cur->next.get())
    if (cur->name == n) return &cur->value;
  return nullptr;
}

inline std::vector<std::pair<Name, StackClosure>> envBindings(const Env& e) {
  std::vector<std::pair<Name, StackClosure>> out;
  NameSet seen;
  for (const EnvNode* cur = e.get(); cur; cur = cur->next.get())
    if (seen.insert(cur->name).second) out.emplace_back(cur->name, cur->value);
  return out;
}

struct MachineState {
  TermClosure focus;
  StackClosure context;
};

// ------------------------------------------------------------ car/cdr forms

// The car/cdr-normal form of a term is either mu a.P or car(cdr^n(base))
// with base a variable or nil.
struct MuForm {
  Name binder;
  ProcExpr process;
};
struct NilBase {};
struct Probe {
  std::variant<Name, NilBase> base;
  unsigned depth;
};
using CarCdrNF = std::variant<MuForm, Probe>;

inline CarCdrNF carCdrNF(const TermExpr& t) {
  if (auto* m = asMu(t)) return MuForm{m->binder, m->body};
  StackExpr s = asCar(t)->arg;
  unsigned pending = 0;
  while (true) {
    if (auto* d = asCdr(s)) {
      ++pending;
      s = d->arg;
    } else if (auto* c = asCons(s)) {
      if (pending == 0) return carCdrNF(c->head);
      --pending;
      s = c->tail;
    } else if (auto* v = asVar(s)) {
      return Probe{v->name, pending};
    } else {
      return Probe{NilBase{}, pending};
    }
  }
}

// ------------------------------------------------------------------ stepping

struct NilProbe {
  unsigned depth;
};
struct UnboundVariable {
  Name name;
};
struct Stuck {
  std::variant<NilProbe, UnboundVariable> reason;
};
struct StepLimit {};
using MachineOutcome = std::variant<Stuck, StepLimit>;

using StepResult = std::variant<MachineState, MachineOutcome>;

inline StepResult step(const MachineState& s) {
  CarCdrNF nf = carCdrNF(s.focus.term);
  if (auto* m = std::get_if<MuForm>(&nf)) {
    Env e = envBind(s.focus.env, m->binder, s.context);
    return MachineState{{m->process->head, e}, {m->process->tail, e}};
  }
  auto& probe = std::get<Probe>(nf);
  if (std::holds_alternative<NilBase>(probe.base))
    return MachineOutcome{Stuck{NilProbe{probe.depth}}};
  const Name& alpha = std::get<Name>(probe.base);
  const StackClosure* bound = envLookup(s.focus.env, alpha);
  if (!bound) return MachineOutcome{Stuck{UnboundVariable{alpha}}};
  return MachineState{{cadrN(bound->stack, probe.depth), bound->env}, s.context};
}

struct RunResult {
  std::vector<MachineState> trace;  // last `traceCapacity` states, in order
  MachineOutcome outcome{StepLimit{}};
  std::size_t steps = 0;
};

inline MachineState initialState(const ProcExpr& p) {
  return MachineState{{p->head, nullptr}, {p->tail, nullptr}};
}

inline RunResult run(const ProcExpr& p, std::size_t maxSteps,
                     std::size_t traceCapacity = SIZE_MAX) {
  RunResult res;
  std::deque<MachineState> ring;
  MachineState cur = initialState(p);
  ring.push_back(cur);
  for (std::size_t i = 0; i < maxSteps; ++i) {
    StepResult r = step(cur);
    if (auto* out = std::get_if<MachineOutcome>(&r)) {
      res.outcome = *out;
      res.steps = i;
      res.trace.assign(ring.begin(), ring.end());
      return res;
    }
    cur = std::get<MachineState>(r);
    ring.push_back(cur);
    if (ring.size() > traceCapacity && traceCapacity > 0) ring.pop_front();
    ++res.steps;
  }
  res.outcome = StepLimit{};
  res.trace.assign(ring.begin(), ring.end());
  return res;
}

// ------------------------------------------------------------------ readback

// Resolves environment bindings back into syntax; unbound free variables are
// left intact. Environments are acyclic by construction.
inline StackExpr readbackStack(const StackExpr& s, const Env& e);

namespace machdetail {

inline StackSubst substFor(const NameSet& fv, const Env& e) {
  StackSubst sub;
  for (const Name& n : fv)
    if (const StackClosure* c = envLookup(e, n)) sub[n] = readbackStack(c->stack, c->env);
  return sub;
}

}  // namespace machdetail

inline StackExpr readbackStack(const StackExpr& s, const Env& e) {
  return substStackMulti(s, machdetail::substFor(freeVars(s), e));
}
inline TermExpr readbackTerm(const TermExpr& t, const Env& e) {
  return substStackMulti(t, machdetail::substFor(freeVars(t), e));
}
inline ProcExpr readback(const MachineState& s) {
  return proc(readbackTerm(s.focus.term, s.focus.env),
              readbackStack(s.context.stack, s.context.env));
}

// One reduction step on the head spine of a process: the car/cdr
// administrative steps the machine performs implicitly, or the root beta.
// Used to relate consecutive machine states through readback.
inline std::optional<StackExpr> headStackStep(const StackExpr& s) {
  if (auto* d = asCdr(s)) {
    if (auto inner = headStackStep(d->arg)) return scdr(*inner);
    if (auto* c = asCons(d->arg)) return c->tail;
  }
  return std::nullopt;
}

inline std::optional<TermExpr> headTermStep(const TermExpr& t) {
  if (auto* c = asCar(t)) {
    if (auto inner = headStackStep(c->arg)) return car(*inner);
    if (auto* cons = asCons(c->arg)) return cons->head;
  }
  return std::nullopt;
}

inline std::optional<ProcExpr> headReductionStep(const ProcExpr& p) {
  if (auto t = headTermStep(p->head)) return proc(*t, p->tail);
  if (auto* m = asMu(p->head)) return substStack(m->body, p->tail, m->binder);
  return std::nullopt;
}

// ---------------------------------------------------------- control builders

// label(e, M) = mu b.(mu e.M * b) * (mu d. car(d) * b) :: b
inline TermExpr labelTerm(const Name& eps, const TermExpr& m) {
  NameSet avoid = freeVars(m);
  avoid.insert(eps);
  Name b = freshName(avoid, Name{"b"});
  avoid.insert(b);
  Name d = freshName(avoid, Name{"d"});
  return mu(b, proc(mu(eps, proc(m, svar(b))),
                    scons(mu(d, proc(car(svar(d)), svar(b))), svar(b))));
}

// resume(e, M) = mu g. car(e) * M :: g
inline TermExpr resumeTerm(const Name& eps, const TermExpr& m) {
  NameSet avoid = freeVars(m);
  avoid.insert(eps);
  Name g = freshName(avoid, Name{"g"});
  return mu(g, proc(car(svar(eps)), scons(m, svar(g))));
}

// raise(e, M) = mu g. car(e) * M :: nil
inline TermExpr raiseTerm(const Name& eps, const TermExpr& m) {
  NameSet avoid = freeVars(m);
  avoid.insert(eps);
  Name g = freshName(avoid, Name{"g"});
  return mu(g, proc(car(svar(eps)), scons(m, snil())));
}

// tryCatch(e, M, N) = mu b.(mu e.M * b) * (mu d. N * car(d) :: b) :: nil
inline TermExpr tryCatchTerm(const Name& eps, const TermExpr& m, const TermExpr& n) {
  NameSet avoid = freeVars(m);
  NameSet fvn = freeVars(n);
  avoid.insert(fvn.begin(), fvn.end());
  avoid.insert(eps);
  Name b = freshName(avoid, Name{"b"});
  avoid.insert(b);
  Name d = freshName(avoid, Name{"d"});
  return mu(b, proc(mu(eps, proc(m, svar(b))),
                    scons(mu(d, proc(n, scons(car(svar(d)), svar(b)))), snil())));
}

// Te(call/cc) in its reduced form.
inline TermExpr callccTerm() {
  Name a{"a"}, b{"b"};
  return mu(a, proc(car(svar(a)),
                    scons(mu(b, proc(car(svar(b)), scdr(svar(a)))), scdr(svar(a)))));
}

}  // namespace stackcalc
