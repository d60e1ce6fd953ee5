#pragma once

// Seeded random generators and corpus builders shared by the unit and
// acceptance test suites.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "stackcalc/frontend.hpp"
#include "stackcalc/lambdamu.hpp"
#include "stackcalc/machine.hpp"
#include "stackcalc/prover.hpp"
#include "stackcalc/reduction.hpp"
#include "stackcalc/syntax.hpp"
#include "stackcalc/typesys.hpp"

namespace testgen {

using namespace stackcalc;

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}

  int range(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(eng);
  }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(eng) < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(range(0, static_cast<int>(v.size()) - 1))];
  }
};

// ------------------------------------------------------- stack expressions

struct ExprGen {
  Rng& rng;
  bool allowFree;  // when set, leaves may mention the free pool u, v
  std::vector<Name> scope;
  int freshCounter = 0;

  explicit ExprGen(Rng& r, bool free = false) : rng(r), allowFree(free) {}

  Name pushBinder() {
    // occasionally reuse an existing name to exercise shadowing
    if (!scope.empty() && rng.chance(0.15)) {
      Name n = rng.pick(scope);
      scope.push_back(n);
      return n;
    }
    Name n{"v" + std::to_string(freshCounter++)};
    scope.push_back(n);
    return n;
  }
  void popBinder() { scope.pop_back(); }

  StackExpr leafS() {
    if (!scope.empty() && rng.chance(0.7)) return svar(rng.pick(scope));
    if (allowFree && rng.chance(0.3)) return svar(Name{rng.chance(0.5) ? "u" : "w"});
    return snil();
  }

  StackExpr genS(int fuel) {
    if (fuel <= 0) return leafS();
    switch (rng.range(0, 9)) {
      case 0:
      case 1:
      case 2:
        return leafS();
      case 3:
      case 4:
      case 5:
        return scons(genT(fuel - 1), genS(fuel - 1));
      case 6:
      case 7:
        return scdr(genS(fuel - 1));
      case 8: {
        // eta1 shape: car(pi) :: cdr(pi)
        StackExpr pi = genS(fuel - 1);
        return scons(car(pi), scdr(pi));
      }
      default:
        return snil();
    }
  }

  TermExpr genT(int fuel) {
    if (fuel <= 0) return car(leafS());
    switch (rng.range(0, 5)) {
      case 0:
      case 1: {
        Name b = pushBinder();
        ProcExpr p = genP(fuel - 1);
        popBinder();
        return mu(b, p);
      }
      case 2:
      case 3:
        return car(genS(fuel - 1));
      case 4: {
        // eta0 shape: mu a. M * a with a not free in M
        TermExpr m = genT(fuel - 1);
        Name a{"e" + std::to_string(freshCounter++)};
        return mu(a, proc(m, svar(a)));
      }
      default: {
        Name b = pushBinder();
        ProcExpr p = genP(fuel - 1);
        popBinder();
        return mu(b, p);
      }
    }
  }

  ProcExpr genP(int fuel) {
    if (rng.chance(0.3)) {
      // beta shape
      Name b = pushBinder();
      ProcExpr body = genP(fuel - 1);
      popBinder();
      return proc(mu(b, body), genS(fuel - 1));
    }
    return proc(genT(fuel - 1), genS(fuel - 1));
  }

  Expr genE(int fuel) {
    switch (rng.range(0, 2)) {
      case 0: return Expr{genS(fuel)};
      case 1: return Expr{genT(fuel)};
      default: return Expr{genP(fuel)};
    }
  }
};

inline Expr randomExpr(Rng& rng, int fuel, bool allowFree = true) {
  ExprGen g(rng, allowFree);
  return g.genE(fuel);
}

inline Expr randomClosedExpr(Rng& rng, int fuel) {
  ExprGen g(rng, false);
  return g.genE(fuel);
}

// ---------------------------------------------------------------- formulas

inline Formula randomFormula(Rng& rng, int arrows, const std::vector<Name>& atoms) {
  if (arrows <= 0) {
    if (rng.chance(0.2)) return ffalsum();
    return fatom(rng.pick(atoms));
  }
  int left = rng.range(0, arrows - 1);
  return farrow(randomFormula(rng, left, atoms), randomFormula(rng, arrows - 1 - left, atoms));
}

// every formula over the leaves {a, b, false} with at most maxArrows arrows
inline std::vector<Formula> allFormulasUpTo(unsigned maxArrows) {
  std::vector<std::vector<Formula>> byArrows(maxArrows + 1);
  byArrows[0] = {fatom(Name{"a"}), fatom(Name{"b"}), ffalsum()};
  for (unsigned n = 1; n <= maxArrows; ++n)
    for (unsigned k = 0; k < n; ++k)
      for (const auto& l : byArrows[k])
        for (const auto& r : byArrows[n - 1 - k]) byArrows[n].push_back(farrow(l, r));
  std::vector<Formula> out;
  for (auto& level : byArrows) out.insert(out.end(), level.begin(), level.end());
  return out;
}

// ---------------------------------------------------------------- lambda-mu

struct LmuGen {
  Rng& rng;
  std::vector<Name> vars;   // lambda scope
  std::vector<Name> names;  // mu scope
  int freshCounter = 0;

  explicit LmuGen(Rng& r) : rng(r) {}

  Name freshVar() { return Name{"x" + std::to_string(freshCounter++)}; }
  Name freshNameN() { return Name{"k" + std::to_string(freshCounter++)}; }

  LTerm leaf() {
    if (!vars.empty()) return lvar(rng.pick(vars));
    return llam(Name{"z"}, lvar(Name{"z"}));
  }

  LTerm genT(int fuel) {
    if (fuel <= 0) return leaf();
    switch (rng.range(0, 7)) {
      case 0:
      case 1:
        return leaf();
      case 2:
      case 3: {
        Name x = freshVar();
        vars.push_back(x);
        LTerm body = genT(fuel - 1);
        vars.pop_back();
        return llam(x, body);
      }
      case 4:
      case 5:
        return lapp(genT(fuel - 1), genT(fuel - 1));
      case 6: {
        Name a = freshNameN();
        names.push_back(a);
        LProc p = genProc(fuel - 1);
        names.pop_back();
        return lmu(a, p);
      }
      default: {
        // eta shape: \x. t x with x not free in t
        LTerm t = genT(fuel - 1);
        Name x = freshVar();
        return llam(x, lapp(t, lvar(x)));
      }
    }
  }

  // requires a non-empty name scope (genT pushes one before calling)
  LProc genProc(int fuel) {
    Name a = rng.pick(names);
    if (rng.chance(0.3)) {
      // rho shape: [b](mu a.p)
      Name inner = freshNameN();
      names.push_back(inner);
      LProc p = genProc(fuel - 1);
      names.pop_back();
      return lnamed(a, lmu(inner, p));
    }
    return lnamed(a, genT(fuel - 1));
  }
};

inline LTerm randomLTerm(Rng& rng, int fuel) {
  LmuGen g(rng);
  return g.genT(fuel);
}

inline LTerm callccSource() {
  // \f. mu a. [a] (f (\x. mu d. [a] x))
  return llam(Name{"f"},
              lmu(Name{"a"}, lnamed(Name{"a"},
                                    lapp(lvar(Name{"f"}),
                                         llam(Name{"x"}, lmu(Name{"d"},
                                                             lnamed(Name{"a"}, lvar(Name{"x"}))))))));
}

// ---------------------------------------------------- lambda-mu step corpus

struct LmuStepSample {
  LExpr before;
  LRule rule;
  LExpr after;
};

// Collects one-step reductions until every rule is covered and `count`
// samples exist.
inline std::vector<LmuStepSample> lmuStepCorpus(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<LmuStepSample> out;
  std::map<LRule, std::size_t> covered;
  std::size_t guard = 0;
  while ((out.size() < count || covered.size() < 6) && guard < 100'000) {
    ++guard;
    LmuGen g(rng);
    LTerm t = g.genT(rng.range(2, 5));
    for (auto& st : lmuOneStep(LExpr{t}, true)) {
      if (out.size() >= count && covered.contains(st.rule)) continue;
      out.push_back({LExpr{t}, st.rule, st.reduct});
      ++covered[st.rule];
      if (out.size() >= count && covered.size() >= 6) break;
    }
  }
  return out;
}

// -------------------------------------------------------- typed judgements

struct TypedJudgement {
  Expr expr;
  std::optional<Formula> type;  // empty for process judgements
  Context ctx;

  Judgement judgement() const { return Judgement{expr, type, ctx}; }
};

// replaces the binder of a random mu node by a fresh name
inline Expr alphaVariant(Rng& rng, const Expr& e) {
  struct Walk {
    Rng& rng;
    int seen = 0;

    StackExpr goS(const StackExpr& s) {
      if (auto* c = asCons(s)) return scons(goT(c->head), goS(c->tail));
      if (auto* d = asCdr(s)) return scdr(goS(d->arg));
      return s;
    }
    TermExpr goT(const TermExpr& t) {
      if (auto* c = asCar(t)) return car(goS(c->arg));
      auto* m = asMu(t);
      ProcExpr body = goP(m->body);
      ++seen;
      if (rng.chance(0.5)) {
        NameSet avoid = freeVars(body);
        avoid.insert(m->binder);
        Name fresh = freshName(avoid, Name{"r" + std::to_string(seen)});
        return mu(fresh, substStack(body, svar(fresh), m->binder));
      }
      return mu(m->binder, body);
    }
    ProcExpr goP(const ProcExpr& p) { return proc(goT(p->head), goS(p->tail)); }
  } walk{rng};
  return std::visit(
      [&](const auto& x) -> Expr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, StackExpr>)
          return walk.goS(x);
        else if constexpr (std::is_same_v<T, TermExpr>)
          return walk.goT(x);
        else
          return walk.goP(x);
      },
      e);
}

// Random closed expressions filtered through inference.
inline std::vector<TypedJudgement> typedByRejection(Rng& rng, std::size_t count) {
  std::vector<TypedJudgement> out;
  std::size_t guard = 0;
  while (out.size() < count && guard < 200'000) {
    ++guard;
    Expr e = randomClosedExpr(rng, rng.range(2, 5));
    if (auto* t = std::get_if<TermExpr>(&e)) {
      auto r = inferTerm(*t, Context{});
      if (auto* f = std::get_if<Formula>(&r)) out.push_back({e, *f, Context{}});
    } else if (auto* s = std::get_if<StackExpr>(&e)) {
      auto r = inferStack(*s, Context{});
      if (auto* f = std::get_if<Formula>(&r)) out.push_back({e, *f, Context{}});
    } else {
      if (!inferProcess(std::get<ProcExpr>(e), Context{}))
        out.push_back({e, std::nullopt, Context{}});
    }
  }
  return out;
}

// Proof terms produced by the decision procedure on random valid formulas.
inline std::vector<TypedJudgement> typedFromProver(Rng& rng, std::size_t count) {
  std::vector<Name> atoms{Name{"a"}, Name{"b"}, Name{"c"}};
  std::vector<TypedJudgement> out;
  std::size_t guard = 0;
  while (out.size() < count && guard < 50'000) {
    ++guard;
    Formula f = randomFormula(rng, rng.range(1, 4), atoms);
    if (!entails({}, f)) continue;
    ProofResult r = decide(f, {});
    if (auto* p = std::get_if<Proof>(&r)) out.push_back({Expr{p->term}, p->goal, p->hyps});
  }
  return out;
}

// Typable lambda-mu terms (certified by the lambda-mu type oracle), with contexts.
struct TypedLmu {
  LTerm term;
  Formula type;
  Context gamma;
  Context delta;
};

inline std::vector<TypedLmu> typedLmuCorpus(Rng& rng, std::size_t count) {
  std::vector<Name> atoms{Name{"p"}, Name{"q"}};
  std::vector<TypedLmu> out;
  std::size_t guard = 0;
  while (out.size() < count && guard < 400'000) {
    ++guard;
    Context gamma, delta;
    int nv = rng.range(0, 2);
    for (int i = 0; i < nv; ++i)
      gamma.entries.emplace_back(Name{"y" + std::to_string(i)},
                                 randomFormula(rng, rng.range(0, 2), atoms));
    int nn = rng.range(0, 1);
    for (int i = 0; i < nn; ++i)
      delta.entries.emplace_back(Name{"n" + std::to_string(i)},
                                 randomFormula(rng, rng.range(0, 2), atoms));
    LmuGen g(rng);
    for (const auto& [n, f] : gamma.entries) g.vars.push_back(n);
    for (const auto& [n, f] : delta.entries) g.names.push_back(n);
    LTerm t = g.genT(rng.range(1, 4));
    auto r = lmuInferTerm(t, gamma, delta);
    if (auto* f = std::get_if<Formula>(&r)) out.push_back({t, *f, gamma, delta});
  }
  return out;
}

// The translated stack judgement of a typed lambda-mu term (Gamma -> C, Delta).
inline TypedJudgement translateJudgement(const TypedLmu& tl) {
  NameSet atomAvoid;
  for (const auto& [n, f] : tl.gamma.entries) atomsOf(f, atomAvoid);
  for (const auto& [n, f] : tl.delta.entries) atomsOf(f, atomAvoid);
  atomsOf(tl.type, atomAvoid);
  Context ctx = translateTypedContext(tl.gamma, atomAvoid);
  for (const auto& [n, f] : tl.delta.entries) ctx.entries.emplace_back(n, f);
  return TypedJudgement{Expr{translate(tl.term)}, tl.type, ctx};
}

// Mixed corpus for the subject-reduction and normalization properties.
inline std::vector<TypedJudgement> typedStackCorpus(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::size_t third = count / 3;
  std::vector<TypedJudgement> out = typedByRejection(rng, count - 2 * third);
  for (auto& j : typedFromProver(rng, third)) out.push_back(std::move(j));
  for (auto& tl : typedLmuCorpus(rng, third)) out.push_back(translateJudgement(tl));
  return out;
}

// ----------------------------------------------------------- convertibility

// Witness that two stack expressions are convertible: compare normal forms
// first (leftmost-outermost finds them in this confluent system), falling
// back to the bidirectional joinability search for non-normalizing inputs.
inline std::optional<Expr> commonReduct(const Expr& e1, const Expr& e2, bool extensional) {
  if (alphaEq(e1, e2)) return e1;
  NormalizeResult n1 = normalize(e1, extensional, 4'000);
  NormalizeResult n2 = normalize(e2, extensional, 4'000);
  if (n1.normalForm && n2.normalForm) {
    if (alphaEq(*n1.normalForm, *n2.normalForm)) return n1.normalForm;
    return std::nullopt;  // distinct normal forms are never convertible
  }
  return joinable(e1, e2, extensional, 20'000);
}

// ------------------------------------------------------- machine simulation

// readback(s) must reduce to readback(s') by head car/cdr steps plus at most
// one beta.
inline bool machineSimulates(const MachineState& s, const MachineState& s2) {
  ProcExpr cur = readback(s);
  ProcExpr target = readback(s2);
  int betas = 0;
  for (int i = 0; i < 500; ++i) {
    if (alphaEq(cur, target)) return betas <= 1;
    if (auto t = headTermStep(cur->head)) {
      cur = proc(*t, cur->tail);
      continue;
    }
    if (auto* m = asMu(cur->head)) {
      cur = substStack(m->body, cur->tail, m->binder);
      ++betas;
      continue;
    }
    return false;
  }
  return false;
}

}  // namespace testgen
