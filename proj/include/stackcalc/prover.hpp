#pragma once

// Decision procedure for semantic entailment ~B1,...,~Bn |= A in the
// {->,false}-fragment: produces a stack-calculus proof term typed A under
// hypotheses b1:B1,...,bn:Bn, or a boolean countermodel falsifying the goal
// and every hypothesis. The two proof-term constructions below mirror the
// case analyses used to show that unprovable sets can be saturated.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stackcalc/syntax.hpp"
#include "stackcalc/typesys.hpp"

namespace stackcalc {

// Boolean valuation; falsum is always false and is not stored.
using Valuation = std::map<Name, bool>;

inline bool evalFormula(const Valuation& v, const Formula& f) {
  if (isFalsum(f)) return false;
  if (auto* a = asAtom(f)) {
    auto it = v.find(a->name);
    return it != v.end() && it->second;
  }
  auto* ar = asArrow(f);
  return !evalFormula(v, ar->lhs) || evalFormula(v, ar->rhs);
}

// ~B1,...,~Bn |= A: every valuation falsifying all hypotheses satisfies the
// goal. Iterates all valuations over the occurring atoms.
inline bool entails(const std::vector<Formula>& hyps, const Formula& goal) {
  NameSet atoms;
  atomsOf(goal, atoms);
  for (const auto& h : hyps) atomsOf(h, atoms);
  std::vector<Name> names(atoms.begin(), atoms.end());
  if (names.size() > 8 * sizeof(unsigned long long))
    throw std::invalid_argument("too many atoms for truth-table evaluation");
  unsigned long long total = 1ull << names.size();
  for (unsigned long long bits = 0; bits < total; ++bits) {
    Valuation v;
    for (std::size_t i = 0; i < names.size(); ++i) v[names[i]] = (bits >> i) & 1;
    bool hypsFalse = true;
    for (const auto& h : hyps)
      if (evalFormula(v, h)) {
        hypsFalse = false;
        break;
      }
    if (hypsFalse && !evalFormula(v, goal)) return false;
  }
  return true;
}

// --------------------------------------------------------- formula measures

inline Formula terminalOf(const Formula& f) {
  if (auto* a = asArrow(f)) return terminalOf(a->rhs);
  return f;
}

inline std::vector<Formula> premList(const Formula& f) {
  std::vector<Formula> out;
  Formula cur = f;
  while (auto* a = asArrow(cur)) {
    out.push_back(a->lhs);
    cur = a->rhs;
  }
  return out;
}

inline Formula terminal(const Formula& f) { return terminalOf(f); }
inline FormulaSet premisses(const Formula& f) {
  FormulaSet out;
  for (auto& p : premList(f)) out.insert(p);
  return out;
}

inline FormulaSet terminalSetOf(const FormulaSet& phi) {
  FormulaSet out;
  for (const auto& f : phi) out.insert(terminalOf(f));
  return out;
}

inline FormulaSet premSetOf(const FormulaSet& phi) {
  FormulaSet out;
  for (const auto& f : phi)
    for (const auto& p : premList(f)) out.insert(p);
  return out;
}

// premTerm(Phi) = { A in prem(Phi) : terminal(A) in terminal(Phi) u {false} }
inline FormulaSet premTerm(const FormulaSet& phi) {
  FormulaSet terms = terminalSetOf(phi);
  FormulaSet out;
  for (const auto& a : premSetOf(phi)) {
    Formula t = terminalOf(a);
    if (isFalsum(t) || terms.contains(t)) out.insert(a);
  }
  return out;
}

// saturated: every member of premTerm(Phi) has a premiss already in Phi
inline bool isSaturated(const FormulaSet& phi) {
  for (const auto& a : premTerm(phi)) {
    bool hit = false;
    for (const auto& p : premList(a))
      if (phi.contains(p)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

// ----------------------------------------------------------------- results

struct Proof {
  TermExpr term;
  Formula goal;
  Context hyps;
};

struct Countermodel {
  Valuation valuation;
  FormulaSet saturatedPhi;  // certificate: the saturated set that produced it
};

using ProofResult = std::variant<Proof, Countermodel>;

struct SearchState {
  Formula goal;
  std::vector<std::pair<Name, Formula>> hyps;
  FormulaSet phi;  // {goal} together with the hypothesis formulas

  std::size_t formulaCount() const { return hyps.size() + 1; }
  const Formula& formulaAt(std::size_t i) const { return i == 0 ? goal : hyps[i - 1].second; }

  static SearchState make(Formula goal, std::vector<std::pair<Name, Formula>> hyps) {
    FormulaSet phi;
    phi.insert(goal);
    for (auto& [n, f] : hyps) phi.insert(f);
    return SearchState{std::move(goal), std::move(hyps), std::move(phi)};
  }
};

namespace provedetail {

struct NameSupply {
  NameSet used;
  Name fresh(const Name& base) {
    Name n = freshName(used, base);
    used.insert(n);
    return n;
  }
};

inline NameSupply supplyFor(const SearchState& st) {
  NameSupply s;
  for (const auto& [n, f] : st.hyps) s.used.insert(n);
  return s;
}

// index of the hypothesis variable: 0 is the goal binder
inline StackExpr indexVar(const SearchState& st, std::size_t i, const Name& b0) {
  return svar(i == 0 ? b0 : st.hyps[i - 1].first);
}

// scan order: formulas by index, premisses left to right, duplicates dropped
inline std::vector<Formula> orderedPremTerm(const SearchState& st) {
  FormulaSet terms;
  for (std::size_t i = 0; i < st.formulaCount(); ++i) terms.insert(terminalOf(st.formulaAt(i)));
  std::vector<Formula> out;
  FormulaSet seen;
  for (std::size_t i = 0; i < st.formulaCount(); ++i)
    for (const auto& p : premList(st.formulaAt(i))) {
      if (seen.contains(p)) continue;
      seen.insert(p);
      Formula t = terminalOf(p);
      if (isFalsum(t) || terms.contains(t)) out.push_back(p);
    }
  return out;
}

// first formula index owning `a` as a premiss, with its leftmost 1-based slot
inline std::pair<std::size_t, unsigned> premissPosition(const SearchState& st, const Formula& a) {
  for (std::size_t i = 0; i < st.formulaCount(); ++i) {
    auto prems = premList(st.formulaAt(i));
    for (std::size_t j = 0; j < prems.size(); ++j)
      if (formulaEq(prems[j], a)) return {i, static_cast<unsigned>(j + 1)};
  }
  throw std::invalid_argument("formula is not a premiss of the search state");
}

inline std::size_t terminalIndex(const SearchState& st, const Formula& g) {
  for (std::size_t i = 0; i < st.formulaCount(); ++i)
    if (formulaEq(terminalOf(st.formulaAt(i)), g)) return i;
  throw std::invalid_argument("no state formula has the required terminal");
}

}  // namespace provedetail

// Proof term for an atomic member A of premTerm(phi).
//
// Case A != false: some B_j has i-th premiss A and some B_k has terminal A;
//   the term is  mu b0.(mu e. car(cdr^{i-1}(b_j)) * cdr^{m}(e)) * b_k
//   with m = rank(B_k). Case A == false: the stack becomes nil and the
//   mu e-abstraction is applied to b0 (any formula fits, e is unused).
inline TermExpr atomicWitnessTerm(const SearchState& state, const Formula& atomicWitness) {
  bool isBot = isFalsum(atomicWitness);
  if (!isBot && !asAtom(atomicWitness))
    throw std::invalid_argument("atomicWitnessTerm requires an atomic witness");

  provedetail::NameSupply supply = provedetail::supplyFor(state);
  Name b0 = supply.fresh(Name{"b0"});
  Name e = supply.fresh(Name{"e"});

  auto [j, i] = provedetail::premissPosition(state, atomicWitness);
  StackExpr bj = provedetail::indexVar(state, j, b0);
  TermExpr probe = cadrN(bj, i - 1);

  if (isBot) {
    return mu(b0, proc(mu(e, proc(probe, snil())), svar(b0)));
  }
  std::size_t k = provedetail::terminalIndex(state, atomicWitness);
  unsigned m = rank(state.formulaAt(k));
  StackExpr bk = provedetail::indexVar(state, k, b0);
  return mu(b0, proc(mu(e, proc(probe, cdrN(svar(e), m))), bk));
}

// Combines subproofs M_i : goal under hyps + g_i:C_i into a proof of the goal,
// where a = C_1 -> ... -> C_m -> G is a member of premTerm(phi):
//
//   N_i = mu g_i. M_i * b0
//   pi  = cdr^{rank(B_k)}(e)  if G = terminal(B_k)   (case 1)
//       = nil                 if G = false           (case 2)
//   w   = N_1 :: ... :: N_m :: pi
//   mu b0.(mu d.(mu e. car(cdr^{j-1}(d)) * w) * b_k') * b_h
//
// with B_h owning a as its j-th premiss, b_k' = b_k in case 1 and b0 in
// case 2.
inline TermExpr combineSubproofs(const SearchState& state, const Formula& a,
                              const std::vector<TermExpr>& subproofs,
                              const std::vector<Name>& gammas) {
  auto prems = premList(a);
  if (prems.empty()) throw std::invalid_argument("combineSubproofs requires a non-atomic formula");
  if (subproofs.size() != prems.size() || gammas.size() != prems.size())
    throw std::invalid_argument("one subproof per premiss required");

  provedetail::NameSupply supply = provedetail::supplyFor(state);
  for (const Name& g : gammas) supply.used.insert(g);
  Name b0 = supply.fresh(Name{"b0"});
  Name e = supply.fresh(Name{"e"});
  Name d = supply.fresh(Name{"d"});

  Formula g = terminalOf(a);
  StackExpr pi;
  StackExpr bkPrime;
  if (isFalsum(g)) {
    pi = snil();
    bkPrime = svar(b0);
  } else {
    std::size_t k = provedetail::terminalIndex(state, g);
    pi = cdrN(svar(e), rank(state.formulaAt(k)));
    bkPrime = provedetail::indexVar(state, k, b0);
  }

  StackExpr w = pi;
  for (std::size_t i = prems.size(); i-- > 0;)
    w = scons(mu(gammas[i], proc(subproofs[i], svar(b0))), w);

  auto [h, j] = provedetail::premissPosition(state, a);
  StackExpr bh = provedetail::indexVar(state, h, b0);
  return mu(b0, proc(mu(d, proc(mu(e, proc(cadrN(svar(d), j - 1), w)), bkPrime)), bh));
}

namespace provedetail {

inline ProofResult decideState(const SearchState& state, NameSupply& supply, std::size_t depth,
                               std::size_t maxDepth) {
  if (depth > maxDepth)
    throw std::logic_error("prover recursion exceeded the subformula closure bound");

  std::vector<Formula> candidates = orderedPremTerm(state);

  // (a) an atomic member of premTerm yields a proof directly
  for (const auto& c : candidates)
    if (asAtom(c) || isFalsum(c)) return Proof{atomicWitnessTerm(state, c), state.goal, Context{}};

  // (b) saturation yields a countermodel: an atom is false exactly when it
  // is the terminal of some formula in phi
  bool saturated = true;
  Formula pick;
  for (const auto& c : candidates) {
    bool hasPremInPhi = false;
    for (const auto& p : premList(c))
      if (state.phi.contains(p)) {
        hasPremInPhi = true;
        break;
      }
    if (!hasPremInPhi) {
      saturated = false;
      pick = c;
      break;
    }
  }
  if (saturated) {
    FormulaSet terms = terminalSetOf(state.phi);
    NameSet atoms;
    for (const auto& f : state.phi) atomsOf(f, atoms);
    Valuation v;
    for (const Name& n : atoms) v[n] = !terms.contains(fatom(n));
    return Countermodel{std::move(v), state.phi};
  }

  // (c) extend by the premisses of the first unsaturated candidate,
  // leftmost first; any countermodel from a recursive call falsifies a
  // superset of phi and is returned unchanged
  auto prems = premList(pick);
  std::vector<TermExpr> subproofs;
  std::vector<Name> gammas;
  for (const auto& c : prems) {
    Name gi = supply.fresh(Name{"g"});
    SearchState ext = state;
    ext.hyps.emplace_back(gi, c);
    ext.phi.insert(c);
    ProofResult sub = decideState(ext, supply, depth + 1, maxDepth);
    if (auto* cm = std::get_if<Countermodel>(&sub)) return *cm;
    subproofs.push_back(std::get<Proof>(sub).term);
    gammas.push_back(gi);
  }
  return Proof{combineSubproofs(state, pick, subproofs, gammas), state.goal, Context{}};
}

inline std::size_t subformulaClosureSize(const SearchState& st) {
  FormulaSet closure;
  std::vector<Formula> work;
  for (std::size_t i = 0; i < st.formulaCount(); ++i) work.push_back(st.formulaAt(i));
  while (!work.empty()) {
    Formula f = work.back();
    work.pop_back();
    if (!closure.insert(f).second) continue;
    if (auto* a = asArrow(f)) {
      work.push_back(a->lhs);
      work.push_back(a->rhs);
    }
  }
  return closure.size();
}

}  // namespace provedetail

// Decides ~B1,...,~Bn |= goal. Hypothesis variables are named b1,...,bn.
inline ProofResult decide(const Formula& goal, const std::vector<Formula>& hyps) {
  std::vector<std::pair<Name, Formula>> named;
  named.reserve(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i)
    named.emplace_back(Name{"b" + std::to_string(i + 1)}, hyps[i]);
  SearchState state = SearchState::make(goal, named);
  provedetail::NameSupply supply = provedetail::supplyFor(state);
  std::size_t maxDepth = provedetail::subformulaClosureSize(state) + 1;
  ProofResult res = provedetail::decideState(state, supply, 0, maxDepth);
  if (auto* p = std::get_if<Proof>(&res)) {
    Context ctx;
    for (const auto& [n, f] : named) ctx.entries.emplace_back(n, f);
    p->hyps = std::move(ctx);
  }
  return res;
}

}  // namespace stackcalc
