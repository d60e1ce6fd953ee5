#pragma once

// Reduction for the stack calculus. Base rules: (beta) (mu a.P)*pi -> P[pi/a],
// (car) car(M::pi) -> M, (cdr) cdr(M::pi) -> pi. Extensional mode adds
// (eta0) mu a.M*a -> M when a is not free in M, and the non-left-linear
// (eta1) car(pi)::cdr(pi) -> pi, where the two occurrences of pi must be
// alpha-equal.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stackcalc/syntax.hpp"

namespace stackcalc {

enum class RuleName { Beta, Car, Cdr, Eta0, Eta1 };

inline const char* ruleName(RuleName r) {
  switch (r) {
    case RuleName::Beta: return "beta";
    case RuleName::Car: return "car";
    case RuleName::Cdr: return "cdr";
    case RuleName::Eta0: return "eta0";
    case RuleName::Eta1: return "eta1";
  }
  return "?";
}

struct ReductionStep {
  RuleName rule;
  std::vector<int> position;  // child indices; cons/process: 0 head, 1 tail
  Expr before;                // whole expression
  Expr after;                 // whole expression with the redex contracted
};

namespace reddetail {

// Local contraction when the node itself is a redex. Each rule maps a sort
// to the same sort.
inline std::optional<std::pair<RuleName, ProcExpr>> redexP(const ProcExpr& p) {
  if (auto* m = asMu(p->head))
    return std::pair{RuleName::Beta, substStack(m->body, p->tail, m->binder)};
  return std::nullopt;
}

inline std::optional<std::pair<RuleName, TermExpr>> redexT(const TermExpr& t, bool ext) {
  if (auto* c = asCar(t)) {
    if (auto* cons = asCons(c->arg)) return std::pair{RuleName::Car, cons->head};
    return std::nullopt;
  }
  if (!ext) return std::nullopt;
  auto* m = asMu(t);
  if (auto* v = asVar(m->body->tail))
    if (v->name == m->binder && !freeVars(m->body->head).contains(m->binder))
      return std::pair{RuleName::Eta0, m->body->head};
  return std::nullopt;
}

inline std::optional<std::pair<RuleName, StackExpr>> redexS(const StackExpr& s, bool ext) {
  if (auto* d = asCdr(s)) {
    if (auto* cons = asCons(d->arg)) return std::pair{RuleName::Cdr, cons->tail};
    return std::nullopt;
  }
  if (!ext) return std::nullopt;
  if (auto* cons = asCons(s))
    if (auto* hc = asCar(cons->head))
      if (auto* tc = asCdr(cons->tail))
        if (alphaEq(hc->arg, tc->arg)) return std::pair{RuleName::Eta1, hc->arg};
  return std::nullopt;
}

struct Hit {
  RuleName rule;
  std::vector<int> position;
  Expr contractum;  // same sort as the redex
};

inline void collectS(const StackExpr& s, bool ext, std::vector<int>& pos, std::vector<Hit>& out);
inline void collectT(const TermExpr& t, bool ext, std::vector<int>& pos, std::vector<Hit>& out);
inline void collectP(const ProcExpr& p, bool ext, std::vector<int>& pos, std::vector<Hit>& out);

inline void collectS(const StackExpr& s, bool ext, std::vector<int>& pos, std::vector<Hit>& out) {
  if (auto r = redexS(s, ext)) out.push_back({r->first, pos, Expr{r->second}});
  if (auto* c = asCons(s)) {
    pos.push_back(0);
    collectT(c->head, ext, pos, out);
    pos.back() = 1;
    collectS(c->tail, ext, pos, out);
    pos.pop_back();
  } else if (auto* d = asCdr(s)) {
    pos.push_back(0);
    collectS(d->arg, ext, pos, out);
    pos.pop_back();
  }
}

inline void collectT(const TermExpr& t, bool ext, std::vector<int>& pos, std::vector<Hit>& out) {
  if (auto r = redexT(t, ext)) out.push_back({r->first, pos, Expr{r->second}});
  if (auto* m = asMu(t)) {
    pos.push_back(0);
    collectP(m->body, ext, pos, out);
    pos.pop_back();
  } else {
    pos.push_back(0);
    collectS(asCar(t)->arg, ext, pos, out);
    pos.pop_back();
  }
}

inline void collectP(const ProcExpr& p, bool ext, std::vector<int>& pos, std::vector<Hit>& out) {
  if (auto r = redexP(p)) out.push_back({r->first, pos, Expr{r->second}});
  pos.push_back(0);
  collectT(p->head, ext, pos, out);
  pos.back() = 1;
  collectS(p->tail, ext, pos, out);
  pos.pop_back();
}

inline StackExpr replaceS(const StackExpr& s, const std::vector<int>& pos, std::size_t i,
                          const Expr& sub);
inline TermExpr replaceT(const TermExpr& t, const std::vector<int>& pos, std::size_t i,
                         const Expr& sub);
inline ProcExpr replaceP(const ProcExpr& p, const std::vector<int>& pos, std::size_t i,
                         const Expr& sub);

inline StackExpr replaceS(const StackExpr& s, const std::vector<int>& pos, std::size_t i,
                          const Expr& sub) {
  if (pos.size() == i) return std::get<StackExpr>(sub);
  int k = pos[i];
  if (auto* c = asCons(s)) {
    if (k == 0) return scons(replaceT(c->head, pos, i + 1, sub), c->tail);
    if (k == 1) return scons(c->head, replaceS(c->tail, pos, i + 1, sub));
  } else if (auto* d = asCdr(s)) {
    if (k == 0) return scdr(replaceS(d->arg, pos, i + 1, sub));
  }
  throw std::logic_error("bad reduction position");
}

inline TermExpr replaceT(const TermExpr& t, const std::vector<int>& pos, std::size_t i,
                         const Expr& sub) {
  if (pos.size() == i) return std::get<TermExpr>(sub);
  int k = pos[i];
  if (auto* m = asMu(t)) {
    if (k == 0) return mu(m->binder, replaceP(m->body, pos, i + 1, sub));
  } else if (auto* c = asCar(t)) {
    if (k == 0) return car(replaceS(c->arg, pos, i + 1, sub));
  }
  throw std::logic_error("bad reduction position");
}

inline ProcExpr replaceP(const ProcExpr& p, const std::vector<int>& pos, std::size_t i,
                         const Expr& sub) {
  if (pos.size() == i) return std::get<ProcExpr>(sub);
  int k = pos[i];
  if (k == 0) return proc(replaceT(p->head, pos, i + 1, sub), p->tail);
  if (k == 1) return proc(p->head, replaceS(p->tail, pos, i + 1, sub));
  throw std::logic_error("bad reduction position");
}

inline Expr replaceAt(const Expr& e, const std::vector<int>& pos, const Expr& sub) {
  return std::visit(
      [&](const auto& root) -> Expr {
        using T = std::decay_t<decltype(root)>;
        if constexpr (std::is_same_v<T, StackExpr>)
          return replaceS(root, pos, 0, sub);
        else if constexpr (std::is_same_v<T, TermExpr>)
          return replaceT(root, pos, 0, sub);
        else
          return replaceP(root, pos, 0, sub);
      },
      e);
}

}  // namespace reddetail

// All one-step reducts; positions in lexicographic (leftmost-outermost-first)
// order. At most one rule applies at any node.
inline std::vector<ReductionStep> oneStepReducts(const Expr& e, bool extensional) {
  std::vector<reddetail::Hit> hits;
  std::vector<int> pos;
  std::visit(
      [&](const auto& root) {
        using T = std::decay_t<decltype(root)>;
        if constexpr (std::is_same_v<T, StackExpr>)
          reddetail::collectS(root, extensional, pos, hits);
        else if constexpr (std::is_same_v<T, TermExpr>)
          reddetail::collectT(root, extensional, pos, hits);
        else
          reddetail::collectP(root, extensional, pos, hits);
      },
      e);
  std::vector<ReductionStep> out;
  out.reserve(hits.size());
  for (auto& h : hits)
    out.push_back({h.rule, h.position, e, reddetail::replaceAt(e, h.position, h.contractum)});
  return out;
}

struct NormalizeResult {
  std::optional<Expr> normalForm;  // empty: step limit exceeded
  Expr last;                       // the expression reached when stopping
  std::vector<ReductionStep> trace;

  bool limited() const { return !normalForm.has_value(); }
};

inline constexpr std::size_t kDefaultMaxSteps = 10'000;
inline constexpr std::size_t kDefaultJoinBound = 5'000;

// Repeatedly contracts the redex chosen by `pick` (index into the reduct
// list). The leftmost-outermost strategy is pick == 0.
template <typename Pick>
inline NormalizeResult normalizeWith(const Expr& e, bool extensional, std::size_t maxSteps,
                                     Pick pick) {
  NormalizeResult res{std::nullopt, e, {}};
  Expr cur = e;
  for (std::size_t i = 0; i < maxSteps; ++i) {
    auto steps = oneStepReducts(cur, extensional);
    if (steps.empty()) {
      res.normalForm = cur;
      res.last = cur;
      return res;
    }
    std::size_t k = pick(steps);
    cur = steps[k].after;
    res.trace.push_back(std::move(steps[k]));
  }
  if (oneStepReducts(cur, extensional).empty()) res.normalForm = cur;
  res.last = cur;
  return res;
}

inline NormalizeResult normalize(const Expr& e, bool extensional,
                                 std::size_t maxSteps = kDefaultMaxSteps) {
  return normalizeWith(e, extensional, maxSteps,
                       [](const std::vector<ReductionStep>&) { return std::size_t{0}; });
}

// Breadth-first bidirectional search of the two reduction graphs, modulo
// alpha-equality, visiting at most `bound` expressions in total. A negative
// answer is inconclusive, not a refutation.
inline std::optional<Expr> joinable(const Expr& e1, const Expr& e2, bool extensional,
                                    std::size_t bound = kDefaultJoinBound) {
  if (e1.index() != e2.index()) return std::nullopt;
  if (alphaEq(e1, e2)) return e1;
  std::map<std::string, Expr> seen1, seen2;
  std::deque<Expr> q1{e1}, q2{e2};
  seen1.emplace(canonicalKey(e1), e1);
  seen2.emplace(canonicalKey(e2), e2);
  std::size_t visited = 2;
  while ((!q1.empty() || !q2.empty()) && visited < bound) {
    for (auto* side : {&q1, &q2}) {
      auto& mine = side == &q1 ? seen1 : seen2;
      auto& theirs = side == &q1 ? seen2 : seen1;
      std::size_t layer = side->size();
      for (std::size_t i = 0; i < layer && visited < bound; ++i) {
        Expr cur = side->front();
        side->pop_front();
        for (auto& st : oneStepReducts(cur, extensional)) {
          std::string key = canonicalKey(st.after);
          if (mine.contains(key)) continue;
          if (theirs.contains(key)) return st.after;
          mine.emplace(key, st.after);
          side->push_back(st.after);
          ++visited;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace stackcalc
