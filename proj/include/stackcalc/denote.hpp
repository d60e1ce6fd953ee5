#pragma once

// Bounded evaluator for the concrete relational semantics over the model
// D = union of D_n, D_0 = {}, D_{n+1} = sequences of finite multisets over
// D_n with finite support. Elements are kept canonical: multisets sorted,
// trailing empty multisets trimmed; the all-empty element is "*".
//
// Interpretations are computed as finite relations restricted to a bounded
// universe; existential quantifiers range over the universe only, so the
// result is a documented under-approximation of the true (infinite)
// relation.

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "stackcalc/syntax.hpp"

namespace stackcalc {

struct DElem {
  // levels[i] is the multiset at sequence position i, sorted canonically
  std::vector<std::vector<DElem>> levels;
};

using Multiset = std::vector<DElem>;

inline int dCmp(const DElem& a, const DElem& b) {
  if (a.levels.size() != b.levels.size()) return a.levels.size() < b.levels.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    const auto& x = a.levels[i];
    const auto& y = b.levels[i];
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (int c = dCmp(x[j], y[j])) return c;
  }
  return 0;
}

struct DLess {
  bool operator()(const DElem& a, const DElem& b) const { return dCmp(a, b) < 0; }
};

inline bool operator==(const DElem& a, const DElem& b) { return dCmp(a, b) == 0; }

inline DElem dStar() { return DElem{}; }
inline bool isStar(const DElem& e) { return e.levels.empty(); }

namespace dendetail {

inline void trim(DElem& e) {
  while (!e.levels.empty() && e.levels.back().empty()) e.levels.pop_back();
}

inline Multiset sorted(Multiset m) {
  std::sort(m.begin(), m.end(), DLess{});
  return m;
}

}  // namespace dendetail

inline DElem dCons(Multiset a, const DElem& s) {
  DElem out;
  out.levels.reserve(1 + s.levels.size());
  out.levels.push_back(dendetail::sorted(std::move(a)));
  out.levels.insert(out.levels.end(), s.levels.begin(), s.levels.end());
  dendetail::trim(out);
  return out;
}

inline DElem dSum(const DElem& s, const DElem& t) {
  DElem out;
  std::size_t n = std::max(s.levels.size(), t.levels.size());
  out.levels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Multiset m;
    if (i < s.levels.size()) m.insert(m.end(), s.levels[i].begin(), s.levels[i].end());
    if (i < t.levels.size()) m.insert(m.end(), t.levels[i].begin(), t.levels[i].end());
    out.levels[i] = dendetail::sorted(std::move(m));
  }
  dendetail::trim(out);
  return out;
}

// unique head/tail decomposition: * = [] :: *
inline std::pair<Multiset, DElem> dDecompose(const DElem& e) {
  if (e.levels.empty()) return {Multiset{}, dStar()};
  DElem tail;
  tail.levels.assign(e.levels.begin() + 1, e.levels.end());
  return {e.levels.front(), tail};
}

inline unsigned dDepth(const DElem& e) {
  unsigned d = 1;
  for (const auto& level : e.levels)
    for (const auto& member : level) d = std::max(d, 1 + dDepth(member));
  return d;
}

inline std::string dElemToString(const DElem& e) {
  if (isStar(e)) return "*";
  auto [head, tail] = dDecompose(e);
  std::string out = "[";
  for (std::size_t i = 0; i < head.size(); ++i) {
    if (i) out += ",";
    out += dElemToString(head[i]);
  }
  out += "]::";
  out += dElemToString(tail);
  return out;
}

// ------------------------------------------------------------------ universe

struct Universe {
  std::vector<DElem> elements;  // sorted ascending
  std::set<DElem, DLess> index;
  unsigned depthBound = 0;
  unsigned sizeBound = 0;

  bool contains(const DElem& e) const { return index.contains(e); }
  std::size_t size() const { return elements.size(); }
};

namespace dendetail {

// all multisets over `base` with size <= bound, as sorted vectors
inline std::vector<Multiset> multisetsOver(const std::vector<DElem>& base, unsigned bound) {
  std::vector<Multiset> out{Multiset{}};
  std::vector<Multiset> frontier{Multiset{}};
  for (unsigned k = 1; k <= bound; ++k) {
    std::vector<Multiset> next;
    for (const auto& m : frontier) {
      // extend by any element >= the last one, keeping the vector sorted
      for (const auto& e : base) {
        if (!m.empty() && dCmp(e, m.back()) < 0) continue;
        Multiset ext = m;
        ext.push_back(e);
        next.push_back(std::move(ext));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace dendetail

// All canonical elements of depth <= depthBound whose sequences have length
// <= sizeBound and whose multisets have size <= sizeBound. Monotone in both
// bounds.
inline Universe enumerate(unsigned depthBound, unsigned sizeBound) {
  std::set<DElem, DLess> cur;
  if (depthBound >= 1) cur.insert(dStar());
  for (unsigned d = 2; d <= depthBound; ++d) {
    std::vector<DElem> base(cur.begin(), cur.end());
    std::vector<Multiset> msets = dendetail::multisetsOver(base, sizeBound);
    std::set<DElem, DLess> next;
    next.insert(dStar());
    // sequences of length <= sizeBound with a non-empty last multiset
    std::vector<DElem> partial{dStar()};
    for (unsigned len = 1; len <= sizeBound; ++len) {
      std::vector<DElem> grown;
      for (const auto& tail : partial)
        for (const auto& m : msets) {
          DElem e;
          e.levels.push_back(m);
          e.levels.insert(e.levels.end(), tail.levels.begin(), tail.levels.end());
          grown.push_back(std::move(e));
        }
      for (auto& e : grown)
        if (!e.levels.empty() && !e.levels.back().empty()) next.insert(e);
      partial = std::move(grown);
    }
    cur = std::move(next);
  }
  Universe u;
  u.depthBound = depthBound;
  u.sizeBound = sizeBound;
  u.elements.assign(cur.begin(), cur.end());
  u.index = std::move(cur);
  return u;
}

// -------------------------------------------------------------- interp sets

using DTuple = std::vector<DElem>;

inline int dTupleCmp(const DTuple& a, const DTuple& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (int c = dCmp(a[i], b[i])) return c;
  return 0;
}

struct DTupleLess {
  bool operator()(const DTuple& a, const DTuple& b) const { return dTupleCmp(a, b) < 0; }
};

struct DPairLess {
  bool operator()(const std::pair<DElem, DTuple>& a, const std::pair<DElem, DTuple>& b) const {
    if (int c = dCmp(a.first, b.first)) return c < 0;
    return dTupleCmp(a.second, b.second) < 0;
  }
};

// Finite restriction of the interpretation relation to the universe.
// Process interpretations store the unit as a "*" first component.
struct InterpSet {
  std::set<std::pair<DElem, DTuple>, DPairLess> pairs;

  bool contains(const DElem& e, const DTuple& t) const { return pairs.contains({e, t}); }
};

namespace dendetail {

using TupleSet = std::set<DTuple, DTupleLess>;

inline DTuple tupleSum(const DTuple& a, const DTuple& b) {
  DTuple out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = dSum(a[i], b[i]);
  return out;
}

inline bool tupleInUniverse(const DTuple& t, const Universe& u) {
  for (const auto& e : t)
    if (!u.contains(e)) return false;
  return true;
}

// Demand-driven evaluation: for a query element, compute the set of tuples
// the relation pairs it with. Only the process clause's existential ranges
// over the universe; projections peek one cons level beyond it, so queries
// at such extended elements are evaluated exactly.
struct Evaluator {
  const Universe& u;

  explicit Evaluator(const Universe& universe) : u(universe) {}

  struct Key {
    const void* node;
    std::string scope;
    DElem query;
    bool operator<(const Key& o) const {
      if (node != o.node) return node < o.node;
      if (scope != o.scope) return scope < o.scope;
      return dCmp(query, o.query) < 0;
    }
  };
  std::map<Key, TupleSet> memoS, memoT;
  std::map<std::pair<const void*, std::string>, TupleSet> memoP;

  static std::string scopeKey(const std::vector<Name>& vars) {
    std::string k;
    for (const auto& n : vars) {
      k += n.text;
      k += ';';
    }
    return k;
  }

  const TupleSet& evalS(const StackExpr& s, const std::vector<Name>& vars, const DElem& xi) {
    Key key{s.get(), scopeKey(vars), xi};
    auto it = memoS.find(key);
    if (it != memoS.end()) return it->second;
    TupleSet& out = memoS[key];  // placed first: recursion is structural

    if (auto* v = asVar(s)) {
      std::size_t slot = vars.size();
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == v->name) slot = i;  // innermost binding wins
      if (slot == vars.size())
        throw std::invalid_argument("free variable outside the slot list");
      DTuple t(vars.size(), dStar());
      t[slot] = xi;
      out.insert(std::move(t));
    } else if (isNil(s)) {
      if (isStar(xi)) out.insert(DTuple(vars.size(), dStar()));
    } else if (auto* d = asCdr(s)) {
      out = evalS(d->arg, vars, dCons({}, xi));
    } else {
      auto* c = asCons(s);
      auto [head, tail] = dDecompose(xi);
      const TupleSet& tailTuples = evalS(c->tail, vars, tail);
      if (!tailTuples.empty()) {
        std::vector<const TupleSet*> witnesses;
        bool ok = true;
        for (const auto& member : head) {
          const TupleSet& w = evalT(c->head, vars, member);
          if (w.empty()) {
            ok = false;
            break;
          }
          witnesses.push_back(&w);
        }
        if (ok) {
          for (const auto& tau0 : tailTuples) {
            std::vector<DTuple> sums{tau0};
            for (const TupleSet* w : witnesses) {
              std::vector<DTuple> next;
              for (const auto& acc : sums)
                for (const auto& tw : *w) next.push_back(tupleSum(acc, tw));
              sums = std::move(next);
            }
            for (auto& total : sums) out.insert(std::move(total));
          }
        }
      }
    }
    return out;
  }

  const TupleSet& evalT(const TermExpr& t, const std::vector<Name>& vars, const DElem& xi) {
    Key key{t.get(), scopeKey(vars), xi};
    auto it = memoT.find(key);
    if (it != memoT.end()) return it->second;
    TupleSet& out = memoT[key];

    if (auto* c = asCar(t)) {
      out = evalS(c->arg, vars, dCons({xi}, dStar()));
    } else {
      auto* m = asMu(t);
      std::vector<Name> inner = vars;
      inner.push_back(m->binder);
      for (const auto& tup : evalP(m->body, inner))
        if (tup.back() == xi) out.insert(DTuple(tup.begin(), tup.end() - 1));
    }
    return out;
  }

  const TupleSet& evalP(const ProcExpr& p, const std::vector<Name>& vars) {
    auto key = std::pair{static_cast<const void*>(p.get()), scopeKey(vars)};
    auto it = memoP.find(key);
    if (it != memoP.end()) return it->second;
    TupleSet& out = memoP[key];
    for (const auto& sigma : u.elements) {
      const TupleSet& lhs = evalT(p->head, vars, sigma);
      if (lhs.empty()) continue;
      const TupleSet& rhs = evalS(p->tail, vars, sigma);
      for (const auto& tm : lhs)
        for (const auto& tp : rhs) out.insert(tupleSum(tm, tp));
    }
    return out;
  }
};

}  // namespace dendetail

inline InterpSet interpStack(const StackExpr& pi, const std::vector<Name>& vars,
                             const Universe& u) {
  dendetail::Evaluator ev(u);
  InterpSet out;
  for (const auto& sigma : u.elements)
    for (const auto& t : ev.evalS(pi, vars, sigma))
      if (dendetail::tupleInUniverse(t, u)) out.pairs.insert({sigma, t});
  return out;
}

inline InterpSet interpTerm(const TermExpr& m, const std::vector<Name>& vars, const Universe& u) {
  dendetail::Evaluator ev(u);
  InterpSet out;
  for (const auto& sigma : u.elements)
    for (const auto& t : ev.evalT(m, vars, sigma))
      if (dendetail::tupleInUniverse(t, u)) out.pairs.insert({sigma, t});
  return out;
}

inline InterpSet interpProcess(const ProcExpr& p, const std::vector<Name>& vars,
                               const Universe& u) {
  dendetail::Evaluator ev(u);
  InterpSet out;
  for (const auto& t : ev.evalP(p, vars))
    if (dendetail::tupleInUniverse(t, u)) out.pairs.insert({dStar(), t});
  return out;
}

// denotation of a closed term: the first components paired with the empty
// tuple
inline std::set<DElem, DLess> closedDen(const TermExpr& m, const Universe& u) {
  if (!freeVars(m).empty()) throw std::invalid_argument("closedDen requires a closed term");
  dendetail::Evaluator ev(u);
  std::set<DElem, DLess> out;
  for (const auto& sigma : u.elements)
    if (!ev.evalT(m, {}, sigma).empty()) out.insert(sigma);
  return out;
}

}  // namespace stackcalc
