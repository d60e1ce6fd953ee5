#pragma once

// Parigot's lambda-mu calculus: syntax, the beta/mu/rho/theta rules (plus
// eta/nu in extensional mode), and the faithful translation into the stack
// calculus. A small type checker for the propositional lambda-mu system is
// included; it certifies inputs of the typed translation.

#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "stackcalc/syntax.hpp"
#include "stackcalc/typesys.hpp"

namespace stackcalc {

struct LTermNode;
struct LProcNode;
using LTerm = std::shared_ptr<const LTermNode>;
using LProc = std::shared_ptr<const LProcNode>;

// terms: x | \x.t | t s | mu a.p      named terms: [a]t
struct LVar {
  Name x;
};
struct LLam {
  Name x;
  LTerm body;
};
struct LApp {
  LTerm fun, arg;
};
struct LMu {
  Name a;
  LProc body;
};
struct LTermNode {
  std::variant<LVar, LLam, LApp, LMu> v;
};
struct LProcNode {
  Name name;
  LTerm body;
};

using LExpr = std::variant<LTerm, LProc>;

inline LTerm lvar(Name x) { return std::make_shared<LTermNode>(LTermNode{LVar{std::move(x)}}); }
inline LTerm llam(Name x, LTerm body) {
  return std::make_shared<LTermNode>(LTermNode{LLam{std::move(x), std::move(body)}});
}
inline LTerm lapp(LTerm fun, LTerm arg) {
  return std::make_shared<LTermNode>(LTermNode{LApp{std::move(fun), std::move(arg)}});
}
inline LTerm lmu(Name a, LProc body) {
  return std::make_shared<LTermNode>(LTermNode{LMu{std::move(a), std::move(body)}});
}
inline LProc lnamed(Name a, LTerm body) {
  return std::make_shared<LProcNode>(LProcNode{std::move(a), std::move(body)});
}

inline const LVar* asLVar(const LTerm& t) { return std::get_if<LVar>(&t->v); }
inline const LLam* asLLam(const LTerm& t) { return std::get_if<LLam>(&t->v); }
inline const LApp* asLApp(const LTerm& t) { return std::get_if<LApp>(&t->v); }
inline const LMu* asLMu(const LTerm& t) { return std::get_if<LMu>(&t->v); }

// --------------------------------------------------------- free vars / names

namespace lmudetail {

inline void fvT(const LTerm& t, const NameSet& bound, NameSet& out) {
  if (auto* v = asLVar(t)) {
    if (!bound.contains(v->x)) out.insert(v->x);
  } else if (auto* l = asLLam(t)) {
    NameSet b = bound;
    b.insert(l->x);
    fvT(l->body, b, out);
  } else if (auto* a = asLApp(t)) {
    fvT(a->fun, bound, out);
    fvT(a->arg, bound, out);
  } else {
    fvT(asLMu(t)->body->body, bound, out);
  }
}

inline void fnT(const LTerm& t, const NameSet& bound, NameSet& out) {
  if (asLVar(t)) return;
  if (auto* l = asLLam(t)) {
    fnT(l->body, bound, out);
  } else if (auto* a = asLApp(t)) {
    fnT(a->fun, bound, out);
    fnT(a->arg, bound, out);
  } else {
    auto* m = asLMu(t);
    NameSet b = bound;
    b.insert(m->a);
    if (!b.contains(m->body->name)) out.insert(m->body->name);
    fnT(m->body->body, b, out);
  }
}

inline void allNamesT(const LTerm& t, NameSet& vars, NameSet& names) {
  if (auto* v = asLVar(t)) {
    vars.insert(v->x);
  } else if (auto* l = asLLam(t)) {
    vars.insert(l->x);
    allNamesT(l->body, vars, names);
  } else if (auto* a = asLApp(t)) {
    allNamesT(a->fun, vars, names);
    allNamesT(a->arg, vars, names);
  } else {
    auto* m = asLMu(t);
    names.insert(m->a);
    names.insert(m->body->name);
    allNamesT(m->body->body, vars, names);
  }
}

}  // namespace lmudetail

inline NameSet freeLVars(const LTerm& t) {
  NameSet out;
  lmudetail::fvT(t, {}, out);
  return out;
}
inline NameSet freeLVars(const LProc& p) { return freeLVars(p->body); }
inline NameSet freeNames(const LTerm& t) {
  NameSet out;
  lmudetail::fnT(t, {}, out);
  return out;
}
inline NameSet freeNames(const LProc& p) {
  NameSet out = freeNames(p->body);
  out.insert(p->name);
  return out;
}
inline NameSet freeLVars(const LExpr& e) {
  return std::visit([](const auto& x) { return freeLVars(x); }, e);
}
inline NameSet freeNames(const LExpr& e) {
  return std::visit([](const auto& x) { return freeNames(x); }, e);
}

// --------------------------------------------------------------- substitution

namespace lmudetail {

inline LTerm renameT(const LTerm& t, const Name& b, const Name& a);
inline LProc renameP(const LProc& p, const Name& b, const Name& a);
inline LTerm substT(const LTerm& t, const LTerm& s, const Name& x);
inline LProc substP(const LProc& p, const LTerm& s, const Name& x);
inline LTerm ssubT(const LTerm& t, const LTerm& s, const Name& a);
inline LProc ssubP(const LProc& p, const LTerm& s, const Name& a);

// e[b/a]: rename free name a to b
inline LTerm renameT(const LTerm& t, const Name& b, const Name& a) {
  if (asLVar(t)) return t;
  if (auto* l = asLLam(t)) return llam(l->x, renameT(l->body, b, a));
  if (auto* ap = asLApp(t)) return lapp(renameT(ap->fun, b, a), renameT(ap->arg, b, a));
  auto* m = asLMu(t);
  if (m->a == a) return t;
  if (m->a == b) {
    NameSet avoid{a, b};
    NameSet fn = freeNames(m->body);
    avoid.insert(fn.begin(), fn.end());
    Name fresh = freshName(avoid, m->a);
    return lmu(fresh, renameP(renameP(m->body, fresh, m->a), b, a));
  }
  return lmu(m->a, renameP(m->body, b, a));
}

inline LProc renameP(const LProc& p, const Name& b, const Name& a) {
  return lnamed(p->name == a ? b : p->name, renameT(p->body, b, a));
}

inline NameSet avoidFor(const LTerm& s) {
  NameSet out = freeLVars(s);
  NameSet fn = freeNames(s);
  out.insert(fn.begin(), fn.end());
  return out;
}

// t[s/x], capture-avoiding for both binder sorts
inline LTerm substT(const LTerm& t, const LTerm& s, const Name& x) {
  if (auto* v = asLVar(t)) return v->x == x ? s : t;
  if (auto* l = asLLam(t)) {
    if (l->x == x) return t;
    NameSet avoid = freeLVars(s);
    if (avoid.contains(l->x)) {
      NameSet fv = freeLVars(l->body);
      avoid.insert(fv.begin(), fv.end());
      avoid.insert(x);
      Name fresh = freshName(avoid, l->x);
      return llam(fresh, substT(substT(l->body, lvar(fresh), l->x), s, x));
    }
    return llam(l->x, substT(l->body, s, x));
  }
  if (auto* a = asLApp(t)) return lapp(substT(a->fun, s, x), substT(a->arg, s, x));
  auto* m = asLMu(t);
  NameSet avoid = freeNames(s);
  if (avoid.contains(m->a)) {
    NameSet fn = freeNames(m->body);
    avoid.insert(fn.begin(), fn.end());
    Name fresh = freshName(avoid, m->a);
    return lmu(fresh, substP(renameP(m->body, fresh, m->a), s, x));
  }
  return lmu(m->a, substP(m->body, s, x));
}

inline LProc substP(const LProc& p, const LTerm& s, const Name& x) {
  return lnamed(p->name, substT(p->body, s, x));
}

// e<s/a>: replace every named subterm [a]t with [a](t s)
inline LTerm ssubT(const LTerm& t, const LTerm& s, const Name& a) {
  if (asLVar(t)) return t;
  if (auto* l = asLLam(t)) {
    NameSet avoid = freeLVars(s);
    if (avoid.contains(l->x)) {
      NameSet fv = freeLVars(l->body);
      avoid.insert(fv.begin(), fv.end());
      Name fresh = freshName(avoid, l->x);
      return llam(fresh, ssubT(substT(l->body, lvar(fresh), l->x), s, a));
    }
    return llam(l->x, ssubT(l->body, s, a));
  }
  if (auto* ap = asLApp(t)) return lapp(ssubT(ap->fun, s, a), ssubT(ap->arg, s, a));
  auto* m = asLMu(t);
  if (m->a == a) return t;  // inner binder shadows
  NameSet avoid = freeNames(s);
  avoid.insert(a);
  if (avoid.contains(m->a)) {
    NameSet fn = freeNames(m->body);
    avoid.insert(fn.begin(), fn.end());
    Name fresh = freshName(avoid, m->a);
    return lmu(fresh, ssubP(renameP(m->body, fresh, m->a), s, a));
  }
  return lmu(m->a, ssubP(m->body, s, a));
}

inline LProc ssubP(const LProc& p, const LTerm& s, const Name& a) {
  LTerm body = ssubT(p->body, s, a);
  if (p->name == a) return lnamed(a, lapp(body, s));
  return lnamed(p->name, body);
}

}  // namespace lmudetail

inline LTerm lmuSubst(const LTerm& t, const LTerm& s, const Name& x) {
  return lmudetail::substT(t, s, x);
}
inline LExpr structSubst(const LExpr& e, const LTerm& s, const Name& alpha) {
  if (auto* t = std::get_if<LTerm>(&e)) return lmudetail::ssubT(*t, s, alpha);
  return lmudetail::ssubP(std::get<LProc>(e), s, alpha);
}

// ------------------------------------------------------------- alpha-equality

namespace lmudetail {

struct AEnv {
  std::map<Name, int> lv, rv;  // lambda-variables
  std::map<Name, int> ln, rn;  // names
  int depth = 0;
};

inline bool aeqT(const LTerm& a, const LTerm& b, AEnv& env);

inline bool varEq(const Name& a, const Name& b, const std::map<Name, int>& l,
                  const std::map<Name, int>& r) {
  auto la = l.find(a);
  auto rb = r.find(b);
  if (la != l.end() || rb != r.end())
    return la != l.end() && rb != r.end() && la->second == rb->second;
  return a == b;
}

template <typename F>
inline bool withBinding(std::map<Name, int>& l, std::map<Name, int>& r, const Name& a,
                        const Name& b, AEnv& env, F body) {
  auto savedL = l.count(a) ? std::optional<int>(l[a]) : std::nullopt;
  auto savedR = r.count(b) ? std::optional<int>(r[b]) : std::nullopt;
  l[a] = env.depth;
  r[b] = env.depth;
  ++env.depth;
  bool ok = body();
  --env.depth;
  if (savedL)
    l[a] = *savedL;
  else
    l.erase(a);
  if (savedR)
    r[b] = *savedR;
  else
    r.erase(b);
  return ok;
}

inline bool aeqP(const LProc& a, const LProc& b, AEnv& env) {
  return varEq(a->name, b->name, env.ln, env.rn) && aeqT(a->body, b->body, env);
}

inline bool aeqT(const LTerm& a, const LTerm& b, AEnv& env) {
  if (a->v.index() != b->v.index()) return false;
  if (auto* va = asLVar(a)) return varEq(va->x, asLVar(b)->x, env.lv, env.rv);
  if (auto* la = asLLam(a)) {
    auto* lb = asLLam(b);
    return withBinding(env.lv, env.rv, la->x, lb->x, env,
                       [&] { return aeqT(la->body, lb->body, env); });
  }
  if (auto* pa = asLApp(a)) {
    auto* pb = asLApp(b);
    return aeqT(pa->fun, pb->fun, env) && aeqT(pa->arg, pb->arg, env);
  }
  auto* ma = asLMu(a);
  auto* mb = asLMu(b);
  return withBinding(env.ln, env.rn, ma->a, mb->a, env,
                     [&] { return aeqP(ma->body, mb->body, env); });
}

inline void lcanonT(const LTerm& t, std::map<Name, int>& bv, std::map<Name, int>& bn, int depth,
                    std::string& out);

inline void lcanonP(const LProc& p, std::map<Name, int>& bv, std::map<Name, int>& bn, int depth,
                    std::string& out) {
  out += '[';
  auto it = bn.find(p->name);
  out += it != bn.end() ? "#" + std::to_string(it->second) : "~" + p->name.text;
  out += ']';
  lcanonT(p->body, bv, bn, depth, out);
}

inline void lcanonT(const LTerm& t, std::map<Name, int>& bv, std::map<Name, int>& bn, int depth,
                    std::string& out) {
  if (auto* v = asLVar(t)) {
    auto it = bv.find(v->x);
    out += it != bv.end() ? "#" + std::to_string(it->second) : "~" + v->x.text;
    out += ';';
  } else if (auto* l = asLLam(t)) {
    out += "L(";
    auto saved = bv.count(l->x) ? std::optional<int>(bv[l->x]) : std::nullopt;
    bv[l->x] = depth;
    lcanonT(l->body, bv, bn, depth + 1, out);
    if (saved)
      bv[l->x] = *saved;
    else
      bv.erase(l->x);
    out += ')';
  } else if (auto* a = asLApp(t)) {
    out += "@(";
    lcanonT(a->fun, bv, bn, depth, out);
    lcanonT(a->arg, bv, bn, depth, out);
    out += ')';
  } else {
    auto* m = asLMu(t);
    out += "U(";
    auto saved = bn.count(m->a) ? std::optional<int>(bn[m->a]) : std::nullopt;
    bn[m->a] = depth;
    lcanonP(m->body, bv, bn, depth + 1, out);
    if (saved)
      bn[m->a] = *saved;
    else
      bn.erase(m->a);
    out += ')';
  }
}

}  // namespace lmudetail

inline bool lmuAlphaEq(const LTerm& a, const LTerm& b) {
  lmudetail::AEnv env;
  return lmudetail::aeqT(a, b, env);
}
inline bool lmuAlphaEq(const LProc& a, const LProc& b) {
  lmudetail::AEnv env;
  return lmudetail::aeqP(a, b, env);
}
inline bool lmuAlphaEq(const LExpr& a, const LExpr& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        return lmuAlphaEq(x, std::get<T>(b));
      },
      a);
}

inline std::string lmuCanonicalKey(const LExpr& e) {
  std::string out;
  std::map<Name, int> bv, bn;
  if (auto* t = std::get_if<LTerm>(&e))
    lmudetail::lcanonT(*t, bv, bn, 0, out);
  else
    lmudetail::lcanonP(std::get<LProc>(e), bv, bn, 0, out);
  return out;
}

// ------------------------------------------------------------------ reduction

enum class LRule { LBeta, LMuStruct, LRho, LTheta, LEta, LNu };

inline const char* lruleName(LRule r) {
  switch (r) {
    case LRule::LBeta: return "beta";
    case LRule::LMuStruct: return "mu";
    case LRule::LRho: return "rho";
    case LRule::LTheta: return "theta";
    case LRule::LEta: return "eta";
    case LRule::LNu: return "nu";
  }
  return "?";
}

struct LStep {
  LRule rule;
  std::vector<int> position;  // child indices: Lam 0, App 0|1, Mu 0, [a]t 0
  LExpr reduct;               // whole expression after the contraction
};

namespace lmudetail {

// Local redex contractions. Term-level rules produce terms; rho rewrites a
// named term to a named term.
inline std::optional<LTerm> contractTermRedex(const LTerm& t, LRule rule, bool extensional) {
  switch (rule) {
    case LRule::LBeta:
      if (auto* a = asLApp(t))
        if (auto* l = asLLam(a->fun)) return substT(l->body, a->arg, l->x);
      return std::nullopt;
    case LRule::LMuStruct:
      if (auto* a = asLApp(t))
        if (auto* m = asLMu(a->fun)) return lmu(m->a, ssubP(m->body, a->arg, m->a));
      return std::nullopt;
    case LRule::LTheta:
      if (auto* m = asLMu(t))
        if (m->body->name == m->a && !freeNames(m->body->body).contains(m->a))
          return m->body->body;
      return std::nullopt;
    case LRule::LEta:
      if (!extensional) return std::nullopt;
      if (auto* l = asLLam(t))
        if (auto* a = asLApp(l->body))
          if (auto* v = asLVar(a->arg))
            if (v->x == l->x && !freeLVars(a->fun).contains(l->x)) return a->fun;
      return std::nullopt;
    case LRule::LNu:
      if (!extensional) return std::nullopt;
      if (auto* m = asLMu(t)) {
        NameSet avoid = freeLVars(m->body);
        Name x = freshName(avoid, Name{"x"});
        return llam(x, lmu(m->a, ssubP(m->body, lvar(x), m->a)));
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

inline std::optional<LProc> contractRho(const LProc& p) {
  if (auto* m = asLMu(p->body)) return renameP(m->body, p->name, m->a);
  return std::nullopt;
}

template <typename FT, typename FP>
inline LTerm replaceT(const LTerm& t, const std::vector<int>& pos, std::size_t i, FT ft, FP fp);
template <typename FT, typename FP>
inline LProc replaceP(const LProc& p, const std::vector<int>& pos, std::size_t i, FT ft, FP fp) {
  if (pos.size() == i) return fp(p);
  if (pos[i] != 0) throw std::logic_error("bad lambda-mu position");
  return lnamed(p->name, replaceT(p->body, pos, i + 1, ft, fp));
}

template <typename FT, typename FP>
inline LTerm replaceT(const LTerm& t, const std::vector<int>& pos, std::size_t i, FT ft, FP fp) {
  if (pos.size() == i) return ft(t);
  int k = pos[i];
  if (auto* l = asLLam(t)) {
    if (k != 0) throw std::logic_error("bad lambda-mu position");
    return llam(l->x, replaceT(l->body, pos, i + 1, ft, fp));
  }
  if (auto* a = asLApp(t)) {
    if (k == 0) return lapp(replaceT(a->fun, pos, i + 1, ft, fp), a->arg);
    if (k == 1) return lapp(a->fun, replaceT(a->arg, pos, i + 1, ft, fp));
    throw std::logic_error("bad lambda-mu position");
  }
  if (auto* m = asLMu(t)) {
    if (k != 0) throw std::logic_error("bad lambda-mu position");
    return lmu(m->a, replaceP(m->body, pos, i + 1, ft, fp));
  }
  throw std::logic_error("bad lambda-mu position");
}

struct LHit {
  LRule rule;
  std::vector<int> position;
  bool isProc;
  LTerm termContractum;
  LProc procContractum;
};

inline void collectT(const LTerm& t, bool ext, std::vector<int>& pos, std::vector<LHit>& out);

inline void collectP(const LProc& p, bool ext, std::vector<int>& pos, std::vector<LHit>& out) {
  if (auto r = contractRho(p)) out.push_back({LRule::LRho, pos, true, nullptr, *r});
  pos.push_back(0);
  collectT(p->body, ext, pos, out);
  pos.pop_back();
}

inline void collectT(const LTerm& t, bool ext, std::vector<int>& pos, std::vector<LHit>& out) {
  for (LRule r : {LRule::LBeta, LRule::LMuStruct, LRule::LTheta, LRule::LEta, LRule::LNu})
    if (auto c = contractTermRedex(t, r, ext)) out.push_back({r, pos, false, *c, nullptr});
  if (auto* l = asLLam(t)) {
    pos.push_back(0);
    collectT(l->body, ext, pos, out);
    pos.pop_back();
  } else if (auto* a = asLApp(t)) {
    pos.push_back(0);
    collectT(a->fun, ext, pos, out);
    pos.back() = 1;
    collectT(a->arg, ext, pos, out);
    pos.pop_back();
  } else if (auto* m = asLMu(t)) {
    pos.push_back(0);
    collectP(m->body, ext, pos, out);
    pos.pop_back();
  }
}

inline LExpr applyHit(const LExpr& e, const LHit& h) {
  auto ft = [&](const LTerm&) { return h.termContractum; };
  auto fp = [&](const LProc&) { return h.procContractum; };
  if (auto* t = std::get_if<LTerm>(&e)) return replaceT(*t, h.position, 0, ft, fp);
  return replaceP(std::get<LProc>(e), h.position, 0, ft, fp);
}

}  // namespace lmudetail

// All one-step reducts, outermost-first in pre-order; at a shared position the
// rule order is beta < mu < rho < theta < eta < nu.
inline std::vector<LStep> lmuOneStep(const LExpr& e, bool extensional) {
  using namespace lmudetail;
  std::vector<LHit> hits;
  std::vector<int> pos;
  if (auto* t = std::get_if<LTerm>(&e))
    collectT(*t, extensional, pos, hits);
  else
    collectP(std::get<LProc>(e), extensional, pos, hits);

  std::stable_sort(hits.begin(), hits.end(), [](const LHit& a, const LHit& b) {
    if (a.position != b.position) return a.position < b.position;
    return static_cast<int>(a.rule) < static_cast<int>(b.rule);
  });
  std::vector<LStep> out;
  out.reserve(hits.size());
  for (auto& h : hits) out.push_back({h.rule, h.position, applyHit(e, h)});
  return out;
}

struct LNormalizeResult {
  std::optional<LExpr> normalForm;
  LExpr last;
  std::vector<LStep> trace;
};

inline LNormalizeResult lmuNormalize(const LExpr& e, bool extensional, std::size_t maxSteps) {
  LNormalizeResult res{std::nullopt, e, {}};
  LExpr cur = e;
  for (std::size_t i = 0; i < maxSteps; ++i) {
    auto steps = lmuOneStep(cur, extensional);
    if (steps.empty()) {
      res.normalForm = cur;
      res.last = cur;
      return res;
    }
    cur = steps.front().reduct;
    res.trace.push_back(std::move(steps.front()));
  }
  if (lmuOneStep(cur, extensional).empty()) res.normalForm = cur;
  res.last = cur;
  return res;
}

// Bidirectional search for a common reduct, up to `bound` visited expressions.
inline std::optional<LExpr> lmuJoinable(const LExpr& e1, const LExpr& e2, bool extensional,
                                        std::size_t bound) {
  if (lmuAlphaEq(e1, e2)) return e1;
  std::map<std::string, LExpr> seen1, seen2;
  std::deque<LExpr> q1{e1}, q2{e2};
  seen1.emplace(lmuCanonicalKey(e1), e1);
  seen2.emplace(lmuCanonicalKey(e2), e2);
  std::size_t visited = 2;
  while ((!q1.empty() || !q2.empty()) && visited < bound) {
    for (auto* side : {&q1, &q2}) {
      auto& mine = side == &q1 ? seen1 : seen2;
      auto& theirs = side == &q1 ? seen2 : seen1;
      std::size_t layer = side->size();
      for (std::size_t i = 0; i < layer && visited < bound; ++i) {
        LExpr cur = side->front();
        side->pop_front();
        for (auto& st : lmuOneStep(cur, extensional)) {
          std::string key = lmuCanonicalKey(st.reduct);
          if (mine.contains(key)) continue;
          if (theirs.contains(key)) return st.reduct;
          mine.emplace(key, st.reduct);
          side->push_back(st.reduct);
          ++visited;
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- translation

// Maps lambda-variables and names injectively into stack-variable names.
// Texts used by both sorts get a disambiguating prefix (x_ / a_); everything
// else is kept verbatim so translations of the usual examples print as in the
// source.
class TranslationScope {
 public:
  explicit TranslationScope(const LExpr& e) {
    NameSet vars, names;
    if (auto* t = std::get_if<LTerm>(&e)) {
      lmudetail::allNamesT(*t, vars, names);
    } else {
      const LProc& p = std::get<LProc>(e);
      names.insert(p->name);
      lmudetail::allNamesT(p->body, vars, names);
    }
    used_ = vars;
    used_.insert(names.begin(), names.end());
    for (const Name& x : vars)
      if (names.contains(x)) {
        Name t = freshName(used_, Name{"x_" + x.text});
        used_.insert(t);
        varMap_[x] = t;
      }
    for (const Name& a : names)
      if (vars.contains(a)) {
        Name t = freshName(used_, Name{"a_" + a.text});
        used_.insert(t);
        nameMap_[a] = t;
      }
  }

  Name var(const Name& x) const {
    auto it = varMap_.find(x);
    return it == varMap_.end() ? x : it->second;
  }
  Name name(const Name& a) const {
    auto it = nameMap_.find(a);
    return it == nameMap_.end() ? a : it->second;
  }
  Name fresh() {
    Name b = freshName(used_, Name{"b"});
    used_.insert(b);
    return b;
  }

 private:
  NameSet used_;
  std::map<Name, Name> varMap_, nameMap_;
};

namespace lmudetail {

inline TermExpr teT(const LTerm& t, TranslationScope& sc);

inline ProcExpr teP(const LProc& p, TranslationScope& sc) {
  return proc(teT(p->body, sc), svar(sc.name(p->name)));
}

inline TermExpr teT(const LTerm& t, TranslationScope& sc) {
  if (auto* v = asLVar(t)) {
    Name x = sc.var(v->x);
    Name b = sc.fresh();
    return mu(b, proc(car(svar(x)), svar(b)));
  }
  if (auto* l = asLLam(t)) {
    Name x = sc.var(l->x);
    return mu(x, proc(teT(l->body, sc), scdr(svar(x))));
  }
  if (auto* a = asLApp(t)) {
    TermExpr tf = teT(a->fun, sc);
    TermExpr ts = teT(a->arg, sc);
    Name b = sc.fresh();
    return mu(b, proc(tf, scons(ts, svar(b))));
  }
  auto* m = asLMu(t);
  return mu(sc.name(m->a), teP(m->body, sc));
}

}  // namespace lmudetail

inline Expr translate(const LExpr& e) {
  TranslationScope sc(e);
  if (auto* t = std::get_if<LTerm>(&e)) return lmudetail::teT(*t, sc);
  return lmudetail::teP(std::get<LProc>(e), sc);
}
inline TermExpr translate(const LTerm& t) { return std::get<TermExpr>(translate(LExpr{t})); }
inline ProcExpr translate(const LProc& p) { return std::get<ProcExpr>(translate(LExpr{p})); }

// [top]t of the lambda-mu-top calculus: Te([top]t) = Te(t) * nil.
inline ProcExpr translateTop(const LTerm& t) {
  TranslationScope sc(LExpr{t});
  return proc(lmudetail::teT(t, sc), snil());
}

// Each lambda assumption x:A becomes the stream assumption x : A -> Cx with a
// fresh atom Cx standing in for an arbitrary continuation formula.
inline Context translateTypedContext(const Context& gamma, NameSet& atomAvoid) {
  Context out;
  for (const auto& [x, a] : gamma.entries) {
    Name c = freshName(atomAvoid, Name{"c"});
    atomAvoid.insert(c);
    out.entries.emplace_back(x, farrow(a, fatom(c)));
  }
  return out;
}

// ------------------------------------------------- lambda-mu type inference

// Judgements G |- t : A | D, with G typing lambda-variables and D names.
struct LmuTypeError {
  std::string message;
};

using LmuInferResult = std::variant<Formula, LmuTypeError>;

namespace lmudetail {

using detail::MCtx;

struct LmuInfer {
  TypeSession session;
  std::optional<LmuTypeError> error;

  void fail(std::string msg) {
    if (!error) error = LmuTypeError{std::move(msg)};
  }

  MType inferT(const LTerm& t, MCtx& gamma, MCtx& delta) {
    if (error) return session.freshVar();
    if (auto* v = asLVar(t)) {
      auto it = gamma.find(v->x);
      if (it == gamma.end()) {
        fail("unbound lambda-variable " + v->x.text);
        return session.freshVar();
      }
      return it->second;
    }
    if (auto* l = asLLam(t)) {
      MType a = session.freshVar();
      auto saved = gamma.count(l->x) ? std::optional<MType>(gamma[l->x]) : std::nullopt;
      gamma[l->x] = a;
      MType b = inferT(l->body, gamma, delta);
      if (saved)
        gamma[l->x] = *saved;
      else
        gamma.erase(l->x);
      return std::make_shared<MNode>(MNode{MArrowT{a, b}});
    }
    if (auto* ap = asLApp(t)) {
      MType f = inferT(ap->fun, gamma, delta);
      MType x = inferT(ap->arg, gamma, delta);
      MType b = session.freshVar();
      if (!error)
        if (session.unify(f, std::make_shared<MNode>(MNode{MArrowT{x, b}})))
          fail("application of a non-function");
      return b;
    }
    auto* m = asLMu(t);
    MType b = session.freshVar();
    auto saved = delta.count(m->a) ? std::optional<MType>(delta[m->a]) : std::nullopt;
    delta[m->a] = b;
    inferP(m->body, gamma, delta);
    if (saved)
      delta[m->a] = *saved;
    else
      delta.erase(m->a);
    return b;
  }

  void inferP(const LProc& p, MCtx& gamma, MCtx& delta) {
    if (error) return;
    auto it = delta.find(p->name);
    if (it == delta.end()) {
      fail("unbound name " + p->name.text);
      return;
    }
    MType a = inferT(p->body, gamma, delta);
    if (!error)
      if (session.unify(it->second, a)) fail("named term clashes with the name's formula");
  }
};

}  // namespace lmudetail

inline LmuInferResult lmuInferTerm(const LTerm& t, const Context& gamma, const Context& delta) {
  lmudetail::LmuInfer inf;
  detail::MCtx g = detail::toMCtx(gamma);
  detail::MCtx d = detail::toMCtx(delta);
  MType r = inf.inferT(t, g, d);
  if (inf.error) return *inf.error;
  NameSet avoid = detail::ctxAtoms(gamma);
  NameSet da = detail::ctxAtoms(delta);
  avoid.insert(da.begin(), da.end());
  MType res = inf.session.resolve(r);
  detail::metaAtomsInto(res, avoid);
  std::map<int, Name> assigned;
  return inf.session.ground(res, avoid, assigned);
}

inline bool lmuCheckTerm(const LTerm& t, const Formula& a, const Context& gamma,
                         const Context& delta) {
  lmudetail::LmuInfer inf;
  detail::MCtx g = detail::toMCtx(gamma);
  detail::MCtx d = detail::toMCtx(delta);
  MType r = inf.inferT(t, g, d);
  if (inf.error) return false;
  std::map<int, Formula> binding;
  return inf.session.matches(inf.session.resolve(r), a, binding);
}

inline bool lmuCheckProc(const LProc& p, const Context& gamma, const Context& delta) {
  lmudetail::LmuInfer inf;
  detail::MCtx g = detail::toMCtx(gamma);
  detail::MCtx d = detail::toMCtx(delta);
  inf.inferP(p, g, d);
  return !inf.error;
}

}  // namespace stackcalc
