#pragma once

// Core abstract syntax of the stack calculus: three sorts (stacks, terms,
// processes) with a single binder (mu) over processes.

#include <algorithm>
#include <cassert>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace stackcalc {

struct Name {
  std::string text;

  Name() = default;
  Name(std::string t) : text(std::move(t)) {}
  Name(const char* t) : text(t) {}

  friend bool operator==(const Name& a, const Name& b) { return a.text == b.text; }
  friend auto operator<=>(const Name& a, const Name& b) { return a.text <=> b.text; }
};

using NameSet = std::set<Name>;

struct StackNode;
struct TermNode;
struct ProcNode;

using StackExpr = std::shared_ptr<const StackNode>;
using TermExpr = std::shared_ptr<const TermNode>;
using ProcExpr = std::shared_ptr<const ProcNode>;

// stacks: alpha | nil | M :: pi | cdr(pi)
struct SVar {
  Name name;
};
struct SNil {};
struct SCons {
  TermExpr head;
  StackExpr tail;
};
struct SCdr {
  StackExpr arg;
};
struct StackNode {
  std::variant<SVar, SNil, SCons, SCdr> v;
};

// terms: mu a. P | car(pi)
struct TMu {
  Name binder;
  ProcExpr body;
};
struct TCar {
  StackExpr arg;
};
struct TermNode {
  std::variant<TMu, TCar> v;
};

// processes: M * pi
struct ProcNode {
  TermExpr head;
  StackExpr tail;
};

// An expression is a stack, a term or a process.
using Expr = std::variant<StackExpr, TermExpr, ProcExpr>;

inline StackExpr svar(Name n) { return std::make_shared<StackNode>(StackNode{SVar{std::move(n)}}); }
inline StackExpr snil() {
  static const StackExpr n = std::make_shared<StackNode>(StackNode{SNil{}});
  return n;
}
inline StackExpr scons(TermExpr head, StackExpr tail) {
  return std::make_shared<StackNode>(StackNode{SCons{std::move(head), std::move(tail)}});
}
inline StackExpr scdr(StackExpr arg) {
  return std::make_shared<StackNode>(StackNode{SCdr{std::move(arg)}});
}
inline TermExpr mu(Name binder, ProcExpr body) {
  return std::make_shared<TermNode>(TermNode{TMu{std::move(binder), std::move(body)}});
}
inline TermExpr car(StackExpr arg) {
  return std::make_shared<TermNode>(TermNode{TCar{std::move(arg)}});
}
inline ProcExpr proc(TermExpr head, StackExpr tail) {
  return std::make_shared<ProcNode>(ProcNode{std::move(head), std::move(tail)});
}

// cdr^n(pi) and car(cdr^n(pi))
inline StackExpr cdrN(StackExpr pi, unsigned n) {
  for (unsigned i = 0; i < n; ++i) pi = scdr(pi);
  return pi;
}
inline TermExpr cadrN(StackExpr pi, unsigned n) { return car(cdrN(std::move(pi), n)); }

inline const TMu* asMu(const TermExpr& t) { return std::get_if<TMu>(&t->v); }
inline const TCar* asCar(const TermExpr& t) { return std::get_if<TCar>(&t->v); }
inline const SVar* asVar(const StackExpr& s) { return std::get_if<SVar>(&s->v); }
inline bool isNil(const StackExpr& s) { return std::holds_alternative<SNil>(s->v); }
inline const SCons* asCons(const StackExpr& s) { return std::get_if<SCons>(&s->v); }
inline const SCdr* asCdr(const StackExpr& s) { return std::get_if<SCdr>(&s->v); }

// ---------------------------------------------------------------- free vars

namespace detail {

inline void freeVarsInto(const StackExpr& s, const NameSet& bound, NameSet& out);
inline void freeVarsInto(const TermExpr& t, const NameSet& bound, NameSet& out);
inline void freeVarsInto(const ProcExpr& p, const NameSet& bound, NameSet& out);

inline void freeVarsInto(const StackExpr& s, const NameSet& bound, NameSet& out) {
  if (auto* v = asVar(s)) {
    if (!bound.contains(v->name)) out.insert(v->name);
  } else if (auto* c = asCons(s)) {
    freeVarsInto(c->head, bound, out);
    freeVarsInto(c->tail, bound, out);
  } else if (auto* d = asCdr(s)) {
    freeVarsInto(d->arg, bound, out);
  }
}

inline void freeVarsInto(const TermExpr& t, const NameSet& bound, NameSet& out) {
  if (auto* m = asMu(t)) {
    NameSet b = bound;
    b.insert(m->binder);
    freeVarsInto(m->body, b, out);
  } else {
    freeVarsInto(asCar(t)->arg, bound, out);
  }
}

inline void freeVarsInto(const ProcExpr& p, const NameSet& bound, NameSet& out) {
  freeVarsInto(p->head, bound, out);
  freeVarsInto(p->tail, bound, out);
}

}  // namespace detail

inline NameSet freeVars(const StackExpr& s) {
  NameSet out;
  detail::freeVarsInto(s, {}, out);
  return out;
}
inline NameSet freeVars(const TermExpr& t) {
  NameSet out;
  detail::freeVarsInto(t, {}, out);
  return out;
}
inline NameSet freeVars(const ProcExpr& p) {
  NameSet out;
  detail::freeVarsInto(p, {}, out);
  return out;
}
inline NameSet freeVars(const Expr& e) {
  return std::visit([](const auto& x) { return freeVars(x); }, e);
}

// ---------------------------------------------------------------- fresh names

// Smallest unused numeric suffix on the base's stem; returns the base itself
// when it is not in `avoid`.
inline Name freshName(const NameSet& avoid, const Name& base) {
  if (!avoid.contains(base)) return base;
  std::string stem = base.text;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = base.text;
  if (Name bare{stem}; !avoid.contains(bare)) return bare;
  for (unsigned long k = 1;; ++k) {
    Name cand{stem + std::to_string(k)};
    if (!avoid.contains(cand)) return cand;
  }
}

// ---------------------------------------------------------------- substitution

// Simultaneous capture-avoiding substitution of stacks for stack variables.
using StackSubst = std::map<Name, StackExpr>;

namespace detail {

inline NameSet substRange(const StackSubst& sub) {
  NameSet out;
  for (const auto& [n, s] : sub) {
    NameSet fv = freeVars(s);
    out.insert(fv.begin(), fv.end());
  }
  return out;
}

inline StackExpr substS(const StackExpr& s, const StackSubst& sub);
inline TermExpr substT(const TermExpr& t, const StackSubst& sub);
inline ProcExpr substP(const ProcExpr& p, const StackSubst& sub);

inline StackExpr substS(const StackExpr& s, const StackSubst& sub) {
  if (sub.empty()) return s;
  if (auto* v = asVar(s)) {
    auto it = sub.find(v->name);
    return it == sub.end() ? s : it->second;
  }
  if (isNil(s)) return s;
  if (auto* c = asCons(s)) return scons(substT(c->head, sub), substS(c->tail, sub));
  return scdr(substS(asCdr(s)->arg, sub));
}

inline TermExpr substT(const TermExpr& t, const StackSubst& sub) {
  if (sub.empty()) return t;
  if (auto* c = asCar(t)) return car(substS(c->arg, sub));
  const TMu* m = asMu(t);
  StackSubst inner = sub;
  inner.erase(m->binder);
  if (inner.empty()) return t;
  // Rename the binder when it would capture a free variable of the images.
  NameSet range = substRange(inner);
  if (range.contains(m->binder)) {
    NameSet avoid = range;
    NameSet bodyFv = freeVars(m->body);
    avoid.insert(bodyFv.begin(), bodyFv.end());
    Name fresh = freshName(avoid, m->binder);
    inner[m->binder] = svar(fresh);
    return mu(fresh, substP(m->body, inner));
  }
  return mu(m->binder, substP(m->body, inner));
}

inline ProcExpr substP(const ProcExpr& p, const StackSubst& sub) {
  if (sub.empty()) return p;
  return proc(substT(p->head, sub), substS(p->tail, sub));
}

}  // namespace detail

inline StackExpr substStack(const StackExpr& e, const StackExpr& pi, const Name& alpha) {
  return detail::substS(e, {{alpha, pi}});
}
inline TermExpr substStack(const TermExpr& e, const StackExpr& pi, const Name& alpha) {
  return detail::substT(e, {{alpha, pi}});
}
inline ProcExpr substStack(const ProcExpr& e, const StackExpr& pi, const Name& alpha) {
  return detail::substP(e, {{alpha, pi}});
}
inline Expr substStack(const Expr& e, const StackExpr& pi, const Name& alpha) {
  return std::visit([&](const auto& x) -> Expr { return substStack(x, pi, alpha); }, e);
}

inline StackExpr substStackMulti(const StackExpr& e, const StackSubst& sub) {
  return detail::substS(e, sub);
}
inline TermExpr substStackMulti(const TermExpr& e, const StackSubst& sub) {
  return detail::substT(e, sub);
}
inline ProcExpr substStackMulti(const ProcExpr& e, const StackSubst& sub) {
  return detail::substP(e, sub);
}

// ---------------------------------------------------------------- alpha-equality

namespace detail {

// Bound names are compared by binder depth, free names by text.
struct AlphaEnv {
  std::map<Name, int> left, right;
  int depth = 0;
};

inline bool alphaS(const StackExpr& a, const StackExpr& b, AlphaEnv& env);
inline bool alphaT(const TermExpr& a, const TermExpr& b, AlphaEnv& env);
inline bool alphaP(const ProcExpr& a, const ProcExpr& b, AlphaEnv& env);

inline bool alphaS(const StackExpr& a, const StackExpr& b, AlphaEnv& env) {
  if (a->v.index() != b->v.index()) return false;
  if (auto* va = asVar(a)) {
    auto* vb = asVar(b);
    auto la = env.left.find(va->name);
    auto lb = env.right.find(vb->name);
    if (la != env.left.end() || lb != env.right.end())
      return la != env.left.end() && lb != env.right.end() && la->second == lb->second;
    return va->name == vb->name;
  }
  if (isNil(a)) return true;
  if (auto* ca = asCons(a)) {
    auto* cb = asCons(b);
    return alphaT(ca->head, cb->head, env) && alphaS(ca->tail, cb->tail, env);
  }
  return alphaS(asCdr(a)->arg, asCdr(b)->arg, env);
}

inline bool alphaT(const TermExpr& a, const TermExpr& b, AlphaEnv& env) {
  if (a->v.index() != b->v.index()) return false;
  if (auto* ma = asMu(a)) {
    auto* mb = asMu(b);
    auto savedL = env.left.find(ma->binder) != env.left.end()
                      ? std::optional<int>(env.left[ma->binder])
                      : std::nullopt;
    auto savedR = env.right.find(mb->binder) != env.right.end()
                      ? std::optional<int>(env.right[mb->binder])
                      : std::nullopt;
    env.left[ma->binder] = env.depth;
    env.right[mb->binder] = env.depth;
    ++env.depth;
    bool ok = alphaP(ma->body, mb->body, env);
    --env.depth;
    if (savedL)
      env.left[ma->binder] = *savedL;
    else
      env.left.erase(ma->binder);
    if (savedR)
      env.right[mb->binder] = *savedR;
    else
      env.right.erase(mb->binder);
    return ok;
  }
  return alphaS(asCar(a)->arg, asCar(b)->arg, env);
}

inline bool alphaP(const ProcExpr& a, const ProcExpr& b, AlphaEnv& env) {
  return alphaT(a->head, b->head, env) && alphaS(a->tail, b->tail, env);
}

}  // namespace detail

inline bool alphaEq(const StackExpr& a, const StackExpr& b) {
  detail::AlphaEnv env;
  return detail::alphaS(a, b, env);
}
inline bool alphaEq(const TermExpr& a, const TermExpr& b) {
  detail::AlphaEnv env;
  return detail::alphaT(a, b, env);
}
inline bool alphaEq(const ProcExpr& a, const ProcExpr& b) {
  detail::AlphaEnv env;
  return detail::alphaP(a, b, env);
}
inline bool alphaEq(const Expr& a, const Expr& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        return alphaEq(x, std::get<T>(b));
      },
      a);
}

// Canonical key: alpha-equal expressions map to the same string. Bound
// occurrences print as the binding depth, free ones keep their text.
namespace detail {

inline void canonS(const StackExpr& s, std::map<Name, int>& bound, int depth, std::string& out);
inline void canonT(const TermExpr& t, std::map<Name, int>& bound, int depth, std::string& out);
inline void canonP(const ProcExpr& p, std::map<Name, int>& bound, int depth, std::string& out);

inline void canonS(const StackExpr& s, std::map<Name, int>& bound, int depth, std::string& out) {
  if (auto* v = asVar(s)) {
    auto it = bound.find(v->name);
    if (it != bound.end()) {
      out += '#';
      out += std::to_string(it->second);
    } else {
      out += '~';
      out += v->name.text;
    }
    out += ';';
  } else if (isNil(s)) {
    out += "N;";
  } else if (auto* c = asCons(s)) {
    out += "C(";
    canonT(c->head, bound, depth, out);
    canonS(c->tail, bound, depth, out);
    out += ')';
  } else {
    out += "D(";
    canonS(asCdr(s)->arg, bound, depth, out);
    out += ')';
  }
}

inline void canonT(const TermExpr& t, std::map<Name, int>& bound, int depth, std::string& out) {
  if (auto* m = asMu(t)) {
    out += "M(";
    auto saved = bound.find(m->binder) != bound.end() ? std::optional<int>(bound[m->binder])
                                                      : std::nullopt;
    bound[m->binder] = depth;
    canonP(m->body, bound, depth + 1, out);
    if (saved)
      bound[m->binder] = *saved;
    else
      bound.erase(m->binder);
    out += ')';
  } else {
    out += "A(";
    canonS(asCar(t)->arg, bound, depth, out);
    out += ')';
  }
}

inline void canonP(const ProcExpr& p, std::map<Name, int>& bound, int depth, std::string& out) {
  out += "P(";
  canonT(p->head, bound, depth, out);
  canonS(p->tail, bound, depth, out);
  out += ')';
}

}  // namespace detail

inline std::string canonicalKey(const Expr& e) {
  std::string out;
  std::map<Name, int> bound;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, StackExpr>)
          detail::canonS(x, bound, 0, out);
        else if constexpr (std::is_same_v<T, TermExpr>)
          detail::canonT(x, bound, 0, out);
        else
          detail::canonP(x, bound, 0, out);
      },
      e);
  return out;
}

inline std::size_t exprSize(const Expr& e);

namespace detail {
inline std::size_t sizeS(const StackExpr& s) {
  if (auto* c = asCons(s)) return 1 + exprSize(Expr{c->head}) + sizeS(c->tail);
  if (auto* d = asCdr(s)) return 1 + sizeS(d->arg);
  return 1;
}
inline std::size_t sizeT(const TermExpr& t) {
  if (auto* m = asMu(t)) return 1 + exprSize(Expr{m->body});
  return 1 + sizeS(asCar(t)->arg);
}
}  // namespace detail

inline std::size_t exprSize(const Expr& e) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, StackExpr>)
          return detail::sizeS(x);
        else if constexpr (std::is_same_v<T, TermExpr>)
          return detail::sizeT(x);
        else
          return 1 + detail::sizeT(x->head) + detail::sizeS(x->tail);
      },
      e);
}

}  // namespace stackcalc
