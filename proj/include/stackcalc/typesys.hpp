#pragma once

// Formulas and the propositional type system for the stack calculus:
// judgements "pi : A | D" (stacks), "M : A | D" (terms), "P | D" (processes).
// Inference is first-order unification with occurs check; the calculus is
// simply typed, so principal types exist and every derivable type is a
// substitution instance of the inferred one.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stackcalc/syntax.hpp"

namespace stackcalc {

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct FAtom {
  Name name;
};
struct FFalsum {};
struct FArrow {
  Formula lhs, rhs;
};
struct FormulaNode {
  std::variant<FAtom, FFalsum, FArrow> v;
};

inline Formula fatom(Name n) { return std::make_shared<FormulaNode>(FormulaNode{FAtom{std::move(n)}}); }
inline Formula ffalsum() {
  static const Formula f = std::make_shared<FormulaNode>(FormulaNode{FFalsum{}});
  return f;
}
inline Formula farrow(Formula lhs, Formula rhs) {
  return std::make_shared<FormulaNode>(FormulaNode{FArrow{std::move(lhs), std::move(rhs)}});
}

inline const FAtom* asAtom(const Formula& f) { return std::get_if<FAtom>(&f->v); }
inline bool isFalsum(const Formula& f) { return std::holds_alternative<FFalsum>(f->v); }
inline const FArrow* asArrow(const Formula& f) { return std::get_if<FArrow>(&f->v); }

inline bool formulaEq(const Formula& a, const Formula& b) {
  if (a.get() == b.get()) return true;
  if (a->v.index() != b->v.index()) return false;
  if (auto* x = asAtom(a)) return x->name == asAtom(b)->name;
  if (isFalsum(a)) return true;
  auto* x = asArrow(a);
  auto* y = asArrow(b);
  return formulaEq(x->lhs, y->lhs) && formulaEq(x->rhs, y->rhs);
}

// Structural order: falsum < atoms (by text) < arrows (lexicographic).
inline int formulaCmp(const Formula& a, const Formula& b) {
  if (a->v.index() != b->v.index()) return a->v.index() < b->v.index() ? -1 : 1;
  if (isFalsum(a)) return 0;
  if (auto* x = asAtom(a)) {
    const Name& n = asAtom(b)->name;
    return x->name == n ? 0 : (x->name < n ? -1 : 1);
  }
  auto* x = asArrow(a);
  auto* y = asArrow(b);
  int c = formulaCmp(x->lhs, y->lhs);
  return c != 0 ? c : formulaCmp(x->rhs, y->rhs);
}

struct FormulaLess {
  bool operator()(const Formula& a, const Formula& b) const { return formulaCmp(a, b) < 0; }
};

using FormulaSet = std::set<Formula, FormulaLess>;

inline void atomsOf(const Formula& f, NameSet& out) {
  if (auto* a = asAtom(f)) {
    out.insert(a->name);
  } else if (auto* ar = asArrow(f)) {
    atomsOf(ar->lhs, out);
    atomsOf(ar->rhs, out);
  }
}

// arity of a formula: number of premisses along the arrow spine
inline unsigned rank(const Formula& f) {
  if (auto* a = asArrow(f)) return 1 + rank(a->rhs);
  return 0;
}

// ----------------------------------------------------------------- contexts

// Ordered name-to-formula assumptions; no duplicate names, a mu binding
// shadows (replaces) any outer entry of the same name.
struct Context {
  std::vector<std::pair<Name, Formula>> entries;

  const Formula* lookup(const Name& n) const {
    for (const auto& [name, f] : entries)
      if (name == n) return &f;
    return nullptr;
  }

  Context withEntry(const Name& n, Formula f) const {
    Context out = *this;
    for (auto& [name, formula] : out.entries)
      if (name == n) {
        formula = std::move(f);
        return out;
      }
    out.entries.emplace_back(n, std::move(f));
    return out;
  }

  bool empty() const { return entries.empty(); }
};

// ----------------------------------------------------------------- errors

struct TypeError {
  enum class Kind { UnificationFailure, OccursCheck, UnboundVariable };
  Kind kind;
  std::vector<int> path;  // child indices from the judgement subject
  std::string message;
};

using InferResult = std::variant<Formula, TypeError>;

// ----------------------------------------------------------------- metatypes

// Formulas extended with unification variables; session-local.
struct MNode;
using MType = std::shared_ptr<const MNode>;
struct MAtomT {
  Name name;
};
struct MFalsumT {};
struct MArrowT {
  MType lhs, rhs;
};
struct MVarT {
  int id;
};
struct MNode {
  std::variant<MAtomT, MFalsumT, MArrowT, MVarT> v;
};

class TypeSession {
 public:
  MType freshVar() { return std::make_shared<MNode>(MNode{MVarT{next_++}}); }

  static MType fromFormula(const Formula& f) {
    if (auto* a = asAtom(f)) return std::make_shared<MNode>(MNode{MAtomT{a->name}});
    if (isFalsum(f)) return std::make_shared<MNode>(MNode{MFalsumT{}});
    auto* ar = asArrow(f);
    return std::make_shared<MNode>(MNode{MArrowT{fromFormula(ar->lhs), fromFormula(ar->rhs)}});
  }

  MType shallow(MType t) const {
    while (auto* v = std::get_if<MVarT>(&t->v)) {
      auto it = sol_.find(v->id);
      if (it == sol_.end()) break;
      t = it->second;
    }
    return t;
  }

  bool occurs(int id, const MType& t) const {
    MType r = shallow(t);
    if (auto* v = std::get_if<MVarT>(&r->v)) return v->id == id;
    if (auto* a = std::get_if<MArrowT>(&r->v)) return occurs(id, a->lhs) || occurs(id, a->rhs);
    return false;
  }

  // Returns nullopt on success, the error kind on failure.
  std::optional<TypeError::Kind> unify(const MType& a, const MType& b) {
    MType x = shallow(a), y = shallow(b);
    if (auto* vx = std::get_if<MVarT>(&x->v)) {
      if (auto* vy = std::get_if<MVarT>(&y->v); vy && vy->id == vx->id) return std::nullopt;
      if (occurs(vx->id, y)) return TypeError::Kind::OccursCheck;
      sol_[vx->id] = y;
      return std::nullopt;
    }
    if (std::holds_alternative<MVarT>(y->v)) return unify(y, x);
    if (x->v.index() != y->v.index()) return TypeError::Kind::UnificationFailure;
    if (auto* ax = std::get_if<MAtomT>(&x->v))
      return ax->name == std::get<MAtomT>(y->v).name
                 ? std::nullopt
                 : std::optional(TypeError::Kind::UnificationFailure);
    if (std::holds_alternative<MFalsumT>(x->v)) return std::nullopt;
    auto* rx = std::get_if<MArrowT>(&x->v);
    auto* ry = std::get_if<MArrowT>(&y->v);
    if (auto e = unify(rx->lhs, ry->lhs)) return e;
    return unify(rx->rhs, ry->rhs);
  }

  MType resolve(const MType& t) const {
    MType r = shallow(t);
    if (auto* a = std::get_if<MArrowT>(&r->v))
      return std::make_shared<MNode>(MNode{MArrowT{resolve(a->lhs), resolve(a->rhs)}});
    return r;
  }

  // Grounds a resolved metatype: unconstrained variables become distinct
  // fresh atoms, named deterministically in order of first occurrence.
  Formula ground(const MType& t, NameSet& avoid, std::map<int, Name>& assigned) const {
    MType r = shallow(t);
    if (auto* v = std::get_if<MVarT>(&r->v)) {
      auto it = assigned.find(v->id);
      if (it == assigned.end()) {
        Name n = freshName(avoid, Name{"x"});
        avoid.insert(n);
        it = assigned.emplace(v->id, n).first;
      }
      return fatom(it->second);
    }
    if (auto* a = std::get_if<MAtomT>(&r->v)) return fatom(a->name);
    if (std::holds_alternative<MFalsumT>(r->v)) return ffalsum();
    auto* ar = std::get_if<MArrowT>(&r->v);
    Formula lhs = ground(ar->lhs, avoid, assigned);
    return farrow(lhs, ground(ar->rhs, avoid, assigned));
  }

  // One-way matching of a principal metatype against a concrete formula.
  bool matches(const MType& t, const Formula& f, std::map<int, Formula>& binding) const {
    MType r = shallow(t);
    if (auto* v = std::get_if<MVarT>(&r->v)) {
      auto it = binding.find(v->id);
      if (it != binding.end()) return formulaEq(it->second, f);
      binding.emplace(v->id, f);
      return true;
    }
    if (auto* a = std::get_if<MAtomT>(&r->v)) {
      auto* fa = asAtom(f);
      return fa && fa->name == a->name;
    }
    if (std::holds_alternative<MFalsumT>(r->v)) return isFalsum(f);
    auto* ar = std::get_if<MArrowT>(&r->v);
    auto* far = asArrow(f);
    return far && matches(ar->lhs, far->lhs, binding) && matches(ar->rhs, far->rhs, binding);
  }

 private:
  std::map<int, MType> sol_;
  int next_ = 0;
};

// ----------------------------------------------------------------- inference

namespace detail {

using MCtx = std::map<Name, MType>;

struct InferState {
  TypeSession session;
  std::optional<TypeError> error;

  void fail(TypeError::Kind kind, std::vector<int> path, std::string msg) {
    if (!error) error = TypeError{kind, std::move(path), std::move(msg)};
  }
};

inline MType inferS(const StackExpr& s, const MCtx& ctx, InferState& st, std::vector<int>& path);
inline MType inferT(const TermExpr& t, const MCtx& ctx, InferState& st, std::vector<int>& path);
inline bool inferP(const ProcExpr& p, const MCtx& ctx, InferState& st, std::vector<int>& path);

inline MType inferS(const StackExpr& s, const MCtx& ctx, InferState& st, std::vector<int>& path) {
  if (st.error) return st.session.freshVar();
  if (auto* v = asVar(s)) {
    auto it = ctx.find(v->name);
    if (it == ctx.end()) {
      st.fail(TypeError::Kind::UnboundVariable, path, "unbound stack variable " + v->name.text);
      return st.session.freshVar();
    }
    return it->second;
  }
  if (isNil(s)) return TypeSession::fromFormula(ffalsum());
  if (auto* c = asCons(s)) {
    path.push_back(0);
    MType a = inferT(c->head, ctx, st, path);
    path.back() = 1;
    MType b = inferS(c->tail, ctx, st, path);
    path.pop_back();
    return std::make_shared<MNode>(MNode{MArrowT{a, b}});
  }
  // cdr pi : B where pi : A -> B
  path.push_back(0);
  MType arg = inferS(asCdr(s)->arg, ctx, st, path);
  path.pop_back();
  MType a = st.session.freshVar();
  MType b = st.session.freshVar();
  if (!st.error)
    if (auto e = st.session.unify(arg, std::make_shared<MNode>(MNode{MArrowT{a, b}})))
      st.fail(*e, path, "cdr applied to a non-arrow stack");
  return b;
}

inline MType inferT(const TermExpr& t, const MCtx& ctx, InferState& st, std::vector<int>& path) {
  if (st.error) return st.session.freshVar();
  if (auto* c = asCar(t)) {
    path.push_back(0);
    MType arg = inferS(c->arg, ctx, st, path);
    path.pop_back();
    MType a = st.session.freshVar();
    MType b = st.session.freshVar();
    if (!st.error)
      if (auto e = st.session.unify(arg, std::make_shared<MNode>(MNode{MArrowT{a, b}})))
        st.fail(*e, path, "car applied to a non-arrow stack");
    return a;
  }
  const TMu* m = asMu(t);
  MType a = st.session.freshVar();
  MCtx inner = ctx;
  inner[m->binder] = a;  // shadows any outer entry
  path.push_back(0);
  inferP(m->body, inner, st, path);
  path.pop_back();
  return a;
}

inline bool inferP(const ProcExpr& p, const MCtx& ctx, InferState& st, std::vector<int>& path) {
  if (st.error) return false;
  path.push_back(0);
  MType a = inferT(p->head, ctx, st, path);
  path.back() = 1;
  MType b = inferS(p->tail, ctx, st, path);
  path.pop_back();
  if (!st.error)
    if (auto e = st.session.unify(a, b))
      st.fail(*e, path, "term and stack of a process have incompatible types");
  return !st.error;
}

inline MCtx toMCtx(const Context& ctx) {
  MCtx out;
  for (const auto& [n, f] : ctx.entries) out[n] = TypeSession::fromFormula(f);
  return out;
}

inline NameSet ctxAtoms(const Context& ctx) {
  NameSet out;
  for (const auto& [n, f] : ctx.entries) atomsOf(f, out);
  return out;
}

}  // namespace detail

namespace detail {

inline void metaAtomsInto(const MType& t, NameSet& out) {
  if (auto* a = std::get_if<MAtomT>(&t->v)) {
    out.insert(a->name);
  } else if (auto* ar = std::get_if<MArrowT>(&t->v)) {
    metaAtomsInto(ar->lhs, out);
    metaAtomsInto(ar->rhs, out);
  }
}

inline InferResult groundResult(InferState& st, const MType& t, const Context& ctx) {
  if (st.error) return *st.error;
  MType r = st.session.resolve(t);
  NameSet avoid = ctxAtoms(ctx);
  metaAtomsInto(r, avoid);
  std::map<int, Name> assigned;
  return st.session.ground(r, avoid, assigned);
}

}  // namespace detail

inline InferResult inferTerm(const TermExpr& m, const Context& ctx) {
  detail::InferState st;
  std::vector<int> path;
  MType t = detail::inferT(m, detail::toMCtx(ctx), st, path);
  return detail::groundResult(st, t, ctx);
}

inline InferResult inferStack(const StackExpr& s, const Context& ctx) {
  detail::InferState st;
  std::vector<int> path;
  MType t = detail::inferS(s, detail::toMCtx(ctx), st, path);
  return detail::groundResult(st, t, ctx);
}

// Process judgements have no active formula; success means derivability.
inline std::optional<TypeError> inferProcess(const ProcExpr& p, const Context& ctx) {
  detail::InferState st;
  std::vector<int> path;
  detail::inferP(p, detail::toMCtx(ctx), st, path);
  return st.error;
}

inline bool checkTerm(const TermExpr& m, const Formula& a, const Context& ctx,
                      std::string* diagnostic = nullptr) {
  detail::InferState st;
  std::vector<int> path;
  MType t = detail::inferT(m, detail::toMCtx(ctx), st, path);
  if (st.error) {
    if (diagnostic) *diagnostic = st.error->message;
    return false;
  }
  std::map<int, Formula> binding;
  bool ok = st.session.matches(st.session.resolve(t), a, binding);
  if (!ok && diagnostic) *diagnostic = "formula is not an instance of the principal type";
  return ok;
}

inline bool checkStack(const StackExpr& s, const Formula& a, const Context& ctx,
                       std::string* diagnostic = nullptr) {
  detail::InferState st;
  std::vector<int> path;
  MType t = detail::inferS(s, detail::toMCtx(ctx), st, path);
  if (st.error) {
    if (diagnostic) *diagnostic = st.error->message;
    return false;
  }
  std::map<int, Formula> binding;
  bool ok = st.session.matches(st.session.resolve(t), a, binding);
  if (!ok && diagnostic) *diagnostic = "formula is not an instance of the principal type";
  return ok;
}

inline bool checkProcess(const ProcExpr& p, const Context& ctx, std::string* diagnostic = nullptr) {
  auto err = inferProcess(p, ctx);
  if (err && diagnostic) *diagnostic = err->message;
  return !err;
}

// Checked judgement over any sort; process judgements pass type == nullopt.
inline bool checkExpr(const Expr& e, const std::optional<Formula>& type, const Context& ctx) {
  if (auto* s = std::get_if<StackExpr>(&e)) return type && checkStack(*s, *type, ctx);
  if (auto* t = std::get_if<TermExpr>(&e)) return type && checkTerm(*t, *type, ctx);
  return !type && checkProcess(std::get<ProcExpr>(e), ctx);
}

// A judgement in one of the three forms: pi : A | D, M : A | D, or P | D
// (the latter has no active formula).
struct Judgement {
  Expr subject;
  std::optional<Formula> type;
  Context ctx;
};

inline bool checkJudgement(const Judgement& j) { return checkExpr(j.subject, j.type, j.ctx); }

// ----------------------------------------------------------------- CPS types

// {and, not, false}-formulas, the target of the Pos/Neg type translation.
struct IntFormulaNode;
using IntFormula = std::shared_ptr<const IntFormulaNode>;
struct IAtom {
  Name name;
};
struct IFalsum {};
struct INeg {
  IntFormula arg;
};
struct IConj {
  IntFormula lhs, rhs;
};
struct IntFormulaNode {
  std::variant<IAtom, IFalsum, INeg, IConj> v;
};

inline IntFormula iatom(Name n) {
  return std::make_shared<IntFormulaNode>(IntFormulaNode{IAtom{std::move(n)}});
}
inline IntFormula ifalsum() {
  static const IntFormula f = std::make_shared<IntFormulaNode>(IntFormulaNode{IFalsum{}});
  return f;
}
inline IntFormula ineg(IntFormula a) {
  return std::make_shared<IntFormulaNode>(IntFormulaNode{INeg{std::move(a)}});
}
inline IntFormula iconj(IntFormula a, IntFormula b) {
  return std::make_shared<IntFormulaNode>(IntFormulaNode{IConj{std::move(a), std::move(b)}});
}

inline bool intFormulaEq(const IntFormula& a, const IntFormula& b) {
  if (a->v.index() != b->v.index()) return false;
  if (auto* x = std::get_if<IAtom>(&a->v)) return x->name == std::get<IAtom>(b->v).name;
  if (std::holds_alternative<IFalsum>(a->v)) return true;
  if (auto* x = std::get_if<INeg>(&a->v)) return intFormulaEq(x->arg, std::get<INeg>(b->v).arg);
  auto* x = std::get_if<IConj>(&a->v);
  auto* y = std::get_if<IConj>(&b->v);
  return intFormulaEq(x->lhs, y->lhs) && intFormulaEq(x->rhs, y->rhs);
}

struct CpsTypes {
  IntFormula pos;
  IntFormula neg;
};

// Pos(false) = ~false; Pos(a) = a; Pos(A -> B) = Neg(A) /\ Pos(B); Neg(A) = ~Pos(A).
inline IntFormula cpsPos(const Formula& a) {
  if (isFalsum(a)) return ineg(ifalsum());
  if (auto* at = asAtom(a)) return iatom(at->name);
  auto* ar = asArrow(a);
  return iconj(ineg(cpsPos(ar->lhs)), cpsPos(ar->rhs));
}

inline CpsTypes cpsTranslate(const Formula& a) {
  IntFormula pos = cpsPos(a);
  return CpsTypes{pos, ineg(pos)};
}

}  // namespace stackcalc
