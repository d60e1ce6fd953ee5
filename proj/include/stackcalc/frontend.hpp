#pragma once

// Concrete syntax. The grammar (tokens separated by whitespace/punctuation):
//
//   process := term "*" stack
//   term    := "mu" IDENT "." process | "car" "(" stack ")" | "(" term ")"
//   stack   := term "::" stack | IDENT | "nil" | "cdr" "(" stack ")" | "(" stack ")"
//   lterm   := "\" IDENT "." lterm | "mu" IDENT "." lproc | lapp
//   lapp    := latom { latom }
//   latom   := IDENT | "(" lterm ")"
//   lproc   := "[" IDENT "]" lterm
//   formula := fatom [ "->" formula ]   fatom := IDENT | "false" | "(" formula ")"
//   context := [ IDENT ":" formula { "," IDENT ":" formula } ]
//
// Reserved words: mu, car, cdr, nil, false. Cons "::" is right-associative
// and binds tighter than application "*"; abstraction bodies extend maximally
// to the right.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stackcalc/lambdamu.hpp"
#include "stackcalc/syntax.hpp"
#include "stackcalc/typesys.hpp"

namespace stackcalc {

struct SourceSpan {
  std::size_t startOffset = 0;
  std::size_t endOffset = 0;
};

struct ParseError {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;
};

namespace frontdetail {

enum class Tok {
  Ident,
  KwMu,
  KwCar,
  KwCdr,
  KwNil,
  KwFalse,
  LParen,
  RParen,
  Dot,
  Star,
  ConsOp,
  Colon,
  Backslash,
  LBracket,
  RBracket,
  Arrow,
  Comma,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

inline const char* tokenLabel(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::KwMu: return "'mu'";
    case Tok::KwCar: return "'car'";
    case Tok::KwCdr: return "'cdr'";
    case Tok::KwNil: return "'nil'";
    case Tok::KwFalse: return "'false'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Dot: return "'.'";
    case Tok::Star: return "'*'";
    case Tok::ConsOp: return "'::'";
    case Tok::Colon: return "':'";
    case Tok::Backslash: return "'\\'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Arrow: return "'->'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "?";
}

inline bool identStart(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool identCont(char c) {
  return identStart(c) || (c >= '0' && c <= '9') || c == '_' || c == '\'';
}

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;
  std::vector<Token> tokens;
  std::optional<ParseError> error;

  void emit(Tok k, std::size_t start, std::size_t end) {
    tokens.push_back({k, std::string(src.substr(start, end - start)), {start, end}});
  }

  void run() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos;
        continue;
      }
      std::size_t start = pos;
      if (identStart(c)) {
        while (pos < src.size() && identCont(src[pos])) ++pos;
        std::string_view word = src.substr(start, pos - start);
        Tok k = Tok::Ident;
        if (word == "mu")
          k = Tok::KwMu;
        else if (word == "car")
          k = Tok::KwCar;
        else if (word == "cdr")
          k = Tok::KwCdr;
        else if (word == "nil")
          k = Tok::KwNil;
        else if (word == "false")
          k = Tok::KwFalse;
        emit(k, start, pos);
        continue;
      }
      switch (c) {
        case '(': emit(Tok::LParen, start, ++pos); continue;
        case ')': emit(Tok::RParen, start, ++pos); continue;
        case '.': emit(Tok::Dot, start, ++pos); continue;
        case '*': emit(Tok::Star, start, ++pos); continue;
        case '\\': emit(Tok::Backslash, start, ++pos); continue;
        case '[': emit(Tok::LBracket, start, ++pos); continue;
        case ']': emit(Tok::RBracket, start, ++pos); continue;
        case ',': emit(Tok::Comma, start, ++pos); continue;
        case ':':
          ++pos;
          if (pos < src.size() && src[pos] == ':') {
            ++pos;
            emit(Tok::ConsOp, start, pos);
          } else {
            emit(Tok::Colon, start, pos);
          }
          continue;
        case '-':
          ++pos;
          if (pos < src.size() && src[pos] == '>') {
            ++pos;
            emit(Tok::Arrow, start, pos);
            continue;
          }
          error = ParseError{{start, pos}, "stray '-'", {"'->'"}};
          return;
        default:
          error = ParseError{{start, start + 1},
                             std::string("unexpected character '") + c + "'",
                             {}};
          return;
      }
    }
    tokens.push_back({Tok::End, "", {src.size(), src.size()}});
  }
};

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;
  std::optional<ParseError> error;

  const Token& peek() const { return toks[pos]; }
  const Token& next() { return toks[pos2()]; }
  std::size_t pos2() {
    std::size_t p = pos;
    if (pos + 1 < toks.size()) ++pos;
    return p;
  }
  bool at(Tok k) const { return peek().kind == k; }

  void fail(std::string msg, std::vector<std::string> expected = {}) {
    if (!error) error = ParseError{peek().span, std::move(msg), std::move(expected)};
  }

  bool expect(Tok k) {
    if (at(k)) {
      next();
      return true;
    }
    fail(std::string("expected ") + tokenLabel(k) + ", found " + tokenLabel(peek().kind),
         {tokenLabel(k)});
    return false;
  }

  std::optional<Name> expectIdent() {
    if (at(Tok::Ident)) {
      Name n{peek().text};
      next();
      return n;
    }
    fail(std::string("expected identifier, found ") + tokenLabel(peek().kind), {"identifier"});
    return std::nullopt;
  }

  // ---- stack calculus ----

  // nullopt only when error is set
  std::optional<Expr> parsePrimary() {
    switch (peek().kind) {
      case Tok::KwMu: {
        next();
        auto name = expectIdent();
        if (!name) return std::nullopt;
        if (!expect(Tok::Dot)) return std::nullopt;
        auto body = parseProcessLevel();
        if (!body) return std::nullopt;
        return Expr{mu(*name, *body)};
      }
      case Tok::KwCar: {
        next();
        if (!expect(Tok::LParen)) return std::nullopt;
        auto s = parseStackLevel();
        if (!s) return std::nullopt;
        if (!expect(Tok::RParen)) return std::nullopt;
        return Expr{car(*s)};
      }
      case Tok::KwCdr: {
        next();
        if (!expect(Tok::LParen)) return std::nullopt;
        auto s = parseStackLevel();
        if (!s) return std::nullopt;
        if (!expect(Tok::RParen)) return std::nullopt;
        return Expr{scdr(*s)};
      }
      case Tok::KwNil:
        next();
        return Expr{snil()};
      case Tok::Ident: {
        Name n{peek().text};
        next();
        return Expr{svar(n)};
      }
      case Tok::LParen: {
        next();
        auto inner = parseAnyLevel();
        if (!inner) return std::nullopt;
        if (std::holds_alternative<ProcExpr>(*inner)) {
          fail("parenthesized processes are not part of the grammar");
          return std::nullopt;
        }
        if (!expect(Tok::RParen)) return std::nullopt;
        return inner;
      }
      default:
        fail(std::string("expected an expression, found ") + tokenLabel(peek().kind),
             {"'mu'", "'car'", "'cdr'", "'nil'", "identifier", "'('"});
        return std::nullopt;
    }
  }

  std::optional<StackExpr> parseStackLevel() {
    auto p = parsePrimary();
    if (!p) return std::nullopt;
    if (auto* t = std::get_if<TermExpr>(&*p)) {
      if (!expect(Tok::ConsOp)) return std::nullopt;
      auto tail = parseStackLevel();
      if (!tail) return std::nullopt;
      return scons(*t, *tail);
    }
    if (auto* s = std::get_if<StackExpr>(&*p)) {
      if (at(Tok::ConsOp)) {
        fail("cons head must be a term");
        return std::nullopt;
      }
      return *s;
    }
    fail("expected a stack, found a process");
    return std::nullopt;
  }

  std::optional<ProcExpr> parseProcessLevel() {
    auto p = parsePrimary();
    if (!p) return std::nullopt;
    auto* t = std::get_if<TermExpr>(&*p);
    if (!t) {
      fail("process head must be a term");
      return std::nullopt;
    }
    if (!expect(Tok::Star)) return std::nullopt;
    auto tail = parseStackLevel();
    if (!tail) return std::nullopt;
    return proc(*t, *tail);
  }

  std::optional<Expr> parseAnyLevel() {
    auto p = parsePrimary();
    if (!p) return std::nullopt;
    if (auto* t = std::get_if<TermExpr>(&*p)) {
      if (at(Tok::Star)) {
        next();
        auto tail = parseStackLevel();
        if (!tail) return std::nullopt;
        return Expr{proc(*t, *tail)};
      }
      if (at(Tok::ConsOp)) {
        next();
        auto tail = parseStackLevel();
        if (!tail) return std::nullopt;
        return Expr{scons(*t, *tail)};
      }
      return p;
    }
    if (std::holds_alternative<StackExpr>(*p)) {
      if (at(Tok::ConsOp)) {
        fail("cons head must be a term");
        return std::nullopt;
      }
      if (at(Tok::Star)) {
        fail("process head must be a term");
        return std::nullopt;
      }
    }
    return p;
  }

  // ---- lambda-mu ----

  std::optional<LTerm> parseLTerm() {
    if (at(Tok::Backslash)) {
      next();
      auto x = expectIdent();
      if (!x) return std::nullopt;
      if (!expect(Tok::Dot)) return std::nullopt;
      auto body = parseLTerm();
      if (!body) return std::nullopt;
      return llam(*x, *body);
    }
    if (at(Tok::KwMu)) {
      next();
      auto a = expectIdent();
      if (!a) return std::nullopt;
      if (!expect(Tok::Dot)) return std::nullopt;
      auto body = parseLProc();
      if (!body) return std::nullopt;
      return lmu(*a, *body);
    }
    return parseLApp();
  }

  std::optional<LTerm> parseLApp() {
    auto head = parseLAtom();
    if (!head) return std::nullopt;
    LTerm acc = *head;
    while (at(Tok::Ident) || at(Tok::LParen)) {
      auto arg = parseLAtom();
      if (!arg) return std::nullopt;
      acc = lapp(acc, *arg);
    }
    return acc;
  }

  std::optional<LTerm> parseLAtom() {
    if (at(Tok::Ident)) {
      Name n{peek().text};
      next();
      return lvar(n);
    }
    if (at(Tok::LParen)) {
      next();
      auto t = parseLTerm();
      if (!t) return std::nullopt;
      if (!expect(Tok::RParen)) return std::nullopt;
      return t;
    }
    fail(std::string("expected a lambda-mu atom, found ") + tokenLabel(peek().kind),
         {"identifier", "'('"});
    return std::nullopt;
  }

  std::optional<LProc> parseLProc() {
    if (!expect(Tok::LBracket)) return std::nullopt;
    auto a = expectIdent();
    if (!a) return std::nullopt;
    if (!expect(Tok::RBracket)) return std::nullopt;
    auto t = parseLTerm();
    if (!t) return std::nullopt;
    return lnamed(*a, *t);
  }

  // ---- formulas / contexts ----

  std::optional<Formula> parseFormulaLevel() {
    auto lhs = parseFAtom();
    if (!lhs) return std::nullopt;
    if (at(Tok::Arrow)) {
      next();
      auto rhs = parseFormulaLevel();
      if (!rhs) return std::nullopt;
      return farrow(*lhs, *rhs);
    }
    return lhs;
  }

  std::optional<Formula> parseFAtom() {
    if (at(Tok::KwFalse)) {
      next();
      return ffalsum();
    }
    if (at(Tok::Ident)) {
      Name n{peek().text};
      next();
      return fatom(n);
    }
    if (at(Tok::LParen)) {
      next();
      auto f = parseFormulaLevel();
      if (!f) return std::nullopt;
      if (!expect(Tok::RParen)) return std::nullopt;
      return f;
    }
    fail(std::string("expected a formula, found ") + tokenLabel(peek().kind),
         {"identifier", "'false'", "'('"});
    return std::nullopt;
  }

  std::optional<Context> parseContextLevel() {
    Context ctx;
    if (at(Tok::End)) return ctx;
    while (true) {
      auto n = expectIdent();
      if (!n) return std::nullopt;
      if (!expect(Tok::Colon)) return std::nullopt;
      auto f = parseFormulaLevel();
      if (!f) return std::nullopt;
      if (ctx.lookup(*n)) {
        fail("duplicate context entry " + n->text);
        return std::nullopt;
      }
      ctx.entries.emplace_back(*n, *f);
      if (!at(Tok::Comma)) break;
      next();
    }
    return ctx;
  }
};

template <typename T, typename F>
inline std::variant<T, ParseError> runParser(std::string_view text, F parse) {
  Lexer lex{text, 0, {}, {}};
  lex.run();
  if (lex.error) return *lex.error;
  Parser p{std::move(lex.tokens), 0, {}};
  auto result = parse(p);
  if (!result) return p.error ? *p.error : ParseError{{0, text.size()}, "parse failed", {}};
  if (!p.at(Tok::End)) {
    return ParseError{p.peek().span,
                      std::string("trailing input starting at ") + tokenLabel(p.peek().kind),
                      {"end of input"}};
  }
  return *result;
}

}  // namespace frontdetail

using ParseExprResult = std::variant<Expr, ParseError>;
using ParseLmuResult = std::variant<LExpr, ParseError>;
using ParseFormulaResult = std::variant<Formula, ParseError>;
using ParseContextResult = std::variant<Context, ParseError>;

inline ParseExprResult parseExpr(std::string_view text) {
  return frontdetail::runParser<Expr>(text,
                                      [](frontdetail::Parser& p) { return p.parseAnyLevel(); });
}

inline ParseLmuResult parseLmu(std::string_view text) {
  return frontdetail::runParser<LExpr>(text, [](frontdetail::Parser& p) -> std::optional<LExpr> {
    if (p.at(frontdetail::Tok::LBracket)) {
      auto proc = p.parseLProc();
      if (!proc) return std::nullopt;
      return LExpr{*proc};
    }
    auto t = p.parseLTerm();
    if (!t) return std::nullopt;
    return LExpr{*t};
  });
}

inline ParseFormulaResult parseFormula(std::string_view text) {
  return frontdetail::runParser<Formula>(
      text, [](frontdetail::Parser& p) { return p.parseFormulaLevel(); });
}

inline ParseContextResult parseContext(std::string_view text) {
  return frontdetail::runParser<Context>(
      text, [](frontdetail::Parser& p) { return p.parseContextLevel(); });
}

// -------------------------------------------------------------------- printing

namespace frontdetail {

inline void printS(const StackExpr& s, std::string& out);
inline void printT(const TermExpr& t, std::string& out);
inline void printP(const ProcExpr& p, std::string& out);

// mu-terms need parentheses in head positions (of a process or a cons);
// everything else is unambiguous.
inline void printHeadTerm(const TermExpr& t, std::string& out) {
  if (asMu(t)) {
    out += '(';
    printT(t, out);
    out += ')';
  } else {
    printT(t, out);
  }
}

inline void printS(const StackExpr& s, std::string& out) {
  if (auto* v = asVar(s)) {
    out += v->name.text;
  } else if (isNil(s)) {
    out += "nil";
  } else if (auto* c = asCons(s)) {
    printHeadTerm(c->head, out);
    out += " :: ";
    printS(c->tail, out);
  } else {
    out += "cdr(";
    printS(asCdr(s)->arg, out);
    out += ')';
  }
}

inline void printT(const TermExpr& t, std::string& out) {
  if (auto* m = asMu(t)) {
    out += "mu ";
    out += m->binder.text;
    out += ". ";
    printP(m->body, out);
  } else {
    out += "car(";
    printS(asCar(t)->arg, out);
    out += ')';
  }
}

inline void printP(const ProcExpr& p, std::string& out) {
  printHeadTerm(p->head, out);
  out += " * ";
  printS(p->tail, out);
}

inline void printLT(const LTerm& t, std::string& out);

inline void printLP(const LProc& p, std::string& out) {
  out += '[';
  out += p->name.text;
  out += "] ";
  printLT(p->body, out);
}

inline void printLAtom(const LTerm& t, std::string& out) {
  if (asLVar(t)) {
    printLT(t, out);
  } else {
    out += '(';
    printLT(t, out);
    out += ')';
  }
}

inline void printLT(const LTerm& t, std::string& out) {
  if (auto* v = asLVar(t)) {
    out += v->x.text;
  } else if (auto* l = asLLam(t)) {
    out += '\\';
    out += l->x.text;
    out += ". ";
    printLT(l->body, out);
  } else if (auto* a = asLApp(t)) {
    // application is left-associative; abstractions in function position
    // need parentheses
    if (asLApp(a->fun) || asLVar(a->fun)) {
      printLT(a->fun, out);
    } else {
      out += '(';
      printLT(a->fun, out);
      out += ')';
    }
    out += ' ';
    printLAtom(a->arg, out);
  } else {
    auto* m = asLMu(t);
    out += "mu ";
    out += m->a.text;
    out += ". ";
    printLP(m->body, out);
  }
}

inline void printF(const Formula& f, std::string& out) {
  if (auto* a = asAtom(f)) {
    out += a->name.text;
  } else if (isFalsum(f)) {
    out += "false";
  } else {
    auto* ar = asArrow(f);
    if (asArrow(ar->lhs)) {
      out += '(';
      printF(ar->lhs, out);
      out += ')';
    } else {
      printF(ar->lhs, out);
    }
    out += " -> ";
    printF(ar->rhs, out);
  }
}

inline void printIF(const IntFormula& f, std::string& out) {
  if (auto* a = std::get_if<IAtom>(&f->v)) {
    out += a->name.text;
  } else if (std::holds_alternative<IFalsum>(f->v)) {
    out += "false";
  } else if (auto* n = std::get_if<INeg>(&f->v)) {
    out += '~';
    bool atomic = std::holds_alternative<IAtom>(n->arg->v) ||
                  std::holds_alternative<IFalsum>(n->arg->v) ||
                  std::holds_alternative<INeg>(n->arg->v);
    if (atomic) {
      printIF(n->arg, out);
    } else {
      out += '(';
      printIF(n->arg, out);
      out += ')';
    }
  } else {
    auto* c = std::get_if<IConj>(&f->v);
    if (std::holds_alternative<IConj>(c->lhs->v)) {
      out += '(';
      printIF(c->lhs, out);
      out += ')';
    } else {
      printIF(c->lhs, out);
    }
    out += " /\\ ";
    printIF(c->rhs, out);
  }
}

}  // namespace frontdetail

inline std::string printExpr(const StackExpr& s) {
  std::string out;
  frontdetail::printS(s, out);
  return out;
}
inline std::string printExpr(const TermExpr& t) {
  std::string out;
  frontdetail::printT(t, out);
  return out;
}
inline std::string printExpr(const ProcExpr& p) {
  std::string out;
  frontdetail::printP(p, out);
  return out;
}
inline std::string printExpr(const Expr& e) {
  return std::visit([](const auto& x) { return printExpr(x); }, e);
}

inline std::string printLmu(const LTerm& t) {
  std::string out;
  frontdetail::printLT(t, out);
  return out;
}
inline std::string printLmu(const LProc& p) {
  std::string out;
  frontdetail::printLP(p, out);
  return out;
}
inline std::string printLmu(const LExpr& e) {
  return std::visit([](const auto& x) { return printLmu(x); }, e);
}

inline std::string printFormula(const Formula& f) {
  std::string out;
  frontdetail::printF(f, out);
  return out;
}

inline std::string printIntFormula(const IntFormula& f) {
  std::string out;
  frontdetail::printIF(f, out);
  return out;
}

inline std::string printContext(const Context& ctx) {
  std::string out;
  bool first = true;
  for (const auto& [n, f] : ctx.entries) {
    if (!first) out += ", ";
    first = false;
    out += n.text;
    out += ':';
    out += printFormula(f);
  }
  return out;
}

}  // namespace stackcalc
