// stackc: batch command-line driver for the stack calculus toolkit.
//
// Subcommands: parse, reduce, infer, check, translate, prove, run, denote.
// Exit codes: 0 success, 1 parse/usage error, 2 step or search limit
// exceeded, 3 negative result (failed check, countermodel, type error).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "stackcalc/serialize.hpp"
#include "stackcalc/stackcalc.hpp"

namespace {

using namespace stackcalc;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitLimit = 2;
constexpr int kExitNegative = 3;

struct InputSource {
  std::string text;     // inline expression text
  std::string file;     // or a path; "-" reads stdin
};

std::string readInput(const InputSource& in) {
  if (!in.text.empty()) return in.text;
  if (!in.file.empty() && in.file != "-") {
    std::ifstream f(in.file);
    if (!f) throw CLI::ValidationError("cannot open input file " + in.file);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  std::stringstream ss;
  ss << std::cin.rdbuf();
  return ss.str();
}

void reportParseError(const std::string& input, const ParseError& err) {
  std::cerr << "parse error at " << err.span.startOffset << ".." << err.span.endOffset << ": "
            << err.message << "\n";
  if (err.span.startOffset <= input.size()) {
    std::cerr << "  " << input << "\n  ";
    for (std::size_t i = 0; i < err.span.startOffset; ++i) std::cerr << ' ';
    std::size_t width = err.span.endOffset > err.span.startOffset
                            ? err.span.endOffset - err.span.startOffset
                            : 1;
    for (std::size_t i = 0; i < width; ++i) std::cerr << '^';
    std::cerr << "\n";
  }
  if (!err.expected.empty()) {
    std::cerr << "  expected:";
    for (const auto& e : err.expected) std::cerr << ' ' << e;
    std::cerr << "\n";
  }
}

template <typename T>
std::optional<T> parseOrReport(const std::variant<T, ParseError>& r, const std::string& input) {
  if (auto* err = std::get_if<ParseError>(&r)) {
    reportParseError(input, *err);
    return std::nullopt;
  }
  return std::get<T>(r);
}

const char* sortName(const Expr& e) {
  if (std::holds_alternative<StackExpr>(e)) return "stack";
  if (std::holds_alternative<TermExpr>(e)) return "term";
  return "process";
}

struct Options {
  InputSource input;
  std::string format = "text";
  bool extensional = false;
  bool trace = false;
  std::size_t maxSteps = kDefaultMaxSteps;
  unsigned depth = 3;
  unsigned size = 2;
  std::string type;
  std::string ctx;
  std::string nctx;
  std::vector<std::string> hyps;
  bool typed = false;
  bool normalizeOut = false;
  bool top = false;
};

void addInputFlags(CLI::App* cmd, Options& o) {
  cmd->add_option("expr", o.input.text, "expression text (reads stdin when omitted)");
  cmd->add_option("--file", o.input.file, "read the input from a file ('-' for stdin)");
}

int cmdParse(const Options& o) {
  std::string input = readInput(o.input);
  auto e = parseOrReport(parseExpr(input), input);
  if (!e) return kExitParse;
  if (o.format == "json") {
    std::cout << Json{{"sort", sortName(*e)}, {"expr", printExpr(*e)}}.dump() << "\n";
  } else {
    std::cout << sortName(*e) << ": " << printExpr(*e) << "\n";
  }
  return kExitOk;
}

int cmdReduce(const Options& o) {
  std::string input = readInput(o.input);
  auto e = parseOrReport(parseExpr(input), input);
  if (!e) return kExitParse;
  NormalizeResult res = normalize(*e, o.extensional, o.maxSteps);
  if (o.format == "json") {
    Json out{{"limited", res.limited()}, {"steps", res.trace.size()}};
    out["normalForm"] = res.normalForm ? Json(printExpr(*res.normalForm)) : Json();
    if (o.trace) out["trace"] = traceToJson(res.trace);
    std::cout << out.dump() << "\n";
  } else {
    if (o.trace)
      for (const auto& s : res.trace)
        std::cout << ruleName(s.rule) << " -> " << printExpr(s.after) << "\n";
    if (res.normalForm) {
      std::cout << printExpr(*res.normalForm) << "\n";
    } else {
      std::cout << printExpr(res.last) << "\n";
      std::cerr << "step limit exceeded after " << res.trace.size() << " steps\n";
    }
  }
  return res.limited() ? kExitLimit : kExitOk;
}

std::optional<Context> parseCtxOpt(const std::string& text) {
  auto r = parseContext(text);
  if (auto* err = std::get_if<ParseError>(&r)) {
    reportParseError(text, *err);
    return std::nullopt;
  }
  return std::get<Context>(r);
}

int cmdInfer(const Options& o) {
  std::string input = readInput(o.input);
  auto e = parseOrReport(parseExpr(input), input);
  if (!e) return kExitParse;
  auto ctx = parseCtxOpt(o.ctx);
  if (!ctx) return kExitParse;

  auto emit = [&](const InferResult& r, const char* sort) -> int {
    if (auto* err = std::get_if<TypeError>(&r)) {
      if (o.format == "json") {
        std::cout << Json{{"result", "error"}, {"message", err->message}, {"path", err->path}}
                         .dump()
                  << "\n";
      } else {
        std::cerr << "type error: " << err->message << "\n";
      }
      return kExitNegative;
    }
    const Formula& f = std::get<Formula>(r);
    if (o.format == "json") {
      std::cout << Json{{"result", "type"}, {"sort", sort}, {"formula", printFormula(f)}}.dump()
                << "\n";
    } else {
      std::cout << printFormula(f) << "\n";
    }
    return kExitOk;
  };

  if (auto* t = std::get_if<TermExpr>(&*e)) return emit(inferTerm(*t, *ctx), "term");
  if (auto* s = std::get_if<StackExpr>(&*e)) return emit(inferStack(*s, *ctx), "stack");
  auto err = inferProcess(std::get<ProcExpr>(*e), *ctx);
  if (err) {
    std::cerr << "type error: " << err->message << "\n";
    return kExitNegative;
  }
  if (o.format == "json")
    std::cout << Json{{"result", "type"}, {"sort", "process"}}.dump() << "\n";
  else
    std::cout << "process is derivable\n";
  return kExitOk;
}

int cmdCheck(const Options& o) {
  std::string input = readInput(o.input);
  auto e = parseOrReport(parseExpr(input), input);
  if (!e) return kExitParse;
  auto ctx = parseCtxOpt(o.ctx);
  if (!ctx) return kExitParse;

  bool ok = false;
  std::string diag;
  if (auto* p = std::get_if<ProcExpr>(&*e)) {
    if (!o.type.empty()) {
      std::cerr << "process judgements take no formula\n";
      return kExitParse;
    }
    ok = checkProcess(*p, *ctx, &diag);
  } else {
    if (o.type.empty()) {
      std::cerr << "--type is required for term and stack judgements\n";
      return kExitParse;
    }
    auto f = parseOrReport(parseFormula(o.type), o.type);
    if (!f) return kExitParse;
    if (auto* t = std::get_if<TermExpr>(&*e))
      ok = checkTerm(*t, *f, *ctx, &diag);
    else
      ok = checkStack(std::get<StackExpr>(*e), *f, *ctx, &diag);
  }
  if (o.format == "json") {
    Json out{{"result", ok}};
    if (!ok && !diag.empty()) out["diagnostic"] = diag;
    std::cout << out.dump() << "\n";
  } else {
    std::cout << (ok ? "yes" : "no") << "\n";
    if (!ok && !diag.empty()) std::cerr << diag << "\n";
  }
  return ok ? kExitOk : kExitNegative;
}

int cmdTranslate(const Options& o) {
  std::string input = readInput(o.input);
  auto e = parseOrReport(parseLmu(input), input);
  if (!e) return kExitParse;

  Expr out = o.top ? Expr{translateTop(std::get<LTerm>(*e))} : translate(*e);
  if (o.normalizeOut) {
    NormalizeResult res = normalize(out, false, o.maxSteps);
    if (!res.normalForm) {
      std::cerr << "step limit exceeded while normalizing the translation\n";
      return kExitLimit;
    }
    out = *res.normalForm;
  }

  if (!o.typed) {
    if (o.format == "json")
      std::cout << Json{{"expr", printExpr(out)}, {"sort", sortName(out)}}.dump() << "\n";
    else
      std::cout << printExpr(out) << "\n";
    return kExitOk;
  }

  // --typed: certify the source term, then emit the translated judgement
  auto* term = std::get_if<LTerm>(&*e);
  if (!term) {
    std::cerr << "--typed expects a lambda-mu term, not a named term\n";
    return kExitParse;
  }
  auto gamma = parseCtxOpt(o.ctx);
  auto delta = parseCtxOpt(o.nctx);
  if (!gamma || !delta) return kExitParse;
  LmuInferResult ir = lmuInferTerm(*term, *gamma, *delta);
  if (auto* err = std::get_if<LmuTypeError>(&ir)) {
    std::cerr << "lambda-mu type error: " << err->message << "\n";
    return kExitNegative;
  }
  Formula goal = std::get<Formula>(ir);

  NameSet atomAvoid = {};
  for (const auto& [n, f] : gamma->entries) atomsOf(f, atomAvoid);
  for (const auto& [n, f] : delta->entries) atomsOf(f, atomAvoid);
  atomsOf(goal, atomAvoid);
  Context stackCtx = translateTypedContext(*gamma, atomAvoid);
  for (const auto& [n, f] : delta->entries) stackCtx.entries.emplace_back(n, f);

  TermExpr translated = std::get<TermExpr>(Expr{translate(*term)});
  bool checks = checkTerm(translated, goal, stackCtx);
  Json j{{"expr", printExpr(out)},
         {"goal", printFormula(goal)},
         {"context", printContext(stackCtx)},
         {"checks", checks}};
  if (o.format == "json") {
    std::cout << j.dump() << "\n";
  } else {
    std::cout << printExpr(out) << "\n";
    std::cout << "goal: " << printFormula(goal) << "\n";
    std::cout << "context: " << printContext(stackCtx) << "\n";
    std::cout << "checks: " << (checks ? "yes" : "no") << "\n";
  }
  return checks ? kExitOk : kExitNegative;
}

int cmdProve(const Options& o) {
  std::string input = readInput(o.input);
  auto goal = parseOrReport(parseFormula(input), input);
  if (!goal) return kExitParse;
  std::vector<Formula> hyps;
  for (const auto& h : o.hyps) {
    auto f = parseOrReport(parseFormula(h), h);
    if (!f) return kExitParse;
    hyps.push_back(*f);
  }
  ProofResult res = decide(*goal, hyps);
  if (o.format == "text") {
    if (auto* p = std::get_if<Proof>(&res)) {
      std::cout << printExpr(p->term) << "\n";
    } else {
      const auto& cm = std::get<Countermodel>(res);
      std::cout << "countermodel:";
      for (const auto& [n, v] : cm.valuation) std::cout << " " << n.text << "=" << (v ? "t" : "f");
      std::cout << "\n";
    }
  } else {
    std::cout << proofResultToJson(res).dump() << "\n";
  }
  return std::holds_alternative<Proof>(res) ? kExitOk : kExitNegative;
}

int cmdRun(const Options& o) {
  std::string input = readInput(o.input);
  auto e = parseOrReport(parseExpr(input), input);
  if (!e) return kExitParse;
  auto* p = std::get_if<ProcExpr>(&*e);
  if (!p) {
    std::cerr << "run expects a process\n";
    return kExitParse;
  }
  RunResult res = run(*p, o.maxSteps);
  if (o.format == "json") {
    Json out = machineOutcomeToJson(res.outcome);
    out["steps"] = res.steps;
    if (o.trace) out["trace"] = machineTraceToJson(res.trace);
    std::cout << out.dump() << "\n";
  } else {
    if (o.trace)
      for (const auto& s : res.trace)
        std::cout << "<" << printExpr(s.focus.term) << " | " << printExpr(s.context.stack)
                  << ">\n";
    if (std::holds_alternative<StepLimit>(res.outcome)) {
      std::cout << "step limit after " << res.steps << " transitions\n";
    } else {
      const auto& stuck = std::get<Stuck>(res.outcome);
      if (auto* np = std::get_if<NilProbe>(&stuck.reason))
        std::cout << "stuck: nil probe at depth " << np->depth << " after " << res.steps
                  << " transitions\n";
      else
        std::cout << "stuck: unbound variable "
                  << std::get<UnboundVariable>(stuck.reason).name.text << " after " << res.steps
                  << " transitions\n";
    }
  }
  return std::holds_alternative<StepLimit>(res.outcome) ? kExitLimit : kExitOk;
}

int cmdDenote(const Options& o) {
  std::string input = readInput(o.input);
  auto e = parseOrReport(parseExpr(input), input);
  if (!e) return kExitParse;
  auto* t = std::get_if<TermExpr>(&*e);
  if (!t) {
    std::cerr << "denote expects a term\n";
    return kExitParse;
  }
  if (!freeVars(*t).empty()) {
    std::cerr << "denote expects a closed term\n";
    return kExitParse;
  }
  Universe u = enumerate(o.depth, o.size);
  auto den = closedDen(*t, u);
  if (o.format == "json") {
    std::cout << Json{{"universe", u.size()}, {"denotation", denotationToJson(den)}}.dump()
              << "\n";
  } else {
    for (const auto& d : den) std::cout << dElemToString(d) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stack calculus toolkit"};
  app.require_subcommand(1);

  Options parseOpt, reduceOpt, inferOpt, checkOpt, translateOpt, proveOpt, runOpt, denoteOpt;
  proveOpt.format = "json";

  auto* cParse = app.add_subcommand("parse", "parse an expression and echo it");
  addInputFlags(cParse, parseOpt);
  cParse->add_option("--format", parseOpt.format, "text|json");

  auto* cReduce = app.add_subcommand("reduce", "normalize an expression");
  addInputFlags(cReduce, reduceOpt);
  cReduce->add_flag("--extensional", reduceOpt.extensional, "enable eta0/eta1");
  cReduce->add_option("--max-steps", reduceOpt.maxSteps, "step budget");
  cReduce->add_flag("--trace", reduceOpt.trace, "print each reduction step");
  cReduce->add_option("--format", reduceOpt.format, "text|json");

  auto* cInfer = app.add_subcommand("infer", "infer the principal formula");
  addInputFlags(cInfer, inferOpt);
  cInfer->add_option("--ctx", inferOpt.ctx, "context, e.g. \"a:p, b:p -> q\"");
  cInfer->add_option("--format", inferOpt.format, "text|json");

  auto* cCheck = app.add_subcommand("check", "check a typing judgement");
  addInputFlags(cCheck, checkOpt);
  cCheck->add_option("--type", checkOpt.type, "formula to check against");
  cCheck->add_option("--ctx", checkOpt.ctx, "context");
  cCheck->add_option("--format", checkOpt.format, "text|json");

  auto* cTranslate = app.add_subcommand("translate", "translate lambda-mu into the stack calculus");
  addInputFlags(cTranslate, translateOpt);
  cTranslate->add_flag("--typed", translateOpt.typed, "emit the typed judgement as well");
  cTranslate->add_option("--ctx", translateOpt.ctx, "lambda-variable context for --typed");
  cTranslate->add_option("--nctx", translateOpt.nctx, "name context for --typed");
  cTranslate->add_flag("--normalize", translateOpt.normalizeOut,
                       "normalize the translation before printing");
  cTranslate->add_flag("--top", translateOpt.top, "treat the input as [top]t");
  cTranslate->add_option("--max-steps", translateOpt.maxSteps, "step budget for --normalize");
  cTranslate->add_option("--format", translateOpt.format, "text|json");

  auto* cProve = app.add_subcommand("prove", "decide a formula: proof term or countermodel");
  addInputFlags(cProve, proveOpt);
  cProve->add_option("--hyp", proveOpt.hyps, "hypothesis formula (repeatable)");
  cProve->add_option("--format", proveOpt.format, "text|json");

  auto* cRun = app.add_subcommand("run", "execute a process on the Krivine machine");
  addInputFlags(cRun, runOpt);
  cRun->add_option("--max-steps", runOpt.maxSteps, "transition budget");
  cRun->add_flag("--trace", runOpt.trace, "print every machine state");
  cRun->add_option("--format", runOpt.format, "text|json");

  auto* cDenote = app.add_subcommand("denote", "closed denotation in the relational model");
  addInputFlags(cDenote, denoteOpt);
  cDenote->add_option("--depth", denoteOpt.depth, "universe depth bound");
  cDenote->add_option("--size", denoteOpt.size, "universe size bound");
  cDenote->add_option("--format", denoteOpt.format, "text|json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cParse->parsed()) return cmdParse(parseOpt);
    if (cReduce->parsed()) return cmdReduce(reduceOpt);
    if (cInfer->parsed()) return cmdInfer(inferOpt);
    if (cCheck->parsed()) return cmdCheck(checkOpt);
    if (cTranslate->parsed()) return cmdTranslate(translateOpt);
    if (cProve->parsed()) return cmdProve(proveOpt);
    if (cRun->parsed()) return cmdRun(runOpt);
    if (cDenote->parsed()) return cmdDenote(denoteOpt);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitParse;
  }
  return kExitParse;
}
