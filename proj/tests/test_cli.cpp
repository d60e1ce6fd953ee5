#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "stackcalc/frontend.hpp"
#include "stackcalc/typesys.hpp"

using namespace stackcalc;

namespace {

struct CliResult {
  int exitCode;
  std::string out;
};

std::string shellQuote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'')
      q += "'\\''";
    else
      q += c;
  }
  q += "'";
  return q;
}

CliResult runCli(const std::vector<std::string>& args) {
  std::string cmd = shellQuote(STACKC_BIN);
  for (const auto& a : args) cmd += " " + shellQuote(a);
  cmd += " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, out};
}

}  // namespace

TEST_CASE("cli: reduce prints the expected normal form") {
  auto r = runCli({"reduce", "(mu a. car(a)*cdr(a)) * (mu a. car(a)*cdr(a)) :: nil"});
  CHECK(r.exitCode == 0);
  CHECK(r.out == "car(nil) * cdr(nil)\n");
}

TEST_CASE("cli: reduce reports the step limit with exit 2") {
  auto r = runCli({"reduce", "(mu a. car(a)*a) * (mu a. car(a)*a) :: nil", "--max-steps", "50"});
  CHECK(r.exitCode == 2);
}

TEST_CASE("cli: parse errors exit 1") {
  auto r = runCli({"parse", "car nil"});
  CHECK(r.exitCode == 1);
}

TEST_CASE("cli: prove emits a JSON proof that re-checks") {
  auto r = runCli({"prove", "((a -> b) -> a) -> a"});
  CHECK(r.exitCode == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["result"] == "proof");
  auto term = parseExpr(j["term"].get<std::string>());
  REQUIRE(std::holds_alternative<Expr>(term));
  auto goal = parseFormula(j["goal"].get<std::string>());
  REQUIRE(std::holds_alternative<Formula>(goal));
  auto ctx = parseContext(j["context"].get<std::string>());
  REQUIRE(std::holds_alternative<Context>(ctx));
  CHECK(checkTerm(std::get<TermExpr>(std::get<Expr>(term)), std::get<Formula>(goal),
                  std::get<Context>(ctx)));
}

TEST_CASE("cli: prove emits a countermodel with exit 3") {
  auto r = runCli({"prove", "a -> b"});
  CHECK(r.exitCode == 3);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["result"] == "countermodel");
  CHECK(j["valuation"]["a"] == true);
  CHECK(j["valuation"]["b"] == false);
}

TEST_CASE("cli: check judges terms against formulas") {
  auto yes = runCli({"check", "mu a. car(a) * cdr(a)", "--type", "a -> a"});
  CHECK(yes.exitCode == 0);
  CHECK(yes.out == "yes\n");
  auto no = runCli({"check", "mu a. car(a) * cdr(a)", "--type", "a -> b"});
  CHECK(no.exitCode == 3);
}

TEST_CASE("cli: infer prints principal types") {
  auto r = runCli({"infer", "mu a. car(a) * cdr(a)"});
  CHECK(r.exitCode == 0);
  CHECK(r.out == "x -> x\n");
  auto bad = runCli({"infer", "mu a. car(a) * a"});
  CHECK(bad.exitCode == 3);
}

TEST_CASE("cli: translate with normalization reproduces the display") {
  auto r = runCli({"translate", "\\x. x", "--normalize"});
  CHECK(r.exitCode == 0);
  CHECK(r.out == "mu x. car(x) * cdr(x)\n");
}

TEST_CASE("cli: typed translation certifies call/cc at Peirce's law") {
  auto r = runCli({"translate", "\\f. mu a. [a] (f (\\x. mu d. [a] x))", "--typed", "--format",
                   "json"});
  CHECK(r.exitCode == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["checks"] == true);
  auto goal = parseFormula(j["goal"].get<std::string>());
  REQUIRE(std::holds_alternative<Formula>(goal));
  // Peirce shape: ((x -> y) -> x) -> x
  auto* outer = asArrow(std::get<Formula>(goal));
  REQUIRE(outer != nullptr);
  auto* inner = asArrow(outer->lhs);
  REQUIRE(inner != nullptr);
  CHECK(asArrow(inner->lhs) != nullptr);
  CHECK(formulaEq(inner->rhs, outer->rhs));
}

TEST_CASE("cli: run reports machine outcomes") {
  auto stuck = runCli({"run", "(mu a. car(a)*cdr(a)) * (mu a. car(a)*cdr(a)) :: nil"});
  CHECK(stuck.exitCode == 0);
  CHECK(stuck.out.find("nil probe") != std::string::npos);

  auto limit =
      runCli({"run", "(mu a. car(a)*a) * (mu a. car(a)*a) :: nil", "--max-steps", "20"});
  CHECK(limit.exitCode == 2);

  auto unbound = runCli({"run", "car(z) * nil", "--format", "json"});
  CHECK(unbound.exitCode == 0);
  auto j = nlohmann::json::parse(unbound.out);
  CHECK(j["reason"] == "unboundVariable");
  CHECK(j["name"] == "z");
}

TEST_CASE("cli: denote lists the call/cc witnesses") {
  auto r = runCli({"denote", "mu a. car(a) * (mu b. car(b) * cdr(a)) :: cdr(a)", "--depth", "3",
                   "--size", "2"});
  CHECK(r.exitCode == 0);
  CHECK(r.out.find("[*]::*\n") != std::string::npos);
}

TEST_CASE("cli: JSON trace entries parse back through the frontend") {
  auto r = runCli({"reduce", "(mu a. car(a)*cdr(a)) * nil", "--trace", "--format", "json"});
  CHECK(r.exitCode == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["trace"].is_array());
  for (const auto& step : j["trace"]) {
    CHECK(std::holds_alternative<Expr>(parseExpr(step["before"].get<std::string>())));
    CHECK(std::holds_alternative<Expr>(parseExpr(step["after"].get<std::string>())));
  }
}

TEST_CASE("cli: reading the expression from stdin") {
  std::string cmd = shellQuote(STACKC_BIN);
  cmd += " parse --file - <<< 'nil' 2>/dev/null";
  FILE* pipe = popen(("/bin/bash -c " + shellQuote(cmd)).c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[256];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(out == "stack: nil\n");
}
