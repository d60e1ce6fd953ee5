#pragma once

// JSON renderings of traces, proof results and denotation sets, as emitted by
// the command-line tool.

#include <json.hpp>

#include "stackcalc/denote.hpp"
#include "stackcalc/frontend.hpp"
#include "stackcalc/machine.hpp"
#include "stackcalc/prover.hpp"
#include "stackcalc/reduction.hpp"

namespace stackcalc {

using Json = nlohmann::json;

inline Json stepToJson(const ReductionStep& s) {
  return Json{{"rule", ruleName(s.rule)},
              {"position", s.position},
              {"before", printExpr(s.before)},
              {"after", printExpr(s.after)}};
}

inline Json traceToJson(const std::vector<ReductionStep>& trace) {
  Json arr = Json::array();
  for (const auto& s : trace) arr.push_back(stepToJson(s));
  return arr;
}

inline Json valuationToJson(const Valuation& v) {
  Json obj = Json::object();
  for (const auto& [name, value] : v) obj[name.text] = value;
  return obj;
}

inline Json proofResultToJson(const ProofResult& r) {
  if (auto* p = std::get_if<Proof>(&r)) {
    return Json{{"result", "proof"},
                {"term", printExpr(p->term)},
                {"goal", printFormula(p->goal)},
                {"context", printContext(p->hyps)}};
  }
  const auto& cm = std::get<Countermodel>(r);
  return Json{{"result", "countermodel"}, {"valuation", valuationToJson(cm.valuation)}};
}

inline Json envToJson(const Env& e) {
  Json arr = Json::array();
  for (const auto& [name, closure] : envBindings(e))
    arr.push_back(Json{{"var", name.text}, {"stack", printExpr(closure.stack)}});
  return arr;
}

inline Json machineStateToJson(const MachineState& s) {
  return Json{{"focusTerm", printExpr(s.focus.term)},
              {"contextStack", printExpr(s.context.stack)},
              {"envSummary", envToJson(s.focus.env)}};
}

inline Json machineTraceToJson(const std::vector<MachineState>& trace) {
  Json arr = Json::array();
  for (const auto& s : trace) arr.push_back(machineStateToJson(s));
  return arr;
}

inline Json machineOutcomeToJson(const MachineOutcome& o) {
  if (std::holds_alternative<StepLimit>(o)) return Json{{"outcome", "stepLimit"}};
  const auto& stuck = std::get<Stuck>(o);
  if (auto* np = std::get_if<NilProbe>(&stuck.reason))
    return Json{{"outcome", "stuck"}, {"reason", "nilProbe"}, {"depth", np->depth}};
  return Json{{"outcome", "stuck"},
              {"reason", "unboundVariable"},
              {"name", std::get<UnboundVariable>(stuck.reason).name.text}};
}

inline Json dElemToJson(const DElem& e) {
  Json levels = Json::array();
  for (const auto& level : e.levels) {
    Json m = Json::array();
    for (const auto& member : level) m.push_back(dElemToJson(member));
    levels.push_back(std::move(m));
  }
  return levels;
}

inline Json denotationToJson(const std::set<DElem, DLess>& den) {
  Json arr = Json::array();
  for (const auto& e : den) arr.push_back(dElemToString(e));
  return arr;
}

}  // namespace stackcalc
