// Coherence filtering and default completion: turn a frame hypothesis into
// a final database query by inference over composed theories.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frameq/frame.hpp"
#include "frameq/logic.hpp"

namespace frameq {

struct ContextFacts {
  std::vector<Clause> facts;  // ground facts, e.g. caller_prefix(p21)
  std::string source;         // call metadata, informational
};

enum class Verdict { Accepted, Rejected, Incomplete };

struct CompletedQuery {
  std::map<std::string, SlotFill> fills;
  double overall_weight = 0.0;  // inherited from the source hypothesis
  Verdict verdict = Verdict::Incomplete;
  std::string rejection_reason;            // Rejected only
  std::vector<std::string> missing_slots;  // Incomplete only
};

inline std::string verdict_to_string(const CompletedQuery& q) {
  switch (q.verdict) {
    case Verdict::Accepted: return "accepted";
    case Verdict::Rejected: return "rejected(" + q.rejection_reason + ")";
    case Verdict::Incomplete: {
      std::string s = "incomplete(";
      for (std::size_t i = 0; i < q.missing_slots.size(); ++i)
        s += (i ? "," : "") + q.missing_slots[i];
      return s + ")";
    }
  }
  return "";
}

// Encodes a frame as the `query` theory: one ground fact per filled slot
// (slot name as unary predicate) plus all context facts.
inline Theory frame_to_theory(const FrameHypothesis& frame,
                              const ContextFacts& context) {
  Theory t;
  t.name = "query";
  for (const auto& [slot, fill] : frame.fills) {
    Clause c;
    c.head = Term::compound(slot, {Term::atom(fill.value)});
    c.origin = "query";
    t.clauses.push_back(std::move(c));
  }
  for (Clause c : context.facts) {
    c.origin = "query";
    t.clauses.push_back(std::move(c));
  }
  return t;
}

// Fills each unfilled mandatory slot s from the first answer of
// demo((query isa defaults) u rules u kb, s(X)). Provenance is "default"
// when the answering clause is a fact from the defaults theory, "inferred"
// otherwise. Parsed slots are never touched: the query theory's fact for a
// filled slot shadows defaults via isa and precedes rules in clause order.
inline CompletedQuery complete(const FrameHypothesis& frame,
                               const Theory& rules, const Theory& defaults,
                               const Theory& kb, const ContextFacts& context,
                               const FrameSchema& schema,
                               DemoLimits limits = {}) {
  CompletedQuery out;
  out.fills = frame.fills;
  out.overall_weight = frame.overall_weight;
  Theory query = frame_to_theory(frame, context);
  TheoryExpr expr = t_union(
      t_union(t_isa(t_leaf(query), t_leaf(defaults)), t_leaf(rules)),
      t_leaf(kb));
  for (const auto& slot : schema.slots) {
    if (!slot.mandatory || out.fills.count(slot.name)) continue;
    Term goal = Term::compound(slot.name, {Term::var("X")});
    DemoResult res = demo(expr, goal, limits);
    bool filled = false;
    for (const auto& ans : res.answers) {
      const Term& value = ans.bindings.at("X");
      if (!is_ground(value)) continue;
      SlotFill fill;
      fill.value = term_to_string(value);
      fill.weight = frame.overall_weight;
      fill.provenance = (ans.root_is_fact && ans.root_origin == defaults.name)
                            ? Provenance::Default
                            : Provenance::Inferred;
      out.fills[slot.name] = std::move(fill);
      filled = true;
      break;  // first answer wins
    }
    if (!filled) out.missing_slots.push_back(slot.name);
  }
  out.verdict =
      out.missing_slots.empty() ? Verdict::Accepted : Verdict::Incomplete;
  return out;
}

// Evaluates demo(query_theory u kb u constraints, violation(R)); any answer
// rejects the query with R as the reason.
inline void check_coherence(CompletedQuery& query, const ContextFacts& context,
                            const Theory& kb, const Theory& constraints,
                            DemoLimits limits = {}) {
  if (query.verdict != Verdict::Accepted) return;
  Theory qt;
  qt.name = "query";
  for (const auto& [slot, fill] : query.fills) {
    Clause c;
    c.head = Term::compound(slot, {Term::atom(fill.value)});
    c.origin = "query";
    qt.clauses.push_back(std::move(c));
  }
  for (Clause c : context.facts) {
    c.origin = "query";
    qt.clauses.push_back(std::move(c));
  }
  TheoryExpr expr =
      t_union(t_union(t_leaf(qt), t_leaf(kb)), t_leaf(constraints));
  DemoResult res = demo(expr, Term::compound("violation", {Term::var("R")}),
                        limits);
  if (!res.answers.empty()) {
    query.verdict = Verdict::Rejected;
    query.rejection_reason = term_to_string(res.answers[0].bindings.at("R"));
  }
}

// Walks the ranked hypothesis list and returns the first completion that is
// accepted and coherent; otherwise the best-ranked hypothesis's completion
// with its non-accepted verdict. Never asks for clarification.
inline CompletedQuery filter_hypotheses(
    const std::vector<FrameHypothesis>& ranked, const Theory& rules,
    const Theory& defaults, const Theory& kb, const Theory& constraints,
    const ContextFacts& context, const FrameSchema& schema,
    DemoLimits limits = {}) {
  std::optional<CompletedQuery> fallback;
  for (const auto& hyp : ranked) {
    CompletedQuery q = complete(hyp, rules, defaults, kb, context, schema,
                                limits);
    check_coherence(q, context, kb, constraints, limits);
    if (q.verdict == Verdict::Accepted) return q;
    if (!fallback) fallback = std::move(q);
  }
  if (fallback) return *fallback;
  CompletedQuery q = complete(FrameHypothesis{}, rules, defaults, kb, context,
                              schema, limits);
  check_coherence(q, context, kb, constraints, limits);
  return q;
}

}  // namespace frameq
