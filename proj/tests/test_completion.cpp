#include <doctest.h>

#include <random>

#include "frameq/completion.hpp"
#include "oracles.hpp"

using namespace frameq;

namespace {

Theory th(const std::string& name, const std::string& clauses) {
  return parse_theory("theory " + name + ".\n" + clauses + "\nend.\n");
}

Theory paper_defaults() {
  return th("query_defaults",
            "identification(person). phone_type(standard). loc_type(city).");
}

Theory paper_rules() {
  return th("rules",
            "locality(City) :- caller_prefix(X), prefix(X, City).\n"
            "loc_type(Type) :- locality(City), gis(City, Type).");
}

FrameSchema schema() { return default_schema(); }

ContextFacts context_p21() {
  ContextFacts ctx;
  ctx.facts = parse_clauses("caller_prefix(p21).", "context");
  return ctx;
}

FrameHypothesis frame_with(
    const std::vector<std::pair<std::string, std::string>>& fills,
    double weight) {
  FrameHypothesis h;
  for (const auto& [slot, value] : fills)
    h.fills[slot] = {value, weight, Provenance::Parsed};
  h.overall_weight = fills.empty() ? 0.0 : weight;
  return h;
}

}  // namespace

TEST_CASE("frame_to_theory encodes slots and context as ground facts") {
  auto t = frame_to_theory(frame_with({{"locality", "lausanne"}}, 0.5), {});
  REQUIRE(t.clauses.size() == 1);
  CHECK(t.name == "query");
  CHECK(t.clauses[0].head ==
        Term::compound("locality", {Term::atom("lausanne")}));

  auto t2 = frame_to_theory(FrameHypothesis{}, context_p21());
  REQUIRE(t2.clauses.size() == 1);
  CHECK(t2.clauses[0].head ==
        Term::compound("caller_prefix", {Term::atom("p21")}));

  CHECK(frame_to_theory(FrameHypothesis{}, {}).clauses.empty());
}

TEST_CASE("completion with context fills all mandatory slots") {
  auto kb = th("kb", "prefix(p21, lausanne). gis(lausanne, city).");
  auto q = complete(FrameHypothesis{}, paper_rules(), paper_defaults(), kb,
                    context_p21(), schema());
  CHECK(q.verdict == Verdict::Accepted);
  CHECK(q.fills.at("locality").value == "lausanne");
  CHECK(q.fills.at("locality").provenance == Provenance::Inferred);
  CHECK(q.fills.at("loc_type").value == "city");
  CHECK(q.fills.at("identification").value == "person");
  CHECK(q.fills.at("identification").provenance == Provenance::Default);
  CHECK(q.fills.at("phone_type").value == "standard");
  CHECK(q.fills.at("phone_type").provenance == Provenance::Default);
  CHECK(q.fills.count("name") == 0);  // optional, never defaulted
}

TEST_CASE("completion without context leaves locality unfilled") {
  auto kb = th("kb", "");
  auto q = complete(FrameHypothesis{}, paper_rules(), paper_defaults(), kb, {},
                    schema());
  CHECK(q.verdict == Verdict::Incomplete);
  CHECK(q.missing_slots == std::vector<std::string>{"locality"});
  CHECK(q.fills.at("identification").value == "person");
  CHECK(q.fills.at("phone_type").value == "standard");
  CHECK(q.fills.at("loc_type").value == "city");
}

TEST_CASE("parsed slots are never overridden by defaults") {
  auto kb = th("kb", "prefix(p21, lausanne). gis(lausanne, city).");
  auto frame = frame_with({{"locality", "geneva"}}, 0.5);
  auto q = complete(frame, paper_rules(), paper_defaults(), kb, context_p21(),
                    schema());
  CHECK(q.fills.at("locality").value == "geneva");
  CHECK(q.fills.at("locality").provenance == Provenance::Parsed);
}

TEST_CASE("depth exhaustion leaves the slot unfilled, verdict incomplete") {
  auto rules = th("rules", "locality(X) :- locality(X).");
  auto q = complete(FrameHypothesis{}, rules, paper_defaults(), th("kb", ""),
                    {}, schema(), {4, 4});
  CHECK(q.verdict == Verdict::Incomplete);
  CHECK(q.missing_slots == std::vector<std::string>{"locality"});
}

TEST_CASE("coherence: mismatched prefix is rejected with the reason") {
  auto kb = th("kb", "prefix(p21, lausanne).");
  auto constraints = th("constraints",
                        "violation(prefix_mismatch) :- caller_prefix(P), "
                        "locality(L), prefix(P, L2), distinct(L, L2).");
  CompletedQuery q;
  q.verdict = Verdict::Accepted;
  q.fills["locality"] = {"geneva", 0.5, Provenance::Parsed};
  check_coherence(q, context_p21(), kb, constraints);
  CHECK(q.verdict == Verdict::Rejected);
  CHECK(q.rejection_reason == "prefix_mismatch");
  CHECK(verdict_to_string(q) == "rejected(prefix_mismatch)");

  // Oracle: bottom-up evaluation over the composed facts finds the same
  // violation.
  Theory qt = th("query", "locality(geneva). caller_prefix(p21).");
  auto composed = compose(
      t_union(t_union(t_leaf(qt), t_leaf(kb)), t_leaf(constraints)));
  auto goal = Term::compound("violation", {Term::var("R")});
  CHECK(oracle::fixpoint_answers(composed, goal) ==
        std::set<std::string>{"R=prefix_mismatch;"});
}

TEST_CASE("coherence: consistent facts and empty constraints accept") {
  auto kb = th("kb", "prefix(p21, lausanne).");
  auto constraints = th("constraints",
                        "violation(prefix_mismatch) :- caller_prefix(P), "
                        "locality(L), prefix(P, L2), distinct(L, L2).");
  CompletedQuery q;
  q.verdict = Verdict::Accepted;
  q.fills["locality"] = {"lausanne", 0.5, Provenance::Parsed};
  check_coherence(q, context_p21(), kb, constraints);
  CHECK(q.verdict == Verdict::Accepted);

  Theory qt = th("query", "locality(lausanne). caller_prefix(p21).");
  auto composed = compose(
      t_union(t_union(t_leaf(qt), t_leaf(kb)), t_leaf(constraints)));
  CHECK(oracle::fixpoint_answers(composed,
                                 Term::compound("violation", {Term::var("R")}))
            .empty());

  CompletedQuery q2;
  q2.verdict = Verdict::Accepted;
  q2.fills["locality"] = {"geneva", 0.5, Provenance::Parsed};
  Theory no_constraints;
  no_constraints.name = "constraints";
  check_coherence(q2, context_p21(), kb, no_constraints);
  CHECK(q2.verdict == Verdict::Accepted);
}

TEST_CASE("filter walks the ranking until an accepted completion") {
  auto kb = th("kb", "prefix(p21, lausanne). gis(lausanne, city). "
                     "gis(geneva, city).");
  auto constraints = th("constraints",
                        "violation(prefix_mismatch) :- caller_prefix(P), "
                        "locality(L), prefix(P, L2), distinct(L, L2).");
  // First hypothesis is incoherent (wrong locality), second is fine.
  std::vector<FrameHypothesis> ranked = {
      frame_with({{"locality", "geneva"}}, 0.9),
      frame_with({{"locality", "lausanne"}}, 0.6)};
  auto q = filter_hypotheses(ranked, paper_rules(), paper_defaults(), kb,
                             constraints, context_p21(), schema());
  CHECK(q.verdict == Verdict::Accepted);
  CHECK(q.fills.at("locality").value == "lausanne");
  CHECK(q.overall_weight == 0.6);
}

TEST_CASE("filter falls back to the top-ranked non-accepted completion") {
  auto kb = th("kb", "prefix(p21, lausanne). gis(lausanne, city). "
                     "gis(geneva, city). gis(nyon, city).");
  auto constraints = th("constraints",
                        "violation(prefix_mismatch) :- caller_prefix(P), "
                        "locality(L), prefix(P, L2), distinct(L, L2).");
  std::vector<FrameHypothesis> ranked = {
      frame_with({{"locality", "geneva"}}, 0.9),
      frame_with({{"locality", "nyon"}}, 0.4)};
  auto q = filter_hypotheses(ranked, paper_rules(), paper_defaults(), kb,
                             constraints, context_p21(), schema());
  CHECK(q.verdict == Verdict::Rejected);
  CHECK(q.fills.at("locality").value == "geneva");  // top-ranked fallback
}

TEST_CASE("empty hypothesis list completes the all-empty frame") {
  auto kb = th("kb", "prefix(p21, lausanne). gis(lausanne, city).");
  auto q = filter_hypotheses({}, paper_rules(), paper_defaults(), kb,
                             th("constraints", ""), context_p21(), schema());
  CHECK(q.verdict == Verdict::Accepted);
  CHECK(q.fills.at("locality").value == "lausanne");
}

TEST_CASE("default-tagged fills appear verbatim in the defaults theory") {
  auto kb = th("kb", "prefix(p21, lausanne). gis(lausanne, city).");
  auto defaults = paper_defaults();
  auto q = complete(FrameHypothesis{}, paper_rules(), defaults, kb,
                    context_p21(), schema());
  for (const auto& [slot, fill] : q.fills) {
    if (fill.provenance != Provenance::Default) continue;
    Term expected = Term::compound(slot, {Term::atom(fill.value)});
    bool found = false;
    for (const auto& c : defaults.clauses)
      if (c.is_fact() && c.head == expected) found = true;
    CHECK(found);
  }
}

TEST_CASE("override safety over random pre-filled frames") {
  auto kb = th("kb", "prefix(p21, lausanne). gis(lausanne, city). "
                     "gis(geneva, city).");
  std::mt19937 rng(31);
  static const char* values[] = {"lausanne", "geneva", "nyon", "zurich"};
  std::uniform_int_distribution<int> value_dist(0, 3);
  std::uniform_int_distribution<int> coin(0, 1);
  auto sch = schema();
  for (int trial = 0; trial < 100; ++trial) {
    FrameHypothesis frame;
    for (const auto& slot : sch.slots)
      if (coin(rng))
        frame.fills[slot.name] = {values[value_dist(rng)], 0.5,
                                  Provenance::Parsed};
    frame.overall_weight = frame.fills.empty() ? 0.0 : 0.5;
    auto q = complete(frame, paper_rules(), paper_defaults(), kb,
                      context_p21(), sch);
    for (const auto& [slot, fill] : frame.fills) {
      REQUIRE(q.fills.count(slot) == 1);
      CHECK(q.fills.at(slot).value == fill.value);
      CHECK(q.fills.at(slot).provenance == Provenance::Parsed);
    }
  }
}
