#include <doctest.h>

#include "frameq/frame.hpp"
#include "oracles.hpp"

using namespace frameq;

namespace {

// Builds a ChunkSet with one single-capture chunk per (slot, value, weight).
ChunkSet chunkset(
    const std::vector<std::tuple<std::string, std::string, double>>& caps) {
  ChunkSet set;
  int pos = 0;
  for (const auto& [slot, value, weight] : caps) {
    Chunk c;
    c.category = "c";
    c.start = pos;
    c.end = pos + 1;
    c.weight = weight;
    c.captures[slot] = {pos, pos + 1, value};
    set.chunks.push_back(std::move(c));
    ++pos;
  }
  set.token_count = pos;
  return set;
}

}  // namespace

TEST_CASE("schema loads and validates") {
  auto s = load_schema(
      "slot identification mandatory symbol\n"
      "slot name optional text\n");
  REQUIRE(s.slots.size() == 2);
  CHECK(s.slots[0].mandatory);
  CHECK(s.slots[1].kind == ValueKind::Text);
  CHECK_THROWS_AS(load_schema("slot a optional text\n"), SchemaError);
  CHECK_THROWS_AS(
      load_schema("slot a mandatory text\nslot a mandatory text\n"),
      SchemaError);
  CHECK_THROWS_AS(load_schema("slot a perhaps text\n"), SchemaError);
}

TEST_CASE("single capture yields filled and all-empty hypotheses") {
  auto schema = default_schema();
  auto hyps = assemble_hypotheses(chunkset({{"name", "dupont", 0.5}}), schema);
  REQUIRE(hyps.size() == 2);
  CHECK(hyps[0].overall_weight == 0.5);
  CHECK(hyps[0].fills.at("name").value == "dupont");
  CHECK(hyps[1].fills.empty());
  CHECK(hyps[1].overall_weight == 0.0);
}

TEST_CASE("frame weight is the min over fills") {
  auto schema = default_schema();
  auto hyps = assemble_hypotheses(
      chunkset({{"name", "dupont", 0.9}, {"locality", "nyon", 0.6}}), schema);
  // Weight ranks first: the name-only hypothesis (0.9) precedes the fuller
  // frame, whose weight is the min of its fills.
  CHECK(hyps[0].overall_weight == 0.9);
  CHECK(hyps[0].fills.size() == 1);
  const FrameHypothesis* both = nullptr;
  for (const auto& h : hyps)
    if (h.fills.size() == 2) both = &h;
  REQUIRE(both != nullptr);
  CHECK(both->overall_weight == 0.6);
}

TEST_CASE("competing captures are ordered by weight") {
  auto schema = default_schema();
  auto hyps = assemble_hypotheses(
      chunkset({{"name", "dupont", 0.8}, {"name", "dupond", 0.3}}), schema);
  REQUIRE(hyps.size() == 3);
  CHECK(hyps[0].fills.at("name").value == "dupont");
  CHECK(hyps[0].overall_weight == 0.8);
  CHECK(hyps[1].fills.at("name").value == "dupond");
  CHECK(hyps[1].overall_weight == 0.3);
}

TEST_CASE("unknown capture slots are ignored with a warning") {
  auto schema = default_schema();
  std::vector<std::string> warnings;
  auto hyps = assemble_hypotheses(chunkset({{"bogus", "x", 0.5}}), schema,
                                  &warnings);
  REQUIRE(hyps.size() == 1);
  CHECK(hyps[0].fills.empty());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("bogus") != std::string::npos);
}

TEST_CASE("k_best_frames truncates and preserves order") {
  auto schema = default_schema();
  auto hyps = assemble_hypotheses(
      chunkset({{"name", "a", 0.7}, {"name", "b", 0.7}, {"name", "c", 0.2}}),
      schema);
  auto top1 = k_best_frames(hyps, 1);
  REQUIRE(top1.size() == 1);
  CHECK(top1[0] .overall_weight == hyps[0].overall_weight);
  auto all = k_best_frames(hyps, 100);
  CHECK(all.size() == hyps.size());
  // Two 0.7 entries first, deterministic order (values lex asc).
  auto top2 = k_best_frames(hyps, 2);
  REQUIRE(top2.size() == 2);
  CHECK(top2[0].fills.at("name").value == "a");
  CHECK(top2[1].fills.at("name").value == "b");
}

TEST_CASE("more filled slots rank first at equal weight") {
  auto schema = default_schema();
  auto hyps = assemble_hypotheses(
      chunkset({{"name", "dupont", 0.5}, {"locality", "nyon", 0.5}}), schema);
  CHECK(hyps[0].fills.size() == 2);
  CHECK(hyps[0].overall_weight == 0.5);
}

TEST_CASE("per-slot candidate pool is capped at 5") {
  auto schema = default_schema();
  std::vector<std::tuple<std::string, std::string, double>> caps;
  for (int i = 0; i < 8; ++i)
    caps.emplace_back("name", "v" + std::to_string(i), (8.0 - i) / 16.0);
  auto hyps = assemble_hypotheses(chunkset(caps), schema);
  CHECK(hyps.size() == 6);  // 5 candidates + absent
  // The three weakest candidates are dropped.
  for (const auto& h : hyps)
    if (!h.fills.empty()) CHECK(h.fills.at("name").weight >= 4.0 / 16.0);
}

TEST_CASE("assembly matches brute-force enumeration and ranking") {
  auto schema = default_schema();
  auto set = chunkset({{"name", "dupont", 0.75},
                       {"name", "dupond", 0.5},
                       {"locality", "nyon", 0.5},
                       {"locality", "morges", 0.25},
                       {"phone_type", "fax", 0.875}});
  auto actual = assemble_hypotheses(set, schema);
  auto expected = oracle::expected_hypotheses(set, schema);
  REQUIRE(actual.size() == expected.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    CHECK(actual[i].overall_weight == expected[i].overall_weight);
    REQUIRE(actual[i].fills.size() == expected[i].fills.size());
    for (const auto& [slot, fill] : expected[i].fills) {
      REQUIRE(actual[i].fills.count(slot) == 1);
      CHECK(actual[i].fills.at(slot).value == fill.value);
      CHECK(actual[i].fills.at(slot).weight == fill.weight);
    }
  }
}

TEST_CASE("ranking is a total order on distinct hypotheses") {
  auto schema = default_schema();
  auto hyps = assemble_hypotheses(
      chunkset({{"name", "a", 0.5}, {"locality", "b", 0.5}}), schema);
  for (std::size_t i = 0; i < hyps.size(); ++i)
    for (std::size_t j = i + 1; j < hyps.size(); ++j) {
      bool ij = detail::hypothesis_order(schema, hyps[i], hyps[j]);
      bool ji = detail::hypothesis_order(schema, hyps[j], hyps[i]);
      CHECK(ij != ji);  // strict order, no incomparable pairs
    }
}

TEST_CASE("all-empty hypothesis is always present with weight 0") {
  auto schema = default_schema();
  auto hyps = assemble_hypotheses(ChunkSet{}, schema);
  REQUIRE(hyps.size() == 1);
  CHECK(hyps[0].fills.empty());
  CHECK(hyps[0].overall_weight == 0.0);
}
