// Frame assembly: combine chunk captures into ranked slot-filling
// hypotheses against a frame schema.
#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "frameq/chunk_parser.hpp"

namespace frameq {

enum class ValueKind { Symbol, Text };

struct SlotDef {
  std::string name;
  bool mandatory = false;
  ValueKind kind = ValueKind::Text;
};

struct FrameSchema {
  std::vector<SlotDef> slots;  // ordered; names unique; >=1 mandatory

  const SlotDef* find(const std::string& name) const {
    for (const auto& s : slots)
      if (s.name == name) return &s;
    return nullptr;
  }
};

enum class Provenance { Parsed, Inferred, Default };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Parsed: return "parsed";
    case Provenance::Inferred: return "inferred";
    default: return "default";
  }
}

struct SlotFill {
  std::string value;
  double weight = 0.0;
  Provenance provenance = Provenance::Parsed;
};

struct FrameHypothesis {
  std::map<std::string, SlotFill> fills;  // slot name -> fill
  double overall_weight = 0.0;            // min over filled slots, 0 if none
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Schema file: one line per slot, `slot <name> <mandatory|optional>
// <symbol|text>`; blank lines and '#' comments ignored.
inline FrameSchema load_schema(const std::string& text) {
  FrameSchema schema;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw, name, mand, kind;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (kw != "slot" || !(ls >> name >> mand >> kind))
      throw SchemaError("line " + std::to_string(lineno) +
                        ": expected 'slot <name> <mandatory|optional> "
                        "<symbol|text>'");
    if (schema.find(name))
      throw SchemaError("duplicate slot '" + name + "'");
    SlotDef def;
    def.name = name;
    if (mand == "mandatory")
      def.mandatory = true;
    else if (mand == "optional")
      def.mandatory = false;
    else
      throw SchemaError("line " + std::to_string(lineno) +
                        ": bad mandatory flag '" + mand + "'");
    if (kind == "symbol")
      def.kind = ValueKind::Symbol;
    else if (kind == "text")
      def.kind = ValueKind::Text;
    else
      throw SchemaError("line " + std::to_string(lineno) +
                        ": bad value kind '" + kind + "'");
    schema.slots.push_back(std::move(def));
  }
  bool any_mandatory = false;
  for (const auto& s : schema.slots) any_mandatory |= s.mandatory;
  if (!any_mandatory)
    throw SchemaError("schema must declare at least one mandatory slot");
  return schema;
}

// The phone-directory schema used when no schema file is given.
inline FrameSchema default_schema() {
  FrameSchema s;
  s.slots = {{"identification", true, ValueKind::Symbol},
             {"name", false, ValueKind::Text},
             {"locality", true, ValueKind::Text},
             {"loc_type", true, ValueKind::Symbol},
             {"phone_type", true, ValueKind::Symbol}};
  return s;
}

namespace detail {

// Deterministic ranking key: overall weight desc, filled-slot count desc,
// slot values lex asc (schema order), then per-slot weights.
inline bool hypothesis_order(const FrameSchema& schema,
                             const FrameHypothesis& a,
                             const FrameHypothesis& b) {
  if (a.overall_weight != b.overall_weight)
    return a.overall_weight > b.overall_weight;
  if (a.fills.size() != b.fills.size()) return a.fills.size() > b.fills.size();
  for (const auto& slot : schema.slots) {
    auto ia = a.fills.find(slot.name), ib = b.fills.find(slot.name);
    bool ha = ia != a.fills.end(), hb = ib != b.fills.end();
    if (ha != hb) return ha;  // filled slot sorts before absent
    if (ha) {
      if (ia->second.value != ib->second.value)
        return ia->second.value < ib->second.value;
      if (ia->second.weight != ib->second.weight)
        return ia->second.weight > ib->second.weight;
    }
  }
  return false;
}

}  // namespace detail

// One hypothesis per combination of at most one chunk capture per schema
// slot (absence allowed); each fill carries its chunk's weight; overall
// weight is the min over fills. The per-slot candidate pool is capped at the
// top 5 chunks before combination. Captures naming unknown slots are
// reported through `warnings` when given.
inline std::vector<FrameHypothesis> assemble_hypotheses(
    const ChunkSet& chunks, const FrameSchema& schema,
    std::vector<std::string>* warnings = nullptr) {
  constexpr std::size_t kSlotCandidateCap = 5;
  // Gather per-slot candidates in deterministic chunk order.
  std::map<std::string, std::vector<SlotFill>> candidates;
  for (const auto& chunk : chunks.chunks) {
    for (const auto& [slot, cap] : chunk.captures) {
      if (!schema.find(slot)) {
        if (warnings)
          warnings->push_back("capture for unknown slot '" + slot +
                              "' ignored");
        continue;
      }
      candidates[slot].push_back({cap.text, chunk.weight, Provenance::Parsed});
    }
  }
  for (auto& [slot, cands] : candidates) {
    std::stable_sort(cands.begin(), cands.end(),
                     [](const SlotFill& a, const SlotFill& b) {
                       if (a.weight != b.weight) return a.weight > b.weight;
                       return a.value < b.value;
                     });
    cands.erase(std::unique(cands.begin(), cands.end(),
                            [](const SlotFill& a, const SlotFill& b) {
                              return a.value == b.value &&
                                     a.weight == b.weight;
                            }),
                cands.end());
    if (cands.size() > kSlotCandidateCap) cands.resize(kSlotCandidateCap);
  }
  // Cartesian product over (absent + candidates) per slot, in schema order.
  std::vector<FrameHypothesis> result;
  result.push_back({});  // all-empty hypothesis, weight 0.0
  for (const auto& slot : schema.slots) {
    auto it = candidates.find(slot.name);
    if (it == candidates.end()) continue;
    std::size_t existing = result.size();
    for (std::size_t i = 0; i < existing; ++i)
      for (const auto& cand : it->second) {
        FrameHypothesis h = result[i];
        h.fills[slot.name] = cand;
        result.push_back(std::move(h));
      }
  }
  for (auto& h : result) {
    if (h.fills.empty()) {
      h.overall_weight = 0.0;
    } else {
      h.overall_weight = 1.0;
      for (const auto& [_, fill] : h.fills)
        h.overall_weight = std::min(h.overall_weight, fill.weight);
    }
  }
  std::sort(result.begin(), result.end(),
            [&schema](const FrameHypothesis& a, const FrameHypothesis& b) {
              return detail::hypothesis_order(schema, a, b);
            });
  return result;
}

inline std::vector<FrameHypothesis> k_best_frames(
    const std::vector<FrameHypothesis>& ranked, std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<FrameHypothesis> out(ranked.begin(),
                                   ranked.begin() + std::min(k, ranked.size()));
  return out;
}

}  // namespace frameq
