// Island parser: matches grammar rules on contiguous islands of the token
// sequence, skipping up to max_gap tokens between constituents, and combines
// constituent weights with min.
#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "frameq/grammar.hpp"
#include "frameq/lattice.hpp"

namespace frameq {

struct Capture {
  int start = 0;  // token span, end exclusive
  int end = 0;
  std::string text;
};

inline bool operator==(const Capture& a, const Capture& b) {
  return a.start == b.start && a.end == b.end && a.text == b.text;
}
inline bool operator<(const Capture& a, const Capture& b) {
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return a.text < b.text;
}

struct Chunk {
  std::string category;
  int start = 0;
  int end = 0;  // exclusive
  double weight = 0.0;
  // Direct constituents: sub-chunks for category items, pre-terminal matches
  // otherwise. Empty fallbacks appear as zero-width children.
  std::vector<Chunk> children;
  std::map<std::string, Capture> captures;
};

inline bool operator==(const Chunk& a, const Chunk& b) {
  return a.category == b.category && a.start == b.start && a.end == b.end &&
         a.weight == b.weight && a.captures == b.captures;
}

struct ChunkSet {
  std::vector<Chunk> chunks;  // ordered by (category, weight desc, span)
  int token_count = 0;
};

namespace detail {

inline std::string span_text(const std::vector<Token>& tokens, int start,
                             int end) {
  std::string s;
  for (int i = start; i < end; ++i) {
    if (i > start) s += ' ';
    s += tokens[i].surface;
  }
  return s;
}

struct IslandMatcher {
  const Grammar& grammar;
  const std::vector<Token>& tokens;
  int max_gap;
  // Memoized sub-derivations per (category, anchor).
  std::map<std::pair<std::string, int>, std::vector<Chunk>> memo;

  std::vector<Chunk> derive_category(const std::string& cat, int anchor) {
    auto key = std::make_pair(cat, anchor);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<Chunk> out;
    auto rit = grammar.rules.find(cat);
    if (rit != grammar.rules.end())
      for (const auto& rule : rit->second) match_rule(rule, anchor, out);
    memo[key] = out;
    return out;
  }

  void match_rule(const GrammarRule& rule, int anchor,
                  std::vector<Chunk>& out) {
    Chunk seed;
    seed.category = rule.category;
    seed.start = anchor;
    match_items(rule, 0, anchor, false, seed, out);
  }

  // pos is the next unconsumed token index; consumed_any gates gap skipping
  // so a chunk's span starts at its first consuming constituent.
  void match_items(const GrammarRule& rule, std::size_t idx, int pos,
                   bool consumed_any, const Chunk& partial,
                   std::vector<Chunk>& out) {
    if (idx == rule.body.size()) {
      if (partial.children.empty()) return;
      Chunk done = partial;
      finish(done);
      out.push_back(std::move(done));
      return;
    }
    const RuleItem& item = rule.body[idx];
    // Empty items consume nothing and admit no preceding gap. Wildcards
    // anchor at the previous item's end: a gap before an match-anything item
    // would only shift evidence-free captures around.
    int gap_limit = (consumed_any && item.kind != ItemKind::Empty &&
                     item.kind != ItemKind::Wildcard)
                        ? max_gap
                        : 0;
    int n_tokens = static_cast<int>(tokens.size());
    for (int gap = 0; gap <= gap_limit; ++gap) {
      int p = pos + gap;
      if (p > n_tokens) break;
      switch (item.kind) {
        case ItemKind::Empty: {
          Chunk next = partial;
          Chunk child;
          child.category = "<empty>";
          child.start = p;
          child.end = p;
          child.weight = item.empty_weight;
          next.children.push_back(std::move(child));
          match_items(rule, idx + 1, p, consumed_any, next, out);
          break;
        }
        case ItemKind::Literal: {
          if (p < n_tokens && tokens[p].surface == item.name) {
            Chunk next = partial;
            Chunk child;
            child.category = "<lit>";
            child.start = p;
            child.end = p + 1;
            child.weight = kLiteralWeight;
            next.children.push_back(std::move(child));
            add_capture(next, item, p, p + 1);
            match_items(rule, idx + 1, p + 1, true, next, out);
          }
          break;
        }
        case ItemKind::Marker: {
          const MarkerDef& m = grammar.markers.at(item.name);
          int len = static_cast<int>(m.phrase.size());
          if (p + len <= n_tokens) {
            bool ok = true;
            for (int i = 0; i < len && ok; ++i)
              ok = tokens[p + i].surface == m.phrase[i];
            if (ok) {
              Chunk next = partial;
              Chunk child;
              child.category = item.name;
              child.start = p;
              child.end = p + len;
              child.weight = m.weight;
              next.children.push_back(std::move(child));
              add_capture(next, item, p, p + len);
              match_items(rule, idx + 1, p + len, true, next, out);
            }
          }
          break;
        }
        case ItemKind::Wildcard: {
          for (int n = item.min_tokens; n <= item.max_tokens; ++n) {
            if (p + n > n_tokens) break;
            Chunk next = partial;
            Chunk child;
            child.category = "<any>";
            child.start = p;
            child.end = p + n;
            child.weight = kWildcardWeight;
            next.children.push_back(std::move(child));
            add_capture(next, item, p, p + n);
            match_items(rule, idx + 1, p + n, true, next, out);
          }
          break;
        }
        case ItemKind::Category: {
          for (const Chunk& sub : derive_category(item.name, p)) {
            Chunk next = partial;
            next.children.push_back(sub);
            add_capture(next, item, sub.start, sub.end);
            // Child captures propagate; explicit item captures win, then
            // first occurrence.
            for (const auto& [slot, cap] : sub.captures)
              next.captures.emplace(slot, cap);
            match_items(rule, idx + 1, sub.end, true, next, out);
          }
          break;
        }
      }
    }
  }

  void add_capture(Chunk& chunk, const RuleItem& item, int start, int end) {
    if (item.capture_slot.empty()) return;
    chunk.captures[item.capture_slot] = {start, end,
                                         span_text(tokens, start, end)};
  }

  void finish(Chunk& chunk) {
    chunk.start = chunk.children.front().start;
    chunk.end = chunk.start;
    chunk.weight = 1.0;
    for (const auto& c : chunk.children) {
      chunk.end = std::max(chunk.end, c.end);
      chunk.weight = std::min(chunk.weight, c.weight);
    }
  }
};

inline std::string captures_key(const std::map<std::string, Capture>& caps) {
  std::string key;
  for (const auto& [slot, cap] : caps) {
    key += slot;
    key += '=';
    key += std::to_string(cap.start) + ':' + std::to_string(cap.end) + ':' +
           cap.text;
    key += ';';
  }
  return key;
}

inline bool chunk_order(const Chunk& a, const Chunk& b) {
  if (a.category != b.category) return a.category < b.category;
  if (a.weight != b.weight) return a.weight > b.weight;
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return captures_key(a.captures) < captures_key(b.captures);
}

}  // namespace detail

// Produces every chunk derivable for every start category at every anchor,
// deduplicated on (category, span, captures) keeping the best weight.
inline ChunkSet parse_islands(const Grammar& grammar,
                              const std::vector<Token>& tokens, int max_gap) {
  detail::IslandMatcher matcher{grammar, tokens, max_gap, {}};
  std::vector<Chunk> all;
  for (const auto& cat : grammar.start_categories)
    for (int anchor = 0; anchor < static_cast<int>(tokens.size()); ++anchor)
      for (Chunk& c : matcher.derive_category(cat, anchor)) {
        // Zero-width chunks (all-empty fallbacks) are position-free; anchor
        // them once at 0 instead of once per token.
        if (c.start == c.end && c.start != 0) continue;
        all.push_back(std::move(c));
      }
  // Dedup: keep the maximum weight per (category, span, captures).
  std::map<std::tuple<std::string, int, int, std::string>, Chunk> best;
  for (Chunk& c : all) {
    auto key = std::make_tuple(c.category, c.start, c.end,
                               detail::captures_key(c.captures));
    auto it = best.find(key);
    if (it == best.end() || c.weight > it->second.weight)
      best[key] = std::move(c);
  }
  ChunkSet set;
  set.token_count = static_cast<int>(tokens.size());
  for (auto& [_, c] : best) set.chunks.push_back(std::move(c));
  std::sort(set.chunks.begin(), set.chunks.end(), detail::chunk_order);
  return set;
}

// Chunks of one category sorted by (weight desc, span start asc, span length
// desc, captures lex asc), truncated to k. Unknown category yields an empty
// list.
inline std::vector<Chunk> k_best_chunks(const ChunkSet& set,
                                        const std::string& category,
                                        std::size_t k) {
  std::vector<Chunk> out;
  for (const auto& c : set.chunks)
    if (c.category == category) out.push_back(c);
  std::sort(out.begin(), out.end(), [](const Chunk& a, const Chunk& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.start != b.start) return a.start < b.start;
    int la = a.end - a.start, lb = b.end - b.start;
    if (la != lb) return la > lb;
    return detail::captures_key(a.captures) < detail::captures_key(b.captures);
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace frameq
