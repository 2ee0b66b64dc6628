// Word-lattice input: recognizer-style DAGs of weighted word arcs and
// n-best path extraction.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace frameq {

struct Token {
  std::string surface;  // lowercase, no whitespace
  int position = 0;     // index within a path
};

inline bool operator==(const Token& a, const Token& b) {
  return a.surface == b.surface && a.position == b.position;
}

struct LatticeArc {
  int from = 0;
  int to = 0;
  std::string surface;
  double weight = 1.0;
};

struct WordLattice {
  int node_count = 0;
  int start = 0;
  int end = 0;
  std::vector<LatticeArc> arcs;
};

struct NBestEntry {
  std::vector<Token> tokens;
  double weight = 1.0;  // product of traversed arc weights
};

class LatticeError : public std::runtime_error {
 public:
  LatticeError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                    : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline void validate_lattice(const WordLattice& lat) {
  if (lat.node_count < 1)
    throw LatticeError("node count must be positive");
  if (lat.start < 0 || lat.start >= lat.node_count ||
      lat.end < 0 || lat.end >= lat.node_count)
    throw LatticeError("start/end node out of range");
  for (const auto& a : lat.arcs) {
    if (a.from < 0 || a.from >= lat.node_count || a.to < 0 ||
        a.to >= lat.node_count)
      throw LatticeError("arc node out of range");
    if (a.from >= a.to)
      throw LatticeError("non-monotone arc " + std::to_string(a.from) + "->" +
                         std::to_string(a.to));
    if (!(a.weight >= 0.0 && a.weight <= 1.0))
      throw LatticeError("arc weight outside [0,1]");
    if (a.surface.empty())
      throw LatticeError("empty arc surface");
  }
  // Every node must lie on some start->end path.
  std::vector<char> fwd(lat.node_count, 0), bwd(lat.node_count, 0);
  fwd[lat.start] = 1;
  for (int n = 0; n < lat.node_count; ++n)
    if (fwd[n])
      for (const auto& a : lat.arcs)
        if (a.from == n) fwd[a.to] = 1;
  bwd[lat.end] = 1;
  for (int n = lat.node_count - 1; n >= 0; --n)
    if (bwd[n])
      for (const auto& a : lat.arcs)
        if (a.to == n) bwd[a.from] = 1;
  for (int n = 0; n < lat.node_count; ++n)
    if (!(fwd[n] && bwd[n]))
      throw LatticeError("unreachable node " + std::to_string(n));
}

}  // namespace detail

// Parses the line-oriented lattice format:
//   lattice <node_count> <start_id> <end_id>
//   arc <from> <to> <surface> <weight>
// Blank lines and '#' comments are ignored.
inline WordLattice parse_lattice(const std::string& text) {
  WordLattice lat;
  bool have_header = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (kw == "lattice") {
      if (have_header) throw LatticeError("duplicate lattice header", lineno);
      if (!(ls >> lat.node_count >> lat.start >> lat.end))
        throw LatticeError("malformed lattice header", lineno);
      have_header = true;
    } else if (kw == "arc") {
      if (!have_header)
        throw LatticeError("arc before lattice header", lineno);
      LatticeArc a;
      if (!(ls >> a.from >> a.to >> a.surface >> a.weight))
        throw LatticeError("malformed arc", lineno);
      if (!(a.weight >= 0.0 && a.weight <= 1.0))
        throw LatticeError("arc weight outside [0,1]", lineno);
      if (a.from >= a.to)
        throw LatticeError("non-monotone arc", lineno);
      lat.arcs.push_back(std::move(a));
    } else {
      throw LatticeError("unknown directive '" + kw + "'", lineno);
    }
  }
  if (!have_header) throw LatticeError("missing lattice header");
  detail::validate_lattice(lat);
  return lat;
}

// Wraps a plain token sequence as a linear lattice with unit weights.
inline WordLattice lattice_from_tokens(const std::vector<std::string>& words) {
  WordLattice lat;
  lat.node_count = static_cast<int>(words.size()) + 1;
  lat.start = 0;
  lat.end = lat.node_count - 1;
  for (int i = 0; i < static_cast<int>(words.size()); ++i)
    lat.arcs.push_back({i, i + 1, words[i], 1.0});
  if (words.empty()) lat.node_count = 1, lat.end = 0;
  return lat;
}

inline std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

namespace detail {

inline std::vector<std::string> surfaces(const std::vector<Token>& toks) {
  std::vector<std::string> s;
  s.reserve(toks.size());
  for (const auto& t : toks) s.push_back(t.surface);
  return s;
}

// Partial path ordered by (weight desc, surfaces lex asc). Since extending a
// path can only lower the weight and lexicographically extend the surfaces,
// complete paths leave the frontier in final output order.
struct PartialPath {
  int node;
  double weight;
  std::vector<std::string> words;
  std::vector<int> arc_idx;
};

struct PartialPathWorse {
  bool operator()(const PartialPath& a, const PartialPath& b) const {
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.words > b.words;
  }
};

}  // namespace detail

// Best-first enumeration of start->end paths, weight = product of arc
// weights. Sorted by (weight desc, token sequence lex asc); at most k
// entries, capped at the total path count.
inline std::vector<NBestEntry> n_best_paths(const WordLattice& lat,
                                            std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<std::vector<int>> out_arcs(lat.node_count);
  for (int i = 0; i < static_cast<int>(lat.arcs.size()); ++i)
    out_arcs[lat.arcs[i].from].push_back(i);

  std::priority_queue<detail::PartialPath, std::vector<detail::PartialPath>,
                      detail::PartialPathWorse>
      frontier;
  frontier.push({lat.start, 1.0, {}, {}});
  std::vector<NBestEntry> result;
  while (!frontier.empty() && result.size() < k) {
    detail::PartialPath p = frontier.top();
    frontier.pop();
    if (p.node == lat.end) {
      NBestEntry e;
      e.weight = p.weight;
      for (int i = 0; i < static_cast<int>(p.words.size()); ++i)
        e.tokens.push_back({p.words[i], i});
      result.push_back(std::move(e));
      continue;
    }
    for (int ai : out_arcs[p.node]) {
      const auto& a = lat.arcs[ai];
      detail::PartialPath q = p;
      q.node = a.to;
      q.weight = p.weight * a.weight;
      q.words.push_back(a.surface);
      q.arc_idx.push_back(ai);
      frontier.push(std::move(q));
    }
  }
  return result;
}

}  // namespace frameq
