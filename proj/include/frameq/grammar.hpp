// Weighted robust chunk grammar: semantic markers with static weights,
// compositional rules with wildcard and empty-fallback items.
#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace frameq {

struct MarkerDef {
  std::string name;
  std::vector<std::string> phrase;  // non-empty, lowercase tokens
  double weight = 1.0;              // static pre-terminal confidence
};

enum class ItemKind { Category, Marker, Literal, Wildcard, Empty };

struct RuleItem {
  ItemKind kind = ItemKind::Literal;
  std::string name;       // category or marker name, or literal token
  int min_tokens = 1;     // wildcard bounds, 1 <= min <= max <= 10
  int max_tokens = 1;
  double empty_weight = 0.0;  // static weight of the empty fallback
  std::string capture_slot;   // empty when the item captures nothing
};

struct GrammarRule {
  std::string category;
  std::vector<RuleItem> body;
};

struct Grammar {
  std::map<std::string, MarkerDef> markers;
  std::map<std::string, std::vector<GrammarRule>> rules;
  std::set<std::string> start_categories;
};

inline bool operator==(const MarkerDef& a, const MarkerDef& b) {
  return a.name == b.name && a.phrase == b.phrase && a.weight == b.weight;
}
inline bool operator==(const RuleItem& a, const RuleItem& b) {
  return a.kind == b.kind && a.name == b.name &&
         a.min_tokens == b.min_tokens && a.max_tokens == b.max_tokens &&
         a.empty_weight == b.empty_weight && a.capture_slot == b.capture_slot;
}
inline bool operator==(const GrammarRule& a, const GrammarRule& b) {
  return a.category == b.category && a.body == b.body;
}
inline bool operator==(const Grammar& a, const Grammar& b) {
  return a.markers == b.markers && a.rules == b.rules &&
         a.start_categories == b.start_categories;
}

// Static weight of a bare wildcard match; marker-anchored evidence is
// expected to dominate it.
inline constexpr double kWildcardWeight = 0.5;
// Literal tokens are exact cue matches.
inline constexpr double kLiteralWeight = 1.0;

class GrammarError : public std::runtime_error {
 public:
  GrammarError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                    : msg) {}
};

namespace detail {

// Declarations are ';'-terminated and may span lines; '#' starts a comment.
inline std::vector<std::pair<std::string, int>> split_declarations(
    const std::string& text) {
  std::vector<std::pair<std::string, int>> decls;
  std::string cur;
  int cur_line = 1, line = 1;
  bool in_comment = false, in_quote = false;
  for (char c : text) {
    if (c == '\n') {
      ++line;
      in_comment = false;
      c = ' ';
    }
    if (in_comment) continue;
    if (c == '#' && !in_quote) {
      in_comment = true;
      continue;
    }
    if (c == '"') in_quote = !in_quote;
    if (c == ';' && !in_quote) {
      if (cur.find_first_not_of(" \t\r") != std::string::npos)
        decls.emplace_back(cur, cur_line);
      cur.clear();
      cur_line = line;
      continue;
    }
    if (cur.empty() && (c == ' ' || c == '\t' || c == '\r')) {
      cur_line = line;
      continue;
    }
    cur += c;
  }
  if (cur.find_first_not_of(" \t\r") != std::string::npos)
    throw GrammarError("unterminated declaration (missing ';')", cur_line);
  return decls;
}

inline std::vector<std::string> tokenize_decl(const std::string& decl,
                                              int line) {
  // Splits on whitespace but keeps "quoted strings" as single tokens and
  // separates ',' into its own token.
  std::vector<std::string> toks;
  std::string cur;
  bool in_quote = false;
  int paren_depth = 0;
  auto flush = [&] {
    if (!cur.empty()) toks.push_back(cur), cur.clear();
  };
  for (char c : decl) {
    if (in_quote) {
      cur += c;
      if (c == '"') in_quote = false, flush();
      continue;
    }
    if (c == '"') {
      flush();
      cur += c;
      in_quote = true;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      flush();
    } else if (c == ',' && paren_depth == 0) {
      // list separator (start declarations); commas inside any(...) stay put
      flush();
      toks.push_back(",");
    } else {
      if (c == '(') ++paren_depth;
      if (c == ')' && paren_depth > 0) --paren_depth;
      cur += c;
    }
  }
  if (in_quote) throw GrammarError("unterminated quote", line);
  flush();
  return toks;
}

inline bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return !std::isdigit(static_cast<unsigned char>(s[0]));
}

inline double parse_weight(const std::string& s, int line) {
  std::size_t pos = 0;
  double w;
  try {
    w = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw GrammarError("malformed weight '" + s + "'", line);
  }
  if (pos != s.size()) throw GrammarError("malformed weight '" + s + "'", line);
  if (!(w >= 0.0 && w <= 1.0))
    throw GrammarError("weight outside [0,1]", line);
  return w;
}

// item := <name> | "<literal>" | any(<min>,<max>) | empty@<w>, each with an
// optional >slot capture suffix.
inline RuleItem parse_item(const std::string& raw, int line) {
  RuleItem item;
  std::string text = raw;
  auto gt = text.rfind('>');
  if (gt != std::string::npos && text.front() != '"') {
    item.capture_slot = text.substr(gt + 1);
    if (!valid_identifier(item.capture_slot))
      throw GrammarError("bad capture slot in '" + raw + "'", line);
    text = text.substr(0, gt);
  }
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    item.kind = ItemKind::Literal;
    item.name = text.substr(1, text.size() - 2);
    if (item.name.empty() || item.name.find(' ') != std::string::npos)
      throw GrammarError("literal must be a single token", line);
    return item;
  }
  if (text.rfind("any(", 0) == 0) {
    if (text.back() != ')')
      throw GrammarError("malformed wildcard '" + raw + "'", line);
    std::string inner = text.substr(4, text.size() - 5);
    auto comma = inner.find(',');
    if (comma == std::string::npos)
      throw GrammarError("malformed wildcard '" + raw + "'", line);
    item.kind = ItemKind::Wildcard;
    try {
      item.min_tokens = std::stoi(inner.substr(0, comma));
      item.max_tokens = std::stoi(inner.substr(comma + 1));
    } catch (const std::exception&) {
      throw GrammarError("malformed wildcard bounds in '" + raw + "'", line);
    }
    if (!(1 <= item.min_tokens && item.min_tokens <= item.max_tokens &&
          item.max_tokens <= 10))
      throw GrammarError("wildcard bounds must satisfy 1 <= min <= max <= 10",
                         line);
    return item;
  }
  if (text.rfind("empty", 0) == 0) {
    item.kind = ItemKind::Empty;
    item.empty_weight = 0.0;
    if (text.size() > 5) {
      if (text[5] != '@')
        throw GrammarError("malformed empty item '" + raw + "'", line);
      item.empty_weight = parse_weight(text.substr(6), line);
    }
    return item;
  }
  if (!valid_identifier(text))
    throw GrammarError("malformed item '" + raw + "'", line);
  item.kind = ItemKind::Category;  // resolved to Marker during validation
  item.name = text;
  return item;
}

inline void check_no_recursion(const Grammar& g) {
  // Colors: 0 unvisited, 1 on stack, 2 done.
  std::map<std::string, int> color;
  std::vector<std::string> stack;
  struct Walker {
    const Grammar& g;
    std::map<std::string, int>& color;
    void visit(const std::string& cat) {
      color[cat] = 1;
      auto it = g.rules.find(cat);
      if (it != g.rules.end()) {
        for (const auto& rule : it->second)
          for (const auto& item : rule.body)
            if (item.kind == ItemKind::Category) {
              int c = color[item.name];
              if (c == 1)
                throw GrammarError("recursion cycle " + item.name);
              if (c == 0) visit(item.name);
            }
      }
      color[cat] = 2;
    }
  } w{g, color};
  for (const auto& [cat, _] : g.rules)
    if (color[cat] == 0) w.visit(cat);
}

}  // namespace detail

// Loads the grammar DSL:
//   marker <name> = "<tok> <tok> ..." @ <weight> ;
//   rule <category> -> <item> <item> ... ;
//   start <category> , <category> ... ;
inline Grammar load_grammar(const std::string& text) {
  Grammar g;
  for (const auto& [decl, line] : detail::split_declarations(text)) {
    auto toks = detail::tokenize_decl(decl, line);
    if (toks.empty()) continue;
    if (toks[0] == "marker") {
      if (toks.size() != 6 || toks[2] != "=" || toks[4] != "@")
        throw GrammarError("malformed marker declaration", line);
      MarkerDef m;
      m.name = toks[1];
      if (!detail::valid_identifier(m.name))
        throw GrammarError("bad marker name '" + m.name + "'", line);
      const std::string& quoted = toks[3];
      if (quoted.size() < 3 || quoted.front() != '"' || quoted.back() != '"')
        throw GrammarError("marker phrase must be quoted", line);
      std::istringstream ps(quoted.substr(1, quoted.size() - 2));
      std::string w;
      while (ps >> w) m.phrase.push_back(w);
      if (m.phrase.empty())
        throw GrammarError("marker phrase must be non-empty", line);
      m.weight = detail::parse_weight(toks[5], line);
      if (g.markers.count(m.name))
        throw GrammarError("duplicate marker '" + m.name + "'", line);
      g.markers[m.name] = std::move(m);
    } else if (toks[0] == "rule") {
      if (toks.size() < 4 || toks[2] != "->")
        throw GrammarError("malformed rule declaration", line);
      GrammarRule rule;
      rule.category = toks[1];
      if (!detail::valid_identifier(rule.category))
        throw GrammarError("bad category name '" + rule.category + "'", line);
      std::set<std::string> slots_seen;
      for (std::size_t i = 3; i < toks.size(); ++i) {
        RuleItem item = detail::parse_item(toks[i], line);
        if (!item.capture_slot.empty() &&
            !slots_seen.insert(item.capture_slot).second)
          throw GrammarError(
              "slot '" + item.capture_slot + "' captured twice in one rule",
              line);
        rule.body.push_back(std::move(item));
      }
      g.rules[rule.category].push_back(std::move(rule));
    } else if (toks[0] == "start") {
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (toks[i] == ",") continue;
        if (!detail::valid_identifier(toks[i]))
          throw GrammarError("bad start category '" + toks[i] + "'", line);
        g.start_categories.insert(toks[i]);
      }
    } else {
      throw GrammarError("unknown declaration '" + toks[0] + "'", line);
    }
  }
  // Resolve name references and validate.
  for (auto& [cat, rules] : g.rules) {
    if (g.markers.count(cat))
      throw GrammarError("'" + cat + "' is both a marker and a category");
    for (auto& rule : rules)
      for (auto& item : rule.body)
        if (item.kind == ItemKind::Category) {
          if (g.markers.count(item.name))
            item.kind = ItemKind::Marker;
          else if (!g.rules.count(item.name))
            throw GrammarError("undefined category " + item.name);
        }
  }
  for (const auto& cat : g.start_categories)
    if (!g.rules.count(cat))
      throw GrammarError("undefined start category " + cat);
  detail::check_no_recursion(g);
  return g;
}

inline std::set<std::string> defined_categories(const Grammar& g) {
  std::set<std::string> cats;
  for (const auto& [cat, rules] : g.rules)
    if (!rules.empty()) cats.insert(cat);
  return cats;
}

// Serializes a grammar back to the DSL; reloading yields an identical
// structure.
inline std::string serialize_grammar(const Grammar& g) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [name, m] : g.markers) {
    out << "marker " << name << " = \"";
    for (std::size_t i = 0; i < m.phrase.size(); ++i)
      out << (i ? " " : "") << m.phrase[i];
    out << "\" @ " << m.weight << " ;\n";
  }
  for (const auto& [cat, rules] : g.rules)
    for (const auto& rule : rules) {
      out << "rule " << cat << " ->";
      for (const auto& item : rule.body) {
        out << ' ';
        switch (item.kind) {
          case ItemKind::Category:
          case ItemKind::Marker:
            out << item.name;
            break;
          case ItemKind::Literal:
            out << '"' << item.name << '"';
            break;
          case ItemKind::Wildcard:
            out << "any(" << item.min_tokens << "," << item.max_tokens << ")";
            break;
          case ItemKind::Empty:
            out << "empty@" << item.empty_weight;
            break;
        }
        if (!item.capture_slot.empty()) out << '>' << item.capture_slot;
      }
      out << " ;\n";
    }
  if (!g.start_categories.empty()) {
    out << "start";
    bool first = true;
    for (const auto& cat : g.start_categories) {
      out << (first ? " " : " , ") << cat;
      first = false;
    }
    out << " ;\n";
  }
  return out.str();
}

}  // namespace frameq
