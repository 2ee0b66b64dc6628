// Horn-clause inference over named theories composed with union, retraction
// (<) and isa (P isa Q = P u (Q < P)), evaluated by an SLD meta-interpreter.
#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace frameq {

struct Term {
  enum class Kind { Variable, Atom, Number, Compound };
  Kind kind = Kind::Atom;
  std::string name;         // variable name, atom name, or functor
  long long number = 0;     // Kind::Number only
  std::vector<Term> args;   // Kind::Compound only, arity >= 1

  static Term var(std::string n) { return {Kind::Variable, std::move(n)}; }
  static Term atom(std::string n) { return {Kind::Atom, std::move(n)}; }
  static Term num(long long v) { return {Kind::Number, "", v}; }
  static Term compound(std::string functor, std::vector<Term> a) {
    Term t{Kind::Compound, std::move(functor)};
    t.args = std::move(a);
    return t;
  }
};

inline bool operator==(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Term::Kind::Variable:
    case Term::Kind::Atom: return a.name == b.name;
    case Term::Kind::Number: return a.number == b.number;
    case Term::Kind::Compound: return a.name == b.name && a.args == b.args;
  }
  return false;
}
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

inline std::string term_to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Variable:
    case Term::Kind::Atom: return t.name;
    case Term::Kind::Number: return std::to_string(t.number);
    case Term::Kind::Compound: {
      std::string s = t.name + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ",";
        s += term_to_string(t.args[i]);
      }
      return s + ")";
    }
  }
  return "";
}

inline bool is_ground(const Term& t) {
  if (t.kind == Term::Kind::Variable) return false;
  for (const auto& a : t.args)
    if (!is_ground(a)) return false;
  return true;
}

struct Clause {
  Term head;
  std::vector<Term> body;  // empty for facts
  std::string origin;      // theory name the clause came from

  bool is_fact() const { return body.empty(); }
};

inline bool operator==(const Clause& a, const Clause& b) {
  return a.head == b.head && a.body == b.body;
}

struct Theory {
  std::string name;
  std::vector<Clause> clauses;  // source order preserved
};

inline bool same_clauses(const Theory& a, const Theory& b) {
  return a.clauses == b.clauses;
}

using PredicateKey = std::pair<std::string, int>;  // name, arity

inline PredicateKey predicate_of(const Term& head) {
  return {head.name,
          head.kind == Term::Kind::Compound ? static_cast<int>(head.args.size())
                                            : 0};
}

inline std::set<PredicateKey> defined_predicates(const Theory& t) {
  std::set<PredicateKey> preds;
  for (const auto& c : t.clauses) preds.insert(predicate_of(c.head));
  return preds;
}

// ---------------------------------------------------------------------------
// Theory file parsing

class TheoryError : public std::runtime_error {
 public:
  TheoryError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                    : msg) {}
};

namespace detail {

struct TheoryLexer {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '%') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (c == '\n') {
        ++line, ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  // next token: identifier, number, or one of ( ) , . and ":-"
  std::string next() {
    skip_ws();
    if (pos >= text.size()) throw TheoryError("unexpected end of input", line);
    char c = text[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t s = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) ||
              text[pos] == '_'))
        ++pos;
      // loc.type(...) style names are rejected up front.
      if (pos + 1 < text.size() && text[pos] == '.' &&
          (std::isalnum(static_cast<unsigned char>(text[pos + 1])) ||
           text[pos + 1] == '_'))
        throw TheoryError(
            "dotted name '" + text.substr(s, pos - s) +
                ".': predicate names use underscores (loc_type, not loc.type)",
            line);
      return text.substr(s, pos - s);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos + 1 < text.size() &&
         std::isdigit(static_cast<unsigned char>(text[pos + 1])))) {
      std::size_t s = pos;
      ++pos;
      while (pos < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[pos])))
        ++pos;
      return text.substr(s, pos - s);
    }
    if (c == ':' && pos + 1 < text.size() && text[pos + 1] == '-') {
      pos += 2;
      return ":-";
    }
    if (c == '(' || c == ')' || c == ',' || c == '.') {
      ++pos;
      return std::string(1, c);
    }
    throw TheoryError(std::string("unexpected character '") + c + "'", line);
  }

  std::string expect(const std::string& tok) {
    int at = line;
    std::string got = next();
    if (got != tok)
      throw TheoryError("expected '" + tok + "', got '" + got + "'", at);
    return got;
  }
};

inline bool is_variable_name(const std::string& s) {
  return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) ||
                        s[0] == '_');
}

inline bool is_number_token(const std::string& s) {
  return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) ||
                        (s[0] == '-' && s.size() > 1));
}

inline Term parse_term(TheoryLexer& lex) {
  int at = lex.line;
  std::string tok = lex.next();
  if (is_number_token(tok)) return Term::num(std::stoll(tok));
  if (tok == "(" || tok == ")" || tok == "," || tok == "." || tok == ":-")
    throw TheoryError("expected a term, got '" + tok + "'", at);
  if (is_variable_name(tok)) return Term::var(tok);
  if (lex.peek() != '(') return Term::atom(tok);
  lex.expect("(");
  std::vector<Term> args;
  args.push_back(parse_term(lex));
  while (lex.peek() == ',') {
    lex.expect(",");
    args.push_back(parse_term(lex));
  }
  lex.expect(")");
  return Term::compound(tok, std::move(args));
}

}  // namespace detail

// Theory file format: `theory <name>.` header, clauses `head :- b1, b2.` or
// facts `head.`, `%` comments, `end.` footer.
inline Theory parse_theory(const std::string& text) {
  detail::TheoryLexer lex{text};
  lex.expect("theory");
  Theory theory;
  int at = lex.line;
  theory.name = lex.next();
  if (detail::is_variable_name(theory.name) ||
      detail::is_number_token(theory.name))
    throw TheoryError("theory name must be an atom", at);
  lex.expect(".");
  for (;;) {
    at = lex.line;
    Term head = detail::parse_term(lex);
    if (head.kind == Term::Kind::Atom && head.name == "end") {
      lex.expect(".");
      break;
    }
    if (head.kind == Term::Kind::Variable)
      throw TheoryError("clause head cannot be a variable", at);
    if (head.kind == Term::Kind::Number)
      throw TheoryError("clause head cannot be a number", at);
    Clause clause;
    clause.head = std::move(head);
    clause.origin = theory.name;
    std::string tok = lex.next();
    if (tok == ":-") {
      for (;;) {
        Term goal = detail::parse_term(lex);
        if (goal.kind == Term::Kind::Variable ||
            goal.kind == Term::Kind::Number)
          throw TheoryError("body goal must be an atom or compound", at);
        clause.body.push_back(std::move(goal));
        tok = lex.next();
        if (tok == ".") break;
        if (tok != ",")
          throw TheoryError("expected ',' or '.', got '" + tok + "'", at);
      }
    } else if (tok != ".") {
      throw TheoryError("expected ':-' or '.', got '" + tok + "'", at);
    }
    theory.clauses.push_back(std::move(clause));
    if (lex.eof())
      throw TheoryError("missing 'end.' footer");
  }
  return theory;
}

// Parses just a sequence of clauses (no header/footer), e.g. context facts.
inline std::vector<Clause> parse_clauses(const std::string& text,
                                         const std::string& origin) {
  std::string wrapped = "theory " + origin + ".\n" + text + "\nend.\n";
  Theory t = parse_theory(wrapped);
  return t.clauses;
}

// ---------------------------------------------------------------------------
// Composition algebra

struct TheoryExpr {
  enum class Op { Leaf, Union, Retract, Isa };
  Op op = Op::Leaf;
  Theory leaf;
  std::shared_ptr<TheoryExpr> left, right;

  static TheoryExpr leaf_of(Theory t) {
    TheoryExpr e;
    e.op = Op::Leaf;
    e.leaf = std::move(t);
    return e;
  }
  static TheoryExpr make(Op op, TheoryExpr l, TheoryExpr r) {
    TheoryExpr e;
    e.op = op;
    e.left = std::make_shared<TheoryExpr>(std::move(l));
    e.right = std::make_shared<TheoryExpr>(std::move(r));
    return e;
  }
};

inline TheoryExpr t_leaf(Theory t) { return TheoryExpr::leaf_of(std::move(t)); }
inline TheoryExpr t_union(TheoryExpr l, TheoryExpr r) {
  return TheoryExpr::make(TheoryExpr::Op::Union, std::move(l), std::move(r));
}
inline TheoryExpr t_retract(TheoryExpr l, TheoryExpr r) {
  return TheoryExpr::make(TheoryExpr::Op::Retract, std::move(l), std::move(r));
}
inline TheoryExpr t_isa(TheoryExpr l, TheoryExpr r) {
  return TheoryExpr::make(TheoryExpr::Op::Isa, std::move(l), std::move(r));
}

// Flattens a composition expression to a single clause list:
//   union(L,R)   = clauses of L then clauses of R
//   retract(L,R) = clauses of L whose head predicate is not defined in R
//   isa(L,R)     = union(L, retract(R, L))
inline Theory compose(const TheoryExpr& expr) {
  switch (expr.op) {
    case TheoryExpr::Op::Leaf:
      return expr.leaf;
    case TheoryExpr::Op::Union: {
      Theory l = compose(*expr.left), r = compose(*expr.right);
      Theory out;
      out.name = l.name;
      out.clauses = std::move(l.clauses);
      out.clauses.insert(out.clauses.end(), r.clauses.begin(),
                         r.clauses.end());
      return out;
    }
    case TheoryExpr::Op::Retract: {
      Theory l = compose(*expr.left), r = compose(*expr.right);
      auto shadowed = defined_predicates(r);
      Theory out;
      out.name = l.name;
      for (auto& c : l.clauses)
        if (!shadowed.count(predicate_of(c.head)))
          out.clauses.push_back(std::move(c));
      return out;
    }
    case TheoryExpr::Op::Isa: {
      Theory l = compose(*expr.left), r = compose(*expr.right);
      return compose(
          t_union(t_leaf(std::move(l)),
                  t_retract(t_leaf(std::move(r)), t_leaf(compose(*expr.left)))));
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Unification (with occurs check)

using Substitution = std::map<std::string, Term>;

inline Term walk(const Term& t, const Substitution& subst) {
  const Term* cur = &t;
  while (cur->kind == Term::Kind::Variable) {
    auto it = subst.find(cur->name);
    if (it == subst.end()) break;
    cur = &it->second;
  }
  return *cur;
}

inline Term resolve(const Term& t, const Substitution& subst) {
  Term w = walk(t, subst);
  if (w.kind == Term::Kind::Compound)
    for (auto& a : w.args) a = resolve(a, subst);
  return w;
}

inline bool occurs(const std::string& var, const Term& t,
                   const Substitution& subst) {
  Term w = walk(t, subst);
  if (w.kind == Term::Kind::Variable) return w.name == var;
  for (const auto& a : w.args)
    if (occurs(var, a, subst)) return true;
  return false;
}

// Extends `subst` with the most general unifier of t1 and t2, or returns
// false leaving it untouched on failure.
inline bool unify_into(const Term& t1, const Term& t2, Substitution& subst) {
  Term a = walk(t1, subst), b = walk(t2, subst);
  if (a.kind == Term::Kind::Variable && b.kind == Term::Kind::Variable &&
      a.name == b.name)
    return true;
  if (a.kind == Term::Kind::Variable) {
    if (occurs(a.name, b, subst)) return false;
    subst[a.name] = b;
    return true;
  }
  if (b.kind == Term::Kind::Variable) {
    if (occurs(b.name, a, subst)) return false;
    subst[b.name] = a;
    return true;
  }
  if (a.kind != b.kind) return false;
  if (a.kind == Term::Kind::Number) return a.number == b.number;
  if (a.kind == Term::Kind::Atom) return a.name == b.name;
  if (a.name != b.name || a.args.size() != b.args.size()) return false;
  Substitution saved = subst;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unify_into(a.args[i], b.args[i], subst)) {
      subst = saved;
      return false;
    }
  return true;
}

inline std::optional<Substitution> unify(const Term& t1, const Term& t2) {
  Substitution subst;
  if (unify_into(t1, t2, subst)) return subst;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// demo: SLD resolution over a composed theory

struct Answer {
  std::map<std::string, Term> bindings;  // query variable -> term
  std::string root_origin;               // theory of the root goal's clause
  bool root_is_fact = false;
};

struct DemoResult {
  std::vector<Answer> answers;  // discovery order, deduplicated
  bool incomplete = false;      // a branch hit the depth bound
};

struct DemoLimits {
  int depth = 64;
  int answers = 16;
};

namespace detail {

inline void collect_vars(const Term& t, std::vector<std::string>& vars) {
  if (t.kind == Term::Kind::Variable) {
    if (std::find(vars.begin(), vars.end(), t.name) == vars.end())
      vars.push_back(t.name);
  }
  for (const auto& a : t.args) collect_vars(a, vars);
}

inline Term rename_term(const Term& t, const std::string& suffix) {
  Term out = t;
  if (out.kind == Term::Kind::Variable) out.name += suffix;
  for (auto& a : out.args) a = rename_term(a, suffix);
  return out;
}

// Canonical form for duplicate detection up to renaming of free variables.
inline std::string canonical_key(const std::vector<std::string>& vars,
                                 const std::map<std::string, Term>& bindings) {
  std::map<std::string, int> fresh;
  std::string key;
  struct Render {
    std::map<std::string, int>& fresh;
    std::string operator()(const Term& t) {
      switch (t.kind) {
        case Term::Kind::Variable: {
          auto [it, inserted] = fresh.emplace(t.name, fresh.size());
          return "_" + std::to_string(it->second);
        }
        case Term::Kind::Atom: return "a:" + t.name;
        case Term::Kind::Number: return "n:" + std::to_string(t.number);
        case Term::Kind::Compound: {
          std::string s = "c:" + t.name + "(";
          for (const auto& a : t.args) s += (*this)(a) + ",";
          return s + ")";
        }
      }
      return "";
    }
  } render{fresh};
  for (const auto& v : vars) {
    key += v + "=";
    key += render(bindings.at(v));
    key += ";";
  }
  return key;
}

struct SldEngine {
  const std::vector<Clause>& clauses;
  DemoLimits limits;
  std::vector<std::string> query_vars;
  DemoResult result;
  std::set<std::string> seen;
  long long rename_counter = 0;
  Term original_goal;

  bool done() const {
    return static_cast<int>(result.answers.size()) >= limits.answers;
  }

  // Goals carry the origin marker of the clause that resolved the root goal
  // once one is chosen.
  void solve(std::vector<Term> goals, Substitution subst, int depth,
             const std::string& root_origin, bool root_is_fact,
             bool root_chosen) {
    if (done()) return;
    if (goals.empty()) {
      Answer ans;
      for (const auto& v : query_vars) ans.bindings[v] = resolve(Term::var(v), subst);
      ans.root_origin = root_origin;
      ans.root_is_fact = root_is_fact;
      std::string key = canonical_key(query_vars, ans.bindings);
      if (seen.insert(key).second) result.answers.push_back(std::move(ans));
      return;
    }
    if (depth <= 0) {
      result.incomplete = true;
      return;
    }
    Term goal = walk(goals.front(), subst);
    std::vector<Term> rest(goals.begin() + 1, goals.end());

    // Builtin: distinct/2, true iff both args are ground and differ.
    if (goal.kind == Term::Kind::Compound && goal.name == "distinct" &&
        goal.args.size() == 2) {
      Term a = resolve(goal.args[0], subst), b = resolve(goal.args[1], subst);
      if (is_ground(a) && is_ground(b) && a != b)
        solve(std::move(rest), std::move(subst), depth, root_origin,
              root_is_fact, root_chosen);
      return;
    }

    for (const auto& clause : clauses) {
      if (done()) return;
      std::string suffix = "#" + std::to_string(++rename_counter);
      Term head = rename_term(clause.head, suffix);
      Substitution attempt = subst;
      if (!unify_into(goal, head, attempt)) continue;
      std::vector<Term> next;
      next.reserve(clause.body.size() + rest.size());
      for (const auto& b : clause.body)
        next.push_back(rename_term(b, suffix));
      next.insert(next.end(), rest.begin(), rest.end());
      if (!root_chosen)
        solve(std::move(next), std::move(attempt), depth - 1, clause.origin,
              clause.is_fact(), true);
      else
        solve(std::move(next), std::move(attempt), depth - 1, root_origin,
              root_is_fact, true);
    }
  }
};

}  // namespace detail

// Evaluates `goal` against compose(expr) by SLD resolution: depth-first,
// leftmost goal selection, clauses in composed order. Answers come back in
// discovery order with renaming duplicates removed, truncated at the answer
// bound; hitting the depth bound flags the result incomplete.
inline DemoResult demo(const TheoryExpr& expr, const Term& goal,
                       DemoLimits limits = {}) {
  if (goal.kind != Term::Kind::Atom && goal.kind != Term::Kind::Compound)
    throw std::invalid_argument("goal must be an atom or compound term");
  if (limits.depth < 1 || limits.answers < 1)
    throw std::invalid_argument("demo limits must be positive");
  Theory composed = compose(expr);
  detail::SldEngine engine{composed.clauses, limits};
  detail::collect_vars(goal, engine.query_vars);
  engine.original_goal = goal;
  engine.solve({goal}, {}, limits.depth, "", false, false);
  return engine.result;
}

}  // namespace frameq
