// End-to-end pipeline: lattice -> n-best -> chunks -> frames -> completed
// query, plus corpus evaluation. Output is line-delimited JSON and
// byte-deterministic.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "frameq/chunk_parser.hpp"
#include "frameq/completion.hpp"
#include "frameq/frame.hpp"
#include "frameq/grammar.hpp"
#include "frameq/lattice.hpp"
#include "frameq/logic.hpp"

namespace frameq {

using Json = nlohmann::ordered_json;

struct PipelineConfig {
  std::string grammar_path;
  std::string schema_path;      // empty -> built-in phone-directory schema
  std::string rules_path;
  std::string defaults_path;
  std::string kb_path;
  std::string constraints_path;  // empty -> no constraints
  std::string context_path;      // empty -> no context facts
  int k_paths = 3;
  int k_frames = 5;
  int max_gap = 2;
  int depth_limit = 64;
  bool trace = false;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Loaded, validated pipeline resources.
struct PipelineEnv {
  Grammar grammar;
  FrameSchema schema;
  Theory rules;
  Theory defaults;
  Theory kb;
  Theory constraints;
  ContextFacts context;
};

inline PipelineEnv load_environment(const PipelineConfig& config) {
  PipelineEnv env;
  env.grammar = load_grammar(read_file(config.grammar_path));
  env.schema = config.schema_path.empty()
                   ? default_schema()
                   : load_schema(read_file(config.schema_path));
  env.rules = parse_theory(read_file(config.rules_path));
  env.defaults = parse_theory(read_file(config.defaults_path));
  env.kb = parse_theory(read_file(config.kb_path));
  if (!config.constraints_path.empty())
    env.constraints = parse_theory(read_file(config.constraints_path));
  else
    env.constraints.name = "constraints";
  if (!config.context_path.empty()) {
    env.context.facts =
        parse_theory(read_file(config.context_path)).clauses;
    for (const auto& f : env.context.facts)
      if (!is_ground(f.head) || !f.is_fact())
        throw TheoryError("context file must contain only ground facts");
    env.context.source = config.context_path;
  }
  return env;
}

inline Json fills_to_json(const std::map<std::string, SlotFill>& fills,
                          const FrameSchema& schema) {
  Json slots = Json::object();
  for (const auto& slot : schema.slots) {
    auto it = fills.find(slot.name);
    if (it == fills.end()) continue;
    slots[slot.name] = {{"value", it->second.value},
                        {"weight", it->second.weight},
                        {"provenance", provenance_name(it->second.provenance)}};
  }
  return slots;
}

inline Json query_to_json(const CompletedQuery& q, double path_weight,
                          const FrameSchema& schema) {
  Json j;
  j["slots"] = fills_to_json(q.fills, schema);
  j["overall_weight"] = q.overall_weight;
  j["verdict"] = verdict_to_string(q);
  j["source_path_weight"] = path_weight;
  return j;
}

struct PipelineReport {
  CompletedQuery best;
  double source_path_weight = 0.0;
  std::vector<std::string> trace;  // line-delimited JSON when trace is on
};

namespace detail {

inline int verdict_rank(Verdict v) {
  switch (v) {
    case Verdict::Accepted: return 0;
    case Verdict::Incomplete: return 1;
    default: return 2;
  }
}

}  // namespace detail

// Runs the full pipeline over a lattice: for each of the k_paths best token
// sequences, chunk, assemble frames, complete and filter; the single best
// query across paths wins (verdict first, then query weight, then path
// weight, then path rank).
inline PipelineReport run_pipeline(const PipelineEnv& env,
                                   const PipelineConfig& config,
                                   const WordLattice& lattice) {
  PipelineReport report;
  DemoLimits limits{config.depth_limit, 16};
  auto paths = n_best_paths(lattice, static_cast<std::size_t>(config.k_paths));
  std::optional<std::size_t> best_idx;
  std::vector<std::pair<CompletedQuery, double>> completed;
  for (std::size_t pi = 0; pi < paths.size(); ++pi) {
    const auto& path = paths[pi];
    if (config.trace) {
      Json t;
      t["trace"] = "path";
      t["weight"] = path.weight;
      Json toks = Json::array();
      for (const auto& tok : path.tokens) toks.push_back(tok.surface);
      t["tokens"] = toks;
      report.trace.push_back(t.dump());
    }
    ChunkSet chunks = path.tokens.empty()
                          ? ChunkSet{}
                          : parse_islands(env.grammar, path.tokens,
                                          config.max_gap);
    if (config.trace)
      for (const auto& c : chunks.chunks) {
        Json t;
        t["trace"] = "chunk";
        t["category"] = c.category;
        t["span"] = {c.start, c.end};
        t["weight"] = c.weight;
        Json caps = Json::object();
        for (const auto& [slot, cap] : c.captures) caps[slot] = cap.text;
        t["captures"] = caps;
        report.trace.push_back(t.dump());
      }
    auto hypotheses = assemble_hypotheses(chunks, env.schema);
    auto top = k_best_frames(hypotheses,
                             static_cast<std::size_t>(config.k_frames));
    if (config.trace)
      for (const auto& h : top) {
        Json t;
        t["trace"] = "hypothesis";
        t["slots"] = fills_to_json(h.fills, env.schema);
        t["overall_weight"] = h.overall_weight;
        report.trace.push_back(t.dump());
      }
    CompletedQuery q =
        filter_hypotheses(top, env.rules, env.defaults, env.kb,
                          env.constraints, env.context, env.schema, limits);
    completed.emplace_back(std::move(q), path.weight);
    std::size_t i = completed.size() - 1;
    if (!best_idx) {
      best_idx = i;
    } else {
      const auto& [bq, bw] = completed[*best_idx];
      const auto& [cq, cw] = completed[i];
      int rb = detail::verdict_rank(bq.verdict),
          rc = detail::verdict_rank(cq.verdict);
      bool better =
          rc != rb ? rc < rb
                   : (cq.overall_weight != bq.overall_weight
                          ? cq.overall_weight > bq.overall_weight
                          : cw > bw);
      if (better) best_idx = i;
    }
  }
  if (!best_idx) {
    // Empty path set (degenerate single-node lattice); complete the empty
    // frame.
    report.best = filter_hypotheses({}, env.rules, env.defaults, env.kb,
                                    env.constraints, env.context, env.schema,
                                    limits);
    report.source_path_weight = 0.0;
  } else {
    report.best = completed[*best_idx].first;
    report.source_path_weight = completed[*best_idx].second;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Corpus evaluation

struct EvalMetrics {
  int pairs = 0;
  int exact_matches = 0;
  int slots_filled = 0;   // across all outputs
  int slots_correct = 0;  // value matches gold
  int slots_gold = 0;     // across all golds
  std::vector<std::string> skipped;  // unpaired files

  std::optional<double> precision() const {
    if (slots_filled == 0) return std::nullopt;
    return static_cast<double>(slots_correct) / slots_filled;
  }
  std::optional<double> recall() const {
    if (slots_gold == 0) return std::nullopt;
    return static_cast<double>(slots_correct) / slots_gold;
  }
  std::optional<double> frame_accuracy() const {
    if (pairs == 0) return std::nullopt;
    return static_cast<double>(exact_matches) / pairs;
  }
};

inline Json metrics_to_json(const EvalMetrics& m) {
  Json j;
  j["pairs"] = m.pairs;
  auto opt = [](std::optional<double> v) {
    return v ? Json(*v) : Json(nullptr);
  };
  j["slot_precision"] = opt(m.precision());
  j["slot_recall"] = opt(m.recall());
  j["frame_accuracy"] = opt(m.frame_accuracy());
  j["skipped"] = m.skipped;
  return j;
}

// Gold frame files mirror the output slots object: a JSON object mapping
// slot name to either a bare value string or an object with a "value" field.
inline std::map<std::string, std::string> parse_gold(const std::string& text,
                                                     const std::string& path) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("malformed gold frame: " + path);
  if (j.contains("slots")) j = j["slots"];
  std::map<std::string, std::string> gold;
  for (auto& [slot, v] : j.items()) {
    if (v.is_string())
      gold[slot] = v.get<std::string>();
    else if (v.is_object() && v.contains("value"))
      gold[slot] = v["value"].get<std::string>();
    else
      throw ConfigError("malformed gold slot '" + slot + "' in " + path);
  }
  return gold;
}

// Evaluates inputs (<stem>.lat lattices or <stem>.toks token files) against
// paired <stem>.gold frames, in filename order. Unpaired files are reported
// and skipped.
inline EvalMetrics eval_corpus(const PipelineEnv& env,
                               const PipelineConfig& config,
                               const std::string& corpus_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(corpus_dir))
    throw ConfigError("corpus directory not found: " + corpus_dir);
  std::map<std::string, std::string> inputs;  // stem -> input path
  std::map<std::string, std::string> golds;
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(corpus_dir))
    names.push_back(entry.path().string());
  std::sort(names.begin(), names.end());
  for (const auto& p : names) {
    fs::path path(p);
    std::string ext = path.extension().string();
    if (ext == ".lat" || ext == ".toks")
      inputs[path.stem().string()] = p;
    else if (ext == ".gold")
      golds[path.stem().string()] = p;
  }
  EvalMetrics metrics;
  for (const auto& [stem, input_path] : inputs) {
    auto git = golds.find(stem);
    if (git == golds.end()) {
      metrics.skipped.push_back(input_path + " (no gold)");
      continue;
    }
    WordLattice lat;
    if (input_path.size() > 4 &&
        input_path.substr(input_path.size() - 4) == ".lat")
      lat = parse_lattice(read_file(input_path));
    else
      lat = lattice_from_tokens(split_tokens(read_file(input_path)));
    PipelineReport report = run_pipeline(env, config, lat);
    auto gold = parse_gold(read_file(git->second), git->second);
    std::map<std::string, std::string> out;
    for (const auto& [slot, fill] : report.best.fills) out[slot] = fill.value;
    metrics.pairs += 1;
    if (out == gold) metrics.exact_matches += 1;
    metrics.slots_filled += static_cast<int>(out.size());
    metrics.slots_gold += static_cast<int>(gold.size());
    for (const auto& [slot, value] : out) {
      auto it = gold.find(slot);
      if (it != gold.end() && it->second == value) metrics.slots_correct += 1;
    }
  }
  for (const auto& [stem, gold_path] : golds)
    if (!inputs.count(stem))
      metrics.skipped.push_back(gold_path + " (no input)");
  return metrics;
}

}  // namespace frameq
