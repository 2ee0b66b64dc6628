// frameq: turn recognizer word lattices into ranked database-query frames.
//
// Subcommands: nbest, chunk, frames, run, eval. Exit codes: 0 success,
// 1 usage, 2 input format, 3 internal.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "frameq/pipeline.hpp"

namespace {

struct InputArgs {
  std::string lattice_path;
  std::string tokens;
};

void add_input_flags(CLI::App* cmd, InputArgs& in) {
  auto* lat = cmd->add_option("--lattice", in.lattice_path,
                              "lattice input file");
  auto* tok = cmd->add_option("--tokens", in.tokens,
                              "plain token sequence (unit weights)");
  lat->excludes(tok);
}

frameq::WordLattice load_input(const InputArgs& in) {
  if (!in.lattice_path.empty())
    return frameq::parse_lattice(frameq::read_file(in.lattice_path));
  if (!in.tokens.empty())
    return frameq::lattice_from_tokens(frameq::split_tokens(in.tokens));
  throw frameq::ConfigError("one of --lattice or --tokens is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frameq: word lattices to ranked database-query frames"};
  app.require_subcommand(1);

  frameq::PipelineConfig config;
  InputArgs input;
  std::string corpus_dir;

  auto add_model_flags = [&](CLI::App* cmd, bool need_theories) {
    cmd->add_option("--grammar", config.grammar_path, "chunk grammar file")
        ->required();
    cmd->add_option("--schema", config.schema_path,
                    "frame schema file (default: built-in phone-directory "
                    "schema)");
    auto* r = cmd->add_option("--rules", config.rules_path, "rules theory");
    auto* d = cmd->add_option("--defaults", config.defaults_path,
                              "defaults theory");
    auto* k = cmd->add_option("--kb", config.kb_path, "knowledge-base theory");
    if (need_theories) {
      r->required();
      d->required();
      k->required();
    }
    cmd->add_option("--constraints", config.constraints_path,
                    "constraints theory (violation/1 clauses)");
    cmd->add_option("--context", config.context_path,
                    "context facts file (ground facts)");
  };
  auto add_tuning_flags = [&](CLI::App* cmd) {
    cmd->add_option("--k-paths", config.k_paths, "n-best path count")
        ->default_val(3)
        ->check(CLI::PositiveNumber);
    cmd->add_option("--k-frames", config.k_frames, "frame hypothesis count")
        ->default_val(5)
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-gap", config.max_gap,
                    "max skipped tokens between rule items")
        ->default_val(2)
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--depth-limit", config.depth_limit,
                    "inference depth bound")
        ->default_val(64)
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--trace", config.trace, "emit intermediate results");
  };

  auto* nbest = app.add_subcommand("nbest", "extract n-best token sequences");
  add_input_flags(nbest, input);
  nbest->add_option("--k-paths", config.k_paths, "n-best path count")
      ->default_val(3)
      ->check(CLI::PositiveNumber);

  auto* chunk = app.add_subcommand("chunk", "island-parse into chunks");
  add_input_flags(chunk, input);
  chunk->add_option("--grammar", config.grammar_path, "chunk grammar file")
      ->required();
  chunk->add_option("--k-paths", config.k_paths, "n-best path count")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  chunk->add_option("--max-gap", config.max_gap,
                    "max skipped tokens between rule items")
      ->default_val(2)
      ->check(CLI::NonNegativeNumber);

  auto* frames = app.add_subcommand("frames", "rank frame hypotheses");
  add_input_flags(frames, input);
  frames->add_option("--grammar", config.grammar_path, "chunk grammar file")
      ->required();
  frames->add_option("--schema", config.schema_path, "frame schema file");
  frames->add_option("--k-paths", config.k_paths, "n-best path count")
      ->default_val(1)
      ->check(CLI::PositiveNumber);
  frames->add_option("--k-frames", config.k_frames, "frame hypothesis count")
      ->default_val(5)
      ->check(CLI::PositiveNumber);
  frames->add_option("--max-gap", config.max_gap,
                     "max skipped tokens between rule items")
      ->default_val(2)
      ->check(CLI::NonNegativeNumber);

  auto* run = app.add_subcommand("run", "full pipeline to a completed query");
  add_input_flags(run, input);
  add_model_flags(run, true);
  add_tuning_flags(run);

  auto* eval = app.add_subcommand("eval", "evaluate a gold-frame corpus");
  eval->add_option("corpus", corpus_dir, "corpus directory")->required();
  add_model_flags(eval, true);
  add_tuning_flags(eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors are exit 1
  }

  try {
    if (nbest->parsed()) {
      auto lat = load_input(input);
      for (const auto& e : frameq::n_best_paths(
               lat, static_cast<std::size_t>(config.k_paths))) {
        frameq::Json j;
        j["weight"] = e.weight;
        frameq::Json toks = frameq::Json::array();
        for (const auto& t : e.tokens) toks.push_back(t.surface);
        j["tokens"] = toks;
        std::cout << j.dump() << "\n";
      }
    } else if (chunk->parsed()) {
      auto lat = load_input(input);
      auto grammar = frameq::load_grammar(
          frameq::read_file(config.grammar_path));
      auto paths = frameq::n_best_paths(
          lat, static_cast<std::size_t>(config.k_paths));
      for (const auto& path : paths) {
        if (path.tokens.empty()) continue;
        auto set = frameq::parse_islands(grammar, path.tokens, config.max_gap);
        for (const auto& c : set.chunks) {
          frameq::Json j;
          j["category"] = c.category;
          j["span"] = {c.start, c.end};
          j["weight"] = c.weight;
          frameq::Json caps = frameq::Json::object();
          for (const auto& [slot, cap] : c.captures) caps[slot] = cap.text;
          j["captures"] = caps;
          j["path_weight"] = path.weight;
          std::cout << j.dump() << "\n";
        }
      }
    } else if (frames->parsed()) {
      auto lat = load_input(input);
      auto grammar = frameq::load_grammar(
          frameq::read_file(config.grammar_path));
      auto schema = config.schema_path.empty()
                        ? frameq::default_schema()
                        : frameq::load_schema(
                              frameq::read_file(config.schema_path));
      auto paths = frameq::n_best_paths(
          lat, static_cast<std::size_t>(config.k_paths));
      for (const auto& path : paths) {
        frameq::ChunkSet set;
        if (!path.tokens.empty())
          set = frameq::parse_islands(grammar, path.tokens, config.max_gap);
        auto hyps = frameq::assemble_hypotheses(set, schema);
        for (const auto& h : frameq::k_best_frames(
                 hyps, static_cast<std::size_t>(config.k_frames))) {
          frameq::Json j;
          j["slots"] = frameq::fills_to_json(h.fills, schema);
          j["overall_weight"] = h.overall_weight;
          j["path_weight"] = path.weight;
          std::cout << j.dump() << "\n";
        }
      }
    } else if (run->parsed()) {
      auto env = frameq::load_environment(config);
      auto lat = load_input(input);
      auto report = frameq::run_pipeline(env, config, lat);
      for (const auto& line : report.trace) std::cout << line << "\n";
      std::cout << frameq::query_to_json(report.best,
                                         report.source_path_weight, env.schema)
                       .dump()
                << "\n";
    } else if (eval->parsed()) {
      auto env = frameq::load_environment(config);
      auto metrics = frameq::eval_corpus(env, config, corpus_dir);
      std::cout << frameq::metrics_to_json(metrics).dump() << "\n";
    }
  } catch (const frameq::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return 1;
  } catch (const frameq::LatticeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const frameq::GrammarError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const frameq::TheoryError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const frameq::SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
