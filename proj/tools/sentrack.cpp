// sentrack: command-line front end.
//
// Exit codes: 0 success, 1 error (bad input, I/O, failed check),
// 2 the sentence scored -inf (track) or nothing could be generated (generate).

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "sentrack/config.hpp"
#include "sentrack/error.hpp"
#include "sentrack/evaluation.hpp"
#include "sentrack/generation.hpp"
#include "sentrack/oracle.hpp"
#include "sentrack/result_io.hpp"
#include "sentrack/retrieval.hpp"
#include "sentrack/scene_sim.hpp"

using namespace sentrack;

namespace {

constexpr int kExitError = 1;
constexpr int kExitNegInf = 2;

// Flags are collected as config entries and applied after the config file.
struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  ConfigMap flags;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_file, "INI file with default settings")->check(CLI::ExistingFile);
  sub->add_option("--set", c.sets, "Override any config key, section.key=value (repeatable)");
  auto key = [sub, &c](const std::string& flag, const std::string& k, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&c, k](const std::string& v) { c.flags[k] = v; }, help);
  };
  key("--lexicon", "run.lexicon", "Lexicon file (default: built-in)");
  key("--top-k", "tracker.top_k", "Detections kept per frame");
  key("--jobs", "run.jobs", "Worker threads (0: available parallelism)");
  key("--seed", "run.seed", "Random seed");
}

void add_key(CLI::App* sub, Common& c, const std::string& flag, const std::string& k, const std::string& help) {
  sub->add_option_function<std::string>(flag, [&c, k](const std::string& v) { c.flags[k] = v; }, help);
}

// A noise preset counts as a flag: it replaces file values, and explicit
// noise.* flags still refine it.
Settings resolve(const Common& c, const std::string& noise_preset = "") {
  Settings s;
  if (!c.config_file.empty()) apply_config(s, read_config_file(c.config_file));
  if (noise_preset == "none") s.noise = NoiseModel::none();
  if (noise_preset == "standard") s.noise = NoiseModel::standard();
  ConfigMap flags;
  for (const auto& a : c.sets) {
    auto [k, v] = parse_assignment(a);
    flags[k] = v;
  }
  for (const auto& [k, v] : c.flags) flags[k] = v;
  apply_config(s, flags);
  return s;
}

Lexicon lexicon_for(const Settings& s) { return s.lexicon.empty() ? builtin_lexicon() : load_lexicon(s.lexicon); }

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot write " + out);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence-driven joint tracking, generation and retrieval over detection streams"};
  app.require_subcommand(1);

  // track
  Common track_c;
  std::string track_clip, track_sentence, track_out;
  auto* track = app.add_subcommand("track", "Track the participants of a sentence in one clip");
  add_common(track, track_c);
  track->add_option("--clip", track_clip, "Clip JSON file")->required()->check(CLI::ExistingFile);
  track->add_option("--sentence", track_sentence, "Sentence")->required();
  track->add_option("--out", track_out, "Result JSON (default: stdout)");
  add_key(track, track_c, "--overlay", "run.overlay", "Directory for per-frame SVG overlays, or off");
  add_key(track, track_c, "--distinct", "tracker.distinct_detections", "Forbid shared detections (true/false)");

  // generate
  Common gen_c;
  std::string gen_clip, gen_out;
  auto* gen = app.add_subcommand("generate", "Generate the best-scoring sentence for a clip");
  add_common(gen, gen_c);
  gen->add_option("--clip", gen_clip, "Clip JSON file")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Result JSON (default: stdout)");
  add_key(gen, gen_c, "--beam-width", "generation.beam_width", "Beam width");
  add_key(gen, gen_c, "--threshold", "generation.contraction_threshold", "Contraction threshold in (0, 1]");
  add_key(gen, gen_c, "--max-words", "generation.max_words", "Longest sentence considered");

  // retrieve
  Common ret_c;
  std::string ret_corpus, ret_sentences, ret_out;
  std::vector<std::string> ret_sentence;
  std::size_t ret_top = 0;
  auto* ret = app.add_subcommand("retrieve", "Rank the clips of a corpus by sentence score");
  add_common(ret, ret_c);
  ret->add_option("--corpus", ret_corpus, "Directory of clip JSON files")->required()->check(CLI::ExistingDirectory);
  auto* one = ret->add_option("--sentence", ret_sentence, "Query sentence (repeatable)");
  auto* many = ret->add_option("--sentences", ret_sentences, "TSV of id<TAB>sentence")->check(CLI::ExistingFile);
  one->excludes(many);
  ret->add_option("--out", ret_out, "Ranked lists JSON (default: stdout)");
  ret->add_option("--top", ret_top, "Keep the first k clips of each list (0: all)");

  // simulate
  Common sim_c;
  std::string sim_manifest, sim_out, sim_dump, sim_noise;
  auto* sim = app.add_subcommand("simulate", "Write a synthetic corpus with judgments");
  add_common(sim, sim_c);
  sim->add_option("--manifest", sim_manifest, "Manifest JSON (default: built-in 40 clips)")
      ->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "Output directory");
  sim->add_option("--dump-manifest", sim_dump, "Write the manifest in use to this file");
  sim->add_option("--noise", sim_noise, "Noise preset applied before noise.* keys")
      ->check(CLI::IsMember({"none", "standard"}));

  // eval
  Common ev_c;
  std::string ev_corpus, ev_out, ev_timing;
  bool ev_no_gen = false;
  auto* ev = app.add_subcommand("eval", "Retrieval, threshold and generation metrics for a corpus");
  add_common(ev, ev_c);
  ev->add_option("--corpus", ev_corpus, "Directory written by simulate")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--out", ev_out, "Report JSON (default: stdout)");
  ev->add_option("--timing", ev_timing, "Per-clip wall-clock JSON (default: summary on stderr)");
  ev->add_flag("--no-generation", ev_no_gen, "Skip the generation truth rate");
  add_key(ev, ev_c, "--folds", "run.folds", "Cross-validation folds");
  add_key(ev, ev_c, "--beam-width", "generation.beam_width", "Beam width");
  add_key(ev, ev_c, "--threshold", "generation.contraction_threshold", "Contraction threshold in (0, 1]");

  // oracle-check
  Common or_c;
  int or_trials = 200;
  InstanceSizes or_sizes;
  std::size_t or_cap = 10'000'000;
  bool or_fault = false;
  auto* orc = app.add_subcommand("oracle-check", "Compare the decoder against exhaustive search");
  add_common(orc, or_c);
  orc->add_option("--trials", or_trials, "Random instances")->check(CLI::NonNegativeNumber);
  orc->add_option("--max-T", or_sizes.max_T, "Largest frame count")->check(CLI::PositiveNumber);
  orc->add_option("--max-J", or_sizes.max_J, "Largest detections per frame")->check(CLI::PositiveNumber);
  orc->add_option("--max-L", or_sizes.max_L, "Largest participant count")->check(CLI::PositiveNumber);
  orc->add_option("--max-W", or_sizes.max_W, "Largest word count")->check(CLI::PositiveNumber);
  orc->add_option("--max-K", or_sizes.max_K, "Largest recognizer size")->check(CLI::PositiveNumber);
  orc->add_option("--cap", or_cap, "Exhaustive search limit on live path prefixes");
  orc->add_flag("--inject-fault", or_fault, "Negate coherence inside the decoder (test fixture)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (*track) {
      const Settings s = resolve(track_c);
      const Lexicon lex = lexicon_for(s);
      const Clip clip = load_clip(track_clip);
      SentenceResult r;
      try {
        r = sentence_track(clip, track_sentence, lex, s.tracker);
      } catch (const NoTrackError& e) {
        std::cerr << "warning: " << e.what() << "\n";
        r.analysis = analyze(track_sentence, lex);
        r.result.tau = -std::numeric_limits<double>::infinity();
      }
      emit(result_document(clip, track_sentence, r.analysis, r.result), track_out);
      if (!s.overlay.empty() && !r.result.tracks.empty())
        write_overlays(clip, r.analysis.mapping, r.result, s.overlay);
      return std::isinf(r.result.tau) ? kExitNegInf : 0;
    }
    if (*gen) {
      const Settings s = resolve(gen_c);
      const Lexicon lex = lexicon_for(s);
      const Clip clip = load_clip(gen_clip);
      const auto g = generate(clip, lex, s.tracker, s.generation);
      if (!g) {
        std::cerr << "no sentence has a finite score on " << clip.id << "\n";
        return kExitNegInf;
      }
      emit(result_document(clip, g->sentence, g->tracked.analysis, g->tracked.result), gen_out);
      return 0;
    }
    if (*ret) {
      const Settings s = resolve(ret_c);
      const Lexicon lex = lexicon_for(s);
      std::vector<QuerySentence> queries;
      if (!ret_sentences.empty()) queries = read_sentences(ret_sentences);
      for (std::size_t i = 0; i < ret_sentence.size(); ++i) queries.push_back({std::to_string(i + 1), ret_sentence[i]});
      if (queries.empty()) throw ValidationError("retrieve needs --sentence or --sentences");
      const auto corpus = load_corpus(ret_corpus);
      auto lists = score_matrix(corpus, queries, lex, s.tracker, s.jobs);
      if (ret_top > 0)
        for (auto& l : lists)
          if (l.entries.size() > ret_top) l.entries.resize(ret_top);
      emit(ranked_document(lists), ret_out);
      return 0;
    }
    if (*sim) {
      const Settings s = resolve(sim_c, sim_noise);
      if (!s.seed) throw ValidationError("simulate requires --seed (or run.seed in the config file)");
      const Manifest m = sim_manifest.empty() ? default_manifest() : parse_manifest(read_file(sim_manifest));
      if (!sim_dump.empty()) emit(serialize_manifest(m), sim_dump);
      if (sim_out.empty()) {
        if (sim_dump.empty()) throw ValidationError("simulate needs --out or --dump-manifest");
        return 0;
      }
      const Lexicon lex = lexicon_for(s);
      write_corpus(simulate_corpus(m, s.noise, *s.seed, lex), sim_out);
      return 0;
    }
    if (*ev) {
      const Settings s = resolve(ev_c);
      const Lexicon lex = lexicon_for(s);
      const EvalReport r = run_eval(load_eval_inputs(ev_corpus, !ev_no_gen), lex, s);
      emit(r.document, ev_out);
      if (!ev_timing.empty()) {
        emit(r.timing, ev_timing);
      } else {
        const auto t = nlohmann::json::parse(r.timing)["seconds_per_clip"];
        double total = 0;
        for (const auto& [_, v] : t.items()) total += v.get<double>();
        std::cerr << "wall-clock " << total << " s over " << t.size() << " clips\n";
      }
      return 0;
    }
    if (*orc) {
      const Settings s = resolve(or_c);
      if (or_trials == 0) {
        std::cerr << "warning: 0 trials, nothing checked\n";
        std::cout << "PASS 0 trials\n";
        return 0;
      }
      const auto rep = oracle_check(or_trials, s.seed.value_or(1), or_sizes, DecodeOptions{or_fault}, or_cap);
      if (rep.passed()) {
        std::cout << "PASS " << rep.trials << " trials, 0 divergences\n";
        return 0;
      }
      std::cout << "FAIL " << rep.divergences << " of " << rep.trials << " trials diverged\n"
                << rep.first_divergence << "\n";
      return kExitError;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
