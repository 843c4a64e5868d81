#include "sentrack/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <optional>

#include <json.hpp>

#include "sentrack/error.hpp"
#include "sentrack/generation.hpp"
#include "sentrack/scene_sim.hpp"

namespace sentrack {

using nlohmann::json;

namespace {

json number_or_inf(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}

}  // namespace

EvalInputs load_eval_inputs(const std::filesystem::path& dir, bool with_truth) {
  EvalInputs in;
  in.clips = load_corpus(dir);
  in.judgments = read_judgments(dir / "judgments.tsv");
  in.sentences = read_sentences(dir / "sentences.tsv");
  if (with_truth)
    for (const auto& c : in.clips) in.truth[c.id] = load_objects(dir / "truth" / (c.id + ".json"));
  return in;
}

EvalReport run_eval(const EvalInputs& in, const Lexicon& lex, const Settings& settings) {
  using Clock = std::chrono::steady_clock;
  const std::uint64_t seed = settings.seed.value_or(17);
  const std::size_t C = in.clips.size();
  std::vector<double> seconds(C, 0.0);

  // Scoring is timed per clip: all sentences against one clip.
  std::vector<double> tau(C * in.sentences.size());
  std::vector<Analysis> parsed;
  for (const auto& s : in.sentences) parsed.push_back(analyze(s.text, lex));
  parallel_for(C, settings.jobs, [&](std::size_t c) {
    const auto start = Clock::now();
    for (std::size_t s = 0; s < in.sentences.size(); ++s) {
      try {
        tau[s * C + c] = sentence_track(in.clips[c], parsed[s].mapping, lex, settings.tracker).tau;
      } catch (const NoTrackError&) {
        tau[s * C + c] = -std::numeric_limits<double>::infinity();
      }
    }
    seconds[c] += std::chrono::duration<double>(Clock::now() - start).count();
  });
  std::vector<RankedList> lists;
  for (std::size_t s = 0; s < in.sentences.size(); ++s) {
    RankedList l{in.sentences[s].id, in.sentences[s].text, {}};
    for (std::size_t c = 0; c < C; ++c) l.entries.push_back({in.clips[c].id, tau[s * C + c]});
    std::sort(l.entries.begin(), l.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
      return a.tau != b.tau ? a.tau > b.tau : a.clip_id < b.clip_id;
    });
    lists.push_back(std::move(l));
  }

  EvalReport r;
  r.top1 = evaluate_topk(lists, in.judgments, 1);
  r.top3 = evaluate_topk(lists, in.judgments, 3);
  r.base = base_rate(lists, in.judgments);
  r.cv = threshold_cv(lists, in.judgments, settings.folds, seed);

  json doc = {{"clips", C},
              {"sentences", in.sentences.size()},
              {"top1", r.top1},
              {"top3", r.top3},
              {"base_rate", r.base}};
  json thresholds = json::array();
  for (double t : r.cv.thresholds) thresholds.push_back(number_or_inf(t));
  doc["cv"] = {{"folds", settings.folds},
               {"seed", seed},
               {"mean_accuracy", r.cv.mean_accuracy},
               {"thresholds", std::move(thresholds)},
               {"accuracies", r.cv.accuracies},
               {"warnings", r.cv.warnings}};

  json top = json::array();
  for (const auto& l : lists) {
    json best = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(3, l.entries.size()); ++i)
      best.push_back({{"clip", l.entries[i].clip_id}, {"tau", number_or_inf(l.entries[i].tau)}});
    top.push_back({{"sentence_id", l.sentence_id}, {"top3", std::move(best)}});
  }
  doc["rankings"] = std::move(top);

  if (!in.truth.empty()) {
    std::vector<std::optional<Generated>> gen(C);
    std::vector<char> hit(C, 0);
    parallel_for(C, settings.jobs, [&](std::size_t c) {
      const auto start = Clock::now();
      gen[c] = generate(in.clips[c], lex, settings.tracker, settings.generation);
      auto it = in.truth.find(in.clips[c].id);
      if (it == in.truth.end()) throw ValidationError("no truth objects for clip " + in.clips[c].id);
      if (gen[c]) {
        const Annotator a(it->second, lex, settings.tracker.constants);
        hit[c] = a.depicted(gen[c]->tracked.analysis.mapping);
      }
      seconds[c] += std::chrono::duration<double>(Clock::now() - start).count();
    });
    json rows = json::array();
    std::size_t hits = 0;
    for (std::size_t c = 0; c < C; ++c) {
      hits += hit[c] ? 1 : 0;
      json row = {{"clip", in.clips[c].id}, {"in_truth", static_cast<bool>(hit[c])}};
      if (gen[c]) {
        row["sentence"] = gen[c]->sentence;
        row["tau"] = number_or_inf(gen[c]->tracked.result.tau);
      } else {
        row["sentence"] = nullptr;
      }
      rows.push_back(std::move(row));
    }
    r.generation_truth_rate = C == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(C);
    doc["generation"] = {{"truth_rate", r.generation_truth_rate},
                         {"beam_width", settings.generation.beam_width},
                         {"contraction_threshold", settings.generation.contraction_threshold},
                         {"clips", std::move(rows)}};
  }
  r.document = doc.dump(1) + "\n";

  json timing = json::object();
  for (std::size_t c = 0; c < C; ++c) timing[in.clips[c].id] = seconds[c];
  r.timing = json{{"seconds_per_clip", std::move(timing)}}.dump(1) + "\n";
  return r;
}

}  // namespace sentrack
