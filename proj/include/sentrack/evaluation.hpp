#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sentrack/annotator.hpp"
#include "sentrack/config.hpp"
#include "sentrack/retrieval.hpp"

namespace sentrack {

struct EvalInputs {
  std::vector<Clip> clips;
  Judgments judgments;
  std::vector<QuerySentence> sentences;
  // Noiseless objects per clip id; needed for the generation truth rate.
  std::map<std::string, std::vector<ObjectTrack>> truth;
};

/// Clips, judgments.tsv, sentences.tsv and, when `with_truth`, truth/<id>.json.
EvalInputs load_eval_inputs(const std::filesystem::path& dir, bool with_truth);

struct EvalReport {
  std::string document;  // JSON, a pure function of inputs and settings
  std::string timing;    // JSON, wall-clock seconds per clip
  double top1 = 0;
  double top3 = 0;
  double base = 0;
  CvResult cv;
  double generation_truth_rate = 0;  // 0 when generation is skipped
};

/// Retrieval metrics, threshold cross-validation (settings.folds, seed
/// default 17) and, when truth objects are present, the fraction of clips
/// whose generated sentence the annotator judges depicted.
EvalReport run_eval(const EvalInputs& in, const Lexicon& lex, const Settings& settings);

}  // namespace sentrack
