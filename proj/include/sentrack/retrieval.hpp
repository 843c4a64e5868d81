#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sentrack/lattice.hpp"

namespace sentrack {

/// judgments[clip_id][sentence_id] = depicted
using Judgments = std::map<std::string, std::map<std::string, bool>>;

struct RankedEntry {
  std::string clip_id;
  double tau = 0;
};

struct RankedList {
  std::string sentence_id;
  std::string sentence;
  std::vector<RankedEntry> entries;  // tau descending, ties by clip id
};

struct QuerySentence {
  std::string id;
  std::string text;
};

/// Number of worker threads to use when jobs <= 0.
int default_jobs();

/// Runs fn(0..n-1) on `jobs` threads; each index is handled exactly once.
/// The first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

RankedList score_corpus(const std::vector<Clip>& corpus, const QuerySentence& sentence, const Lexicon& lex,
                        const TrackerConfig& cfg, int jobs = 1);
/// One ranked list per sentence, in the order given.
std::vector<RankedList> score_matrix(const std::vector<Clip>& corpus, const std::vector<QuerySentence>& sentences,
                                     const Lexicon& lex, const TrackerConfig& cfg, int jobs = 1);

/// Fraction of lists whose first k entries contain a depicting clip.
/// Throws ValidationError on a missing judgment.
double evaluate_topk(const std::vector<RankedList>& lists, const Judgments& j, int k);
/// Fraction of (clip, sentence) pairs judged depicted.
double base_rate(const std::vector<RankedList>& lists, const Judgments& j);

struct CvResult {
  double mean_accuracy = 0;
  std::vector<double> thresholds;  // per evaluated fold; predict depicted when tau > threshold
  std::vector<double> accuracies;
  std::vector<std::string> warnings;
};

/// Folds partition the clips (seeded shuffle of the sorted ids). Each fold's
/// threshold maximizes accuracy over the other folds' pairs, scanning
/// midpoints between sorted training scores; accuracy is measured on the
/// held-out pairs. Single-class training folds are skipped with a warning.
CvResult threshold_cv(const std::vector<RankedList>& lists, const Judgments& j, int folds, std::uint64_t seed);

/// "clip<TAB>sentence<TAB>0|1" per line; '#' starts a comment.
Judgments read_judgments(const std::filesystem::path& path);
/// "id<TAB>text" per line.
std::vector<QuerySentence> read_sentences(const std::filesystem::path& path);
/// Every *.json clip file in the directory, sorted by clip id.
std::vector<Clip> load_corpus(const std::filesystem::path& dir);

}  // namespace sentrack
