#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sentrack/lattice.hpp"

namespace sentrack {

struct GenConfig {
  int beam_width = 20;
  double contraction_threshold = 0.90;  // in (0, 1]
  int max_words = 16;
  bool np_recursion = true;  // false: no PP inside NP

  void validate() const;
};

struct BeamItem {
  std::vector<std::string> words;
  double tau = 0;
  bool complete = false;  // words form a sentence
};

/// Lemmas the generator may emit, sorted. Determiners collapse to "the" (or
/// the first determiner when the lexicon lacks it), since they never change
/// a score.
std::vector<std::string> generation_vocabulary(const Lexicon& lex);

/// True iff inserting words turns `seq` into a sentence of at most max_words
/// words. Unknown lemmas make it false.
bool completable(const std::vector<std::string>& seq, const Lexicon& lex, const GenConfig& cfg);

/// Score of a possibly incomplete word sequence: missing noun phrases become
/// unconstrained participants. -inf when the words cannot start a sentence.
double score_words(const Clip& clip, const std::vector<std::string>& words, const Lexicon& lex,
                   const TrackerConfig& cfg);

struct Generated {
  std::vector<std::string> words;
  std::string sentence;
  SentenceResult tracked;
};

/// Beam search by end extension. Stops at the top item once it is a sentence
/// and exp(tau_child - tau_item) for its best extension falls below the
/// contraction threshold. Empty when no finite-score sentence exists.
std::optional<Generated> generate(const Clip& clip, const Lexicon& lex, const TrackerConfig& tcfg,
                                  const GenConfig& gcfg, std::vector<BeamItem>* trace = nullptr);

/// Best sentence of exactly `length` words by exhaustive enumeration over the
/// grammar (with gcfg.np_recursion), ties broken by word order.
std::optional<BeamItem> best_sentence_exhaustive(const Clip& clip, const Lexicon& lex, const TrackerConfig& tcfg,
                                                 const GenConfig& gcfg, int length);

}  // namespace sentrack
