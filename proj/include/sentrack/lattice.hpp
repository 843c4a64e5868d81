#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "sentrack/clip.hpp"
#include "sentrack/linguistics.hpp"
#include "sentrack/predicates.hpp"
#include "sentrack/regex.hpp"

namespace sentrack {

struct TrackerConfig {
  int top_k = 5;
  double mu_f = 0.0;   // detection sigmoid midpoint
  double s_f = 1.0;    // detection sigmoid scale
  double mu_g = 30.0;  // coherence sigmoid midpoint, pixels
  double s_g = 10.0;   // coherence sigmoid scale, pixels
  // Forbid two participants from selecting the same detection in a frame.
  bool distinct_detections = false;
  Constants constants;

  void validate() const;
};

/// log(1 / (1 + exp(-x))) without overflow; finite for finite x.
double log_sigmoid(double x);
double score_f(double raw_score, const TrackerConfig& cfg);
/// Coherence between consecutive detections, from the distance between the
/// current center and the forward-projected previous center.
double score_g(const Detection& prev, const Detection& cur, const TrackerConfig& cfg);

struct ScoredResult {
  double tau = 0;
  std::vector<Track> tracks;                   // one per participant; empty when tau is -inf
  std::vector<std::vector<int>> word_states;   // per word, 0-based state per frame
};

/// Precomputed scores of the cross-product lattice. Decoding reads only this,
/// so tests may edit the tables directly.
struct Lattice {
  struct Word {
    std::shared_ptr<const Recognizer> rec;
    std::vector<int> args;  // participant per recognizer argument
    // holds[t][(k * J + j1) * J + j2 ...]: state k's atom holds on the
    // argument detections at frame t.
    std::vector<std::vector<std::uint8_t>> holds;
  };

  std::string clip_id;
  int T = 0;
  int L = 0;
  std::vector<int> J;                    // detections per frame after pruning
  std::vector<std::vector<int>> source;  // original 0-based index of each kept detection
  std::vector<std::vector<double>> f;    // f[t][j]
  std::vector<std::vector<double>> g;    // g[t][jp * J[t] + j] for t >= 1
  std::vector<Word> words;
  bool distinct = false;

  int W() const { return static_cast<int>(words.size()); }
  /// Number of tuples (j_1..j_L, k_1..k_W) at frame t.
  std::size_t tuples(int t) const;
};

/// A recognizer bound to participants, for lattices built without a sentence.
struct BoundWord {
  std::shared_ptr<const Recognizer> rec;
  std::vector<int> args;
};

/// Prunes to top_k, then fills the tables. Throws NoTrackError on a frame
/// without detections.
Lattice build_lattice(const Clip& clip, int num_participants, const std::vector<BoundWord>& words,
                      const TrackerConfig& cfg);
Lattice build_lattice(const Clip& clip, const ArgumentMapping& mapping, const Lexicon& lex, const TrackerConfig& cfg);

struct DecodeOptions {
  // Deliberate fault for exercising the oracle check: coherence scores are
  // negated inside the decoder only.
  bool flip_coherence = false;
};

/// Joint Viterbi over the lattice. Ties go to the lexicographically smallest
/// predecessor tuple and, at the last frame, the smallest final tuple.
ScoredResult decode(const Lattice& lat, const DecodeOptions& opts = {});

/// Exhaustive search over joint paths with the decoder's arithmetic and tie
/// rule. Throws OracleCapError when more than `cap` path prefixes are live.
ScoredResult brute_force(const Lattice& lat, std::size_t cap = 10'000'000);

ScoredResult track_single(const Clip& clip, const TrackerConfig& cfg);

/// MAP state sequence of one recognizer with its arguments fixed to tracks.
/// Score is 0 when the tracks are accepted, else -inf (states then empty).
struct EventResult {
  double score = 0;
  std::vector<int> states;
};
EventResult event_map(const Clip& clip, const Recognizer& rec, const std::vector<Track>& args, const Constants& c);

struct SentenceResult {
  Analysis analysis;
  ScoredResult result;
};

SentenceResult sentence_track(const Clip& clip, std::string_view sentence, const Lexicon& lex,
                              const TrackerConfig& cfg);
ScoredResult sentence_track(const Clip& clip, const ArgumentMapping& mapping, const Lexicon& lex,
                            const TrackerConfig& cfg);
SentenceResult brute_force_oracle(const Clip& clip, std::string_view sentence, const Lexicon& lex,
                                  const TrackerConfig& cfg, std::size_t cap = 10'000'000);

}  // namespace sentrack
