#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sentrack/annotator.hpp"
#include "sentrack/clip.hpp"
#include "sentrack/lexicon.hpp"

namespace sentrack {

enum class EventKind { Approach, CarryTowards, CarryAway, PickUp, PutDown };
enum class Speed { Slow, Quick };
enum class Side { None, Left, Right };

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

struct ObjectSpec {
  std::string cls;            // person, backpack, chair, trashcan
  std::optional<double> hue;  // unset: a random hue that is neither red nor blue
};

struct EventSpec {
  EventKind kind = EventKind::Approach;
  ObjectSpec actor;   // the mover for Approach, the person otherwise
  ObjectSpec object;  // carried, picked up or put down; unused by Approach
  // PutDown: the person beside the referent. PickUp: the object beside it.
  Side side = Side::None;
  Speed speed = Speed::Slow;
  bool up = true;  // vertical direction of a carry
};

struct ScenarioSpec {
  std::string id;
  // Goal of Approach and carry events, anchor of side constraints.
  std::optional<ObjectSpec> referent;
  std::vector<EventSpec> events;  // one lane per event
  int distractors = 0;
  int width = 640;
  int height = 480;
  int T = 30;
  bool carry_horizontal = false;

  void validate() const;
};

struct NoiseModel {
  double box_jitter = 0;     // sigma, pixels, per box coordinate
  double score_sigma = 0;
  double fp_rate = 0;        // mean false positives per frame
  double misclass_rate = 0;
  double hue_jitter = 0;     // uniform, degrees

  static NoiseModel none() { return {}; }
  /// The noisy setting used for retrieval: jitter 3px, 0.5 false positives per frame.
  static NoiseModel standard() { return {3.0, 0.5, 0.5, 0.0, 0.0}; }
  void validate() const;
};

struct BenchmarkSentence {
  std::string id;  // "1a" .. "9b", "10", "11", "12"
  std::string text;
};
/// The 21 sentences the corpus is judged against.
const std::vector<BenchmarkSentence>& benchmark_sentences();

struct SimClip {
  Clip clip;                         // with noise applied
  std::vector<ObjectTrack> objects;  // noiseless, referent first
  std::vector<int> actors;           // object index of each event's actor
  std::set<std::string> truth;       // depicted benchmark sentence ids
};

/// Deterministic given the seed. Throws ValidationError when the scene does
/// not fit the canvas or the timeline.
SimClip simulate_clip(const ScenarioSpec& spec, const NoiseModel& noise, std::uint64_t seed,
                      const Lexicon& lex = builtin_lexicon());

/// Judgment of every benchmark sentence from noiseless object tracks.
std::set<std::string> annotate_benchmark(const std::vector<ObjectTrack>& objects, const Lexicon& lex,
                                         const Constants& c);

struct Manifest {
  std::vector<ScenarioSpec> clips;
  // Every benchmark sentence must be depicted at least this often.
  int min_depictions = 2;
};

Manifest parse_manifest(const std::string& text);
std::string serialize_manifest(const Manifest& m);
/// 40 clips: every minimal pair in both variants, ten two-event clips.
Manifest default_manifest();
/// Two-event clips pairing the a and b variants of minimal pairs 1-5, 7
/// and 9; event 0 depicts the a sentence, event 1 the b sentence.
struct PairScenario {
  int pair = 0;
  ScenarioSpec spec;
};
std::vector<PairScenario> minimal_pair_scenarios(int count, std::uint64_t seed);

struct Corpus {
  std::vector<SimClip> clips;
  /// judgments[clip_id][sentence_id]
  std::map<std::string, std::map<std::string, bool>> judgments;
};

/// Simulates every clip (seeded per clip) and checks sentence coverage;
/// throws ValidationError listing under-covered sentences.
Corpus simulate_corpus(const Manifest& m, const NoiseModel& noise, std::uint64_t seed,
                       const Lexicon& lex = builtin_lexicon());

/// Noiseless object tracks as JSON, referent first.
std::string serialize_objects(const std::vector<ObjectTrack>& objects);
std::vector<ObjectTrack> parse_objects(const std::string& text);
std::vector<ObjectTrack> load_objects(const std::filesystem::path& path);

/// Writes <id>.json per clip, truth/<id>.json with the noiseless objects,
/// judgments.tsv and sentences.tsv.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace sentrack
