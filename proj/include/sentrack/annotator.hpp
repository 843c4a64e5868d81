#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sentrack/linguistics.hpp"
#include "sentrack/predicates.hpp"

namespace sentrack {

/// Noiseless trajectory of one scene object, one detection per frame.
struct ObjectTrack {
  std::string name;
  std::vector<Detection> frames;
};

/// Judges sentences against known object trajectories: a sentence is
/// depicted when some assignment of distinct objects to its participants
/// makes every word's recognizer accept. Shares no code with the tracker.
class Annotator {
 public:
  Annotator(std::vector<ObjectTrack> objects, const Lexicon& lex, Constants c);

  bool depicted(std::string_view sentence) const;
  bool depicted(const ArgumentMapping& mapping) const;
  /// Object index per participant for the first satisfying assignment in
  /// lexicographic order, or empty.
  std::vector<int> witness(const ArgumentMapping& mapping) const;

 private:
  bool word_holds(const WordArgs& w, const std::vector<int>& assign) const;

  std::vector<ObjectTrack> objects_;
  const Lexicon& lex_;
  Constants c_;
  int T_ = 0;
};

}  // namespace sentrack
