#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sentrack/error.hpp"
#include "sentrack/generation.hpp"
#include "sentrack/scene_sim.hpp"

using namespace sentrack;

namespace {

const Lexicon& lex() { return builtin_lexicon(); }

using Words = std::vector<std::string>;

SimClip sample(int i, const NoiseModel& noise = NoiseModel::none()) {
  const Manifest m = default_manifest();
  return simulate_clip(m.clips[static_cast<std::size_t>(i)], noise, 100 + static_cast<std::uint64_t>(i));
}

}  // namespace

TEST_CASE("vocabulary") {
  const auto v = generation_vocabulary(lex());
  CHECK(v.size() == 18);
  CHECK(std::count(v.begin(), v.end(), "the") == 1);
  CHECK(std::count(v.begin(), v.end(), "an") == 0);
  CHECK(std::is_sorted(v.begin(), v.end()));
}

TEST_CASE("completable") {
  const GenConfig g;
  CHECK(completable({}, lex(), g));
  CHECK(completable({"person"}, lex(), g));
  CHECK(completable({"the", "person", "approached"}, lex(), g));
  CHECK(completable({"person", "backpack"}, lex(), g));  // insert "picked up"
  CHECK_FALSE(completable({"quickly", "quickly", "quickly"}, lex(), g));
  CHECK_FALSE(completable({"zebra"}, lex(), g));
  GenConfig shortcfg;
  shortcfg.max_words = 5;
  CHECK(completable({"the", "person", "approached", "the"}, lex(), shortcfg));
  CHECK_FALSE(completable({"the", "red", "person", "approached", "the"}, lex(), shortcfg));
}

TEST_CASE("extending never raises the score") {
  const auto sim = sample(0);
  const TrackerConfig cfg;
  const Words full = tokenize("The backpack approached the trash can", lex());
  double prev = 0;
  for (std::size_t n = 1; n <= full.size(); ++n) {
    const Words prefix(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));
    const double tau = score_words(sim.clip, prefix, lex(), cfg);
    INFO(n);
    if (n > 1) CHECK(tau <= prev + 1e-9);
    prev = tau;
  }
  CHECK(std::isinf(score_words(sim.clip, {"approached", "approached"}, lex(), cfg)));
}

TEST_CASE("generated sentences are depicted") {
  const TrackerConfig cfg;
  GenConfig g;
  for (int i : {0, 5, 12}) {
    const auto sim = sample(i);
    const auto out = generate(sim.clip, lex(), cfg, g);
    REQUIRE(out);
    INFO(sim.clip.id << ": " << out->sentence);
    CHECK(std::isfinite(out->tracked.result.tau));
    CHECK(Annotator(sim.objects, lex(), cfg.constants).depicted(out->sentence));
    CHECK(static_cast<int>(out->words.size()) <= g.max_words);
  }
}

TEST_CASE("a stricter contraction threshold stops no later") {
  const auto sim = sample(3);
  const TrackerConfig cfg;
  GenConfig loose, strict;
  loose.contraction_threshold = 0.2;
  strict.contraction_threshold = 1.0;
  const auto a = generate(sim.clip, lex(), cfg, loose);
  const auto b = generate(sim.clip, lex(), cfg, strict);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(b->words.size() <= a->words.size());
  GenConfig bad;
  bad.contraction_threshold = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("beam agrees with exhaustive search") {
  const TrackerConfig cfg;
  GenConfig g;
  g.np_recursion = false;
  g.max_words = 8;
  for (int i : {1, 7}) {
    const auto sim = sample(i);
    const auto out = generate(sim.clip, lex(), cfg, g);
    REQUIRE(out);
    const int n = static_cast<int>(out->words.size());
    const auto best = best_sentence_exhaustive(sim.clip, lex(), cfg, g, n);
    REQUIRE(best);
    INFO(sim.clip.id << ": " << out->sentence);
    CHECK(best->tau == doctest::Approx(out->tracked.result.tau));
  }
}

TEST_CASE("a clip without detections has no track") {
  Clip c;
  c.id = "empty";
  for (int t = 1; t <= 3; ++t) c.frames.push_back(Frame{t, {}});
  CHECK_THROWS_AS(generate(c, lex(), TrackerConfig{}, GenConfig{}), NoTrackError);
}
