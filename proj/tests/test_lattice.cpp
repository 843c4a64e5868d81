#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "sentrack/error.hpp"
#include "sentrack/lattice.hpp"
#include "sentrack/oracle.hpp"

using namespace sentrack;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Clip blank_clip(std::vector<int> J) {
  Clip clip;
  clip.id = "blank";
  for (std::size_t t = 0; t < J.size(); ++t) {
    Frame f;
    f.index = static_cast<int>(t) + 1;
    for (int j = 0; j < J[t]; ++j) {
      Detection d;
      d.box = {10.0 * j, 0, 10.0 * j + 5, 5};
      d.class_label = "person";
      f.detections.push_back(d);
    }
    clip.frames.push_back(f);
  }
  return clip;
}

void zero_scores(Lattice& lat) {
  for (auto& v : lat.f) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : lat.g) std::fill(v.begin(), v.end(), 0.0);
}

}  // namespace

TEST_CASE("log_sigmoid is stable at the extremes") {
  CHECK(log_sigmoid(0.0) == doctest::Approx(-std::log(2.0)));
  CHECK(log_sigmoid(1000.0) == 0.0);
  CHECK(log_sigmoid(-1000.0) == doctest::Approx(-1000.0));
  CHECK(std::isfinite(log_sigmoid(-1e300)));
  CHECK(log_sigmoid(2.0) == doctest::Approx(std::log(1.0 / (1.0 + std::exp(-2.0)))));
}

TEST_CASE("single track on a hand-scored two-frame lattice") {
  Lattice lat = build_lattice(blank_clip({2, 2}), 1, {}, {});
  lat.f = {{-1, -3}, {-2, -1}};
  lat.g[1] = {-5, -1, -1, -10};
  // paths: 11 -> -8, 12 -> -3, 21 -> -6, 22 -> -14
  const ScoredResult r = decode(lat);
  CHECK(r.tau == -3.0);
  REQUIRE(r.tracks.size() == 1);
  CHECK(r.tracks[0].indices == std::vector<int>{1, 2});
  CHECK(brute_force(lat).tracks == r.tracks);
}

TEST_CASE("ties resolve to the lexicographically smallest tuples") {
  auto rec = std::make_shared<const Recognizer>(std::vector<Atom>{Atom{}, Atom{}}, std::vector<std::uint8_t>{1, 0},
                                                std::vector<std::uint8_t>{0, 1},
                                                std::vector<std::uint8_t>{1, 1, 0, 1});
  Lattice lat = build_lattice(blank_clip({2, 2, 2}), 1, {{rec, {0}}}, {});
  zero_scores(lat);
  // holds[t][k * J + j]
  lat.words[0].holds = {{0, 1, 0, 0}, {1, 1, 1, 0}, {0, 0, 1, 1}};
  const ScoredResult r = decode(lat);
  CHECK(r.tau == 0.0);
  CHECK(r.tracks[0].indices == std::vector<int>{2, 1, 1});
  CHECK(r.word_states[0] == std::vector<int>{0, 0, 1});
  const ScoredResult b = brute_force(lat);
  CHECK(b.tracks == r.tracks);
  CHECK(b.word_states == r.word_states);
}

TEST_CASE("unsatisfiable word gives -inf and no tracks") {
  auto rec = std::make_shared<const Recognizer>(std::vector<Atom>{Atom{}}, std::vector<std::uint8_t>{1},
                                                std::vector<std::uint8_t>{1}, std::vector<std::uint8_t>{0});
  // one state without a self loop cannot span two frames
  Lattice lat = build_lattice(blank_clip({1, 1}), 1, {{rec, {0}}}, {});
  const ScoredResult r = decode(lat);
  CHECK(r.tau == kNegInf);
  CHECK(r.tracks.empty());
  CHECK(brute_force(lat).tau == kNegInf);
}

TEST_CASE("distinct detections forbid sharing a box") {
  TrackerConfig cfg;
  cfg.distinct_detections = true;
  CHECK(decode(build_lattice(blank_clip({1, 1}), 2, {}, cfg)).tau == kNegInf);
  const ScoredResult r = decode(build_lattice(blank_clip({2, 2}), 2, {}, cfg));
  REQUIRE(r.tracks.size() == 2);
  CHECK(r.tracks[0].indices != r.tracks[1].indices);
}

TEST_CASE("empty frame raises NoTrackError") {
  CHECK_THROWS_AS(build_lattice(blank_clip({2, 0, 1}), 1, {}, {}), NoTrackError);
}

TEST_CASE("decoder agrees with enumeration on random instances") {
  const OracleReport rep = oracle_check(200, 1234);
  INFO(rep.first_divergence);
  CHECK(rep.trials == 200);
  CHECK(rep.passed());
}

TEST_CASE("negated coherence is caught by the oracle") {
  DecodeOptions opts;
  opts.flip_coherence = true;
  const OracleReport rep = oracle_check(50, 99, {}, opts);
  CHECK_FALSE(rep.passed());
  CHECK(rep.first_divergence.find("decoder") != std::string::npos);
}

TEST_CASE("enumeration refuses instances over the cap") {
  Lattice lat = build_lattice(blank_clip({3, 3, 3, 3}), 2, {}, {});
  CHECK_THROWS_AS(brute_force(lat, 50), OracleCapError);
}

TEST_CASE("event_map on fixed tracks") {
  auto rec = std::make_shared<const Recognizer>(std::vector<Atom>{Atom{Pred::Person}},
                                                std::vector<std::uint8_t>{1}, std::vector<std::uint8_t>{1},
                                                std::vector<std::uint8_t>{1});
  Clip clip = blank_clip({1, 2});
  clip.frames[1].detections[1].class_label = "chair";
  const EventResult ok = event_map(clip, *rec, {Track{"blank", {1, 1}}}, {});
  CHECK(ok.score == 0.0);
  CHECK(ok.states == std::vector<int>{0, 0});
  const EventResult bad = event_map(clip, *rec, {Track{"blank", {1, 2}}}, {});
  CHECK(bad.score == kNegInf);
  CHECK(bad.states.empty());
}
