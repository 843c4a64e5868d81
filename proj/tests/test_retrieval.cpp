#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "sentrack/error.hpp"
#include "sentrack/retrieval.hpp"
#include "sentrack/scene_sim.hpp"

using namespace sentrack;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

RankedList list(std::string sid, std::vector<RankedEntry> e) { return RankedList{std::move(sid), "", std::move(e)}; }

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw ValidationError("boom"); }),
                  ValidationError);
  CHECK(default_jobs() >= 1);
}

TEST_CASE("ranking order and -inf at the bottom") {
  const Manifest m = default_manifest();
  std::vector<Clip> corpus;
  for (int i = 0; i < 4; ++i)
    corpus.push_back(simulate_clip(m.clips[static_cast<std::size_t>(i)], NoiseModel::none(), 7).clip);
  const QuerySentence q{"1a", "The backpack approached the trash can."};
  const auto serial = score_corpus(corpus, q, builtin_lexicon(), TrackerConfig{}, 1);
  const auto par = score_corpus(corpus, q, builtin_lexicon(), TrackerConfig{}, 3);
  REQUIRE(serial.entries.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(serial.entries[i].clip_id == par.entries[i].clip_id);
    CHECK((serial.entries[i].tau == par.entries[i].tau || (std::isinf(serial.entries[i].tau) && std::isinf(par.entries[i].tau))));
  }
  for (std::size_t i = 1; i < 4; ++i) {
    const auto& a = serial.entries[i - 1];
    const auto& b = serial.entries[i];
    CHECK((a.tau > b.tau || (a.tau == b.tau && a.clip_id < b.clip_id)));
  }
  const auto lists = score_matrix(corpus, {q, {"x", "The chair approached the trash can."}}, builtin_lexicon(),
                                  TrackerConfig{}, 2);
  CHECK(lists.size() == 2);
  CHECK(lists[1].sentence_id == "x");
  // ranking survives a strictly monotone transform of tau
  auto squashed = serial;
  for (auto& e : squashed.entries) e.tau = std::exp(e.tau);
  for (std::size_t i = 1; i < 4; ++i) CHECK(squashed.entries[i - 1].tau >= squashed.entries[i].tau);
  CHECK_THROWS_AS(score_matrix(corpus, {{"z", "The zebra left"}}, builtin_lexicon(), TrackerConfig{}), ParseError);
}

TEST_CASE("top-k accuracy and base rate") {
  const std::vector<RankedList> lists{list("s", {{"c1", -1}, {"c2", -2}, {"c3", kNegInf}}),
                                      list("t", {{"c3", -1}, {"c1", -2}, {"c2", -3}})};
  Judgments j;
  j["c1"] = {{"s", false}, {"t", true}};
  j["c2"] = {{"s", true}, {"t", false}};
  j["c3"] = {{"s", false}, {"t", false}};
  CHECK(evaluate_topk(lists, j, 1) == 0.0);
  CHECK(evaluate_topk(lists, j, 2) == 1.0);
  CHECK(base_rate(lists, j) == doctest::Approx(2.0 / 6));
  j["c3"].erase("t");
  CHECK_THROWS_AS(evaluate_topk(lists, j, 1), ValidationError);
}

TEST_CASE("cross-validated threshold") {
  // separable: depicted clips score higher
  std::vector<RankedEntry> e;
  Judgments j;
  for (int i = 0; i < 12; ++i) {
    const std::string id = "c" + std::to_string(10 + i);
    const bool yes = i % 3 == 0;
    e.push_back({id, yes ? -1.0 - i * 0.01 : (i % 2 ? kNegInf : -20.0 - i)});
    j[id]["s"] = yes;
  }
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.tau > b.tau; });
  const auto r = threshold_cv({list("s", e)}, j, 4, 3);
  CHECK(r.mean_accuracy == 1.0);
  CHECK(r.thresholds.size() == 4);
  CHECK(threshold_cv({list("s", e)}, j, 4, 3).thresholds == r.thresholds);

  // identical scores cannot separate: the majority class wins
  for (auto& x : e) x.tau = -5;
  const auto flat = threshold_cv({list("s", e)}, j, 4, 3);
  CHECK(flat.mean_accuracy == doctest::Approx(8.0 / 12).epsilon(0.2));
  for (double t : flat.thresholds) CHECK(t >= -5);
}

TEST_CASE("single-class training folds are skipped") {
  std::vector<RankedEntry> e;
  Judgments j;
  for (int i = 0; i < 8; ++i) {
    const std::string id = "c" + std::to_string(i);
    e.push_back({id, -1.0 * i});
    j[id]["s"] = i == 0;
  }
  const auto r = threshold_cv({list("s", e)}, j, 4, 1);
  CHECK(r.warnings.size() == 1);
  CHECK(r.thresholds.size() == 3);
}

TEST_CASE("judgment and sentence files") {
  const auto p = write_temp("sentrack_j.tsv", "# clip sentence depicted\nc1\t1a\t1\nc1\t1b\t0\n\nc2\t1a\t0\n");
  const Judgments j = read_judgments(p);
  CHECK(j.at("c1").at("1a"));
  CHECK_FALSE(j.at("c1").at("1b"));
  CHECK(j.size() == 2);
  write_temp("sentrack_j.tsv", "c1\t1a\t1\nc1\t1a\t0\n");
  CHECK_THROWS_AS(read_judgments(p), Error);
  write_temp("sentrack_j.tsv", "c1\t1a\tmaybe\n");
  CHECK_THROWS_AS(read_judgments(p), Error);
  std::filesystem::remove(p);

  const auto s = write_temp("sentrack_s.tsv", "1a\tThe backpack approached the trash can.\n");
  const auto q = read_sentences(s);
  REQUIRE(q.size() == 1);
  CHECK(q[0].text == "The backpack approached the trash can.");
  std::filesystem::remove(s);
}
