#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "sentrack/result_io.hpp"
#include "sentrack/scene_sim.hpp"

using namespace sentrack;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("tau formatting") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(format_tau(-inf) == "\"-inf\"");
  CHECK(parse_tau("-inf") == -inf);
  CHECK(parse_tau("\"-inf\"") == -inf);
  CHECK(parse_tau(format_tau(-3.25)) == -3.25);
  CHECK(parse_tau(format_tau(inf)) == inf);
}

TEST_CASE("role colours") {
  CHECK(role_colour(Role::Agent) == "red");
  CHECK(role_colour(Role::Patient) == "blue");
  CHECK(role_colour(Role::Source) == "violet");
  CHECK(role_colour(Role::Goal) == "turquoise");
  CHECK(role_colour(Role::Referent) == "green");
}

TEST_CASE("result document and overlays") {
  const Manifest m = default_manifest();
  const auto sim = simulate_clip(m.clips[0], NoiseModel::standard(), 11);
  const auto st = sentence_track(sim.clip, "The backpack approached the trash can", builtin_lexicon(), TrackerConfig{});
  REQUIRE(std::isfinite(st.result.tau));
  const auto doc = nlohmann::json::parse(result_document(sim.clip, "The backpack approached the trash can",
                                                          st.analysis, st.result));
  CHECK(doc["clip"] == sim.clip.id);
  REQUIRE(doc["tracks"].size() == 2);
  CHECK(doc["tracks"][0]["participant"] == 1);
  CHECK(doc["tracks"][0]["role"] == "agent");
  CHECK(doc["tracks"][1]["role"] == "goal");
  CHECK(doc["tracks"][0]["detections"].size() == sim.clip.num_frames());
  CHECK(doc["words"].size() == st.analysis.mapping.words.size());

  const auto dir = std::filesystem::temp_directory_path() / "sentrack_overlay_test";
  std::filesystem::remove_all(dir);
  const auto files = write_overlays(sim.clip, st.analysis.mapping, st.result, dir);
  CHECK(files.size() == sim.clip.num_frames());
  CHECK(files.front().filename() == "frame_0001.svg");
  const std::string svg = slurp(files.front());
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("red") != std::string::npos);
  CHECK(svg.find("turquoise") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("an unsatisfied sentence still has a document") {
  const auto sim = simulate_clip(default_manifest().clips[0], NoiseModel::none(), 11);
  const auto st = sentence_track(sim.clip, "The person picked up the chair", builtin_lexicon(), TrackerConfig{});
  CHECK(std::isinf(st.result.tau));
  const auto doc = nlohmann::json::parse(result_document(sim.clip, "x", st.analysis, st.result));
  CHECK(doc["tau"] == "-inf");
  CHECK(doc["tracks"].empty());
}

TEST_CASE("ranked document") {
  const std::vector<RankedList> lists{{"1a", "s", {{"c2", -1}, {"c1", -std::numeric_limits<double>::infinity()}}}};
  const auto doc = nlohmann::json::parse(ranked_document(lists));
  CHECK(doc[0]["ranking"][0]["rank"] == 1);
  CHECK(doc[0]["ranking"][1]["tau"] == "-inf");
}
