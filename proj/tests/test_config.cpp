#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "sentrack/config.hpp"
#include "sentrack/error.hpp"

using namespace sentrack;

namespace {

std::filesystem::path ini(const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / "sentrack_test.ini";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("ini file") {
  const auto p = ini("[tracker]\ntop_k = 7\n\n[constants]\nnextTo = 60\n; comment\n[run]\nseed = 12\n");
  const ConfigMap m = read_config_file(p);
  CHECK(m.at("tracker.top_k") == "7");
  CHECK(m.at("constants.nextTo") == "60");
  Settings s;
  apply_config(s, m);
  CHECK(s.tracker.top_k == 7);
  CHECK(s.tracker.constants.next_to == 60);
  CHECK(s.seed == 12u);
  ini("top_k = 7\n");
  CHECK_THROWS_AS(read_config_file(p), ParseError);
  std::filesystem::remove(p);
  CHECK_THROWS(read_config_file(p));
}

TEST_CASE("later entries win") {
  Settings s;
  apply_config(s, {{"tracker.top_k", "7"}});
  apply_config(s, {{"tracker.top_k", "3"}, {"generation.beam_width", "4"}});
  CHECK(s.tracker.top_k == 3);
  CHECK(s.generation.beam_width == 4);
}

TEST_CASE("assignments") {
  CHECK(parse_assignment("noise.fp_rate=0.25") == std::pair<std::string, std::string>{"noise.fp_rate", "0.25"});
  CHECK(parse_assignment(" run.overlay = off ").second == "off");
  CHECK_THROWS(parse_assignment("noise.fp_rate"));
  CHECK_THROWS(parse_assignment("fp_rate=1"));
}

TEST_CASE("bad keys and values") {
  Settings s;
  try {
    apply_config(s, {{"tracker.top_kk", "3"}});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("tracker.top_kk") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_config(s, {{"tracker.top_k", "three"}}), ValidationError);
  CHECK_THROWS_AS(apply_config(s, {{"tracker.top_k", "0"}}), ValidationError);
  CHECK_THROWS_AS(apply_config(s, {{"run.folds", "1"}}), ValidationError);
  CHECK_THROWS_AS(apply_config(s, {{"generation.contraction_threshold", "1.5"}}), ValidationError);
  CHECK_THROWS_AS(apply_config(s, {{"noise.box_jitter", "-1"}}), ValidationError);
}

TEST_CASE("overlay off") {
  Settings s;
  apply_config(s, {{"run.overlay", "out/frames"}});
  CHECK(s.overlay == "out/frames");
  apply_config(s, {{"run.overlay", "off"}});
  CHECK(s.overlay.empty());
}

TEST_CASE("key list") {
  const auto keys = config_keys();
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(std::count(keys.begin(), keys.end(), "constants.deltaStatic") == 1);
  CHECK(std::count(keys.begin(), keys.end(), "run.jobs") == 1);
  for (const auto& k : keys) CHECK(k.find('.') != std::string::npos);
}
