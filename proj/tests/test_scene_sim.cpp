#include <doctest.h>

#include <filesystem>

#include "sentrack/annotator.hpp"
#include "sentrack/error.hpp"
#include "sentrack/scene_sim.hpp"

using namespace sentrack;

namespace {

ScenarioSpec approach(std::string id) {
  ScenarioSpec s;
  s.id = std::move(id);
  s.referent = ObjectSpec{"chair", std::nullopt};
  EventSpec e;
  e.kind = EventKind::Approach;
  e.actor = ObjectSpec{"person", std::nullopt};
  s.events.push_back(e);
  return s;
}

}  // namespace

TEST_CASE("simulation is deterministic in the seed") {
  const auto spec = approach("a");
  const auto x = simulate_clip(spec, NoiseModel::standard(), 5);
  const auto y = simulate_clip(spec, NoiseModel::standard(), 5);
  const auto z = simulate_clip(spec, NoiseModel::standard(), 6);
  CHECK(serialize_clip(x.clip) == serialize_clip(y.clip));
  CHECK(serialize_clip(x.clip) != serialize_clip(z.clip));
  CHECK(validate_clip(x.clip).empty());
  CHECK(x.clip.num_frames() == 30);
}

TEST_CASE("noiseless flow matches the displacement") {
  const auto sim = simulate_clip(approach("a"), NoiseModel::none(), 3);
  int moving = 0;
  for (const auto& o : sim.objects)
    for (std::size_t t = 0; t + 1 < o.frames.size(); ++t) {
      const Vec2 d = o.frames[t + 1].box.center() - o.frames[t].box.center();
      CHECK(o.frames[t].flow.x() == doctest::Approx(d.x()));
      CHECK(o.frames[t].flow.y() == doctest::Approx(-d.y()));
      moving += o.frames[t].flow.norm() > 0 ? 1 : 0;
    }
  CHECK(moving > 0);
  // without noise every frame holds exactly the objects
  for (const auto& f : sim.clip.frames) CHECK(f.detections.size() == sim.objects.size());
}

TEST_CASE("approach is judged depicted") {
  const auto sim = simulate_clip(approach("a"), NoiseModel::none(), 3);
  // no benchmark sentence has a person approach a chair
  CHECK(sim.truth.count("1a") == 0);
  const Annotator ann(sim.objects, builtin_lexicon(), Constants{});
  CHECK(ann.depicted("The person approached the chair"));
  CHECK_FALSE(ann.depicted("The chair approached the person"));
  CHECK_FALSE(ann.depicted("The person picked up the chair"));
  const auto w = ann.witness(analyze("The person approached the chair", builtin_lexicon()).mapping);
  REQUIRE(w.size() == 2);
  CHECK(sim.objects[static_cast<std::size_t>(w[0])].frames[0].class_label == "person");
  CHECK(sim.objects[static_cast<std::size_t>(w[1])].frames[0].class_label == "chair");
}

TEST_CASE("annotator assigns distinct objects") {
  const auto sim = simulate_clip(approach("a"), NoiseModel::none(), 3);
  const Annotator ann(sim.objects, builtin_lexicon(), Constants{});
  // one person only: two people cannot both be filled
  CHECK_FALSE(ann.depicted("The person approached the person"));
}

TEST_CASE("default manifest") {
  const Manifest m = default_manifest();
  CHECK(m.clips.size() == 40);
  const Corpus c = simulate_corpus(m, NoiseModel::none(), 1);
  CHECK(c.clips.size() == 40);
  std::map<std::string, int> seen;
  for (const auto& [clip, row] : c.judgments) {
    CHECK(row.size() == 21);
    for (const auto& [sid, yes] : row) seen[sid] += yes ? 1 : 0;
  }
  CHECK(seen.size() == 21);
  for (const auto& [sid, n] : seen) {
    INFO(sid);
    CHECK(n >= m.min_depictions);
  }
}

TEST_CASE("manifest round-trips") {
  const Manifest m = default_manifest();
  CHECK(serialize_manifest(parse_manifest(serialize_manifest(m))) == serialize_manifest(m));
  CHECK_THROWS_AS(parse_manifest("{\"clips\": [{\"id\": \"x\", \"events\": [{\"kind\": \"dance\", \"actor\": "
                                 "{\"class\": \"person\"}}]}]}"),
                  ParseError);
  CHECK_THROWS_AS(parse_manifest("{not json"), ParseError);
}

TEST_CASE("bad manifests") {
  CHECK_THROWS_AS(simulate_corpus(Manifest{}, NoiseModel::none(), 1), ValidationError);
  Manifest one;
  one.clips.push_back(approach("only"));
  CHECK_THROWS_AS(simulate_corpus(one, NoiseModel::none(), 1), ValidationError);
  auto tiny = approach("tiny");
  tiny.width = 60;
  CHECK_THROWS_AS(simulate_clip(tiny, NoiseModel::none(), 1), ValidationError);
  auto lonely = approach("lonely");
  lonely.referent.reset();
  CHECK_THROWS_AS(lonely.validate(), ValidationError);
  NoiseModel bad;
  bad.fp_rate = -1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("objects round-trip") {
  const auto sim = simulate_clip(approach("a"), NoiseModel::none(), 9);
  const auto back = parse_objects(serialize_objects(sim.objects));
  REQUIRE(back.size() == sim.objects.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].name == sim.objects[i].name);
    CHECK(back[i].frames == sim.objects[i].frames);
  }
}

TEST_CASE("minimal pair scenarios") {
  const auto pairs = minimal_pair_scenarios(20, 42);
  CHECK(pairs.size() == 20);
  for (const auto& p : pairs) {
    CHECK(p.spec.events.size() == 2);
    CHECK(p.pair != 6);
    CHECK(p.pair != 8);
  }
}

TEST_CASE("write_corpus layout") {
  Manifest m = default_manifest();
  const Corpus c = simulate_corpus(m, NoiseModel::standard(), 4);
  const auto dir = std::filesystem::temp_directory_path() / "sentrack_corpus_test";
  std::filesystem::remove_all(dir);
  write_corpus(c, dir);
  CHECK(std::filesystem::exists(dir / "judgments.tsv"));
  CHECK(std::filesystem::exists(dir / "sentences.tsv"));
  const auto& first = c.clips.front();
  CHECK(load_clip(dir / (first.clip.id + ".json")) == first.clip);
  CHECK(load_objects(dir / "truth" / (first.clip.id + ".json")).size() == first.objects.size());
  std::filesystem::remove_all(dir);
}
