#include "sentrack/scene_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sentrack/error.hpp"
#include "sentrack/random.hpp"

namespace sentrack {

using nlohmann::json;

namespace {

constexpr double kRed = 0.0;
constexpr double kBlue = 225.0;
constexpr double kTrueScore = 4.0;

struct Size {
  double w, h;
};

Size size_of(const std::string& cls) {
  if (cls == "person") return {50, 120};
  if (cls == "backpack") return {40, 40};
  if (cls == "chair") return {50, 60};
  if (cls == "trashcan") return {50, 70};
  throw ValidationError("unknown object class '" + cls + "'");
}

// A scene object moving at constant image-space velocity during frames
// [s0, s0 + m) and resting otherwise.
struct Body {
  std::string name, cls;
  double hue = 0;
  Size size{};
  Vec2 start = Vec2::Zero();  // center, image coordinates
  Vec2 vel = Vec2::Zero();
  int s0 = 0, m = 0;

  Vec2 center(int t) const { return start + vel * std::clamp(t - s0, 0, m); }
  Detection at(int t) const {
    Detection d;
    const Vec2 c = center(t);
    d.box = {c.x() - size.w / 2, c.y() - size.h / 2, c.x() + size.w / 2, c.y() + size.h / 2};
    d.raw_score = kTrueScore;
    d.class_label = cls;
    if (t >= s0 && t < s0 + m) d.flow = {vel.x(), -vel.y()};
    d.hue = hue;
    return d;
  }
};

double neutral_hue(Rng& rng) { return rng.uniform(60.0, 170.0); }

double hue_of(const ObjectSpec& o, Rng& rng) { return o.hue ? *o.hue : neutral_hue(rng); }

bool needs_referent(const EventSpec& e) {
  return e.kind == EventKind::Approach || e.kind == EventKind::CarryTowards || e.kind == EventKind::CarryAway ||
         e.side != Side::None;
}

class SceneBuilder {
 public:
  SceneBuilder(const ScenarioSpec& spec, Rng& rng) : spec_(spec), rng_(rng) {}

  std::vector<Body> build(std::vector<int>& actors) {
    const int n = static_cast<int>(spec_.events.size());
    const double W = spec_.width, H = spec_.height;
    bool travel = false;
    for (const auto& e : spec_.events)
      travel |= e.kind == EventKind::Approach || e.kind == EventKind::CarryTowards || e.kind == EventKind::CarryAway;
    dir_ = rng_.bernoulli(0.5) ? 1.0 : -1.0;
    if (spec_.referent) {
      Body r = body("referent", *spec_.referent);
      xr_ = travel ? (dir_ > 0 ? W - 70 : 70) : W / 2 + rng_.uniform(-40, 40);
      const double y = n > 1 ? H / 2 : H - 10 - r.size.h / 2;
      r.start = {xr_, y};
      bodies_.push_back(r);
    }
    for (int k = 0; k < n; ++k) {
      const double floor = (k + 1) * H / n - 10;
      actors.push_back(add_event(spec_.events[static_cast<std::size_t>(k)], k, n, floor));
    }
    for (int i = 0; i < spec_.distractors; ++i) {
      Body d = body("distractor" + std::to_string(i + 1),
                    ObjectSpec{rng_.bernoulli(0.5) ? "backpack" : "chair", std::nullopt});
      const int lane = rng_.uniform_int(0, n - 1);
      const double floor = (lane + 1) * H / n - 10;
      d.start = {rng_.uniform(40, W - 40), floor - d.size.h / 2};
      bodies_.push_back(d);
    }
    return std::move(bodies_);
  }

 private:
  Body body(std::string name, const ObjectSpec& o) {
    Body b;
    b.name = std::move(name);
    b.cls = o.cls;
    b.size = size_of(o.cls);
    b.hue = hue_of(o, rng_);
    return b;
  }

  int add_event(const EventSpec& e, int k, int n, double floor) {
    const std::string tag = "e" + std::to_string(k + 1);
    const int s0 = 5 + rng_.uniform_int(0, 3);
    const bool quick = e.speed == Speed::Quick;
    Body actor = body(tag + "_actor", e.actor);
    actor.s0 = s0;
    if (e.kind == EventKind::Approach) {
      const double d0 = 330 + rng_.uniform(0, 10);
      actor.m = quick ? 3 : 6;
      actor.vel = {dir_ * (quick ? 90 : 20), 0};
      actor.start = {xr_ - dir_ * d0, floor - actor.size.h / 2};
      bodies_.push_back(actor);
      return static_cast<int>(bodies_.size()) - 1;
    }

    Body obj = body(tag + "_object", e.object);
    obj.s0 = s0;
    if (e.kind == EventKind::CarryTowards || e.kind == EventKind::CarryAway) {
      const bool towards = e.kind == EventKind::CarryTowards;
      const double step = towards ? dir_ : -dir_;
      Vec2 vel;
      double d0 = 0;
      int m = 4;
      if (spec_.carry_horizontal) {
        vel = {step * 20, 0};
        d0 = towards ? 330 + rng_.uniform(0, 6) : 262 + rng_.uniform(0, 6);
      } else {
        vel = {step * 12, e.up ? -26.0 : 26.0};
        d0 = towards ? 322 + rng_.uniform(0, 6) : 272 + rng_.uniform(0, 6);
      }
      const double rise = e.up ? 0.0 : std::abs(vel.y()) * m;
      actor.m = obj.m = m;
      actor.vel = obj.vel = vel;
      actor.start = {xr_ - dir_ * d0, floor - actor.size.h / 2 - rise};
      // held on the trailing side, at hand height
      obj.start = {actor.start.x() - step * 30, actor.start.y() + 20};
    } else {
      const bool pick = e.kind == EventKind::PickUp;
      const double v = quick ? 85 : 15;
      obj.m = quick ? 3 : 5;
      obj.vel = {0, pick ? -v : v};
      const double lift = v * obj.m;
      double xp = 0, xo = 0;
      if (e.side != Side::None) {
        const double s = e.side == Side::Left ? -1.0 : 1.0;
        if (pick) {
          xo = xr_ + s * 30;
          xp = xo + s * 45;
        } else {
          xp = xr_ + s * 30;
          xo = xp + s * 45;
        }
      } else {
        const double W = spec_.width;
        if (n == 1) xp = rng_.uniform(100, W - 100);
        else xp = k == 0 ? 100 + rng_.uniform(0, 20) : W - 100 - rng_.uniform(0, 20);
        const double s = n == 1 ? (rng_.bernoulli(0.5) ? 1.0 : -1.0) : (k == 0 ? 1.0 : -1.0);
        xo = xp + s * 45;
      }
      actor.start = {xp, floor - actor.size.h / 2};
      const double rest = floor - obj.size.h / 2;
      obj.start = {xo, pick ? rest : rest - lift};
    }
    bodies_.push_back(actor);
    const int idx = static_cast<int>(bodies_.size()) - 1;
    bodies_.push_back(obj);
    return idx;
  }

  const ScenarioSpec& spec_;
  Rng& rng_;
  std::vector<Body> bodies_;
  double dir_ = 1;
  double xr_ = 0;
};

double wrap_hue(double h) {
  h = std::fmod(h, 360.0);
  return h < 0 ? h + 360.0 : h;
}

constexpr std::array<const char*, 4> kClasses = {"person", "backpack", "chair", "trashcan"};

Detection noisy(const Detection& d, const NoiseModel& nm, Rng& rng) {
  Detection out = d;
  if (nm.box_jitter > 0) {
    BBox& b = out.box;
    b.x1 += rng.normal(0, nm.box_jitter);
    b.y1 += rng.normal(0, nm.box_jitter);
    b.x2 += rng.normal(0, nm.box_jitter);
    b.y2 += rng.normal(0, nm.box_jitter);
    if (b.x2 - b.x1 < 2) b.x2 = b.x1 + 2;
    if (b.y2 - b.y1 < 2) b.y2 = b.y1 + 2;
  }
  out.raw_score += rng.normal(0, nm.score_sigma);
  if (nm.misclass_rate > 0 && rng.bernoulli(nm.misclass_rate)) {
    std::string cls = out.class_label;
    while (cls == out.class_label) cls = kClasses[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    out.class_label = cls;
  }
  if (nm.hue_jitter > 0) out.hue = wrap_hue(out.hue + rng.uniform(-nm.hue_jitter, nm.hue_jitter));
  return out;
}

Detection false_positive(const ScenarioSpec& spec, Rng& rng) {
  Detection d;
  const double w = rng.uniform(40, 60), h = rng.uniform(40, 120);
  const double x = rng.uniform(0, spec.width - w), y = rng.uniform(0, spec.height - h);
  d.box = {x, y, x + w, y + h};
  d.raw_score = rng.normal(0, 1);
  d.class_label = kClasses[static_cast<std::size_t>(rng.uniform_int(0, 3))];
  d.flow = {rng.normal(0, 3), rng.normal(0, 3)};
  d.hue = rng.uniform(0, 360);
  return d;
}

std::string_view side_name(Side s) { return s == Side::Left ? "left" : s == Side::Right ? "right" : "none"; }

json object_to_json(const ObjectSpec& o) {
  json j = {{"class", o.cls}};
  if (o.hue) j["hue"] = *o.hue;
  return j;
}

ObjectSpec object_from_json(const json& j) {
  ObjectSpec o;
  o.cls = j.at("class").get<std::string>();
  if (j.contains("hue")) o.hue = j.at("hue").get<double>();
  return o;
}

}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Approach: return "approach";
    case EventKind::CarryTowards: return "carry-towards";
    case EventKind::CarryAway: return "carry-away";
    case EventKind::PickUp: return "pick-up";
    case EventKind::PutDown: return "put-down";
  }
  return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
  for (EventKind k : {EventKind::Approach, EventKind::CarryTowards, EventKind::CarryAway, EventKind::PickUp,
                      EventKind::PutDown})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

void ScenarioSpec::validate() const {
  const std::string where = "scenario '" + id + "': ";
  if (events.empty()) throw ValidationError(where + "no events");
  if (width < 1 || height < 1 || T < 2) throw ValidationError(where + "bad canvas or length");
  if (distractors < 0) throw ValidationError(where + "negative distractor count");
  for (const auto& e : events) {
    if (needs_referent(e) && !referent) throw ValidationError(where + std::string(to_string(e.kind)) + " needs a referent");
    if (e.kind != EventKind::Approach && e.actor.cls != "person")
      throw ValidationError(where + std::string(to_string(e.kind)) + " needs a person as actor");
    size_of(e.actor.cls);
    if (e.kind != EventKind::Approach) size_of(e.object.cls);
    if (e.side != Side::None && e.kind != EventKind::PickUp && e.kind != EventKind::PutDown)
      throw ValidationError(where + "side applies to pick-up and put-down only");
  }
  if (referent) size_of(referent->cls);
}

void NoiseModel::validate() const {
  for (double v : {box_jitter, score_sigma, fp_rate, misclass_rate, hue_jitter})
    if (!(v >= 0)) throw ValidationError("noise parameters must be >= 0");
  if (misclass_rate > 1) throw ValidationError("misclass_rate must be <= 1");
}

const std::vector<BenchmarkSentence>& benchmark_sentences() {
  static const std::vector<BenchmarkSentence> kSentences = {
      {"1a", "The backpack approached the trash can."},
      {"1b", "The chair approached the trash can."},
      {"2a", "The red object approached the trash can."},
      {"2b", "The blue object approached the trash can."},
      {"3a", "The person to the left of the trash can put down an object."},
      {"3b", "The person to the right of the trash can put down an object."},
      {"4a", "The person put down the trash can."},
      {"4b", "The person put down the backpack."},
      {"5a", "The person carried the red object."},
      {"5b", "The person carried the blue object."},
      {"6a", "The person picked up an object to the left of the trash can."},
      {"6b", "The person picked up an object to the right of the trash can."},
      {"7a", "The person picked up an object."},
      {"7b", "The person put down an object."},
      {"8a", "The person picked up an object quickly."},
      {"8b", "The person picked up an object slowly."},
      {"9a", "The person carried an object towards the trash can."},
      {"9b", "The person carried an object away from the trash can."},
      {"10", "The backpack approached the chair."},
      {"11", "The red object approached the chair."},
      {"12", "The person put down the chair."},
  };
  return kSentences;
}

std::set<std::string> annotate_benchmark(const std::vector<ObjectTrack>& objects, const Lexicon& lex,
                                         const Constants& c) {
  const Annotator ann(objects, lex, c);
  std::set<std::string> out;
  for (const auto& s : benchmark_sentences())
    if (ann.depicted(s.text)) out.insert(s.id);
  return out;
}

SimClip simulate_clip(const ScenarioSpec& spec, const NoiseModel& noise, std::uint64_t seed, const Lexicon& lex) {
  spec.validate();
  noise.validate();
  Rng rng(seed);
  SimClip out;
  const std::vector<Body> bodies = SceneBuilder(spec, rng).build(out.actors);

  for (const Body& b : bodies) {
    if (b.m > 0 && b.s0 + b.m + 3 > spec.T)
      throw ValidationError("scenario '" + spec.id + "' infeasible: " + b.name + " does not settle by frame " +
                            std::to_string(spec.T));
    ObjectTrack track{b.name, {}};
    for (int t = 0; t < spec.T; ++t) {
      const Detection d = b.at(t);
      if (d.box.x1 < 0 || d.box.y1 < 0 || d.box.x2 > spec.width || d.box.y2 > spec.height)
        throw ValidationError("scenario '" + spec.id + "' infeasible: " + b.name + " leaves the canvas at frame " +
                              std::to_string(t + 1));
      track.frames.push_back(d);
    }
    out.objects.push_back(std::move(track));
  }

  out.clip.id = spec.id;
  for (int t = 0; t < spec.T; ++t) {
    Frame frame;
    frame.index = t + 1;
    for (const auto& o : out.objects) frame.detections.push_back(noisy(o.frames[static_cast<std::size_t>(t)], noise, rng));
    const int fps = noise.fp_rate > 0 ? rng.poisson(noise.fp_rate) : 0;
    for (int i = 0; i < fps; ++i) {
      const auto pos = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(frame.detections.size())));
      frame.detections.insert(frame.detections.begin() + static_cast<std::ptrdiff_t>(pos), false_positive(spec, rng));
    }
    out.clip.frames.push_back(std::move(frame));
  }

  Constants c;
  c.carry_horizontal = spec.carry_horizontal;
  out.truth = annotate_benchmark(out.objects, lex, c);
  return out;
}

Manifest parse_manifest(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  Manifest m;
  try {
    m.min_depictions = doc.value("min_depictions", 2);
    for (const auto& jc : doc.at("clips")) {
      ScenarioSpec s;
      s.id = jc.at("id").get<std::string>();
      if (jc.contains("referent")) s.referent = object_from_json(jc.at("referent"));
      s.distractors = jc.value("distractors", 0);
      s.width = jc.value("width", 640);
      s.height = jc.value("height", 480);
      s.T = jc.value("T", 30);
      s.carry_horizontal = jc.value("carry_horizontal", false);
      for (const auto& je : jc.at("events")) {
        EventSpec e;
        const auto kind = event_kind_from_string(je.at("kind").get<std::string>());
        if (!kind) throw ParseError("manifest clip '" + s.id + "': unknown event kind");
        e.kind = *kind;
        e.actor = object_from_json(je.at("actor"));
        if (je.contains("object")) e.object = object_from_json(je.at("object"));
        const std::string side = je.value("side", "none");
        if (side == "left") e.side = Side::Left;
        else if (side == "right") e.side = Side::Right;
        else if (side != "none") throw ParseError("manifest clip '" + s.id + "': bad side '" + side + "'");
        const std::string speed = je.value("speed", "slow");
        if (speed != "slow" && speed != "quick") throw ParseError("manifest clip '" + s.id + "': bad speed");
        e.speed = speed == "quick" ? Speed::Quick : Speed::Slow;
        e.up = je.value("up", true);
        s.events.push_back(e);
      }
      m.clips.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string serialize_manifest(const Manifest& m) {
  json clips = json::array();
  for (const auto& s : m.clips) {
    json events = json::array();
    for (const auto& e : s.events) {
      json je = {{"kind", to_string(e.kind)}, {"actor", object_to_json(e.actor)}};
      if (e.kind != EventKind::Approach) je["object"] = object_to_json(e.object);
      if (e.side != Side::None) je["side"] = side_name(e.side);
      je["speed"] = e.speed == Speed::Quick ? "quick" : "slow";
      if (e.kind == EventKind::CarryTowards || e.kind == EventKind::CarryAway) je["up"] = e.up;
      events.push_back(std::move(je));
    }
    json jc = {{"id", s.id}, {"events", std::move(events)}, {"distractors", s.distractors},
               {"width", s.width}, {"height", s.height}, {"T", s.T}};
    if (s.referent) jc["referent"] = object_to_json(*s.referent);
    if (s.carry_horizontal) jc["carry_horizontal"] = true;
    clips.push_back(std::move(jc));
  }
  return json{{"min_depictions", m.min_depictions}, {"clips", std::move(clips)}}.dump(1) + "\n";
}

namespace {

ObjectSpec obj(const char* cls, std::optional<double> hue = std::nullopt) { return {cls, hue}; }
const ObjectSpec kPerson = obj("person");
const ObjectSpec kTrashcan = obj("trashcan");

EventSpec approach(ObjectSpec actor, Speed speed = Speed::Slow) {
  return {EventKind::Approach, std::move(actor), {}, Side::None, speed, true};
}
EventSpec put_down(ObjectSpec o, Side side = Side::None) {
  return {EventKind::PutDown, kPerson, std::move(o), side, Speed::Slow, true};
}
EventSpec pick_up(ObjectSpec o, Side side = Side::None, Speed speed = Speed::Slow) {
  return {EventKind::PickUp, kPerson, std::move(o), side, speed, true};
}
EventSpec carry(bool towards, ObjectSpec o, bool up) {
  return {towards ? EventKind::CarryTowards : EventKind::CarryAway, kPerson, std::move(o), Side::None, Speed::Slow, up};
}

ScenarioSpec scene(std::string id, std::optional<ObjectSpec> referent, std::vector<EventSpec> events,
                   int distractors = 0) {
  ScenarioSpec s;
  s.id = std::move(id);
  s.referent = std::move(referent);
  s.events = std::move(events);
  s.distractors = distractors;
  return s;
}

}  // namespace

Manifest default_manifest() {
  const auto red = [](const char* c) { return obj(c, kRed); };
  const auto blue = [](const char* c) { return obj(c, kBlue); };
  const auto chair = obj("chair");
  Manifest m;
  m.clips = {
      scene("approach01", kTrashcan, {approach(obj("backpack"))}, 1),
      scene("approach02", kTrashcan, {approach(obj("backpack"), Speed::Quick)}),
      scene("approach03", kTrashcan, {approach(obj("chair"))}, 1),
      scene("approach04", kTrashcan, {approach(obj("chair"))}),
      scene("approach05", kTrashcan, {approach(red("chair"))}),
      scene("approach06", kTrashcan, {approach(red("backpack"))}, 1),
      scene("approach07", kTrashcan, {approach(blue("backpack"))}),
      scene("approach08", kTrashcan, {approach(blue("chair"), Speed::Quick)}),
      scene("approach09", chair, {approach(obj("backpack"))}),
      scene("approach10", chair, {approach(obj("backpack"), Speed::Quick)}, 1),
      scene("approach11", chair, {approach(red("backpack"))}),
      scene("approach12", chair, {approach(red("trashcan"))}),
      scene("putdown01", kTrashcan, {put_down(obj("backpack"), Side::Left)}),
      scene("putdown02", kTrashcan, {put_down(obj("backpack"), Side::Left)}, 1),
      scene("putdown03", kTrashcan, {put_down(obj("chair"), Side::Right)}),
      scene("putdown04", kTrashcan, {put_down(obj("backpack"), Side::Right)}),
      scene("putdown05", std::nullopt, {put_down(obj("trashcan"))}, 1),
      scene("putdown06", std::nullopt, {put_down(obj("trashcan"))}),
      scene("putdown07", std::nullopt, {put_down(obj("chair"))}),
      scene("putdown08", std::nullopt, {put_down(obj("chair"))}, 1),
      scene("pickup01", kTrashcan, {pick_up(obj("backpack"), Side::Left)}),
      scene("pickup02", kTrashcan, {pick_up(obj("chair"), Side::Left, Speed::Quick)}),
      scene("pickup03", kTrashcan, {pick_up(obj("backpack"), Side::Right)}, 1),
      scene("pickup04", kTrashcan, {pick_up(obj("backpack"), Side::Right, Speed::Quick)}),
      scene("carry01", kTrashcan, {carry(true, red("backpack"), true)}),
      scene("carry02", kTrashcan, {carry(true, red("chair"), false)}),
      scene("carry03", kTrashcan, {carry(true, blue("backpack"), true)}),
      scene("carry04", kTrashcan, {carry(false, blue("chair"), true)}),
      scene("carry05", kTrashcan, {carry(false, blue("backpack"), false)}),
      scene("carry06", kTrashcan, {carry(false, red("backpack"), true)}),
      scene("pair1", kTrashcan, {approach(obj("backpack")), approach(obj("chair"))}),
      scene("pair2", kTrashcan, {approach(red("backpack")), approach(blue("chair"))}),
      scene("pair3", kTrashcan, {put_down(obj("backpack"), Side::Left), put_down(obj("chair"), Side::Right)}),
      scene("pair4", std::nullopt, {put_down(obj("trashcan")), put_down(obj("backpack"))}),
      scene("pair5", kTrashcan, {carry(true, red("backpack"), true), carry(false, blue("chair"), false)}),
      scene("pair6", kTrashcan, {pick_up(obj("backpack"), Side::Left), pick_up(obj("chair"), Side::Right)}),
      scene("pair7a", std::nullopt, {pick_up(obj("backpack")), put_down(obj("chair"))}),
      scene("pair7b", std::nullopt, {pick_up(obj("chair")), put_down(obj("backpack"))}),
      scene("pair9a", kTrashcan, {carry(true, obj("backpack"), true), carry(false, obj("chair"), false)}),
      scene("pair9b", kTrashcan, {carry(true, obj("chair"), false), carry(false, obj("backpack"), true)}),
  };
  return m;
}

std::vector<PairScenario> minimal_pair_scenarios(int count, std::uint64_t seed) {
  static constexpr std::array<int, 7> kPairs = {1, 2, 3, 4, 5, 7, 9};
  Rng rng(seed);
  const auto any = [&](std::initializer_list<const char*> cs) {
    const auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(cs.size()) - 1));
    return obj(cs.begin()[i]);
  };
  std::vector<PairScenario> out;
  for (int i = 0; i < count; ++i) {
    const int pair = kPairs[static_cast<std::size_t>(i) % kPairs.size()];
    const bool up = rng.bernoulli(0.5);
    ScenarioSpec s;
    switch (pair) {
      case 1: s = scene("", kTrashcan, {approach(obj("backpack")), approach(obj("chair"))}); break;
      case 2: {
        ObjectSpec a = any({"backpack", "chair"}), b = any({"backpack", "chair"});
        a.hue = kRed;
        b.hue = kBlue;
        s = scene("", kTrashcan, {approach(a), approach(b)});
        break;
      }
      case 3:
        s = scene("", kTrashcan, {put_down(any({"backpack", "chair"}), Side::Left),
                                  put_down(any({"backpack", "chair"}), Side::Right)});
        break;
      case 4: s = scene("", std::nullopt, {put_down(obj("trashcan")), put_down(obj("backpack"))}); break;
      case 5: {
        ObjectSpec a = any({"backpack", "chair"}), b = any({"backpack", "chair"});
        a.hue = kRed;
        b.hue = kBlue;
        s = scene("", kTrashcan, {carry(true, a, up), carry(false, b, !up)});
        break;
      }
      case 7: s = scene("", std::nullopt, {pick_up(any({"backpack", "chair"})), put_down(any({"backpack", "chair"}))}); break;
      default:
        s = scene("", kTrashcan, {carry(true, any({"backpack", "chair"}), up), carry(false, any({"backpack", "chair"}), !up)});
        break;
    }
    s.id = "mp" + std::to_string(i + 1) + "_pair" + std::to_string(pair);
    out.push_back({pair, std::move(s)});
  }
  return out;
}

Corpus simulate_corpus(const Manifest& m, const NoiseModel& noise, std::uint64_t seed, const Lexicon& lex) {
  if (m.clips.empty()) throw ValidationError("manifest lists no clips");
  Corpus corpus;
  std::map<std::string, int> count;
  for (std::size_t i = 0; i < m.clips.size(); ++i) {
    const std::uint64_t clip_seed = seed * 0x9E3779B97F4A7C15ULL + i + 1;
    SimClip sc = simulate_clip(m.clips[i], noise, clip_seed, lex);
    auto& row = corpus.judgments[sc.clip.id];
    if (!row.empty()) throw ValidationError("duplicate clip id '" + sc.clip.id + "'");
    for (const auto& s : benchmark_sentences()) {
      const bool d = sc.truth.count(s.id) > 0;
      row[s.id] = d;
      count[s.id] += d ? 1 : 0;
    }
    corpus.clips.push_back(std::move(sc));
  }
  std::string missing;
  for (const auto& s : benchmark_sentences())
    if (count[s.id] < m.min_depictions)
      missing += "\n  " + s.id + " (" + s.text + "): depicted " + std::to_string(count[s.id]) + " time(s)";
  if (!missing.empty())
    throw ValidationError("manifest covers too few sentences (need " + std::to_string(m.min_depictions) +
                          " depictions each):" + missing);
  return corpus;
}

// Each object is stored as a one-detection-per-frame clip named after it.
std::string serialize_objects(const std::vector<ObjectTrack>& objects) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& o : objects) {
    Clip c{o.name, 30.0, {}};
    for (std::size_t t = 0; t < o.frames.size(); ++t) c.frames.push_back({static_cast<int>(t + 1), {o.frames[t]}});
    arr.push_back(nlohmann::json::parse(serialize_clip(c)));
  }
  return nlohmann::json{{"objects", std::move(arr)}}.dump(1) + "\n";
}

std::vector<ObjectTrack> parse_objects(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("objects: ") + e.what());
  }
  if (!doc.contains("objects") || !doc["objects"].is_array()) throw ParseError("objects: missing 'objects' array");
  std::vector<ObjectTrack> out;
  for (const auto& o : doc["objects"]) {
    const Clip c = parse_clip(o.dump());
    ObjectTrack track{c.id, {}};
    for (const auto& f : c.frames) {
      if (f.detections.size() != 1) throw ParseError("objects: " + c.id + " needs exactly one box per frame");
      track.frames.push_back(f.detections.front());
    }
    out.push_back(std::move(track));
  }
  return out;
}

std::vector<ObjectTrack> load_objects(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_objects(ss.str());
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::filesystem::create_directories(dir / "truth");
  for (const auto& c : corpus.clips) {
    save_clip(c.clip, dir / (c.clip.id + ".json"));
    std::ofstream o(dir / "truth" / (c.clip.id + ".json"));
    if (!o) throw Error("cannot write truth file for " + c.clip.id);
    o << serialize_objects(c.objects);
  }
  std::ofstream j(dir / "judgments.tsv");
  if (!j) throw Error("cannot write " + (dir / "judgments.tsv").string());
  j << "# clip\tsentence\tdepicted\n";
  for (const auto& [clip, row] : corpus.judgments)
    for (const auto& [sid, d] : row) j << clip << '\t' << sid << '\t' << (d ? 1 : 0) << '\n';
  std::ofstream s(dir / "sentences.tsv");
  if (!s) throw Error("cannot write " + (dir / "sentences.tsv").string());
  for (const auto& b : benchmark_sentences()) s << b.id << '\t' << b.text << '\n';
}

}  // namespace sentrack
