#include "sentrack/oracle.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <memory>
#include <sstream>

#include "sentrack/error.hpp"

namespace sentrack {

namespace {

constexpr std::array kUnary = {Pred::True, Pred::Person, Pred::Backpack, Pred::Stationary,
                               Pred::Quick, Pred::Slow, Pred::Blue};
constexpr std::array kBinary = {Pred::Close, Pred::Far, Pred::Left, Pred::Right, Pred::Alike,
                                Pred::Closer, Pred::MoveCloser, Pred::StationaryClose};
constexpr std::array kClasses = {"person", "backpack", "chair"};
constexpr std::array kFlow = {0.0, 0.0, 4.0, -10.0, 40.0, -90.0};

Detection random_detection(Rng& rng) {
  Detection d;
  const double x = 40.0 * rng.uniform_int(0, 14);
  const double y = 40.0 * rng.uniform_int(0, 10);
  const double w = 40.0 * rng.uniform_int(1, 2);
  const double h = 40.0 * rng.uniform_int(1, 2);
  d.box = {x, y, x + w, y + h};
  d.raw_score = rng.uniform_int(-2, 2);
  d.class_label = kClasses[static_cast<std::size_t>(rng.uniform_int(0, 2))];
  d.flow = {kFlow[static_cast<std::size_t>(rng.uniform_int(0, 5))],
            kFlow[static_cast<std::size_t>(rng.uniform_int(0, 5))]};
  d.hue = rng.bernoulli(0.5) ? 0.0 : 225.0;
  return d;
}

std::shared_ptr<const Recognizer> random_recognizer(Rng& rng, int K, bool binary) {
  std::vector<Atom> atoms;
  for (int k = 0; k < K; ++k) {
    Atom a;
    if (binary && rng.bernoulli(0.7))
      a.pred = kBinary[static_cast<std::size_t>(rng.uniform_int(0, kBinary.size() - 1))];
    else
      a.pred = kUnary[static_cast<std::size_t>(rng.uniform_int(0, kUnary.size() - 1))];
    atoms.push_back(a);
  }
  const auto k = static_cast<std::size_t>(K);
  std::vector<std::uint8_t> init(k), fin(k), trans(k * k);
  for (auto& v : init) v = rng.bernoulli(0.5);
  for (auto& v : fin) v = rng.bernoulli(0.5);
  for (auto& v : trans) v = rng.bernoulli(0.6);
  init[static_cast<std::size_t>(rng.uniform_int(0, K - 1))] = 1;
  fin[static_cast<std::size_t>(rng.uniform_int(0, K - 1))] = 1;
  return std::make_shared<const Recognizer>(std::move(atoms), std::move(init), std::move(fin), std::move(trans));
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

Lattice random_instance(Rng& rng, const InstanceSizes& sizes) {
  const int T = rng.uniform_int(1, sizes.max_T);
  const int L = rng.uniform_int(1, sizes.max_L);
  const int W = rng.uniform_int(0, sizes.max_W);
  Clip clip;
  clip.id = "random";
  for (int t = 0; t < T; ++t) {
    Frame frame;
    frame.index = t + 1;
    const int J = rng.uniform_int(1, sizes.max_J);
    for (int j = 0; j < J; ++j) frame.detections.push_back(random_detection(rng));
    clip.frames.push_back(std::move(frame));
  }
  std::vector<BoundWord> words;
  for (int w = 0; w < W; ++w) {
    const bool binary = L > 1 && rng.bernoulli(0.6);
    BoundWord bw;
    bw.rec = random_recognizer(rng, rng.uniform_int(1, sizes.max_K), binary);
    bw.args.push_back(rng.uniform_int(0, L - 1));
    if (binary) bw.args.push_back(rng.uniform_int(0, L - 1));
    words.push_back(std::move(bw));
  }
  TrackerConfig cfg;
  cfg.distinct_detections = rng.bernoulli(0.25);
  return build_lattice(clip, L, words, cfg);
}

std::string describe(const ScoredResult& r) {
  std::ostringstream out;
  out.precision(17);
  out << "tau=" << r.tau;
  for (std::size_t l = 0; l < r.tracks.size(); ++l) {
    out << " track" << l << "=[";
    for (std::size_t t = 0; t < r.tracks[l].indices.size(); ++t) out << (t ? "," : "") << r.tracks[l].indices[t];
    out << "]";
  }
  for (std::size_t w = 0; w < r.word_states.size(); ++w) {
    out << " word" << w << "=[";
    for (std::size_t t = 0; t < r.word_states[w].size(); ++t) out << (t ? "," : "") << r.word_states[w][t];
    out << "]";
  }
  return out.str();
}

OracleReport oracle_check(int trials, std::uint64_t seed, const InstanceSizes& sizes, const DecodeOptions& opts,
                          std::size_t cap) {
  OracleReport report;
  Rng rng(seed);
  for (int i = 0; i < trials; ++i) {
    const Lattice lat = random_instance(rng, sizes);
    const ScoredResult fast = decode(lat, opts);
    const ScoredResult slow = brute_force(lat, cap);
    ++report.trials;
    if (same_bits(fast.tau, slow.tau) && fast.tracks == slow.tracks && fast.word_states == slow.word_states)
      continue;
    if (report.divergences++ == 0) {
      std::ostringstream msg;
      msg << "trial " << i << " (T=" << lat.T << " L=" << lat.L << " W=" << lat.W() << "): decoder "
          << describe(fast) << " vs enumeration " << describe(slow);
      report.first_divergence = msg.str();
    }
  }
  return report;
}

}  // namespace sentrack
