#pragma once

// Independent re-derivations used as test oracles: predicates straight from
// their definitions on raw numbers, and regex acceptance by end-position sets
// over the desugared expression.

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sentrack/clip.hpp"
#include "sentrack/lexicon.hpp"
#include "sentrack/predicates.hpp"
#include "sentrack/random.hpp"
#include "sentrack/regex.hpp"

namespace ref {

using sentrack::Atom;
using sentrack::Constants;
using sentrack::Detection;
using sentrack::Pred;

struct V {
  double x, y;
};

inline double cx(const Detection& b) { return (b.box.x1 + b.box.x2) / 2; }
// Center x of the box moved by its flow (image y is flipped, x is not).
inline double cx_proj(const Detection& b) { return ((b.box.x1 + b.flow.x()) + (b.box.x2 + b.flow.x())) / 2; }
inline double norm(const Detection& b) { return std::sqrt(b.flow.x() * b.flow.x() + b.flow.y() * b.flow.y()); }
inline double deg(double x, double y) {
  double a = std::atan2(y, x) * 180.0 / M_PI;
  if (a < 0) a += 360;
  if (a >= 360) a -= 360;
  return a;
}
inline double sep(double a, double b) {
  double d = std::fmod(std::fabs(a - b), 360.0);
  return d > 180 ? 360 - d : d;
}

inline bool no_jitter(const Detection& b, V v, const Constants& c) {
  return std::fabs(b.flow.x() * v.x + b.flow.y() * v.y) <= c.delta_jump;
}
inline bool alike(const Detection& a, const Detection& b) { return a.class_label == b.class_label; }
inline bool close(const Detection& a, const Detection& b, const Constants& c) {
  return std::fabs(cx(a) - cx(b)) < c.x_boundary;
}
inline bool far(const Detection& a, const Detection& b, const Constants& c) {
  return std::fabs(cx(a) - cx(b)) >= c.x_boundary;
}
inline bool has_color(const Detection& b, double h, const Constants& c) { return sep(b.hue, h) <= c.delta_hue; }
inline bool stationary(const Detection& b, const Constants& c) { return norm(b) <= c.delta_static; }
inline bool closer(const Detection& a, const Detection& b, const Constants& c) {
  return std::fabs(cx(a) - cx(b)) > std::fabs(cx_proj(a) - cx(b)) + c.delta_closing;
}
inline bool farther(const Detection& a, const Detection& b, const Constants& c) {
  return std::fabs(cx(a) - cx(b)) < std::fabs(cx_proj(a) - cx(b)) + c.delta_closing;
}
inline bool move_closer(const Detection& a, const Detection& b, const Constants& c) {
  return no_jitter(a, {0, 1}, c) && no_jitter(b, {0, 1}, c) && closer(a, b, c);
}
inline bool move_farther(const Detection& a, const Detection& b, const Constants& c) {
  return no_jitter(a, {0, 1}, c) && no_jitter(b, {0, 1}, c) && farther(a, b, c);
}
inline bool in_angle(const Detection& b, V v, const Constants& c) {
  return sep(deg(b.flow.x(), b.flow.y()), deg(v.x, v.y)) < c.delta_direction;
}
inline bool in_direction(const Detection& b, V v, const Constants& c) {
  const double len = std::sqrt(v.x * v.x + v.y * v.y);
  return no_jitter(b, {-v.y / len, v.x / len}, c) && !stationary(b, c) && in_angle(b, v, c);
}
inline bool carry(const Detection& a, const Detection& b, V v, const Constants& c) {
  return a.class_label == "person" && !alike(a, b) && in_direction(a, v, c) && in_direction(b, v, c);
}

/// Truth of a predicate per its definition; `d` is the bound direction or
/// hue when the predicate takes one.
inline bool eval(const Atom& atom, const Detection& b1, const Detection& b2, const Constants& c) {
  const V d{atom.direction.x(), atom.direction.y()};
  switch (atom.pred) {
    case Pred::True: return true;
    case Pred::Person: return b1.class_label == "person";
    case Pred::Backpack: return b1.class_label == "backpack";
    case Pred::Chair: return b1.class_label == "chair";
    case Pred::Trashcan: return b1.class_label == "trashcan";
    case Pred::Blue: return has_color(b1, 225, c);
    case Pred::Red: return has_color(b1, 0, c);
    case Pred::Stationary: return stationary(b1, c);
    case Pred::Quick: return norm(b1) >= c.delta_quick;
    case Pred::Slow: return norm(b1) <= c.delta_slow;
    case Pred::NoJitter: return no_jitter(b1, d, c);
    case Pred::HasColor: return has_color(b1, atom.hue, c);
    case Pred::InAngle: return in_angle(b1, d, c);
    case Pred::InDirection: return in_direction(b1, d, c);
    case Pred::Carry: return carry(b1, b2, d, c);
    case Pred::Alike: return alike(b1, b2);
    case Pred::Close: return close(b1, b2, c);
    case Pred::Far: return far(b1, b2, c);
    case Pred::Left: return cx(b2) - cx(b1) > 0 && cx(b2) - cx(b1) <= c.next_to;
    case Pred::Right: return cx(b1) - cx(b2) > 0 && cx(b1) - cx(b2) <= c.next_to;
    case Pred::Closer: return closer(b1, b2, c);
    case Pred::Farther: return farther(b1, b2, c);
    case Pred::MoveCloser: return move_closer(b1, b2, c);
    case Pred::MoveFarther: return move_farther(b1, b2, c);
    case Pred::StationaryClose:
      return stationary(b1, c) && stationary(b2, c) && !alike(b1, b2) && close(b1, b2, c);
    case Pred::StationaryFar:
      return stationary(b1, c) && stationary(b2, c) && !alike(b1, b2) && far(b1, b2, c);
    case Pred::Approaching: return !alike(b1, b2) && stationary(b2, c) && move_closer(b1, b2, c);
    case Pred::Carrying:
      if (c.carry_horizontal) return carry(b1, b2, {1, 0}, c) || carry(b1, b2, {-1, 0}, c);
      return carry(b1, b2, {0, 1}, c) || carry(b1, b2, {0, -1}, c);
    case Pred::Departing: return !alike(b1, b2) && stationary(b2, c) && move_farther(b1, b2, c);
    case Pred::PickingUp:
      return b1.class_label == "person" && !alike(b1, b2) && stationary(b1, c) && in_direction(b2, {0, 1}, c);
    case Pred::PuttingDown:
      return b1.class_label == "person" && !alike(b1, b2) && stationary(b1, c) && in_direction(b2, {0, -1}, c);
  }
  return false;
}

/// Detection drawn to land on predicate boundaries often: positions on a
/// 5px grid, flows from threshold-adjacent values, hues near red and blue.
inline Detection random_detection(sentrack::Rng& rng) {
  static const char* classes[] = {"person", "backpack", "chair", "trashcan"};
  static const double flows[] = {0, 3, 6, 7, 10, 20, 29, 30, 31, 60, 79, 80, 81, 120};
  Detection d;
  const double x = 5.0 * rng.uniform_int(0, 128);
  const double y = 5.0 * rng.uniform_int(0, 96);
  const double w = 5.0 * rng.uniform_int(1, 20);
  d.box = {x, y, x + w, y + 5.0 * rng.uniform_int(1, 30)};
  d.raw_score = rng.uniform(-3, 3);
  d.class_label = classes[rng.uniform_int(0, 3)];
  auto comp = [&] {
    const double v = rng.bernoulli(0.7) ? flows[rng.uniform_int(0, 13)] : rng.uniform(0, 120);
    return rng.bernoulli(0.5) ? -v : v;
  };
  d.flow = {comp(), comp()};
  if (rng.bernoulli(0.2)) d.flow = {0, comp()};
  if (rng.bernoulli(0.2)) d.flow = {comp(), 0};
  const double hues[] = {0, 15, 30, 31, 195, 225, 255, 256, 330, 345, 100};
  d.hue = rng.bernoulli(0.6) ? hues[rng.uniform_int(0, 10)] : rng.uniform(0, 359.9);
  return d;
}

// Regex acceptance: set of end positions reachable from `start`.
inline std::set<int> ends(const sentrack::Regex& r, int start, int T,
                          const std::function<bool(int, const Atom&)>& truth) {
  using K = sentrack::Regex::Kind;
  switch (r.kind) {
    case K::Epsilon: return {start};
    case K::Atom:
      if (start < T && truth(start, r.atom)) return {start + 1};
      return {};
    case K::Concat: {
      std::set<int> cur{start};
      for (const auto& k : r.kids) {
        std::set<int> next;
        for (int s : cur)
          for (int e : ends(k, s, T, truth)) next.insert(e);
        cur = std::move(next);
      }
      return cur;
    }
    case K::Union: {
      std::set<int> out;
      for (const auto& k : r.kids)
        for (int e : ends(k, start, T, truth)) out.insert(e);
      return out;
    }
    case K::Star: {
      std::set<int> out{start};
      std::vector<int> todo{start};
      while (!todo.empty()) {
        const int s = todo.back();
        todo.pop_back();
        for (int e : ends(r.kids[0], s, T, truth))
          if (out.insert(e).second) todo.push_back(e);
      }
      return out;
    }
    default: throw std::logic_error("regex not desugared");
  }
}

inline bool nfa_accepts(const sentrack::Regex& core, int T, const std::function<bool(int, const Atom&)>& truth) {
  return ends(core, 0, T, truth).count(T) > 0;
}

struct DiffReport {
  long checks = 0;
  long divergences = 0;
  long accepted = 0;  // FSM check only
  std::string first;
};

/// Every predicate on `pairs` random detection pairs against eval() above,
/// alternating the carry_horizontal flag.
inline DiffReport predicate_differential(int pairs, std::uint64_t seed) {
  sentrack::Rng rng(seed);
  const std::vector<sentrack::Vec2> dirs{{0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, 1}, {-3, 4}};
  DiffReport r;
  for (int i = 0; i < pairs; ++i) {
    Constants c;
    c.carry_horizontal = i % 2 == 1;
    const Detection a = random_detection(rng), b = random_detection(rng);
    for (int p = static_cast<int>(Pred::True); p <= static_cast<int>(Pred::PuttingDown); ++p) {
      const Atom at{static_cast<Pred>(p), rng.uniform(0, 359), dirs[static_cast<std::size_t>(rng.uniform_int(0, 5))]};
      const bool got = at.arity() == 2 ? sentrack::eval_atom(at, a, b, c) : sentrack::eval_atom(at, a, c);
      ++r.checks;
      if (got != eval(at, a, b, c) && r.divergences++ == 0)
        r.first = at.name() + " on pair " + std::to_string(i);
    }
  }
  return r;
}

inline void collect_atoms(const sentrack::Regex& r, std::vector<Atom>& out) {
  if (r.kind == sentrack::Regex::Kind::Atom) {
    for (const auto& a : out)
      if (a == r.atom) return;
    out.push_back(r.atom);
  }
  for (const auto& k : r.kids) collect_atoms(k, out);
}

/// Compiled recognizer of every content entry against nfa_accepts() on
/// `trials` random truth tables of 1..8 frames each. TRUE always holds.
inline DiffReport fsm_differential(const sentrack::Lexicon& lex, int trials, std::uint64_t seed) {
  sentrack::Rng rng(seed);
  DiffReport r;
  for (const auto& [lemma, e] : lex.entries()) {
    if (!e.regex) continue;
    const sentrack::Regex core = sentrack::desugar(*e.regex);
    std::vector<Atom> atoms;
    collect_atoms(core, atoms);
    for (int trial = 0; trial < trials; ++trial) {
      const int T = rng.uniform_int(1, 8);
      const double p = std::vector<double>{0.5, 0.8, 0.95}[static_cast<std::size_t>(rng.uniform_int(0, 2))];
      std::vector<std::vector<bool>> table(static_cast<std::size_t>(T), std::vector<bool>(atoms.size()));
      for (auto& row : table)
        for (std::size_t i = 0; i < atoms.size(); ++i) row[i] = atoms[i].pred == Pred::True || rng.bernoulli(p);
      auto truth = [&](int t, const Atom& a) {
        for (std::size_t i = 0; i < atoms.size(); ++i)
          if (atoms[i] == a) return static_cast<bool>(table[static_cast<std::size_t>(t)][i]);
        throw std::logic_error("atom outside the expression");
      };
      const bool want = nfa_accepts(core, T, truth);
      const bool got = sentrack::accepts(e.recognizer(), T, truth);
      ++r.checks;
      r.accepted += want ? 1 : 0;
      if (want != got && r.divergences++ == 0) {
        std::ostringstream os;
        os << lemma << " trial " << trial << " T=" << T << " nfa=" << want << " fsm=" << got;
        r.first = os.str();
      }
    }
  }
  return r;
}

}  // namespace ref
