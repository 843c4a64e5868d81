#include "sentrack/predicates.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

#include "sentrack/error.hpp"

namespace sentrack {

bool Constants::set(std::string_view key, double value) {
  struct Entry {
    std::string_view a, b;
    double Constants::*field;
  };
  static constexpr std::array<Entry, 9> kKeys{{
      {"xBoundary", "xBoundary", &Constants::x_boundary},
      {"nextTo", "nextTo", &Constants::next_to},
      {"deltaStatic", "Δstatic", &Constants::delta_static},
      {"deltaJump", "Δjump", &Constants::delta_jump},
      {"deltaQuick", "Δquick", &Constants::delta_quick},
      {"deltaSlow", "Δslow", &Constants::delta_slow},
      {"deltaClosing", "Δclosing", &Constants::delta_closing},
      {"deltaDirection", "Δdirection", &Constants::delta_direction},
      {"deltaHue", "Δhue", &Constants::delta_hue},
  }};
  for (const auto& e : kKeys) {
    if (key == e.a || key == e.b) {
      this->*e.field = value;
      return true;
    }
  }
  if (key == "carry_horizontal") {
    carry_horizontal = value != 0.0;
    return true;
  }
  return false;
}

void Constants::validate() const {
  for (double v : {x_boundary, next_to, delta_static, delta_jump, delta_quick, delta_slow,
                   delta_closing, delta_direction, delta_hue}) {
    if (!(v > 0)) throw ValidationError("predicate constants must be strictly positive");
  }
}

double x_center(const Detection& b) { return 0.5 * (b.box.x1 + b.box.x2); }
const std::string& model(const Detection& b) { return b.class_label; }
double hue(const Detection& b) { return b.hue; }
Vec2 avg_flow(const Detection& b) { return b.flow; }

BBox fwd_proj(const Detection& b) { return b.box.shifted(Vec2(b.flow.x(), -b.flow.y())); }

double angle_of(const Vec2& v) {
  double deg = std::atan2(v.y(), v.x()) * 180.0 / std::numbers::pi;
  if (deg < 0) deg += 360.0;
  return deg >= 360.0 ? deg - 360.0 : deg;
}

double angle_sep(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

Vec2 normal_of(const Vec2& v) {
  const double n = v.norm();
  if (n <= 0) return Vec2::Zero();
  return Vec2(-v.y(), v.x()) / n;
}

namespace {

// Simple predicates.
bool no_jitter(const Detection& b, const Vec2& v, const Constants& c) {
  return std::abs(avg_flow(b).dot(v)) <= c.delta_jump;
}
bool alike(const Detection& a, const Detection& b) { return model(a) == model(b); }
bool close(const Detection& a, const Detection& b, const Constants& c) {
  return std::abs(x_center(a) - x_center(b)) < c.x_boundary;
}
bool far(const Detection& a, const Detection& b, const Constants& c) {
  return std::abs(x_center(a) - x_center(b)) >= c.x_boundary;
}
bool left(const Detection& a, const Detection& b, const Constants& c) {
  const double d = x_center(b) - x_center(a);
  return 0 < d && d <= c.next_to;
}
bool right(const Detection& a, const Detection& b, const Constants& c) {
  const double d = x_center(a) - x_center(b);
  return 0 < d && d <= c.next_to;
}
bool has_color(const Detection& b, double h, const Constants& c) {
  return angle_sep(hue(b), h) <= c.delta_hue;
}
bool stationary(const Detection& b, const Constants& c) {
  return avg_flow(b).norm() <= c.delta_static;
}
bool quick(const Detection& b, const Constants& c) { return avg_flow(b).norm() >= c.delta_quick; }
bool slow(const Detection& b, const Constants& c) { return avg_flow(b).norm() <= c.delta_slow; }
bool is_class(const Detection& b, std::string_view cls) { return model(b) == cls; }

// Complex predicates.
double projected_gap(const Detection& a, const Detection& b) {
  const BBox p = fwd_proj(a);
  return std::abs(0.5 * (p.x1 + p.x2) - x_center(b));
}
bool closer(const Detection& a, const Detection& b, const Constants& c) {
  return std::abs(x_center(a) - x_center(b)) > projected_gap(a, b) + c.delta_closing;
}
// Verbatim: the closing margin is added on the right-hand side here too.
bool farther(const Detection& a, const Detection& b, const Constants& c) {
  return std::abs(x_center(a) - x_center(b)) < projected_gap(a, b) + c.delta_closing;
}
const Vec2 kUp(0, 1);
const Vec2 kDown(0, -1);
bool move_closer(const Detection& a, const Detection& b, const Constants& c) {
  return no_jitter(a, kUp, c) && no_jitter(b, kUp, c) && closer(a, b, c);
}
bool move_farther(const Detection& a, const Detection& b, const Constants& c) {
  return no_jitter(a, kUp, c) && no_jitter(b, kUp, c) && farther(a, b, c);
}
bool stationary_close(const Detection& a, const Detection& b, const Constants& c) {
  return stationary(a, c) && stationary(b, c) && !alike(a, b) && close(a, b, c);
}
bool stationary_far(const Detection& a, const Detection& b, const Constants& c) {
  return stationary(a, c) && stationary(b, c) && !alike(a, b) && far(a, b, c);
}
bool in_angle(const Detection& b, const Vec2& v, const Constants& c) {
  return angle_sep(angle_of(avg_flow(b)), angle_of(v)) < c.delta_direction;
}
bool in_direction(const Detection& b, const Vec2& v, const Constants& c) {
  return no_jitter(b, normal_of(v), c) && !stationary(b, c) && in_angle(b, v, c);
}
bool approaching(const Detection& a, const Detection& b, const Constants& c) {
  return !alike(a, b) && stationary(b, c) && move_closer(a, b, c);
}
bool carry(const Detection& a, const Detection& b, const Vec2& v, const Constants& c) {
  return is_class(a, "person") && !alike(a, b) && in_direction(a, v, c) && in_direction(b, v, c);
}
bool carrying(const Detection& a, const Detection& b, const Constants& c) {
  if (c.carry_horizontal) return carry(a, b, Vec2(1, 0), c) || carry(a, b, Vec2(-1, 0), c);
  return carry(a, b, kUp, c) || carry(a, b, kDown, c);
}
bool departing(const Detection& a, const Detection& b, const Constants& c) {
  return !alike(a, b) && stationary(b, c) && move_farther(a, b, c);
}
bool picking_up(const Detection& a, const Detection& b, const Constants& c) {
  return is_class(a, "person") && !alike(a, b) && stationary(a, c) && in_direction(b, kUp, c);
}
bool putting_down(const Detection& a, const Detection& b, const Constants& c) {
  return is_class(a, "person") && !alike(a, b) && stationary(a, c) && in_direction(b, kDown, c);
}

struct AtomInfo {
  Pred pred;
  std::string_view name;
  int arity;
};

constexpr std::array<AtomInfo, 31> kAtoms{{
    {Pred::True, "TRUE", 0},
    {Pred::Person, "PERSON", 1},
    {Pred::Backpack, "BACKPACK", 1},
    {Pred::Chair, "CHAIR", 1},
    {Pred::Trashcan, "TRASHCAN", 1},
    {Pred::Blue, "BLUE", 1},
    {Pred::Red, "RED", 1},
    {Pred::Stationary, "STATIONARY", 1},
    {Pred::Quick, "QUICK", 1},
    {Pred::Slow, "SLOW", 1},
    {Pred::NoJitter, "NOJITTER", 1},
    {Pred::HasColor, "HASCOLOR", 1},
    {Pred::InAngle, "INANGLE", 1},
    {Pred::InDirection, "INDIRECTION", 1},
    {Pred::Carry, "CARRY", 2},
    {Pred::Alike, "ALIKE", 2},
    {Pred::Close, "CLOSE", 2},
    {Pred::Far, "FAR", 2},
    {Pred::Left, "LEFT", 2},
    {Pred::Right, "RIGHT", 2},
    {Pred::Closer, "CLOSER", 2},
    {Pred::Farther, "FARTHER", 2},
    {Pred::MoveCloser, "MOVECLOSER", 2},
    {Pred::MoveFarther, "MOVEFARTHER", 2},
    {Pred::StationaryClose, "STATIONARYCLOSE", 2},
    {Pred::StationaryFar, "STATIONARYFAR", 2},
    {Pred::Approaching, "APPROACHING", 2},
    {Pred::Carrying, "CARRYING", 2},
    {Pred::Departing, "DEPARTING", 2},
    {Pred::PickingUp, "PICKINGUP", 2},
    {Pred::PuttingDown, "PUTTINGDOWN", 2},
}};

const AtomInfo& info(Pred p) {
  for (const auto& a : kAtoms) {
    if (a.pred == p) return a;
  }
  throw Error("unknown predicate");
}

bool parameterized(Pred p) {
  return p == Pred::NoJitter || p == Pred::HasColor || p == Pred::InAngle ||
         p == Pred::InDirection || p == Pred::Carry;
}

}  // namespace

int Atom::arity() const { return info(pred).arity; }

std::string Atom::name() const {
  std::string n(info(pred).name);
  if (pred == Pred::HasColor) {
    n += "(" + std::to_string(hue) + ")";
  } else if (parameterized(pred)) {
    n += "(" + std::to_string(direction.x()) + "," + std::to_string(direction.y()) + ")";
  }
  return n;
}

std::optional<Atom> atom_by_name(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (const auto& a : kAtoms) {
    if (a.name == upper && !parameterized(a.pred)) return Atom{a.pred};
  }
  return std::nullopt;
}

bool eval_atom(const Atom& atom, std::span<const Detection* const> args, const Constants& c) {
  const int arity = atom.arity();
  if (arity == 0) return true;
  if (static_cast<int>(args.size()) != arity) {
    throw ValidationError("atom " + atom.name() + " expects " + std::to_string(arity) +
                          " argument(s), got " + std::to_string(args.size()));
  }
  const Detection& a = *args[0];
  switch (atom.pred) {
    case Pred::True: return true;
    case Pred::Person: return is_class(a, "person");
    case Pred::Backpack: return is_class(a, "backpack");
    case Pred::Chair: return is_class(a, "chair");
    case Pred::Trashcan: return is_class(a, "trashcan");
    case Pred::Blue: return has_color(a, 225.0, c);
    case Pred::Red: return has_color(a, 0.0, c);
    case Pred::Stationary: return stationary(a, c);
    case Pred::Quick: return quick(a, c);
    case Pred::Slow: return slow(a, c);
    case Pred::NoJitter: return no_jitter(a, atom.direction, c);
    case Pred::HasColor: return has_color(a, atom.hue, c);
    case Pred::InAngle: return in_angle(a, atom.direction, c);
    case Pred::InDirection: return in_direction(a, atom.direction, c);
    default: break;
  }
  const Detection& b = *args[1];
  switch (atom.pred) {
    case Pred::Carry: return carry(a, b, atom.direction, c);
    case Pred::Alike: return alike(a, b);
    case Pred::Close: return close(a, b, c);
    case Pred::Far: return far(a, b, c);
    case Pred::Left: return left(a, b, c);
    case Pred::Right: return right(a, b, c);
    case Pred::Closer: return closer(a, b, c);
    case Pred::Farther: return farther(a, b, c);
    case Pred::MoveCloser: return move_closer(a, b, c);
    case Pred::MoveFarther: return move_farther(a, b, c);
    case Pred::StationaryClose: return stationary_close(a, b, c);
    case Pred::StationaryFar: return stationary_far(a, b, c);
    case Pred::Approaching: return approaching(a, b, c);
    case Pred::Carrying: return carrying(a, b, c);
    case Pred::Departing: return departing(a, b, c);
    case Pred::PickingUp: return picking_up(a, b, c);
    case Pred::PuttingDown: return putting_down(a, b, c);
    default: break;
  }
  throw Error("unhandled predicate " + atom.name());
}

bool eval_atom(const Atom& atom, const Detection& b, const Constants& c) {
  const Detection* args[] = {&b};
  return eval_atom(atom, std::span<const Detection* const>(args, 1), c);
}

bool eval_atom(const Atom& atom, const Detection& b1, const Detection& b2, const Constants& c) {
  const Detection* args[] = {&b1, &b2};
  return eval_atom(atom, std::span<const Detection* const>(args, 2), c);
}

}  // namespace sentrack
