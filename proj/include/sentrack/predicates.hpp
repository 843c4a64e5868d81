#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sentrack/clip.hpp"

namespace sentrack {

/// Thresholds used by the predicates. Pixel values are per frame.
struct Constants {
  double x_boundary = 300;
  double next_to = 50;
  double delta_static = 6;
  double delta_jump = 30;
  double delta_quick = 80;
  double delta_slow = 30;
  double delta_closing = 10;
  double delta_direction = 30;  // degrees; also serves as the inAngle tolerance
  double delta_hue = 30;        // degrees
  // Substitute horizontal direction vectors in `carrying`.
  bool carry_horizontal = false;

  /// Sets a constant by its config key; returns false for unknown keys.
  bool set(std::string_view key, double value);
  void validate() const;
};

// Primitive functions over detections.
double x_center(const Detection& b);
const std::string& model(const Detection& b);
double hue(const Detection& b);
Vec2 avg_flow(const Detection& b);
/// Box displaced by its own flow, converted back to image coordinates.
BBox fwd_proj(const Detection& b);
/// Direction of v in degrees, [0, 360).
double angle_of(const Vec2& v);
/// Circular distance between two angles in degrees, [0, 180].
double angle_sep(double a, double b);
/// Unit normal (v rotated by +90 degrees).
Vec2 normal_of(const Vec2& v);

enum class Pred {
  True,
  // unary, class and color
  Person, Backpack, Chair, Trashcan, Blue, Red,
  // unary, motion
  Stationary, Quick, Slow,
  // parameterized
  NoJitter, HasColor, InAngle, InDirection, Carry,
  // binary
  Alike, Close, Far, Left, Right, Closer, Farther, MoveCloser, MoveFarther,
  StationaryClose, StationaryFar, Approaching, Carrying, Departing, PickingUp, PuttingDown,
};

/// An atom of the recognizer alphabet: a predicate plus any bound constant
/// argument (a hue for HasColor, a direction for the vector-valued ones).
struct Atom {
  Pred pred = Pred::True;
  double hue = 0;
  Vec2 direction = Vec2::Zero();

  /// 0 for TRUE, otherwise the number of detections consumed.
  int arity() const;
  std::string name() const;

  bool operator==(const Atom& o) const {
    return pred == o.pred && hue == o.hue && direction == o.direction;
  }
};

/// Looks up an atom by its DSL name (case-insensitive, e.g. "stationaryClose").
std::optional<Atom> atom_by_name(std::string_view name);

/// Evaluates an atom on one or two detections. TRUE ignores its arguments.
/// Throws ValidationError when the argument count does not match the arity.
bool eval_atom(const Atom& atom, std::span<const Detection* const> args, const Constants& c);
bool eval_atom(const Atom& atom, const Detection& b, const Constants& c);
bool eval_atom(const Atom& atom, const Detection& b1, const Detection& b2, const Constants& c);

}  // namespace sentrack
