#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sentrack/predicates.hpp"

namespace sentrack {

/// Regular expression over predicate atoms. Concat and Union are n-ary.
struct Regex {
  enum class Kind { Atom, Epsilon, Concat, Union, Star, Plus, Optional, RepeatAtLeast, NoisyRepeatAtLeast };

  Kind kind = Kind::Epsilon;
  Atom atom;  // Kind::Atom only
  int n = 0;  // repeat count for the RepeatAtLeast kinds
  std::vector<Regex> kids;

  static Regex atom_of(Atom a) { return {Kind::Atom, a, 0, {}}; }
  static Regex epsilon() { return {}; }
  static Regex concat(std::vector<Regex> ks) { return {Kind::Concat, {}, 0, std::move(ks)}; }
  static Regex alt(std::vector<Regex> ks) { return {Kind::Union, {}, 0, std::move(ks)}; }
  static Regex star(Regex r) { return {Kind::Star, {}, 0, {std::move(r)}}; }
  static Regex plus(Regex r) { return {Kind::Plus, {}, 0, {std::move(r)}}; }
  static Regex optional(Regex r) { return {Kind::Optional, {}, 0, {std::move(r)}}; }
  static Regex at_least(int n, Regex r) { return {Kind::RepeatAtLeast, {}, n, {std::move(r)}}; }
  static Regex noisy_at_least(int n, Regex r) {
    return {Kind::NoisyRepeatAtLeast, {}, n, {std::move(r)}};
  }

  bool operator==(const Regex&) const = default;
};

/// Parses the lexicon regex DSL: atoms, juxtaposition, `|`, `*`, `+`, `[R]`,
/// `R{n,}`, `R[n,]`, parentheses. Throws ParseError with a column on failure.
Regex parse_regex(std::string_view text);

/// Renders an AST back to DSL text (round-trips through parse_regex).
std::string to_string(const Regex& r);

/// Rewrites Plus/Optional/RepeatAtLeast/NoisyRepeatAtLeast into
/// Atom/Concat/Union/Star/Epsilon.
Regex desugar(const Regex& r);

/// Largest atom arity in the expression (TRUE counts as 0).
int regex_arity(const Regex& r);
/// True when every non-TRUE atom has the same arity.
bool uniform_arity(const Regex& r);

/// Finite-state recognizer: each state emits one atom. Weights are implicit
/// 0/-inf: a path is valid iff it starts in `initial`, follows `transitions`
/// and ends in `final`, and every state's atom holds on its frame.
class Recognizer {
 public:
  Recognizer() = default;
  Recognizer(std::vector<Atom> atoms, std::vector<std::uint8_t> initial,
             std::vector<std::uint8_t> final_states, std::vector<std::uint8_t> transitions);

  int num_states() const { return static_cast<int>(atoms_.size()); }
  const Atom& atom(int k) const { return atoms_[static_cast<std::size_t>(k)]; }
  bool is_initial(int k) const { return initial_[static_cast<std::size_t>(k)] != 0; }
  bool is_final(int k) const { return final_[static_cast<std::size_t>(k)] != 0; }
  bool allows(int from, int to) const {
    return transitions_[static_cast<std::size_t>(from * num_states() + to)] != 0;
  }
  /// Largest atom arity over the states.
  int arity() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<std::uint8_t> initial_, final_, transitions_;
};

/// Position (Glushkov) automaton of a core AST, trimmed to useful states,
/// then reduced by merge_equivalent_states. Throws ValidationError when the
/// expression accepts no non-empty sequence.
Recognizer compile(const Regex& core);

/// Merges states with the same atom, final flag and successor classes
/// (coarsest such partition). Accepts the same sequences; `A A*` becomes a
/// single self-looping state. Block order follows the lowest member state.
Recognizer merge_equivalent_states(const Recognizer& rec);

/// desugar + compile.
Recognizer compile_regex(const Regex& r);

/// Truth of an atom at 0-based frame t.
using AtomOracle = std::function<bool(int t, const Atom& atom)>;

/// True iff some valid state path over frames [0, num_frames) exists whose
/// atoms all hold.
bool accepts(const Recognizer& rec, int num_frames, const AtomOracle& truth);

}  // namespace sentrack
