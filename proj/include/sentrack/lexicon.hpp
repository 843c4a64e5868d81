#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentrack/regex.hpp"

namespace sentrack {

enum class Pos { N, A, V, Adv, P, PM, D };

std::string_view to_string(Pos pos);
std::optional<Pos> pos_from_string(std::string_view s);

enum class Role : std::uint8_t { Agent, Patient, Source, Goal, Referent };
inline constexpr int kNumRoles = 5;

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view s);

/// Bit set over Role.
struct RoleSet {
  std::uint8_t bits = 0;

  static RoleSet all() { return {0x1f}; }
  bool contains(Role r) const { return bits & (1u << static_cast<int>(r)); }
  RoleSet with(Role r) const { return {static_cast<std::uint8_t>(bits | (1u << static_cast<int>(r)))}; }
  RoleSet operator&(RoleSet o) const { return {static_cast<std::uint8_t>(bits & o.bits)}; }
  bool empty() const { return bits == 0; }
  bool operator==(const RoleSet&) const = default;
};

std::string to_string(RoleSet roles);

struct LexicalEntry {
  std::string lemma;  // may contain spaces ("picked up", "trash can")
  Pos pos = Pos::N;
  std::vector<RoleSet> role_sets;  // one per argument; size is the arity
  std::optional<Regex> regex;      // absent for determiners

  int arity() const { return static_cast<int>(role_sets.size()); }
  /// Compiled recognizer (shared, built once per entry).
  const Recognizer& recognizer() const;

  bool operator==(const LexicalEntry& o) const {
    return lemma == o.lemma && pos == o.pos && role_sets == o.role_sets && regex == o.regex;
  }

  std::shared_ptr<const Recognizer> compiled;
};

/// Checks the entry invariants; throws ValidationError.
void validate_entry(const LexicalEntry& e);

class Lexicon {
 public:
  /// Inserts or replaces an entry after validating it.
  void put(LexicalEntry e);
  const LexicalEntry* find(std::string_view lemma) const;
  const LexicalEntry& at(std::string_view lemma) const;

  const std::map<std::string, LexicalEntry, std::less<>>& entries() const { return entries_; }
  /// Number of content words (entries other than determiners).
  std::size_t content_size() const;
  std::size_t count(Pos pos) const;
  /// Lemmas of a part of speech in lexicographic order.
  std::vector<std::string> lemmas(Pos pos) const;

  bool operator==(const Lexicon& o) const { return entries_ == o.entries_; }

 private:
  std::map<std::string, LexicalEntry, std::less<>> entries_;
};

/// Parses lexicon DSL text; `base` entries are kept unless overridden.
Lexicon parse_lexicon(std::string_view text, Lexicon base = {});
std::string serialize_lexicon(const Lexicon& lex);

/// The 17 content words and two determiners of the default lexicon.
const Lexicon& builtin_lexicon();
/// Loads a user lexicon file and merges it over the built-ins.
Lexicon load_lexicon(const std::filesystem::path& path);

}  // namespace sentrack
