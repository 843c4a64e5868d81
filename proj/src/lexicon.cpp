#include "sentrack/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "sentrack/error.hpp"

namespace sentrack {

namespace detail {
extern const std::string_view kBuiltinLexiconText;
}

namespace {

constexpr std::string_view kPosNames[] = {"N", "A", "Adv", "V", "P", "P_M", "D"};
constexpr Pos kPosOrder[] = {Pos::N, Pos::A, Pos::Adv, Pos::V, Pos::P, Pos::PM, Pos::D};
constexpr std::string_view kRoleNames[] = {"agent", "patient", "source", "goal", "referent"};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// At most max_parts pieces; the last one keeps any further separators.
std::vector<std::string> split(std::string_view s, char sep, std::size_t max_parts = std::string_view::npos) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = out.size() + 1 == max_parts ? std::string_view::npos : s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

// Collapses internal whitespace and lowercases.
std::string normalize_lemma(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string replace_dagger(std::string_view text, int n) {
  static const std::string dagger = "\xE2\x80\xA0";  // U+2020
  std::string s(text);
  const std::string rep = "[" + std::to_string(n) + ",]";
  for (std::size_t p = s.find(dagger); p != std::string::npos; p = s.find(dagger, p + rep.size()))
    s.replace(p, dagger.size(), rep);
  return s;
}

[[noreturn]] void fail_line(int line, const std::string& what) {
  throw ParseError("lexicon line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string_view to_string(Pos pos) {
  for (std::size_t i = 0; i < std::size(kPosOrder); ++i)
    if (kPosOrder[i] == pos) return kPosNames[i];
  return "?";
}

std::optional<Pos> pos_from_string(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kPosOrder); ++i)
    if (kPosNames[i] == s) return kPosOrder[i];
  if (s == "PM") return Pos::PM;
  return std::nullopt;
}

std::string_view to_string(Role role) { return kRoleNames[static_cast<int>(role)]; }

std::optional<Role> role_from_string(std::string_view s) {
  for (int i = 0; i < kNumRoles; ++i)
    if (kRoleNames[i] == s) return static_cast<Role>(i);
  return std::nullopt;
}

std::string to_string(RoleSet roles) {
  if (roles == RoleSet::all()) return "any";
  std::string s;
  for (int i = 0; i < kNumRoles; ++i) {
    if (!roles.contains(static_cast<Role>(i))) continue;
    if (!s.empty()) s += ", ";
    s += kRoleNames[i];
  }
  return s;
}

const Recognizer& LexicalEntry::recognizer() const {
  if (!compiled) throw ValidationError("entry '" + lemma + "' has no recognizer");
  return *compiled;
}

void validate_entry(const LexicalEntry& e) {
  const std::string who = "entry '" + e.lemma + "'";
  if (e.lemma.empty()) throw ValidationError("empty lemma");
  if (e.pos == Pos::D) {
    if (!e.role_sets.empty() || e.regex) throw ValidationError(who + ": determiners take no roles or regex");
    return;
  }
  if (!e.regex) throw ValidationError(who + ": missing regex");
  if (e.role_sets.empty()) throw ValidationError(who + ": needs at least one role set");
  for (const auto& rs : e.role_sets)
    if (rs.empty()) throw ValidationError(who + ": empty role set");
  if (!uniform_arity(*e.regex)) throw ValidationError(who + ": regex mixes atom arities");
  const int ra = regex_arity(*e.regex);
  if (ra != 0 && ra != e.arity())
    throw ValidationError(who + ": arity mismatch, " + std::to_string(e.arity()) + " role sets but regex atoms of arity " +
                          std::to_string(ra));
  const int expected = (e.pos == Pos::V || e.pos == Pos::P || e.pos == Pos::PM) ? 2 : 1;
  if (e.arity() != expected)
    throw ValidationError(who + ": " + std::string(to_string(e.pos)) + " takes " + std::to_string(expected) +
                          " argument(s), got " + std::to_string(e.arity()));
}

void Lexicon::put(LexicalEntry e) {
  e.lemma = normalize_lemma(e.lemma);
  validate_entry(e);
  if (e.regex) e.compiled = std::make_shared<const Recognizer>(compile_regex(*e.regex));
  const std::string key = e.lemma;
  entries_.insert_or_assign(key, std::move(e));
}

const LexicalEntry* Lexicon::find(std::string_view lemma) const {
  auto it = entries_.find(lemma);
  return it == entries_.end() ? nullptr : &it->second;
}

const LexicalEntry& Lexicon::at(std::string_view lemma) const {
  if (const auto* e = find(lemma)) return *e;
  throw ValidationError("unknown word '" + std::string(lemma) + "'");
}

std::size_t Lexicon::content_size() const { return entries_.size() - count(Pos::D); }

std::size_t Lexicon::count(Pos pos) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [&](const auto& kv) { return kv.second.pos == pos; }));
}

std::vector<std::string> Lexicon::lemmas(Pos pos) const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_)
    if (e.pos == pos) out.push_back(k);
  return out;
}

Lexicon parse_lexicon(std::string_view text, Lexicon base) {
  int hold = 3;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '@') {
      std::istringstream d(line.substr(1));
      std::string key;
      d >> key;
      if (key != "min_hold_frames") fail_line(line_no, "unknown directive '@" + key + "'");
      if (!(d >> hold) || hold < 1) fail_line(line_no, "min_hold_frames must be a positive integer");
      continue;
    }
    // the regex field may itself contain '|'
    const auto fields = split(line, '|', 4);
    if (fields.size() != 4) fail_line(line_no, "expected 4 '|'-separated fields, got " + std::to_string(fields.size()));
    LexicalEntry e;
    e.lemma = normalize_lemma(fields[0]);
    if (e.lemma.empty()) fail_line(line_no, "empty lemma");
    auto pos = pos_from_string(fields[1]);
    if (!pos) fail_line(line_no, "unknown part of speech '" + fields[1] + "'");
    e.pos = *pos;
    if (!fields[2].empty()) {
      for (const auto& arg : split(fields[2], ';')) {
        RoleSet rs;
        for (const auto& name : split(arg, ',')) {
          if (name == "any") {
            rs = RoleSet::all();
            continue;
          }
          auto r = role_from_string(name);
          if (!r) fail_line(line_no, "unknown role '" + name + "'");
          rs = rs.with(*r);
        }
        e.role_sets.push_back(rs);
      }
    }
    if (!fields[3].empty()) {
      try {
        e.regex = parse_regex(replace_dagger(fields[3], hold));
      } catch (const ParseError& err) {
        fail_line(line_no, err.what());
      }
    }
    if (!seen.insert(e.lemma).second) fail_line(line_no, "duplicate lemma '" + e.lemma + "'");
    try {
      base.put(std::move(e));
    } catch (const ValidationError& err) {
      fail_line(line_no, err.what());
    }
  }
  return base;
}

std::string serialize_lexicon(const Lexicon& lex) {
  std::ostringstream out;
  for (Pos pos : kPosOrder) {
    for (const auto& lemma : lex.lemmas(pos)) {
      const auto& e = lex.at(lemma);
      out << e.lemma << " | " << to_string(e.pos) << " | ";
      for (std::size_t i = 0; i < e.role_sets.size(); ++i) out << (i ? "; " : "") << to_string(e.role_sets[i]);
      out << " | ";
      if (e.regex) out << to_string(*e.regex);
      out << '\n';
    }
  }
  return out.str();
}

const Lexicon& builtin_lexicon() {
  static const Lexicon lex = parse_lexicon(detail::kBuiltinLexiconText);
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_lexicon(ss.str(), builtin_lexicon());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace sentrack
