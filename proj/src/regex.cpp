#include "sentrack/regex.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include "sentrack/error.hpp"

namespace sentrack {

namespace {

class RegexParser {
 public:
  explicit RegexParser(std::string_view text) : text_(text) {}

  Regex parse() {
    skip_ws();
    if (at_end()) fail("empty expression");
    Regex r = parse_union();
    skip_ws();
    if (!at_end()) fail(std::string("unexpected '") + peek() + "'");
    return r;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("regex syntax error at column " + std::to_string(pos_ + 1) + ": " + what +
                     " in \"" + std::string(text_) + "\"");
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Regex parse_union() {
    std::vector<Regex> alts{parse_concat()};
    skip_ws();
    while (peek() == '|') {
      ++pos_;
      alts.push_back(parse_concat());
      skip_ws();
    }
    return alts.size() == 1 ? std::move(alts.front()) : Regex::alt(std::move(alts));
  }

  bool starts_primary() {
    skip_ws();
    const char c = peek();
    return c == '(' || c == '[' || std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  Regex parse_concat() {
    if (!starts_primary()) fail("expected an atom or group");
    std::vector<Regex> items;
    while (starts_primary()) items.push_back(parse_postfix());
    return items.size() == 1 ? std::move(items.front()) : Regex::concat(std::move(items));
  }

  // Looks for "n,]" or "n,}" right after an opening bracket at `pos_`.
  std::optional<int> repeat_count(char close) const {
    std::size_t p = pos_;
    while (p < text_.size() && text_[p] == ' ') ++p;
    const std::size_t digits = p;
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
    if (p == digits) return std::nullopt;
    const int n = std::stoi(std::string(text_.substr(digits, p - digits)));
    while (p < text_.size() && text_[p] == ' ') ++p;
    if (p >= text_.size() || text_[p] != ',') return std::nullopt;
    ++p;
    while (p < text_.size() && text_[p] == ' ') ++p;
    if (p >= text_.size() || text_[p] != close) return std::nullopt;
    return n;
  }

  void skip_past(char close) {
    while (!at_end() && text_[pos_] != close) ++pos_;
    ++pos_;
  }

  Regex parse_postfix() {
    Regex r = parse_primary();
    for (;;) {
      const std::size_t save = pos_;
      skip_ws();
      const char c = peek();
      if (c == '*') {
        ++pos_;
        r = Regex::star(std::move(r));
      } else if (c == '+') {
        ++pos_;
        r = Regex::plus(std::move(r));
      } else if (c == '{') {
        ++pos_;
        auto n = repeat_count('}');
        if (!n) fail("expected '{n,}'");
        if (*n < 1) fail("repeat count must be >= 1");
        skip_past('}');
        r = Regex::at_least(*n, std::move(r));
      } else if (c == '[') {
        ++pos_;
        auto n = repeat_count(']');
        if (!n) {  // an optional group starting the next concat item
          pos_ = save;
          return r;
        }
        if (*n < 1) fail("repeat count must be >= 1");
        skip_past(']');
        r = Regex::noisy_at_least(*n, std::move(r));
      } else {
        pos_ = save;
        return r;
      }
    }
  }

  Regex parse_primary() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Regex r = parse_union();
      expect(')');
      return r;
    }
    if (c == '[') {
      ++pos_;
      Regex r = parse_union();
      expect(']');
      return Regex::optional(std::move(r));
    }
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    auto atom = atom_by_name(name);
    if (!atom) {
      pos_ = start;
      fail("unknown atom '" + std::string(name) + "'");
    }
    return Regex::atom_of(*atom);
  }
};

std::string paren(const Regex& r) {
  const bool simple = r.kind == Regex::Kind::Atom || r.kind == Regex::Kind::Optional;
  return simple ? to_string(r) : "(" + to_string(r) + ")";
}

}  // namespace

Regex parse_regex(std::string_view text) { return RegexParser(text).parse(); }

std::string to_string(const Regex& r) {
  using K = Regex::Kind;
  switch (r.kind) {
    case K::Atom: return r.atom.name();
    case K::Epsilon: return "()";
    case K::Concat: {
      std::string s;
      for (const auto& k : r.kids) {
        if (!s.empty()) s += ' ';
        s += k.kind == K::Union ? "(" + to_string(k) + ")" : to_string(k);
      }
      return s;
    }
    case K::Union: {
      std::string s;
      for (const auto& k : r.kids) {
        if (!s.empty()) s += " | ";
        s += to_string(k);
      }
      return s;
    }
    case K::Star: return paren(r.kids[0]) + "*";
    case K::Plus: return paren(r.kids[0]) + "+";
    case K::Optional: return "[" + to_string(r.kids[0]) + "]";
    case K::RepeatAtLeast: return paren(r.kids[0]) + "{" + std::to_string(r.n) + ",}";
    case K::NoisyRepeatAtLeast: return paren(r.kids[0]) + "[" + std::to_string(r.n) + ",]";
  }
  return {};
}

Regex desugar(const Regex& r) {
  using K = Regex::Kind;
  switch (r.kind) {
    case K::Atom:
    case K::Epsilon: return r;
    case K::Concat:
    case K::Union: {
      Regex out = r;
      for (auto& k : out.kids) k = desugar(k);
      return out;
    }
    case K::Star: return Regex::star(desugar(r.kids[0]));
    case K::Plus: {
      Regex inner = desugar(r.kids[0]);
      return Regex::concat({inner, Regex::star(inner)});
    }
    case K::Optional: return Regex::alt({desugar(r.kids[0]), Regex::epsilon()});
    case K::RepeatAtLeast: {
      // R ... R R* with n copies of R, right-nested.
      const Regex inner = desugar(r.kids[0]);
      Regex tail = Regex::star(inner);
      for (int i = 0; i < r.n; ++i) tail = Regex::concat({inner, std::move(tail)});
      return tail;
    }
    case K::NoisyRepeatAtLeast: {
      // (R [TRUE]){n,}
      Regex unit = Regex::concat({r.kids[0], Regex::optional(Regex::atom_of(Atom{Pred::True}))});
      return desugar(Regex::at_least(r.n, std::move(unit)));
    }
  }
  return r;
}

int regex_arity(const Regex& r) {
  if (r.kind == Regex::Kind::Atom) return r.atom.arity();
  int a = 0;
  for (const auto& k : r.kids) a = std::max(a, regex_arity(k));
  return a;
}

namespace {
void collect_arities(const Regex& r, std::set<int>& out) {
  if (r.kind == Regex::Kind::Atom && r.atom.arity() > 0) out.insert(r.atom.arity());
  for (const auto& k : r.kids) collect_arities(k, out);
}
}  // namespace

bool uniform_arity(const Regex& r) {
  std::set<int> a;
  collect_arities(r, a);
  return a.size() <= 1;
}

Recognizer::Recognizer(std::vector<Atom> atoms, std::vector<std::uint8_t> initial,
                       std::vector<std::uint8_t> final_states, std::vector<std::uint8_t> transitions)
    : atoms_(std::move(atoms)),
      initial_(std::move(initial)),
      final_(std::move(final_states)),
      transitions_(std::move(transitions)) {
  const std::size_t k = atoms_.size();
  if (initial_.size() != k || final_.size() != k || transitions_.size() != k * k) {
    throw ValidationError("recognizer tables do not match its state count");
  }
}

int Recognizer::arity() const {
  int a = 0;
  for (const auto& atom : atoms_) a = std::max(a, atom.arity());
  return a;
}

namespace {

struct Glushkov {
  std::vector<Atom> atoms;
  std::vector<std::set<int>> follow;

  struct Info {
    bool nullable = false;
    std::set<int> first, last;
  };

  Info visit(const Regex& r) {
    using K = Regex::Kind;
    Info out;
    switch (r.kind) {
      case K::Atom: {
        const int p = static_cast<int>(atoms.size());
        atoms.push_back(r.atom);
        follow.emplace_back();
        out.first = out.last = {p};
        return out;
      }
      case K::Epsilon: out.nullable = true; return out;
      case K::Union: {
        for (const auto& k : r.kids) {
          Info i = visit(k);
          out.nullable = out.nullable || i.nullable;
          out.first.insert(i.first.begin(), i.first.end());
          out.last.insert(i.last.begin(), i.last.end());
        }
        return out;
      }
      case K::Concat: {
        out.nullable = true;
        for (const auto& k : r.kids) {
          Info i = visit(k);
          for (int l : out.last) follow[static_cast<std::size_t>(l)].insert(i.first.begin(), i.first.end());
          if (out.nullable) out.first.insert(i.first.begin(), i.first.end());
          if (i.nullable) {
            out.last.insert(i.last.begin(), i.last.end());
          } else {
            out.last = i.last;
          }
          out.nullable = out.nullable && i.nullable;
        }
        return out;
      }
      case K::Star: {
        Info i = visit(r.kids[0]);
        for (int l : i.last) follow[static_cast<std::size_t>(l)].insert(i.first.begin(), i.first.end());
        i.nullable = true;
        return i;
      }
      default: throw ValidationError("compile() requires a desugared expression");
    }
  }
};

}  // namespace

Recognizer compile(const Regex& core) {
  Glushkov g;
  const auto root = g.visit(core);
  const int n = static_cast<int>(g.atoms.size());

  // Trim to states reachable from `first` and co-reachable to `last`.
  std::vector<char> fwd(static_cast<std::size_t>(n), 0), bwd(static_cast<std::size_t>(n), 0);
  std::vector<int> stack(root.first.begin(), root.first.end());
  for (int p : stack) fwd[static_cast<std::size_t>(p)] = 1;
  while (!stack.empty()) {
    const int p = stack.back();
    stack.pop_back();
    for (int q : g.follow[static_cast<std::size_t>(p)]) {
      if (!fwd[static_cast<std::size_t>(q)]) {
        fwd[static_cast<std::size_t>(q)] = 1;
        stack.push_back(q);
      }
    }
  }
  stack.assign(root.last.begin(), root.last.end());
  for (int p : stack) bwd[static_cast<std::size_t>(p)] = 1;
  while (!stack.empty()) {
    const int q = stack.back();
    stack.pop_back();
    for (int p = 0; p < n; ++p) {
      if (!bwd[static_cast<std::size_t>(p)] && g.follow[static_cast<std::size_t>(p)].count(q)) {
        bwd[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
    }
  }
  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  std::vector<Atom> atoms;
  for (int p = 0; p < n; ++p) {
    if (fwd[static_cast<std::size_t>(p)] && bwd[static_cast<std::size_t>(p)]) {
      remap[static_cast<std::size_t>(p)] = static_cast<int>(atoms.size());
      atoms.push_back(g.atoms[static_cast<std::size_t>(p)]);
    }
  }
  const std::size_t k = atoms.size();
  if (k == 0) throw ValidationError("regular expression accepts no non-empty sequence");

  std::vector<std::uint8_t> initial(k, 0), final_states(k, 0), trans(k * k, 0);
  for (int p : root.first) {
    if (remap[static_cast<std::size_t>(p)] >= 0) initial[static_cast<std::size_t>(remap[static_cast<std::size_t>(p)])] = 1;
  }
  for (int p : root.last) {
    if (remap[static_cast<std::size_t>(p)] >= 0) final_states[static_cast<std::size_t>(remap[static_cast<std::size_t>(p)])] = 1;
  }
  for (int p = 0; p < n; ++p) {
    const int a = remap[static_cast<std::size_t>(p)];
    if (a < 0) continue;
    for (int q : g.follow[static_cast<std::size_t>(p)]) {
      const int b = remap[static_cast<std::size_t>(q)];
      if (b >= 0) trans[static_cast<std::size_t>(a) * k + static_cast<std::size_t>(b)] = 1;
    }
  }
  return merge_equivalent_states(
      Recognizer(std::move(atoms), std::move(initial), std::move(final_states), std::move(trans)));
}

Recognizer merge_equivalent_states(const Recognizer& rec) {
  const int n = rec.num_states();
  // Start from blocks of equal (atom, final) and split by successor blocks
  // until stable. States in one block accept the same continuations.
  std::vector<int> block(static_cast<std::size_t>(n));
  std::vector<std::pair<Atom, bool>> keys;
  for (int p = 0; p < n; ++p) {
    const std::pair<Atom, bool> key{rec.atom(p), rec.is_final(p)};
    auto it = std::find(keys.begin(), keys.end(), key);
    block[static_cast<std::size_t>(p)] = static_cast<int>(it - keys.begin());
    if (it == keys.end()) keys.push_back(key);
  }
  std::size_t count = keys.size();
  for (;;) {
    std::vector<std::pair<int, std::set<int>>> sigs;
    std::vector<int> next(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
      std::pair<int, std::set<int>> sig{block[static_cast<std::size_t>(p)], {}};
      for (int q = 0; q < n; ++q)
        if (rec.allows(p, q)) sig.second.insert(block[static_cast<std::size_t>(q)]);
      auto it = std::find(sigs.begin(), sigs.end(), sig);
      next[static_cast<std::size_t>(p)] = static_cast<int>(it - sigs.begin());
      if (it == sigs.end()) sigs.push_back(std::move(sig));
    }
    block.swap(next);
    if (sigs.size() == count) break;
    count = sigs.size();
  }

  const std::size_t k = count;
  std::vector<Atom> atoms(k);
  std::vector<std::uint8_t> initial(k, 0), final_states(k, 0), trans(k * k, 0);
  for (int p = 0; p < n; ++p) {
    const auto b = static_cast<std::size_t>(block[static_cast<std::size_t>(p)]);
    atoms[b] = rec.atom(p);
    if (rec.is_initial(p)) initial[b] = 1;
    if (rec.is_final(p)) final_states[b] = 1;
    for (int q = 0; q < n; ++q)
      if (rec.allows(p, q)) trans[b * k + static_cast<std::size_t>(block[static_cast<std::size_t>(q)])] = 1;
  }
  return Recognizer(std::move(atoms), std::move(initial), std::move(final_states), std::move(trans));
}

Recognizer compile_regex(const Regex& r) { return compile(desugar(r)); }

bool accepts(const Recognizer& rec, int num_frames, const AtomOracle& truth) {
  const int k = rec.num_states();
  if (num_frames < 1 || k == 0) return false;
  std::vector<char> live(static_cast<std::size_t>(k), 0), next(static_cast<std::size_t>(k), 0);
  for (int s = 0; s < k; ++s) live[static_cast<std::size_t>(s)] = rec.is_initial(s) && truth(0, rec.atom(s));
  for (int t = 1; t < num_frames; ++t) {
    std::fill(next.begin(), next.end(), 0);
    for (int to = 0; to < k; ++to) {
      bool reach = false;
      for (int from = 0; from < k && !reach; ++from) {
        reach = live[static_cast<std::size_t>(from)] && rec.allows(from, to);
      }
      next[static_cast<std::size_t>(to)] = reach && truth(t, rec.atom(to));
    }
    live.swap(next);
  }
  for (int s = 0; s < k; ++s) {
    if (live[static_cast<std::size_t>(s)] && rec.is_final(s)) return true;
  }
  return false;
}

}  // namespace sentrack
