#include "sentrack/linguistics.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

#include "sentrack/error.hpp"

namespace sentrack {

std::vector<std::string> tokenize(std::string_view sentence, const Lexicon& lex) {
  std::vector<std::string> words;
  {
    std::string cleaned;
    for (char c : sentence) {
      const auto u = static_cast<unsigned char>(c);
      cleaned += std::isalpha(u) ? static_cast<char>(std::tolower(u)) : ' ';
    }
    std::istringstream in(cleaned);
    for (std::string w; in >> w;) words.push_back(w);
  }
  std::size_t longest = 1;
  for (const auto& [lemma, e] : lex.entries())
    longest = std::max<std::size_t>(longest, std::count(lemma.begin(), lemma.end(), ' ') + 1);

  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < words.size();) {
    bool found = false;
    for (std::size_t n = std::min(longest, words.size() - i); n >= 1 && !found; --n) {
      std::string cand = words[i];
      for (std::size_t k = 1; k < n; ++k) cand += ' ' + words[i + k];
      if (lex.find(cand)) {
        tokens.push_back(cand);
        i += n;
        found = true;
      }
    }
    if (!found)
      throw ParseError("unknown word '" + words[i] + "' at position " + std::to_string(i + 1));
  }
  return tokens;
}

std::vector<Pos> pos_sequence(const std::vector<std::string>& tokens, const Lexicon& lex) {
  std::vector<Pos> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lex.at(t).pos);
  return out;
}

namespace {

ParseNode leaf(Pos pos, const std::string& word) { return {std::string(to_string(pos)), word, {}}; }

class Parser {
 public:
  Parser(const std::vector<std::string>& tokens, const Lexicon& lex, const ParseOptions& opts)
      : tokens_(tokens), pos_(pos_sequence(tokens, lex)), opts_(opts) {}

  ParseNode run() {
    ParseNode s{"S", "", {}};
    s.kids.push_back(np());
    if (!(opts_.partial && done())) s.kids.push_back(vp());
    if (!done()) fail("end of sentence");
    return s;
  }

 private:
  const std::vector<std::string>& tokens_;
  std::vector<Pos> pos_;
  ParseOptions opts_;
  std::size_t i_ = 0;

  bool done() const { return i_ >= tokens_.size(); }
  bool peek(Pos p) const { return !done() && pos_[i_] == p; }
  // True when the input ran out and partial sentences are accepted.
  bool cut() const { return opts_.partial && done(); }

  [[noreturn]] void fail(const std::string& expected) const {
    if (done()) throw ParseError("parse error at end of sentence: expected " + expected);
    throw ParseError("parse error at token " + std::to_string(i_ + 1) + " ('" + tokens_[i_] + "'): expected " +
                     expected);
  }

  ParseNode take(Pos p) {
    if (!peek(p)) fail(std::string(to_string(p)));
    return leaf(p, tokens_[i_++]);
  }

  ParseNode np() {
    ParseNode n{"NP", "", {}};
    if (cut()) return n;
    n.kids.push_back(take(Pos::D));
    if (cut()) return n;
    if (peek(Pos::A)) n.kids.push_back(take(Pos::A));
    if (cut()) return n;
    n.kids.push_back(take(Pos::N));
    if (peek(Pos::P)) {
      ParseNode pp{"PP", "", {}};
      pp.kids.push_back(take(Pos::P));
      pp.kids.push_back(np());
      n.kids.push_back(std::move(pp));
    }
    return n;
  }

  ParseNode vp() {
    ParseNode v{"VP", "", {}};
    bool adverb = false;
    if (opts_.preverbal_adverb && peek(Pos::Adv)) {
      v.kids.push_back(take(Pos::Adv));
      adverb = true;
      if (cut()) return v;
    }
    v.kids.push_back(take(Pos::V));
    v.kids.push_back(np());
    if (!adverb && peek(Pos::Adv)) v.kids.push_back(take(Pos::Adv));
    if (peek(Pos::PM)) {
      ParseNode pm{"PP_M", "", {}};
      pm.kids.push_back(take(Pos::PM));
      pm.kids.push_back(np());
      v.kids.push_back(std::move(pm));
    }
    return v;
  }
};

void collect_leaves(const ParseNode& n, std::vector<std::string>& out) {
  if (n.is_leaf()) out.push_back(n.word);
  for (const auto& k : n.kids) collect_leaves(k, out);
}

class Mapper {
 public:
  explicit Mapper(const Lexicon& lex) : lex_(lex) {}

  ArgumentMapping run(const ParseNode& s) {
    const int subj = np(s.kids.at(0));
    if (s.kids.size() > 1) vp(s.kids[1], subj);
    return std::move(m_);
  }

 private:
  const Lexicon& lex_;
  ArgumentMapping m_;

  std::size_t push(const ParseNode& leaf, std::vector<int> args) {
    m_.words.push_back({leaf.word, lex_.at(leaf.word).pos, std::move(args), -1});
    return m_.words.size() - 1;
  }

  int np(const ParseNode& n) {
    const int id = m_.num_participants++;
    const bool has_noun = std::any_of(n.kids.begin(), n.kids.end(), [](const ParseNode& k) { return k.label == "N"; });
    m_.placeholder.push_back(!has_noun);
    for (const auto& k : n.kids) {
      if (k.label == "A" || k.label == "N") {
        push(k, {id});
      } else if (k.label == "PP") {
        const std::size_t w = push(k.kids.at(0), {});
        const int obj = np(k.kids.at(1));
        m_.words[w].args = {id, obj};
      }
    }
    return id;
  }

  void vp(const ParseNode& v, int subj) {
    std::vector<std::size_t> adverbs;
    std::optional<std::size_t> verb;
    int obj = -1;
    for (const auto& k : v.kids) {
      if (k.label == "Adv") {
        adverbs.push_back(push(k, {subj}));
      } else if (k.label == "V") {
        verb = push(k, {});
      } else if (k.label == "NP") {
        obj = np(k);
        m_.words[*verb].args = {subj, obj};
      } else if (k.label == "PP_M") {
        const std::size_t w = push(k.kids.at(0), {});
        const int target = np(k.kids.at(1));
        m_.words[w].args = {subj, target};
        m_.words[w].alt_first = obj;
      }
    }
    // An adverb describes the verb argument that undergoes the motion: the
    // patient when the verb has one, else the subject.
    if (!verb) return;
    const auto& ve = lex_.at(m_.words[*verb].lemma);
    for (std::size_t i = 0; i < ve.role_sets.size(); ++i) {
      if (ve.role_sets[i].contains(Role::Patient) && !ve.role_sets[i].contains(Role::Agent)) {
        for (auto a : adverbs) m_.words[a].args = {m_.words[*verb].args.at(i)};
        break;
      }
    }
  }
};

}  // namespace

ParseNode parse(const std::vector<std::string>& tokens, const Lexicon& lex, const ParseOptions& opts) {
  return Parser(tokens, lex, opts).run();
}

std::vector<std::string> unparse(const ParseNode& tree) {
  std::vector<std::string> out;
  collect_leaves(tree, out);
  return out;
}

std::string to_string(const ParseNode& tree) {
  if (tree.kids.empty()) return tree.label;
  std::string s = tree.label + "(";
  for (std::size_t i = 0; i < tree.kids.size(); ++i) s += (i ? "," : "") + to_string(tree.kids[i]);
  return s + ")";
}

ArgumentMapping assign_participants(const ParseNode& tree, const Lexicon& lex) { return Mapper(lex).run(tree); }

void assign_roles(ArgumentMapping& m, const Lexicon& lex) {
  std::vector<std::size_t> choice_words;
  for (std::size_t w = 0; w < m.words.size(); ++w)
    if (m.words[w].alt_first >= 0) choice_words.push_back(w);

  // Each bit of `mask` swaps one motion preposition to its alternative; the
  // enumeration order tries subjects first, earlier words first.
  const std::size_t n = choice_words.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::size_t rev = 0;
    for (std::size_t b = 0; b < n; ++b)
      if (mask & (std::size_t{1} << b)) rev |= std::size_t{1} << (n - 1 - b);

    std::vector<RoleSet> allowed(static_cast<std::size_t>(m.num_participants), RoleSet::all());
    std::vector<std::vector<int>> args;
    for (std::size_t w = 0; w < m.words.size(); ++w) {
      std::vector<int> a = m.words[w].args;
      const auto it = std::find(choice_words.begin(), choice_words.end(), w);
      if (it != choice_words.end() && (rev & (std::size_t{1} << (it - choice_words.begin()))))
        a[0] = m.words[w].alt_first;
      const auto& e = lex.at(m.words[w].lemma);
      for (std::size_t i = 0; i < a.size(); ++i)
        allowed[static_cast<std::size_t>(a[i])] = allowed[static_cast<std::size_t>(a[i])] & e.role_sets.at(i);
      args.push_back(std::move(a));
    }
    if (std::any_of(allowed.begin(), allowed.end(), [](RoleSet r) { return r.empty(); })) continue;

    m.roles.clear();
    for (RoleSet r : allowed) {
      int k = 0;
      while (!r.contains(static_cast<Role>(k))) ++k;
      m.roles.push_back(static_cast<Role>(k));
    }
    for (std::size_t w = 0; w < m.words.size(); ++w) m.words[w].args = std::move(args[w]);
    return;
  }
  throw RoleError("no consistent role assignment");
}

Analysis analyze_tokens(const std::vector<std::string>& tokens, const Lexicon& lex, const ParseOptions& opts) {
  Analysis a;
  a.tokens = tokens;
  a.tree = parse(tokens, lex, opts);
  a.mapping = assign_participants(a.tree, lex);
  assign_roles(a.mapping, lex);
  return a;
}

Analysis analyze(std::string_view sentence, const Lexicon& lex, const ParseOptions& opts) {
  return analyze_tokens(tokenize(sentence, lex), lex, opts);
}

std::string render_sentence(const std::vector<std::string>& tokens) {
  std::string s;
  for (const auto& t : tokens) s += (s.empty() ? "" : " ") + t;
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

// Phases: 0 subject NP, 1 after a preverbal adverb, 2 object NP,
// 3 PP_M object NP, 4 after a postverbal adverb.
std::optional<PosAutomaton::State> PosAutomaton::next(const State& s, Pos pos) const {
  State t = s;
  if (s.phase == 1) {
    if (pos != Pos::V) return std::nullopt;
    return State{2, 0, true};
  }
  if (s.phase == 4) {
    if (pos != Pos::PM) return std::nullopt;
    return State{3, 0, true};
  }
  switch (s.np) {
    case 0:
      if (pos != Pos::D) return std::nullopt;
      t.np = 1;
      return t;
    case 1:
    case 2:
      if (pos == Pos::A && s.np == 1) {
        t.np = 2;
        return t;
      }
      if (pos != Pos::N) return std::nullopt;
      t.np = 3;
      return t;
    default:
      break;
  }
  if (pos == Pos::P && np_recursion_) {
    t.np = 0;
    return t;
  }
  if (s.phase == 0) {
    if (pos == Pos::V) return State{2, 0, false};
    if (pos == Pos::Adv && preverbal_adverb_) return State{1, 0, true};
  } else if (s.phase == 2) {
    if (pos == Pos::Adv && !s.adverb) return State{4, 0, true};
    if (pos == Pos::PM) return State{3, 0, s.adverb};
  }
  return std::nullopt;
}

bool PosAutomaton::is_final(const State& s) const {
  return s.phase == 4 || ((s.phase == 2 || s.phase == 3) && s.np == 3);
}

namespace {
constexpr Pos kAllPos[] = {Pos::N, Pos::A, Pos::V, Pos::Adv, Pos::P, Pos::PM, Pos::D};
int state_key(const PosAutomaton::State& s) { return (s.phase * 4 + s.np) * 2 + (s.adverb ? 1 : 0); }
constexpr int kNumStateKeys = 5 * 4 * 2;
}  // namespace

int PosAutomaton::distance_to_final(const State& s) const {
  std::vector<int> dist(kNumStateKeys, -1);
  std::deque<State> queue{s};
  dist[static_cast<std::size_t>(state_key(s))] = 0;
  while (!queue.empty()) {
    const State cur = queue.front();
    queue.pop_front();
    const int d = dist[static_cast<std::size_t>(state_key(cur))];
    if (is_final(cur)) return d;
    for (Pos p : kAllPos) {
      auto nxt = next(cur, p);
      if (!nxt || dist[static_cast<std::size_t>(state_key(*nxt))] >= 0) continue;
      dist[static_cast<std::size_t>(state_key(*nxt))] = d + 1;
      queue.push_back(*nxt);
    }
  }
  return -1;
}

bool PosAutomaton::is_prefix(const std::vector<Pos>& seq) const {
  State s = start();
  for (Pos p : seq) {
    auto nxt = next(s, p);
    if (!nxt) return false;
    s = *nxt;
  }
  return true;
}

bool PosAutomaton::is_sentence(const std::vector<Pos>& seq) const {
  State s = start();
  for (Pos p : seq) {
    auto nxt = next(s, p);
    if (!nxt) return false;
    s = *nxt;
  }
  return is_final(s);
}

bool PosAutomaton::completable(const std::vector<Pos>& seq, int max_words) const {
  // Breadth-first search over (automaton state, words of seq matched); every
  // emitted word costs one, matched or inserted.
  const std::size_t n = seq.size();
  auto key = [&](const State& s, std::size_t i) { return static_cast<std::size_t>(state_key(s)) * (n + 1) + i; };
  std::vector<int> dist(static_cast<std::size_t>(kNumStateKeys) * (n + 1), -1);
  std::deque<std::pair<State, std::size_t>> queue{{start(), 0}};
  dist[key(start(), 0)] = 0;
  while (!queue.empty()) {
    const auto [s, i] = queue.front();
    queue.pop_front();
    const int d = dist[key(s, i)];
    if (i == n && is_final(s)) return d <= max_words;
    if (d >= max_words) continue;
    for (Pos p : kAllPos) {
      auto nxt = next(s, p);
      if (!nxt) continue;
      for (std::size_t j : {i, i < n && seq[i] == p ? i + 1 : i}) {
        if (dist[key(*nxt, j)] >= 0) continue;
        dist[key(*nxt, j)] = d + 1;
        queue.emplace_back(*nxt, j);
      }
    }
  }
  return false;
}

}  // namespace sentrack
