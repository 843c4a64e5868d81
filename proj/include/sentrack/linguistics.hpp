#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sentrack/lexicon.hpp"

namespace sentrack {

/// Lowercases, strips punctuation and splits into lexicon lemmas by greedy
/// longest match. Throws ParseError naming the first unknown word.
std::vector<std::string> tokenize(std::string_view sentence, const Lexicon& lex);

struct ParseOptions {
  /// Accept an adverb between the subject and the verb.
  bool preverbal_adverb = true;
  /// Accept an incomplete sentence: constituents cut off by the end of input
  /// are left open, and a missing NP becomes an empty placeholder node.
  bool partial = false;
};

/// Parse tree node. Leaves carry a lemma and are labelled by part of speech
/// (D, A, N, P, V, Adv, P_M); inner nodes are S, NP, PP, VP, PP_M.
struct ParseNode {
  std::string label;
  std::string word;
  std::vector<ParseNode> kids;

  bool is_leaf() const { return !word.empty(); }
  bool operator==(const ParseNode&) const = default;
};

/// Recursive descent over
///   S -> NP VP,  NP -> D [A] N [PP],  PP -> P NP,
///   VP -> [Adv] V NP [Adv] [PP_M],  PP_M -> P_M NP
/// with optional constituents attached greedily. At most one adverb.
ParseNode parse(const std::vector<std::string>& tokens, const Lexicon& lex, const ParseOptions& opts = {});

/// Leaves of the tree in order.
std::vector<std::string> unparse(const ParseNode& tree);
/// Labels only, e.g. "S(NP(D,N),VP(V,NP(D,N)))".
std::string to_string(const ParseNode& tree);

/// One content word with the participants filling its arguments.
struct WordArgs {
  std::string lemma;
  Pos pos = Pos::N;
  std::vector<int> args;
  // Motion prepositions: the participant tried for args[0] when the
  // subject leads to a role conflict (the verb's object), or -1.
  int alt_first = -1;
};

struct ArgumentMapping {
  int num_participants = 0;  // L
  std::vector<WordArgs> words;  // content words in sentence order
  std::vector<Role> roles;      // per participant, set by assign_roles
  std::vector<bool> placeholder;  // participant stands for a missing NP
};

/// One participant per NP in depth-first order.
ArgumentMapping assign_participants(const ParseNode& tree, const Lexicon& lex);

/// Gives each participant the first role (agent, patient, source, goal,
/// referent) allowed by every slot it fills, trying the subject before the
/// object as first argument of a motion preposition. Throws RoleError.
void assign_roles(ArgumentMapping& m, const Lexicon& lex);

struct Analysis {
  std::vector<std::string> tokens;
  ParseNode tree;
  ArgumentMapping mapping;
};

Analysis analyze(std::string_view sentence, const Lexicon& lex, const ParseOptions& opts = {});
Analysis analyze_tokens(const std::vector<std::string>& tokens, const Lexicon& lex, const ParseOptions& opts = {});

/// Sentence text for a token sequence: capitalized, single-spaced, final period.
std::string render_sentence(const std::vector<std::string>& tokens);

/// The grammar as a finite automaton over parts of speech (the NP recursion
/// is tail recursion, so the token language is regular).
class PosAutomaton {
 public:
  struct State {
    int phase = 0;  // 0 subject, 1 preverbal adverb seen, 2 object, 3 PP_M object
    int np = 0;     // 0 expect D, 1 after D, 2 after A, 3 after N
    bool adverb = false;
    bool operator==(const State&) const = default;
  };

  /// np_recursion = false drops the PP inside NP, making the language finite.
  explicit PosAutomaton(bool preverbal_adverb = true, bool np_recursion = true)
      : preverbal_adverb_(preverbal_adverb), np_recursion_(np_recursion) {}

  State start() const { return {}; }
  std::optional<State> next(const State& s, Pos pos) const;
  bool is_final(const State& s) const;
  /// Fewest further words that reach a final state (0 when final).
  int distance_to_final(const State& s) const;

  /// True iff the sequence is a prefix of some sentence.
  bool is_prefix(const std::vector<Pos>& seq) const;
  bool is_sentence(const std::vector<Pos>& seq) const;
  /// True iff inserting words (anywhere) turns seq into a sentence of at most
  /// max_words words.
  bool completable(const std::vector<Pos>& seq, int max_words) const;

 private:
  bool preverbal_adverb_;
  bool np_recursion_;
};

/// Parts of speech of lexicon tokens; throws ValidationError on unknown words.
std::vector<Pos> pos_sequence(const std::vector<std::string>& tokens, const Lexicon& lex);

}  // namespace sentrack
