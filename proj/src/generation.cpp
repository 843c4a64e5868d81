#include "sentrack/generation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "sentrack/error.hpp"

namespace sentrack {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr ParseOptions kPartial{.preverbal_adverb = false, .partial = true};

bool better(const BeamItem& a, const BeamItem& b) {
  if (a.tau != b.tau) return a.tau > b.tau;
  return a.words < b.words;
}

class Search {
 public:
  Search(const Clip& clip, const Lexicon& lex, const TrackerConfig& tcfg, const GenConfig& gcfg)
      : clip_(clip), lex_(lex), tcfg_(tcfg), gcfg_(gcfg), fsm_(false, gcfg.np_recursion),
        vocab_(generation_vocabulary(lex)) {
    for (const auto& w : vocab_) pos_.push_back(lex.at(w).pos);
  }

  double score(const std::vector<std::string>& words) {
    auto it = memo_.find(words);
    if (it != memo_.end()) return it->second;
    const double tau = score_words(clip_, words, lex_, tcfg_);
    memo_.emplace(words, tau);
    return tau;
  }

  // Finite-score extensions of `item` by one word that can still finish
  // within max_words, best first.
  std::vector<BeamItem> children(const BeamItem& item) {
    std::vector<BeamItem> out;
    if (static_cast<int>(item.words.size()) >= gcfg_.max_words) return out;
    const auto state = walk(item.words);
    if (!state) return out;
    for (std::size_t v = 0; v < vocab_.size(); ++v) {
      auto nxt = fsm_.next(*state, pos_[v]);
      if (!nxt) continue;
      const int len = static_cast<int>(item.words.size()) + 1;
      if (len + fsm_.distance_to_final(*nxt) > gcfg_.max_words) continue;
      BeamItem child{item.words, 0, fsm_.is_final(*nxt)};
      child.words.push_back(vocab_[v]);
      child.tau = score(child.words);
      if (child.tau == kNegInf) continue;
      out.push_back(std::move(child));
    }
    std::sort(out.begin(), out.end(), better);
    return out;
  }

  std::optional<PosAutomaton::State> walk(const std::vector<std::string>& words) const {
    std::optional<PosAutomaton::State> s = fsm_.start();
    for (const auto& w : words) {
      s = fsm_.next(*s, lex_.at(w).pos);
      if (!s) break;
    }
    return s;
  }

  // Depth-first search in word order for the best sentence of `length`
  // words. Extending never raises a score, so a prefix at or below the best
  // so far cannot lead to a winner.
  void exhaustive(BeamItem& prefix, int length, std::optional<BeamItem>& best) {
    if (static_cast<int>(prefix.words.size()) == length) {
      if (prefix.complete && (!best || prefix.tau > best->tau)) best = prefix;
      return;
    }
    const auto state = walk(prefix.words);
    for (std::size_t v = 0; v < vocab_.size(); ++v) {
      auto nxt = fsm_.next(*state, pos_[v]);
      if (!nxt) continue;
      const int len = static_cast<int>(prefix.words.size()) + 1;
      if (len + fsm_.distance_to_final(*nxt) > length) continue;
      BeamItem child{prefix.words, 0, fsm_.is_final(*nxt)};
      child.words.push_back(vocab_[v]);
      child.tau = score(child.words);
      if (child.tau == kNegInf || (best && child.tau <= best->tau)) continue;
      exhaustive(child, length, best);
    }
  }

 private:
  const Clip& clip_;
  const Lexicon& lex_;
  const TrackerConfig& tcfg_;
  const GenConfig& gcfg_;
  PosAutomaton fsm_;
  std::vector<std::string> vocab_;
  std::vector<Pos> pos_;
  std::map<std::vector<std::string>, double> memo_;
};

Generated finish(const Clip& clip, const BeamItem& item, const Lexicon& lex, const TrackerConfig& tcfg) {
  Generated g;
  g.words = item.words;
  g.sentence = render_sentence(item.words);
  g.tracked.analysis = analyze_tokens(item.words, lex, {.preverbal_adverb = false});
  g.tracked.result = sentence_track(clip, g.tracked.analysis.mapping, lex, tcfg);
  return g;
}

}  // namespace

void GenConfig::validate() const {
  if (beam_width < 1) throw ValidationError("beam_width must be >= 1");
  if (!(contraction_threshold > 0.0 && contraction_threshold <= 1.0))
    throw ValidationError("contraction_threshold must lie in (0, 1]");
  if (max_words < 1) throw ValidationError("max_words must be >= 1");
}

std::vector<std::string> generation_vocabulary(const Lexicon& lex) {
  std::vector<std::string> out;
  const auto dets = lex.lemmas(Pos::D);
  if (!dets.empty()) out.push_back(std::find(dets.begin(), dets.end(), "the") != dets.end() ? "the" : dets.front());
  for (const auto& [lemma, e] : lex.entries())
    if (e.pos != Pos::D) out.push_back(lemma);
  std::sort(out.begin(), out.end());
  return out;
}

bool completable(const std::vector<std::string>& seq, const Lexicon& lex, const GenConfig& cfg) {
  std::vector<Pos> pos;
  for (const auto& w : seq) {
    const LexicalEntry* e = lex.find(w);
    if (!e) return false;
    pos.push_back(e->pos);
  }
  return PosAutomaton(false, cfg.np_recursion).completable(pos, cfg.max_words);
}

double score_words(const Clip& clip, const std::vector<std::string>& words, const Lexicon& lex,
                   const TrackerConfig& cfg) {
  Analysis a;
  try {
    a = analyze_tokens(words, lex, kPartial);
  } catch (const ParseError&) {
    return kNegInf;
  } catch (const RoleError&) {
    return kNegInf;
  }
  return sentence_track(clip, a.mapping, lex, cfg).tau;
}

std::optional<Generated> generate(const Clip& clip, const Lexicon& lex, const TrackerConfig& tcfg,
                                  const GenConfig& gcfg, std::vector<BeamItem>* trace) {
  gcfg.validate();
  Search search(clip, lex, tcfg, gcfg);
  std::vector<BeamItem> beam = search.children(BeamItem{});
  std::optional<BeamItem> fallback;
  while (!beam.empty()) {
    if (beam.size() > static_cast<std::size_t>(gcfg.beam_width)) beam.resize(static_cast<std::size_t>(gcfg.beam_width));
    if (trace) trace->push_back(beam.front());
    for (const auto& item : beam)
      if (item.complete) {
        fallback = item;
        break;
      }
    std::vector<BeamItem> next;
    for (const auto& item : beam) {
      auto kids = search.children(item);
      if (&item == &beam.front() && item.complete &&
          (kids.empty() || std::exp(kids.front().tau - item.tau) < gcfg.contraction_threshold))
        return finish(clip, item, lex, tcfg);
      next.insert(next.end(), std::make_move_iterator(kids.begin()), std::make_move_iterator(kids.end()));
    }
    std::sort(next.begin(), next.end(), better);
    beam = std::move(next);
  }
  if (!fallback) return std::nullopt;
  return finish(clip, *fallback, lex, tcfg);
}

std::optional<BeamItem> best_sentence_exhaustive(const Clip& clip, const Lexicon& lex, const TrackerConfig& tcfg,
                                                 const GenConfig& gcfg, int length) {
  Search search(clip, lex, tcfg, gcfg);
  BeamItem root;
  std::optional<BeamItem> best;
  search.exhaustive(root, length, best);
  return best;
}

}  // namespace sentrack
