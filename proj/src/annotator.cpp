#include "sentrack/annotator.hpp"

#include <algorithm>
#include <functional>

#include "sentrack/error.hpp"

namespace sentrack {

Annotator::Annotator(std::vector<ObjectTrack> objects, const Lexicon& lex, Constants c)
    : objects_(std::move(objects)), lex_(lex), c_(c) {
  if (!objects_.empty()) T_ = static_cast<int>(objects_.front().frames.size());
  for (const auto& o : objects_)
    if (static_cast<int>(o.frames.size()) != T_) throw ValidationError("object tracks differ in length");
}

bool Annotator::word_holds(const WordArgs& w, const std::vector<int>& assign) const {
  const Recognizer& rec = lex_.at(w.lemma).recognizer();
  std::vector<const Detection*> args(w.args.size());
  return accepts(rec, T_, [&](int t, const Atom& atom) {
    for (std::size_t i = 0; i < w.args.size(); ++i)
      args[i] = &objects_[static_cast<std::size_t>(assign[static_cast<std::size_t>(w.args[i])])]
                     .frames[static_cast<std::size_t>(t)];
    return eval_atom(atom, std::span<const Detection* const>(args.data(), static_cast<std::size_t>(atom.arity())), c_);
  });
}

std::vector<int> Annotator::witness(const ArgumentMapping& m) const {
  const int L = m.num_participants;
  const int n = static_cast<int>(objects_.size());
  if (L > n || T_ == 0) return {};
  // Words become checkable once their last participant is assigned.
  std::vector<std::vector<const WordArgs*>> ready(static_cast<std::size_t>(L));
  for (const auto& w : m.words) {
    int last = 0;
    for (int a : w.args) last = std::max(last, a);
    ready[static_cast<std::size_t>(last)].push_back(&w);
  }
  std::vector<int> assign(static_cast<std::size_t>(L), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::function<bool(int)> dfs = [&](int p) {
    if (p == L) return true;
    for (int o = 0; o < n; ++o) {
      if (used[static_cast<std::size_t>(o)]) continue;
      assign[static_cast<std::size_t>(p)] = o;
      bool ok = true;
      for (const WordArgs* w : ready[static_cast<std::size_t>(p)])
        if (!word_holds(*w, assign)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      used[static_cast<std::size_t>(o)] = true;
      if (dfs(p + 1)) return true;
      used[static_cast<std::size_t>(o)] = false;
    }
    assign[static_cast<std::size_t>(p)] = -1;
    return false;
  };
  if (!dfs(0)) return {};
  return assign;
}

bool Annotator::depicted(const ArgumentMapping& m) const { return !witness(m).empty(); }

bool Annotator::depicted(std::string_view sentence) const { return depicted(analyze(sentence, lex_).mapping); }

}  // namespace sentrack
