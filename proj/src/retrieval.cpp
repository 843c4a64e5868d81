#include "sentrack/retrieval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "sentrack/error.hpp"
#include "sentrack/random.hpp"

namespace sentrack {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool judged(const Judgments& j, const std::string& clip, const std::string& sentence) {
  auto c = j.find(clip);
  if (c != j.end()) {
    auto s = c->second.find(sentence);
    if (s != c->second.end()) return s->second;
  }
  throw ValidationError("no judgment for clip '" + clip + "' and sentence '" + sentence + "'");
}

struct Pair {
  double tau;
  bool depicted;
};

double accuracy(const std::vector<Pair>& pairs, double threshold) {
  if (pairs.empty()) return 0;
  std::size_t right = 0;
  for (const auto& p : pairs) right += (p.tau > threshold) == p.depicted ? 1 : 0;
  return static_cast<double>(right) / static_cast<double>(pairs.size());
}

// Candidates: below every score, each midpoint between distinct neighbours,
// above every score. An infinite lower neighbour uses the upper one minus 1.
std::vector<double> candidate_thresholds(std::vector<double> scores) {
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
  std::vector<double> out{kNegInf};
  for (std::size_t i = 0; i + 1 < scores.size(); ++i)
    out.push_back(scores[i] == kNegInf ? scores[i + 1] - 1.0 : 0.5 * (scores[i] + scores[i + 1]));
  if (!scores.empty()) out.push_back(scores.back() == kNegInf ? 0.0 : scores.back() + 1.0);
  return out;
}

}  // namespace

int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 0) jobs = default_jobs();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

RankedList score_corpus(const std::vector<Clip>& corpus, const QuerySentence& sentence, const Lexicon& lex,
                        const TrackerConfig& cfg, int jobs) {
  return score_matrix(corpus, {sentence}, lex, cfg, jobs).front();
}

std::vector<RankedList> score_matrix(const std::vector<Clip>& corpus, const std::vector<QuerySentence>& sentences,
                                     const Lexicon& lex, const TrackerConfig& cfg, int jobs) {
  if (corpus.empty()) throw ValidationError("empty corpus");
  // Parse once up front so sentence errors surface before any scoring.
  std::vector<Analysis> parsed;
  for (const auto& s : sentences) parsed.push_back(analyze(s.text, lex));
  const std::size_t C = corpus.size();
  std::vector<double> tau(sentences.size() * C);
  parallel_for(tau.size(), jobs, [&](std::size_t i) {
    const std::size_t s = i / C, c = i % C;
    try {
      tau[i] = sentence_track(corpus[c], parsed[s].mapping, lex, cfg).tau;
    } catch (const NoTrackError&) {
      tau[i] = kNegInf;
    }
  });
  std::vector<RankedList> out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    RankedList list{sentences[s].id, sentences[s].text, {}};
    for (std::size_t c = 0; c < C; ++c) list.entries.push_back({corpus[c].id, tau[s * C + c]});
    std::sort(list.entries.begin(), list.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
      if (a.tau != b.tau) return a.tau > b.tau;
      return a.clip_id < b.clip_id;
    });
    out.push_back(std::move(list));
  }
  return out;
}

double evaluate_topk(const std::vector<RankedList>& lists, const Judgments& j, int k) {
  if (k < 1) throw ValidationError("k must be >= 1");
  if (lists.empty()) return 0;
  std::size_t hits = 0;
  for (const auto& l : lists) {
    bool hit = false;
    for (std::size_t i = 0; i < l.entries.size(); ++i) {
      const bool d = judged(j, l.entries[i].clip_id, l.sentence_id);
      if (i < static_cast<std::size_t>(k) && d) hit = true;
    }
    hits += hit ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(lists.size());
}

double base_rate(const std::vector<RankedList>& lists, const Judgments& j) {
  std::size_t pos = 0, all = 0;
  for (const auto& l : lists)
    for (const auto& e : l.entries) {
      pos += judged(j, e.clip_id, l.sentence_id) ? 1 : 0;
      ++all;
    }
  return all == 0 ? 0.0 : static_cast<double>(pos) / static_cast<double>(all);
}

CvResult threshold_cv(const std::vector<RankedList>& lists, const Judgments& j, int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("threshold_cv needs at least 2 folds");
  std::set<std::string> ids;
  for (const auto& l : lists)
    for (const auto& e : l.entries) ids.insert(e.clip_id);
  std::vector<std::string> order(ids.begin(), ids.end());
  if (order.size() < static_cast<std::size_t>(folds))
    throw ValidationError("fewer clips than folds");
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
  std::map<std::string, int> fold_of;
  for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));

  CvResult r;
  double sum = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<Pair> train, test;
    for (const auto& l : lists)
      for (const auto& e : l.entries)
        (fold_of[e.clip_id] == f ? test : train).push_back({e.tau, judged(j, e.clip_id, l.sentence_id)});
    const auto positives = std::count_if(train.begin(), train.end(), [](const Pair& p) { return p.depicted; });
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(train.size())) {
      r.warnings.push_back("fold " + std::to_string(f + 1) + " skipped: training pairs are all one class");
      continue;
    }
    std::vector<double> scores;
    for (const auto& p : train) scores.push_back(p.tau);
    double best_t = kNegInf, best_a = -1;
    for (double t : candidate_thresholds(scores)) {
      const double a = accuracy(train, t);
      if (a > best_a) {
        best_a = a;
        best_t = t;
      }
    }
    const double acc = accuracy(test, best_t);
    r.thresholds.push_back(best_t);
    r.accuracies.push_back(acc);
    sum += acc;
  }
  if (!r.accuracies.empty()) r.mean_accuracy = sum / static_cast<double>(r.accuracies.size());
  return r;
}

Judgments read_judgments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open judgments file " + path.string());
  Judgments j;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string clip, sentence;
    int d = -1;
    if (!(fields >> clip >> sentence >> d) || (d != 0 && d != 1))
      throw ParseError(path.string() + " line " + std::to_string(n) + ": expected clip, sentence id and 0 or 1");
    if (!j[clip].emplace(sentence, d == 1).second)
      throw ParseError(path.string() + " line " + std::to_string(n) + ": duplicate judgment");
  }
  return j;
}

std::vector<QuerySentence> read_sentences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sentences file " + path.string());
  std::vector<QuerySentence> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path.string() + ": expected id<TAB>sentence in '" + line + "'");
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

std::vector<Clip> load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<Clip> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(load_clip(e.path()));
  std::sort(out.begin(), out.end(), [](const Clip& a, const Clip& b) { return a.id < b.id; });
  if (out.empty()) throw ValidationError("no clip files in " + dir.string());
  return out;
}

}  // namespace sentrack
