#include "sentrack/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sentrack/error.hpp"

namespace sentrack {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Tuples (j_1..j_L, k_1..k_W) of one frame. Dimensions 0..L-1 are
// detections, L..L+W-1 word states. Storage puts dimension 0 fastest; the
// tie-break order is lexicographic on the tuple, which is not storage order.
struct Shape {
  std::vector<std::size_t> size;
  std::vector<std::size_t> stride;
  std::size_t total = 1;

  std::vector<std::size_t> digits(std::size_t idx) const {
    std::vector<std::size_t> dig(size.size());
    for (std::size_t d = 0; d < size.size(); ++d) {
      dig[d] = idx % size[d];
      idx /= size[d];
    }
    return dig;
  }
  std::size_t index(const std::vector<std::size_t>& dig) const {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < dig.size(); ++d) idx += dig[d] * stride[d];
    return idx;
  }
};

Shape shape_at(const Lattice& lat, int t) {
  Shape s;
  for (int l = 0; l < lat.L; ++l) s.size.push_back(static_cast<std::size_t>(lat.J[static_cast<std::size_t>(t)]));
  for (const auto& w : lat.words) s.size.push_back(static_cast<std::size_t>(w.rec->num_states()));
  for (std::size_t n : s.size) {
    if (n != 0 && s.total > std::numeric_limits<std::uint32_t>::max() / n)
      throw Error("lattice too large: more than 2^32 tuples per frame");
    s.stride.push_back(s.total);
    s.total *= n;
  }
  return s;
}

// Node score of every tuple at frame t: f terms in participant order, then
// the word terms; at t = 0 the initial-state mask as well.
std::vector<double> node_scores(const Lattice& lat, int t, const Shape& sh) {
  const auto ut = static_cast<std::size_t>(t);
  const auto L = static_cast<std::size_t>(lat.L);
  const std::size_t J = static_cast<std::size_t>(lat.J[ut]);
  std::size_t det_total = 1;
  for (std::size_t l = 0; l < L; ++l) det_total *= J;

  // Detection dimensions are the fast ones: node[w * det_total + dp].
  std::vector<double> fsum(det_total);
  std::vector<std::size_t> dig(L, 0);
  for (std::size_t dp = 0; dp < det_total; ++dp) {
    double s = 0;
    for (std::size_t l = 0; l < L; ++l) s = l == 0 ? lat.f[ut][dig[0]] : s + lat.f[ut][dig[l]];
    if (lat.distinct) {
      for (std::size_t a = 0; a < L; ++a)
        for (std::size_t b = a + 1; b < L; ++b)
          if (dig[a] == dig[b]) s = kNegInf;
    }
    fsum[dp] = s;
    for (std::size_t d = 0; d < L; ++d) {
      if (++dig[d] < J) break;
      dig[d] = 0;
    }
  }

  std::vector<double> node(sh.total, kNegInf);
  std::vector<std::uint8_t> mask, grown;
  for (std::size_t dp = 0; dp < det_total; ++dp) {
    if (fsum[dp] == kNegInf) continue;
    std::size_t rest = dp;
    for (std::size_t l = 0; l < L; ++l) {
      dig[l] = rest % J;
      rest /= J;
    }
    // Joint mask over the word dimensions, word 0 fastest.
    mask.assign(1, 1);
    for (const auto& word : lat.words) {
      const auto K = static_cast<std::size_t>(word.rec->num_states());
      std::size_t off = 0, stride = 1;
      for (int a : word.args) {
        off = off * J + dig[static_cast<std::size_t>(a)];
        stride *= J;
      }
      grown.resize(mask.size() * K);
      for (std::size_t k = 0; k < K; ++k) {
        const bool ok = word.holds[ut][k * stride + off] && (t != 0 || word.rec->is_initial(static_cast<int>(k)));
        for (std::size_t i = 0; i < mask.size(); ++i) grown[k * mask.size() + i] = ok && mask[i];
      }
      mask.swap(grown);
    }
    for (std::size_t w = 0; w < mask.size(); ++w)
      if (mask[w]) node[w * det_total + dp] = fsum[dp];
  }
  return node;
}

// Transition term of dimension d from value xp (frame t-1) to x (frame t).
double transition(const Lattice& lat, int t, std::size_t d, std::size_t xp, std::size_t x, bool flip) {
  if (d < static_cast<std::size_t>(lat.L)) {
    const auto ut = static_cast<std::size_t>(t);
    const double g = lat.g[ut][xp * static_cast<std::size_t>(lat.J[ut]) + x];
    return flip ? -g : g;
  }
  const auto& rec = *lat.words[d - static_cast<std::size_t>(lat.L)].rec;
  return rec.allows(static_cast<int>(xp), static_cast<int>(x)) ? 0.0 : kNegInf;
}

// Transition matrices of frame t, one per dimension: cost[d][xp * q_d + x].
std::vector<std::vector<double>> transition_costs(const Lattice& lat, int t, const Shape& prev, const Shape& cur,
                                                  bool flip) {
  std::vector<std::vector<double>> cost(cur.size.size());
  for (std::size_t d = 0; d < cost.size(); ++d)
    for (std::size_t xp = 0; xp < prev.size[d]; ++xp)
      for (std::size_t x = 0; x < cur.size[d]; ++x) cost[d].push_back(transition(lat, t, d, xp, x, flip));
  return cost;
}

bool final_ok(const Lattice& lat, const std::vector<std::size_t>& dig) {
  for (std::size_t w = 0; w < lat.words.size(); ++w)
    if (!lat.words[w].rec->is_final(static_cast<int>(dig[static_cast<std::size_t>(lat.L) + w]))) return false;
  return true;
}

ScoredResult unpack(const Lattice& lat, double tau, const std::vector<std::vector<std::size_t>>& path) {
  ScoredResult r;
  r.tau = tau;
  if (tau == kNegInf) return r;
  r.tracks.assign(static_cast<std::size_t>(lat.L), Track{lat.clip_id, {}});
  r.word_states.assign(lat.words.size(), {});
  for (std::size_t t = 0; t < path.size(); ++t) {
    for (std::size_t l = 0; l < r.tracks.size(); ++l) r.tracks[l].indices.push_back(lat.source[t][path[t][l]] + 1);
    for (std::size_t w = 0; w < lat.words.size(); ++w)
      r.word_states[w].push_back(static_cast<int>(path[t][static_cast<std::size_t>(lat.L) + w]));
  }
  return r;
}

// Max-marginalizes the previous-frame dimensions out of delta, last
// dimension first. Eliminating d reads an array whose dimensions below d
// are previous-frame values and above d current-frame values; with
// dimension 0 fastest, d's block is contiguous over the dimensions below it.
void eliminate(const std::vector<std::size_t>& p, const std::vector<std::size_t>& q,
               const std::vector<std::vector<double>>& cost, const std::vector<double>& delta,
               std::vector<double>& out, std::vector<double>& scratch) {
  const std::size_t D = q.size();
  if (D == 0) {
    out = delta;
    return;
  }
  const double* a = delta.data();
  for (std::size_t d = D; d-- > 0;) {
    std::size_t outer = 1, inner = 1;
    for (std::size_t e = 0; e < d; ++e) inner *= p[e];
    for (std::size_t e = d + 1; e < D; ++e) outer *= q[e];
    const std::size_t pd = p[d], qd = q[d];
    // Alternate buffers so the last step lands in `out`.
    std::vector<double>& b = ((D - 1 - d) % 2 == (D - 1) % 2) ? out : scratch;
    b.assign(outer * qd * inner, kNegInf);
    if (inner == 1) {
      std::vector<double> ct(pd * qd);
      for (std::size_t xp = 0; xp < pd; ++xp)
        for (std::size_t x = 0; x < qd; ++x) ct[x * pd + xp] = cost[d][xp * qd + x];
      for (std::size_t o = 0; o < outer; ++o) {
        const double* row = a + o * pd;
        for (std::size_t x = 0; x < qd; ++x) {
          const double* c = ct.data() + x * pd;
          double best = kNegInf;
          for (std::size_t xp = 0; xp < pd; ++xp) {
            const double v = row[xp] + c[xp];
            best = v > best ? v : best;
          }
          b[o * qd + x] = best;
        }
      }
      a = b.data();
      continue;
    }
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t x = 0; x < qd; ++x) {
        double* __restrict ov = b.data() + (o * qd + x) * inner;
        for (std::size_t xp = 0; xp < pd; ++xp) {
          const double c = cost[d][xp * qd + x];
          if (c == kNegInf) continue;
          const double* __restrict iv = a + (o * pd + xp) * inner;
          // Strict comparison keeps the smallest xp among equal maxima.
          for (std::size_t i = 0; i < inner; ++i) {
            const double v = iv[i] + c;
            ov[i] = v > ov[i] ? v : ov[i];
          }
        }
      }
    }
    a = b.data();
  }
}

// Predecessor digits of tuple x at frame t: the elimination restricted to x
// repeats the forward pass arithmetic, so ties resolve identically.
std::vector<std::size_t> predecessor(const std::vector<double>& delta, const std::vector<std::size_t>& p,
                                     const std::vector<std::size_t>& x,
                                     const std::vector<std::vector<double>>& cost) {
  const std::size_t D = p.size();
  std::vector<std::vector<std::size_t>> picks(D);
  std::vector<double> a = delta, b;
  for (std::size_t d = D; d-- > 0;) {
    const std::size_t pd = p[d], qd = cost[d].size() / pd;
    const std::size_t inner = a.size() / pd;
    b.assign(inner, kNegInf);
    picks[d].assign(inner, 0);
    for (std::size_t xp = 0; xp < pd; ++xp) {
      const double c = cost[d][xp * qd + x[d]];
      if (c == kNegInf) continue;
      for (std::size_t i = 0; i < inner; ++i) {
        const double v = a[xp * inner + i] + c;
        if (v > b[i]) {
          b[i] = v;
          picks[d][i] = xp;
        }
      }
    }
    a.swap(b);
  }
  std::vector<std::size_t> dig(D);
  std::size_t idx = 0, stride = 1;
  for (std::size_t d = 0; d < D; ++d) {
    dig[d] = picks[d][idx];
    idx += dig[d] * stride;
    stride *= p[d];
  }
  return dig;
}

}  // namespace

void TrackerConfig::validate() const {
  if (top_k < 1) throw ValidationError("top_k must be >= 1");
  if (!(s_f > 0) || !(s_g > 0)) throw ValidationError("sigmoid scales must be > 0");
  if (!std::isfinite(mu_f) || !std::isfinite(mu_g)) throw ValidationError("sigmoid midpoints must be finite");
  constants.validate();
}

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

double score_f(double raw_score, const TrackerConfig& cfg) { return log_sigmoid((raw_score - cfg.mu_f) / cfg.s_f); }

double score_g(const Detection& prev, const Detection& cur, const TrackerConfig& cfg) {
  const double d = (cur.box.center() - fwd_proj(prev).center()).norm();
  return log_sigmoid((cfg.mu_g - d) / cfg.s_g);
}

std::size_t Lattice::tuples(int t) const { return shape_at(*this, t).total; }

Lattice build_lattice(const Clip& clip, int num_participants, const std::vector<BoundWord>& words,
                      const TrackerConfig& cfg) {
  cfg.validate();
  Lattice lat;
  lat.clip_id = clip.id;
  lat.T = static_cast<int>(clip.frames.size());
  lat.L = num_participants;
  lat.distinct = cfg.distinct_detections;

  std::vector<std::vector<const Detection*>> dets;
  for (const Frame& frame : clip.frames) {
    auto keep = top_k_indices(frame, cfg.top_k);
    if (keep.empty()) throw NoTrackError("frame " + std::to_string(frame.index) + " has no detections");
    std::vector<const Detection*> d;
    for (int i : keep) d.push_back(&frame.detections[static_cast<std::size_t>(i)]);
    lat.J.push_back(static_cast<int>(keep.size()));
    lat.source.push_back(std::move(keep));
    dets.push_back(std::move(d));
  }

  lat.f.resize(dets.size());
  lat.g.resize(dets.size());
  for (std::size_t t = 0; t < dets.size(); ++t) {
    for (const Detection* d : dets[t]) lat.f[t].push_back(score_f(d->raw_score, cfg));
    if (t == 0) continue;
    for (const Detection* p : dets[t - 1])
      for (const Detection* c : dets[t]) lat.g[t].push_back(score_g(*p, *c, cfg));
  }

  for (const auto& bw : words) {
    if (!bw.rec) throw ValidationError("word without a recognizer");
    const int arity = static_cast<int>(bw.args.size());
    if (bw.rec->arity() > arity)
      throw ValidationError("recognizer of arity " + std::to_string(bw.rec->arity()) + " bound to " +
                            std::to_string(arity) + " participant(s)");
    for (int a : bw.args)
      if (a < 0 || a >= num_participants) throw ValidationError("argument bound to unknown participant");
    Lattice::Word w{bw.rec, bw.args, {}};
    const int K = bw.rec->num_states();
    for (std::size_t t = 0; t < dets.size(); ++t) {
      const std::size_t J = dets[t].size();
      std::size_t combos = 1;
      for (int i = 0; i < arity; ++i) combos *= J;
      std::vector<std::uint8_t> holds(static_cast<std::size_t>(K) * combos);
      std::vector<const Detection*> args(static_cast<std::size_t>(arity));
      for (int k = 0; k < K; ++k) {
        const Atom& atom = bw.rec->atom(k);
        for (std::size_t c = 0; c < combos; ++c) {
          std::size_t rest = c;
          for (int i = arity; i-- > 0;) {
            args[static_cast<std::size_t>(i)] = dets[t][rest % J];
            rest /= J;
          }
          const std::span<const Detection* const> used(args.data(), static_cast<std::size_t>(atom.arity()));
          holds[static_cast<std::size_t>(k) * combos + c] = eval_atom(atom, used, cfg.constants) ? 1 : 0;
        }
      }
      w.holds.push_back(std::move(holds));
    }
    lat.words.push_back(std::move(w));
  }
  return lat;
}

Lattice build_lattice(const Clip& clip, const ArgumentMapping& mapping, const Lexicon& lex, const TrackerConfig& cfg) {
  std::vector<BoundWord> words;
  for (const auto& w : mapping.words) words.push_back({lex.at(w.lemma).compiled, w.args});
  return build_lattice(clip, mapping.num_participants, words, cfg);
}


ScoredResult decode(const Lattice& lat, const DecodeOptions& opts) {
  if (lat.T == 0) throw ValidationError("empty lattice");
  std::vector<Shape> shapes;
  for (int t = 0; t < lat.T; ++t) shapes.push_back(shape_at(lat, t));
  // delta[t][idx]: best score of a path ending in tuple idx at frame t.
  std::vector<std::vector<double>> delta(static_cast<std::size_t>(lat.T));
  delta[0] = node_scores(lat, 0, shapes[0]);
  std::vector<double> trans, scratch;
  for (std::size_t t = 1; t < delta.size(); ++t) {
    const auto cost = transition_costs(lat, static_cast<int>(t), shapes[t - 1], shapes[t], opts.flip_coherence);
    eliminate(shapes[t - 1].size, shapes[t].size, cost, delta[t - 1], trans, scratch);
    std::vector<double> cur = node_scores(lat, static_cast<int>(t), shapes[t]);
    for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = trans[i] + cur[i];
    delta[t] = std::move(cur);
  }

  const Shape& last = shapes.back();
  double best = kNegInf;
  std::vector<std::size_t> arg;
  for (std::size_t i = 0; i < last.total; ++i) {
    const double v = delta.back()[i];
    if (v == kNegInf || v < best) continue;
    auto dig = last.digits(i);
    if (!final_ok(lat, dig)) continue;
    if (v > best || dig < arg) {
      best = v;
      arg = std::move(dig);
    }
  }
  if (best == kNegInf) return unpack(lat, best, {});
  std::vector<std::vector<std::size_t>> path(delta.size());
  path.back() = arg;
  for (std::size_t t = delta.size() - 1; t > 0; --t) {
    const auto cost = transition_costs(lat, static_cast<int>(t), shapes[t - 1], shapes[t], opts.flip_coherence);
    path[t - 1] = predecessor(delta[t - 1], shapes[t - 1].size, path[t], cost);
  }
  return unpack(lat, best, path);
}

namespace {

// Depth-first enumeration of joint paths in lexicographic tuple order,
// pruning prefixes that are already -inf.
struct Enumerator {
  const Lattice& lat;
  std::size_t cap;
  std::vector<Shape> shapes;
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<std::vector<std::size_t>>> tuples;  // [t][lexicographic rank] -> digits
  std::vector<std::size_t> path, best_path;  // lexicographic ranks
  double best = kNegInf;
  std::size_t live = 0;

  Enumerator(const Lattice& l, std::size_t c) : lat(l), cap(c) {
    for (int t = 0; t < lat.T; ++t) {
      const Shape sh = shape_at(lat, t);
      nodes.push_back(node_scores(lat, t, sh));
      std::vector<std::vector<std::size_t>> tup(sh.total, std::vector<std::size_t>(sh.size.size()));
      for (std::size_t r = 0; r < sh.total; ++r) {
        std::size_t rest = r;
        for (std::size_t d = sh.size.size(); d-- > 0;) {
          tup[r][d] = rest % sh.size[d];
          rest /= sh.size[d];
        }
      }
      tuples.push_back(std::move(tup));
      shapes.push_back(sh);
    }
    path.resize(static_cast<std::size_t>(lat.T));
  }

  // True when `path` precedes `best_path`, comparing the last frame first.
  bool earlier_reversed() const {
    for (std::size_t t = path.size(); t-- > 0;)
      if (path[t] != best_path[t]) return path[t] < best_path[t];
    return false;
  }

  void visit(std::size_t t, double prefix) {
    for (std::size_t r = 0; r < shapes[t].total; ++r) {
      const auto& x = tuples[t][r];
      double v;
      if (t == 0) {
        v = nodes[0][shapes[0].index(x)];
      } else {
        v = prefix;
        const auto& xp = tuples[t - 1][path[t - 1]];
        for (std::size_t d = x.size(); d-- > 0;) v += transition(lat, static_cast<int>(t), d, xp[d], x[d], false);
        v += nodes[t][shapes[t].index(x)];
      }
      if (v == kNegInf) continue;
      if (++live > cap) throw OracleCapError("brute-force enumeration exceeds cap of " + std::to_string(cap) + " paths");
      path[t] = r;
      if (t + 1 < shapes.size()) {
        visit(t + 1, v);
        continue;
      }
      if (!final_ok(lat, x)) continue;
      if (v > best || (v == best && earlier_reversed())) {
        best = v;
        best_path = path;
      }
    }
  }
};

}  // namespace

ScoredResult brute_force(const Lattice& lat, std::size_t cap) {
  if (lat.T == 0) throw ValidationError("empty lattice");
  Enumerator e(lat, cap);
  e.visit(0, 0.0);
  if (e.best == kNegInf) return unpack(lat, e.best, {});
  std::vector<std::vector<std::size_t>> path;
  for (std::size_t t = 0; t < e.best_path.size(); ++t) path.push_back(e.tuples[t][e.best_path[t]]);
  return unpack(lat, e.best, path);
}

ScoredResult track_single(const Clip& clip, const TrackerConfig& cfg) { return decode(build_lattice(clip, 1, {}, cfg)); }

EventResult event_map(const Clip& clip, const Recognizer& rec, const std::vector<Track>& args, const Constants& c) {
  const int T = static_cast<int>(clip.frames.size());
  const int K = rec.num_states();
  std::vector<std::vector<std::pair<int, Detection>>> boxes;
  for (const auto& tr : args) boxes.push_back(track_boxes(clip, tr));

  auto holds = [&](int t, int k) {
    const Atom& atom = rec.atom(k);
    std::vector<const Detection*> d;
    for (int i = 0; i < atom.arity(); ++i)
      d.push_back(&boxes.at(static_cast<std::size_t>(i))[static_cast<std::size_t>(t)].second);
    return eval_atom(atom, d, c);
  };

  std::vector<double> delta(static_cast<std::size_t>(K), kNegInf);
  std::vector<std::vector<int>> back(static_cast<std::size_t>(T), std::vector<int>(static_cast<std::size_t>(K), -1));
  for (int k = 0; k < K && T > 0; ++k)
    if (rec.is_initial(k) && holds(0, k)) delta[static_cast<std::size_t>(k)] = 0;
  for (int t = 1; t < T; ++t) {
    std::vector<double> next(static_cast<std::size_t>(K), kNegInf);
    for (int k = 0; k < K; ++k) {
      if (!holds(t, k)) continue;
      for (int kp = 0; kp < K; ++kp) {
        if (!rec.allows(kp, k) || delta[static_cast<std::size_t>(kp)] == kNegInf) continue;
        if (delta[static_cast<std::size_t>(kp)] > next[static_cast<std::size_t>(k)]) {
          next[static_cast<std::size_t>(k)] = delta[static_cast<std::size_t>(kp)];
          back[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] = kp;
        }
      }
    }
    delta.swap(next);
  }
  EventResult r{kNegInf, {}};
  int last = -1;
  for (int k = 0; k < K; ++k) {
    if (rec.is_final(k) && delta[static_cast<std::size_t>(k)] > r.score) {
      r.score = delta[static_cast<std::size_t>(k)];
      last = k;
    }
  }
  if (last < 0) return r;
  r.states.assign(static_cast<std::size_t>(T), 0);
  for (int t = T - 1; t >= 0; --t) {
    r.states[static_cast<std::size_t>(t)] = last;
    if (t > 0) last = back[static_cast<std::size_t>(t)][static_cast<std::size_t>(last)];
  }
  return r;
}

ScoredResult sentence_track(const Clip& clip, const ArgumentMapping& mapping, const Lexicon& lex,
                            const TrackerConfig& cfg) {
  return decode(build_lattice(clip, mapping, lex, cfg));
}

SentenceResult sentence_track(const Clip& clip, std::string_view sentence, const Lexicon& lex,
                              const TrackerConfig& cfg) {
  SentenceResult r;
  r.analysis = analyze(sentence, lex);
  r.result = sentence_track(clip, r.analysis.mapping, lex, cfg);
  return r;
}

SentenceResult brute_force_oracle(const Clip& clip, std::string_view sentence, const Lexicon& lex,
                                  const TrackerConfig& cfg, std::size_t cap) {
  SentenceResult r;
  r.analysis = analyze(sentence, lex);
  r.result = brute_force(build_lattice(clip, r.analysis.mapping, lex, cfg), cap);
  return r;
}

}  // namespace sentrack
