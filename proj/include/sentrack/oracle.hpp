#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "sentrack/lattice.hpp"
#include "sentrack/random.hpp"

namespace sentrack {

/// Upper bounds for random oracle instances; each is drawn from [1, max].
struct InstanceSizes {
  int max_T = 5;
  int max_J = 3;
  int max_L = 2;
  int max_W = 3;
  int max_K = 3;
};

/// Random clip plus random recognizers bound to random participants.
/// Scores and positions are drawn from coarse grids so ties are common.
Lattice random_instance(Rng& rng, const InstanceSizes& sizes);

struct OracleReport {
  int trials = 0;
  int divergences = 0;
  std::string first_divergence;  // empty when none
  bool passed() const { return divergences == 0; }
};

/// Decodes `trials` random instances and compares each against brute_force:
/// tau must be bitwise equal and tracks and word states identical.
OracleReport oracle_check(int trials, std::uint64_t seed, const InstanceSizes& sizes = {},
                          const DecodeOptions& opts = {}, std::size_t cap = 10'000'000);

/// One-line rendering of a result, used in divergence reports.
std::string describe(const ScoredResult& r);

}  // namespace sentrack
