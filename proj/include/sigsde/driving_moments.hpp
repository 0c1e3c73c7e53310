#pragma once

#include <cstddef>
#include <cstdint>

#include "sigsde/tensor.hpp"

namespace sigsde {

/// E[S(t, W)_{0,T}] for an n-dimensional Brownian motion W with time as
/// letter 0, truncated at level q_max. Computed as
/// exp(T e_(0) + T/2 sum_i e_(i,i)) in the truncated tensor algebra.
TruncTensor expected_signature_bm_time(int n, double T, int q_max);

struct MonteCarloSignature {
  TruncTensor mean;
  TruncTensor std_error;
  std::size_t samples = 0;
};

struct MonteCarloOptions {
  unsigned threads = 0;
  /// Average every sample over the 2^n sign flips W_i -> -W_i, which are
  /// again Brownian paths. A sign flip multiplies coefficient J by
  /// (-1)^{#i in J}, so the average zeroes words with an odd count of some
  /// nonzero letter and leaves the rest unchanged.
  bool reflect = true;
  /// Use 2 S(dt) - S(2 dt) on the same draw, which removes the first-order
  /// bias of piecewise-linear sampling. Needs an even number of steps.
  bool richardson = true;
};

/// Sample mean and standard error of the signature of N piecewise-linear
/// Brownian paths (time-augmented) on the dt grid over [0, T]. Trajectory k
/// draws from the substream (seed, k).
MonteCarloSignature mc_expected_signature(int n, double T, int q_max, std::size_t N, double dt,
                                          std::uint64_t seed, const MonteCarloOptions& options = {});

struct McComparison {
  std::size_t compared = 0;  // coefficients with sampling noise
  std::size_t outside2 = 0;
  std::size_t outside3 = 0;
  double max_abs_z = 0.0;
};

/// z-scores of the Monte Carlo means against `exact`, over coefficients with
/// a nonzero standard error and at least one Brownian letter.
McComparison compare_mc(const TruncTensor& exact, const MonteCarloSignature& mc);

/// Number of grid steps for horizon T at step dt; throws unless dt divides T
/// up to rounding.
std::size_t grid_steps(double T, double dt);

}  // namespace sigsde
