#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sigsde/signature.hpp"
#include "sigsde/theta.hpp"
#include "sigsde/word.hpp"

namespace testing_util {

using sigsde::PiecewiseLinearPath;
using sigsde::Theta;
using sigsde::Word;

/// Random piecewise-linear path in `dim` coordinates with `segments` pieces.
inline PiecewiseLinearPath random_path(std::mt19937_64& rng, std::size_t dim, std::size_t segments,
                                       double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> times(segments + 1), values((segments + 1) * dim, 0.0);
  for (std::size_t i = 1; i <= segments; ++i) {
    times[i] = static_cast<double>(i) / static_cast<double>(segments);
    for (std::size_t k = 0; k < dim; ++k) values[i * dim + k] = values[(i - 1) * dim + k] + normal(rng);
  }
  return PiecewiseLinearPath(times, values, dim);
}

/// Sum of the l1 norms of the increments.
inline double one_variation(const PiecewiseLinearPath& p) {
  double v = 0.0;
  for (std::size_t s = 0; s < p.num_segments(); ++s) {
    for (double x : p.increment(s)) v += std::abs(x);
  }
  return v;
}

/// Driver over {0..n} with coordinate 0 the (scaled) time, rescaled so that
/// its one-variation equals `norm`.
inline PiecewiseLinearPath random_driver(std::mt19937_64& rng, int n, std::size_t segments, double norm) {
  auto raw = random_path(rng, static_cast<std::size_t>(n), segments);
  std::vector<double> vals;
  for (std::size_t i = 0; i < raw.num_points(); ++i) {
    vals.push_back(raw.times()[i]);
    for (double x : raw.point(i)) vals.push_back(x);
  }
  PiecewiseLinearPath tmp(raw.times(), vals, static_cast<std::size_t>(n + 1));
  const double s = norm / one_variation(tmp);
  for (double& x : vals) x *= s;
  return PiecewiseLinearPath(raw.times(), vals, static_cast<std::size_t>(n + 1));
}

/// Dense numeric theta with every slot uniform in [-bound, bound].
inline Theta random_theta(std::mt19937_64& rng, int m, int n, int q, double bound) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Theta th(m, n, q);
  for (const Word& w : sigsde::enumerate_words(m + 1, q)) {
    for (int i = 1; i <= m; ++i) {
      for (int j = 0; j <= n; ++j) th.add_known(i, j, w, u(rng));
    }
  }
  return th;
}

}  // namespace testing_util
