#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "sigsde/signature.hpp"

using namespace sigsde;
using testing_util::random_path;

TEST_CASE("segment_signature examples") {
  const std::vector<double> d1{2.0};
  const auto s = segment_signature(d1, 3);
  CHECK(s[Word{}] == 1.0);
  CHECK(s[Word{0}] == 2.0);
  CHECK(s[Word{0, 0}] == doctest::Approx(2.0));
  CHECK(s[Word{0, 0, 0}] == doctest::Approx(4.0 / 3.0));

  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(max_abs_diff(segment_signature(zero, 3), TruncTensor::unit(3, 3)) == 0.0);

  const std::vector<double> d2{1.0, 1.0};
  const auto s2 = segment_signature(d2, 2);
  for (const Word& w : {Word{0, 0}, Word{0, 1}, Word{1, 0}, Word{1, 1}}) CHECK(s2[w] == doctest::Approx(0.5));
}

TEST_CASE("path_signature examples") {
  PiecewiseLinearPath p({0.0, 1.0, 2.0}, {0.0, 1.0, 3.0}, 1);
  const auto s = path_signature(p, 2);
  CHECK(s[Word{0}] == doctest::Approx(3.0));
  CHECK(s[Word{0, 0}] == doctest::Approx(4.5));
  CHECK(max_abs_diff(path_signature(p, 1, 1, 2), TruncTensor::unit(1, 2)) == 0.0);
  CHECK(max_abs_diff(path_signature(p, 0, 1, 2), segment_signature(p.increment(0), 2)) == 0.0);
}

TEST_CASE("level two against the discrete double sum") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_path(rng, 3, 7);
    const auto s = path_signature(p, 2);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (std::size_t a = 0; a < p.num_segments(); ++a) {
          const auto da = p.increment(a);
          v += 0.5 * da[i] * da[j];
          for (std::size_t b = a + 1; b < p.num_segments(); ++b) v += da[i] * p.increment(b)[j];
        }
        CHECK(s[Word{i, j}] == doctest::Approx(v).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("shuffle identity on random paths") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    const auto p = random_path(rng, dim, 1 + static_cast<std::size_t>(trial) % 20, 0.7);
    const auto s = path_signature(p, 4);
    const auto words = enumerate_words(static_cast<int>(dim), 4);
    for (const Word& u : words) {
      for (const Word& v : words) {
        if (u.size() + v.size() > 4) continue;
        double rhs = 0.0;
        for (const auto& [w, c] : shuffle(u, v)) rhs += c * s[w];
        CHECK(std::abs(s[u] * s[v] - rhs) < 1e-10);
      }
    }
  }
}

TEST_CASE("chen, reversal and refinement") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    const auto p = random_path(rng, dim, 9, 0.5);
    const std::size_t L = p.num_segments();
    const auto full = path_signature(p, 0, L, 4);
    for (std::size_t j = 0; j <= L; ++j) {
      const auto split = concat_mul(path_signature(p, 0, j, 4), path_signature(p, j, L, 4));
      CHECK(max_abs_diff(full, split) < 1e-12 * std::max(1.0, full.max_abs()));
    }

    const auto back = path_signature(reversed(p), 4);
    CHECK(max_abs_diff(concat_mul(full, back), TruncTensor::unit(static_cast<int>(dim), 4)) < 1e-10);

    // insert a collinear midpoint into every segment
    std::vector<double> t, v;
    for (std::size_t i = 0; i < p.num_points(); ++i) {
      if (i > 0) {
        t.push_back(0.5 * (p.times()[i - 1] + p.times()[i]));
        for (std::size_t k = 0; k < dim; ++k) v.push_back(0.5 * (p.point(i - 1)[k] + p.point(i)[k]));
      }
      t.push_back(p.times()[i]);
      for (double x : p.point(i)) v.push_back(x);
    }
    const auto fine = path_signature(PiecewiseLinearPath(t, v, dim), 4);
    CHECK(max_abs_diff(full, fine) < 1e-12 * std::max(1.0, full.max_abs()));
  }
}

TEST_CASE("time augmentation") {
  const auto a = augment_time({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0}, 1);
  CHECK(a.dim() == 2);
  CHECK(a.values() == std::vector<double>{0.0, 0.0, 0.5, 1.0, 1.0, 0.0});
  const auto d = drop_time(a);
  CHECK(d.dim() == 1);
  CHECK(d.values() == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(d.times() == a.times());

  const auto ray = augment_time({0.0, 0.3, 1.0}, {2.0, 2.0, 2.0}, 1);
  const auto s = path_signature(ray, 3);
  CHECK(s[Word{0}] == doctest::Approx(1.0));
  CHECK(s[Word{0, 0, 0}] == doctest::Approx(1.0 / 6.0));
  CHECK(s[Word{1}] == 0.0);
  CHECK(s[Word{0, 1}] == 0.0);

  CHECK_THROWS(PiecewiseLinearPath({0.0, 0.0}, {1.0, 2.0}, 1));
  CHECK_THROWS(PiecewiseLinearPath({0.0, 1.0}, {1.0}, 1));
}
