#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "sigsde/driving_moments.hpp"
#include "sigsde/picard.hpp"

using namespace sigsde;

namespace {

double poly_sum(AlphaTable& table, int r, const Word& I, const TruncTensor& sig) {
  std::vector<double> none;
  double s = 0.0;
  for (std::size_t idx = 0; idx < sig.size(); ++idx) {
    if (sig.at(idx) == 0.0) continue;
    s += table.alpha(r, I, word_at(idx, sig.alphabet_size())).evaluate(none) * sig.at(idx);
  }
  return s;
}

}  // namespace

TEST_CASE("q_bound cases") {
  CHECK(q_bound(0, 5) == 0);
  CHECK(q_bound(3, 0) == 0);
  CHECK(q_bound(3, 1) == 4);
  CHECK(q_bound(3, 2) == 7);
  CHECK(q_bound(1, 1) == 1);
  CHECK(q_bound(1, 3) == 1);
}

TEST_CASE("alpha base cases") {
  Theta th(1, 1, 2, {"a", "b"});
  th.add_unknown(1, 0, Word{}, 0);
  th.add_unknown(1, 1, Word{}, 1);
  AlphaTable t(th);
  for (int r = 0; r <= 3; ++r) CHECK(t.alpha(r, Word{}, Word{}) == MPoly::constant(2, 1.0));
  CHECK(t.alpha(2, Word{}, Word{1}).is_zero());
  CHECK(t.alpha(0, Word{1}, Word{}).is_zero());
  CHECK(t.alpha(0, Word{1, 1}, Word{0, 1}).is_zero());
  CHECK(t.alpha(1, Word{1}, Word{0}) == MPoly::variable(2, 0));
  CHECK(t.alpha(1, Word{1}, Word{1}) == MPoly::variable(2, 1));
  CHECK(t.alpha(1, Word{0}, Word{0}) == MPoly::constant(2, 1.0));
  CHECK_THROWS_AS(t.alpha(1, Word{1, 1, 1}, Word{}), std::out_of_range);
}

TEST_CASE("warm and cold caches agree") {
  std::mt19937_64 rng(3);
  Theta th = testing_util::random_theta(rng, 2, 1, 2, 1.0);
  AlphaTable warm(th);
  auto moments = expected_signature_bm_time(1, 0.3, 7);
  MPoly first = moment_poly(warm, 3, Word{1, 2}, moments);
  MPoly again = moment_poly(warm, 3, Word{1, 2}, moments);
  AlphaTable cold(th);
  CHECK(first == again);
  CHECK(moment_poly(cold, 3, Word{1, 2}, moments) == first);
}

TEST_CASE("moment_poly checks truncation") {
  Theta th(1, 1, 2);
  th.add_known(1, 0, Word{1}, 1.0);
  AlphaTable t(th);
  CHECK_THROWS_AS(moment_poly(t, 3, Word{1, 1}, expected_signature_bm_time(1, 0.2, 6)), std::invalid_argument);
  CHECK(moment_poly(t, 0, Word{1}, expected_signature_bm_time(1, 0.2, 1)).is_zero());
}

TEST_CASE("pure drift moment polynomial matches numeric Picard") {
  Theta sym(1, 0, 1, {"th"});
  sym.add_unknown(1, 0, Word{1}, 0);
  AlphaTable t(sym);
  auto moments = expected_signature_bm_time(0, 0.2, q_bound(3, 1));
  MPoly p = moment_poly(t, 3, Word{1}, moments);
  const double theta1[] = {1.0};
  PiecewiseLinearPath X({0.0, 0.2}, {0.0, 0.2}, 1);
  // dY = Y dt from Y=0 has Y = 0; the iterate is zero as well
  CHECK(std::abs(p.evaluate(theta1) - numeric_picard(sym.bind(theta1), X, 3)[Word{1}]) < 1e-10);
}

TEST_CASE("pure drift with constant term") {
  Theta sym(1, 0, 2, {"th"});
  sym.add_unknown(1, 0, Word{}, 0);
  sym.add_unknown(1, 0, Word{1}, 0);
  AlphaTable t(sym);
  auto moments = expected_signature_bm_time(0, 0.2, q_bound(3, 2));
  PiecewiseLinearPath X({0.0, 0.2}, {0.0, 0.2}, 1);
  const double th[] = {1.0};
  auto num = numeric_picard(sym.bind(th), X, 3);
  for (const Word& I : {Word{1}, Word{1, 1}, Word{0, 1}}) {
    MPoly p = moment_poly(t, 3, I, moments);
    CHECK(std::abs(p.evaluate(th) - num[I]) < 1e-10);
    CHECK(p.total_degree() <= q_bound(3, static_cast<int>(I.size())));
  }
  // Y(3)^(1) = t + t^2/2 + t^3/6
  CHECK(std::abs(num[Word{1}] - (0.2 + 0.02 + 0.008 / 6)) < 1e-12);
}

TEST_CASE("alpha expansion matches numeric Picard on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const int m = 1 + trial % 2, n = 1 + (trial / 2) % 2, q = 1 + trial % 3;
    Theta th = testing_util::random_theta(rng, m, n, q, 2.0);
    auto X = testing_util::random_driver(rng, n, 4, 0.5);
    AlphaTable table(th);
    for (int r = 0; r <= 3; ++r) {
      auto num = numeric_picard(th, X, r);
      int top = 0;
      for (int l = 0; l <= q; ++l) top = std::max(top, q_bound(r, l));
      auto sig = path_signature(X, top);
      for (const Word& I : enumerate_words(m + 1, q)) {
        const double lhs = num[I];
        const double rhs = poly_sum(table, r, I, sig);
        INFO("trial " << trial << " r " << r << " I " << I.to_string());
        CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("experiment-1 field against a smooth driver") {
  Theta th(1, 1, 3);
  th.add_known(1, 0, Word{}, 1.0);
  th.add_known(1, 0, Word{1}, -1.0);
  th.add_known(1, 1, Word{1, 1}, 4.0);
  std::vector<double> times, vals;
  for (int i = 0; i <= 200; ++i) {
    const double t = 0.2 * i / 200.0;
    times.push_back(t);
    vals.push_back(t);
    vals.push_back(std::sin(t));
  }
  PiecewiseLinearPath X(times, vals, 2);
  AlphaTable table(th);
  auto num = numeric_picard(th, X, 3);
  auto sig = path_signature(X, q_bound(3, 1));
  const double rhs = poly_sum(table, 3, Word{1}, sig);
  CHECK(std::abs(num[Word{1}] - rhs) <= 1e-6 * std::abs(rhs));
}

TEST_CASE("numeric Picard trivia") {
  Theta zero(2, 1, 2);
  std::mt19937_64 rng(5);
  auto X = testing_util::random_driver(rng, 1, 3, 0.5);
  // row 0 still carries time, so only pure-time words move
  double t_end = X.point(X.num_points() - 1)[0];
  for (int r = 1; r <= 3; ++r) {
    auto y = numeric_picard(zero, X, r);
    CHECK(std::abs(y[Word{0}] - t_end) < 1e-12);
    for (const Word& w : enumerate_words(3, 2)) {
      if (w.count(0) != w.size()) CHECK(y[w] == 0.0);
    }
  }
  Theta any = testing_util::random_theta(rng, 2, 1, 2, 1.0);
  CHECK(max_abs_diff(numeric_picard(any, X, 0), TruncTensor::unit(3, 2)) == 0.0);
}
