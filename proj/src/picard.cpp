#include "sigsde/picard.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sigsde/sde.hpp"

namespace sigsde {

int q_bound(int r, int ell) {
  if (r < 0 || ell < 0) throw std::invalid_argument("q_bound: negative argument");
  if (r == 0 || ell == 0) return 0;
  if (r - 1 >= 30) throw std::overflow_error("q_bound: r too large");
  if (ell == 1) return 1 << (r - 1);
  return (1 << r) - 1;
}

std::size_t AlphaTable::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t x = k.I * 0x9e3779b97f4a7c15ULL ^ (k.J + 0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(k.r + 1));
  x ^= x >> 31;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 29;
  return static_cast<std::size_t>(x);
}

AlphaTable::AlphaTable(Theta theta)
    : theta_(std::move(theta)),
      zero_(theta_.num_unknowns()),
      one_(MPoly::constant(theta_.num_unknowns(), 1.0)) {
  const int m = theta_.m(), n = theta_.n();
  const std::size_t d = theta_.num_unknowns();
  entries_.assign(static_cast<std::size_t>(m + 1), std::vector<std::vector<Entry>>(static_cast<std::size_t>(n + 1)));
  entries_[0][0].push_back(Entry{Word{}, one_});
  for (const auto& [slot, value] : theta_.slots()) {
    MPoly p = MPoly::constant(d, value.constant);
    for (auto [k, c] : value.unknowns) p += MPoly::variable(d, k, c);
    if (p.is_zero()) continue;
    entries_[static_cast<std::size_t>(slot.row)][static_cast<std::size_t>(slot.col)].push_back(Entry{slot.word, p});
  }
}

const MPoly& AlphaTable::alpha(int r, const Word& I, const Word& J) {
  if (r < 0) throw std::invalid_argument("alpha: negative r");
  if (static_cast<int>(I.size()) > theta_.q()) {
    throw std::out_of_range("alpha: |I| = " + std::to_string(I.size()) + " exceeds q = " + std::to_string(theta_.q()));
  }
  if (I.max_letter() > theta_.m()) throw std::out_of_range("alpha: I uses a letter > m");
  if (J.max_letter() > theta_.n()) throw std::out_of_range("alpha: J uses a letter > n");
  const Key key{r, I.pack(), J.pack()};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  MPoly value = compute(r, I, J);
  return cache_.emplace(key, std::move(value)).first->second;
}

MPoly AlphaTable::compute(int r, const Word& I, const Word& J) {
  if (I.empty()) return J.empty() ? one_ : zero_;
  if (r == 0 || J.empty()) return zero_;
  const int len = static_cast<int>(J.size());
  MPoly out = zero_;

  if (I.size() == 1) {
    if (len > q_bound(r - 1, theta_.q()) + 1) return out;
    const Word head = J.prefix();
    for (const Entry& e : entries_[static_cast<std::size_t>(I[0])][static_cast<std::size_t>(J.last())]) {
      if (len - 1 > q_bound(r - 1, static_cast<int>(e.K.size()))) continue;
      const MPoly& a = alpha(r - 1, e.K, head);
      if (a.is_zero()) continue;
      out += e.coeff * a;
    }
    return out;
  }

  const int ell = static_cast<int>(I.size());
  const int max_l = q_bound(r - 1, ell - 1);
  const int max_k = q_bound(r, 1) - 1;
  if (len > max_l + max_k + 1) return out;
  const Word head = I.prefix();
  const Word tail{I.last()};
  const int free = len - 1;
  std::vector<std::size_t> lpos, kpos;
  for (std::uint32_t mask = 0; mask < (1u << free); ++mask) {
    lpos.clear();
    kpos.clear();
    for (int p = 0; p < free; ++p) ((mask >> p) & 1u ? lpos : kpos).push_back(static_cast<std::size_t>(p));
    if (static_cast<int>(lpos.size()) > max_l || static_cast<int>(kpos.size()) > max_k) continue;
    const MPoly& a = alpha(r - 1, head, J.subword(lpos));
    if (a.is_zero()) continue;
    kpos.push_back(static_cast<std::size_t>(free));
    const MPoly& b = alpha(r, tail, J.subword(kpos));
    if (b.is_zero()) continue;
    out += a * b;
  }
  return out;
}

MPoly moment_poly(AlphaTable& table, int r, const Word& I, const TruncTensor& moments) {
  const int need = q_bound(r, static_cast<int>(I.size()));
  if (moments.alphabet_size() != table.theta().n() + 1) {
    throw std::invalid_argument("moment_poly: moments must live over {0..n}");
  }
  if (moments.level() < need) {
    throw std::invalid_argument("moment_poly: moments truncated at level " + std::to_string(moments.level()) +
                                ", need " + std::to_string(need));
  }
  MPoly out(table.num_vars());
  const std::size_t count = tensor_size(moments.alphabet_size(), need);
  for (std::size_t idx = 0; idx < count; ++idx) {
    const double mu = moments.at(idx);
    if (mu == 0.0) continue;
    const MPoly& a = table.alpha(r, I, word_at(idx, moments.alphabet_size()));
    if (!a.is_zero()) out.add_scaled(a, mu);
  }
  return out;
}

namespace {

// All iterates at the end of the path, trapezoid with `sub` substeps per
// driver segment.
std::vector<TruncTensor> trapezoid_iterates(const VectorField& field, const PiecewiseLinearPath& X, int r, int sub) {
  const int a = field.m() + 1;
  const int q = field.q();
  std::vector<std::vector<double>> dx;
  for (std::size_t s = 0; s < X.num_segments(); ++s) {
    auto inc = X.increment(s);
    for (double& v : inc) v /= sub;
    for (int k = 0; k < sub; ++k) dx.push_back(inc);
  }
  const std::size_t points = dx.size() + 1;
  std::vector<TruncTensor> prev(points, TruncTensor::unit(a, q));
  std::vector<TruncTensor> ends{prev.back()};
  for (int k = 1; k <= r; ++k) {
    std::vector<TruncTensor> cur(points);
    cur[0] = TruncTensor::unit(a, q);
    for (std::size_t p = 0; p + 1 < points; ++p) {
      cur[p + 1] = cur[p];
      field.lifted_apply_add(prev[p], dx[p], 0.5, cur[p + 1]);
      field.lifted_apply_add(prev[p + 1], dx[p], 0.5, cur[p + 1]);
    }
    ends.push_back(cur.back());
    prev = std::move(cur);
  }
  return ends;
}

std::vector<double> flatten(const std::vector<TruncTensor>& ts) {
  std::vector<double> v;
  for (const auto& t : ts) v.insert(v.end(), t.coeffs().begin(), t.coeffs().end());
  return v;
}

}  // namespace

std::vector<TruncTensor> numeric_picard_sequence(const Theta& theta, const PiecewiseLinearPath& X, int r,
                                                 const PicardOptions& options) {
  if (r < 0) throw std::invalid_argument("numeric_picard: negative r");
  if (X.dim() != static_cast<std::size_t>(theta.n() + 1)) {
    throw std::invalid_argument("numeric_picard: driver must have n+1 coordinates");
  }
  if (X.num_segments() == 0) throw std::invalid_argument("numeric_picard: driver has no segments");
  const VectorField field(theta);
  std::vector<TruncTensor> shape = trapezoid_iterates(field, X, r, 1);
  // Romberg table, one row per halving
  std::vector<std::vector<std::vector<double>>> R;
  R.push_back({flatten(shape)});
  for (int i = 1; i <= options.max_refinements; ++i) {
    std::vector<std::vector<double>> row{flatten(trapezoid_iterates(field, X, r, 1 << i))};
    double pow4 = 1.0;
    for (int j = 1; j <= i; ++j) {
      pow4 *= 4.0;
      std::vector<double> e(row[j - 1].size());
      for (std::size_t c = 0; c < e.size(); ++c) e[c] = row[j - 1][c] + (row[j - 1][c] - R[i - 1][j - 1][c]) / (pow4 - 1.0);
      row.push_back(std::move(e));
    }
    const auto& best = row[i];
    const auto& last = R[i - 1][i - 1];
    double diff = 0.0, scale = 1.0;
    for (std::size_t c = 0; c < best.size(); ++c) {
      diff = std::max(diff, std::abs(best[c] - last[c]));
      scale = std::max(scale, std::abs(best[c]));
    }
    if (i >= 2 && diff <= options.tol * scale) {
      std::size_t c = 0;
      for (auto& t : shape) {
        for (double& v : t.coeffs()) v = best[c++];
      }
      return shape;
    }
    R.push_back(std::move(row));
  }
  throw std::runtime_error("numeric_picard: quadrature did not converge after " +
                           std::to_string(options.max_refinements) + " refinements");
}

TruncTensor numeric_picard(const Theta& theta, const PiecewiseLinearPath& X, int r, const PicardOptions& options) {
  return numeric_picard_sequence(theta, X, r, options).back();
}

}  // namespace sigsde
