#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "sigsde/word.hpp"

namespace sigsde {

/// Element of the truncated tensor algebra T^(<=q)(R^a), stored densely in
/// the canonical word order (see enumerate_words).
class TruncTensor {
 public:
  TruncTensor() = default;
  /// Zero tensor.
  TruncTensor(int alphabet_size, int level);

  static TruncTensor unit(int alphabet_size, int level);

  [[nodiscard]] int alphabet_size() const { return alphabet_; }
  [[nodiscard]] int level() const { return level_; }
  [[nodiscard]] std::size_t size() const { return coeffs_.size(); }

  /// Coefficient of `w`; zero for words longer than the level.
  [[nodiscard]] double operator[](const Word& w) const;
  void set(const Word& w, double value);
  void add(const Word& w, double value);

  [[nodiscard]] double& at(std::size_t index) { return coeffs_[index]; }
  [[nodiscard]] double at(std::size_t index) const { return coeffs_[index]; }
  [[nodiscard]] std::span<double> coeffs() { return coeffs_; }
  [[nodiscard]] std::span<const double> coeffs() const { return coeffs_; }

  /// Coefficients of the words of length exactly k.
  [[nodiscard]] std::span<double> level_block(int k);
  [[nodiscard]] std::span<const double> level_block(int k) const;

  TruncTensor& operator+=(const TruncTensor& o);
  TruncTensor& operator-=(const TruncTensor& o);
  TruncTensor& operator*=(double s);

  friend TruncTensor operator+(TruncTensor a, const TruncTensor& b) { return a += b; }
  friend TruncTensor operator-(TruncTensor a, const TruncTensor& b) { return a -= b; }
  friend TruncTensor operator*(TruncTensor a, double s) { return a *= s; }
  friend TruncTensor operator*(double s, TruncTensor a) { return a *= s; }

  [[nodiscard]] double max_abs() const;

  /// Writes `word;coefficient` rows, skipping exact zeros unless `all`.
  void write_csv(std::ostream& os, bool all = true) const;

 private:
  int alphabet_ = 0;
  int level_ = 0;
  std::vector<double> coeffs_;

  void check_compatible(const TruncTensor& o) const;
};

/// Truncated concatenation (tensor) product.
TruncTensor concat_mul(const TruncTensor& s, const TruncTensor& t);

/// exp(a) = sum_k a^{(x)k}/k!, exact at the truncation level. Requires a^e = 0.
TruncTensor trunc_exp(const TruncTensor& a);

/// Coefficient-wise inner product <a, b>.
double dot(const TruncTensor& a, const TruncTensor& b);

/// max_w |a^w - b^w|.
double max_abs_diff(const TruncTensor& a, const TruncTensor& b);

}  // namespace sigsde
