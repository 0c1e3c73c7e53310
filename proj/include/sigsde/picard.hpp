#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "sigsde/mpoly.hpp"
#include "sigsde/signature.hpp"
#include "sigsde/tensor.hpp"
#include "sigsde/theta.hpp"

namespace sigsde {

/// Word-length and degree bound of the r-th Picard iterate at level ell.
int q_bound(int r, int ell);

/// Coefficients alpha^I_{r,J}(theta) with
///   Y(r)^I_{0,t} = sum_J alpha^I_{r,J}(theta) X^J_{0,t},
/// as polynomials in the unknowns of `theta`. Entries are computed on
/// demand and cached on (r, I, J).
class AlphaTable {
 public:
  explicit AlphaTable(Theta theta);

  [[nodiscard]] const Theta& theta() const { return theta_; }
  [[nodiscard]] std::size_t num_vars() const { return theta_.num_unknowns(); }
  [[nodiscard]] std::size_t cache_size() const { return cache_.size(); }
  void clear_cache() { cache_.clear(); }

  /// I over {0..m}, J over {0..n}. Throws std::out_of_range when |I| > q
  /// or |J| does not fit in a Word.
  const MPoly& alpha(int r, const Word& I, const Word& J);

 private:
  struct Key {
    int r;
    std::uint64_t I;
    std::uint64_t J;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct Entry {
    Word K;
    MPoly coeff;
  };

  Theta theta_;
  MPoly zero_, one_;
  // (i, j) -> nonzero theta_{i,j}^K, i = 0..m
  std::vector<std::vector<std::vector<Entry>>> entries_;
  std::unordered_map<Key, MPoly, KeyHash> cache_;

  MPoly compute(int r, const Word& I, const Word& J);
};

/// P_r^I(theta) = sum_J alpha^I_{r,J}(theta) moments^J. `moments` lives over
/// {0..n} and must reach level q_bound(r, |I|).
MPoly moment_poly(AlphaTable& table, int r, const Word& I, const TruncTensor& moments);

struct PicardOptions {
  /// Romberg columns tried before giving up.
  int max_refinements = 12;
  double tol = 1e-9;
};

/// The Picard iterates Y(0), ..., Y(r) over [0, T] of dY = tens(Y) F(Y) dX
/// for a bound theta and a piecewise-linear driver over {0..n}, computed by
/// trapezoidal quadrature on subdivisions of the driver grid with Romberg
/// extrapolation. Returns the values at the end of the path. Throws
/// std::runtime_error if the extrapolation does not settle.
std::vector<TruncTensor> numeric_picard_sequence(const Theta& theta, const PiecewiseLinearPath& X, int r,
                                                 const PicardOptions& options = {});
TruncTensor numeric_picard(const Theta& theta, const PiecewiseLinearPath& X, int r,
                           const PicardOptions& options = {});

}  // namespace sigsde
