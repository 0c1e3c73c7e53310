#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sigsde {

/// Sparse real polynomial in up to kMaxVars variables.
///
/// A monomial is packed into 64 bits, eight bits of exponent per variable,
/// so multiplying monomials is adding keys. Terms are kept sorted by key
/// with no zero coefficients.
class MPoly {
 public:
  using Monomial = std::uint64_t;
  using Term = std::pair<Monomial, double>;
  static constexpr std::size_t kMaxVars = 8;
  static constexpr int kMaxExponent = 255;
  /// Coefficients below this fraction of the largest one are dropped after
  /// every product or sum.
  static constexpr double kPruneTol = 1e-14;

  MPoly() = default;
  explicit MPoly(std::size_t num_vars);

  static MPoly constant(std::size_t num_vars, double c);
  static MPoly variable(std::size_t num_vars, std::size_t k, double coeff = 1.0);
  static Monomial monomial(std::span<const int> exponents);
  static int exponent(Monomial mono, std::size_t k) { return static_cast<int>((mono >> (8 * k)) & 0xffu); }
  static int degree(Monomial mono);

  [[nodiscard]] std::size_t num_vars() const { return num_vars_; }
  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] int total_degree() const;
  [[nodiscard]] double coefficient(Monomial mono) const;
  [[nodiscard]] double max_abs_coefficient() const;

  MPoly& operator+=(const MPoly& o);
  MPoly& operator-=(const MPoly& o);
  MPoly& operator*=(double s);
  /// this += s * o
  void add_scaled(const MPoly& o, double s);

  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(MPoly a, double s) { return a *= s; }
  friend MPoly operator*(double s, MPoly a) { return a *= s; }
  friend MPoly operator*(const MPoly& a, const MPoly& b);
  friend bool operator==(const MPoly& a, const MPoly& b) = default;

  [[nodiscard]] MPoly derivative(std::size_t k) const;
  [[nodiscard]] double evaluate(std::span<const double> x) const;

  /// Human-readable form, e.g. "0.2*t1^2 - 1.5*t2 + 3".
  [[nodiscard]] std::string to_string(const std::vector<std::string>& names = {}) const;

 private:
  std::size_t num_vars_ = 0;
  std::vector<Term> terms_;

  void prune();
  void check_vars(const MPoly& o) const;
};

}  // namespace sigsde
