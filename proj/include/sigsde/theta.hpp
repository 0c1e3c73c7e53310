#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sigsde/tensor.hpp"

namespace sigsde {

/// Position of one scalar parameter: coefficient `word` of theta_{row,col}.
struct ThetaSlot {
  int row = 0;
  int col = 0;
  Word word;

  friend auto operator<=>(const ThetaSlot&, const ThetaSlot&) = default;
};

/// An affine form c + sum_k a_k * theta^k in the unknown parameters.
struct AffineValue {
  double constant = 0.0;
  std::vector<std::pair<std::size_t, double>> unknowns;  // (unknown index, coefficient)
};

/// Parameters of a linear signature SDE
///   dY^i = sum_j <theta_{i,j}, Y_t> dX^j,  i = 1..m,  j = 0..n,
/// with theta_{i,j} in T^(<=q)(R^{m+1}). Row 0 is implicit (dY^0 = dt).
///
/// Every slot holds an affine form in d scalar unknowns. The plain
/// known/unknown mask is the case where an unknown slot is exactly one
/// unknown with coefficient 1; models such as -theta^1 (Y^e - Y^(1)) share
/// one unknown between several slots. The unknown order is the variable
/// order of every polynomial built from this Theta.
class Theta {
 public:
  Theta() = default;
  Theta(int m, int n, int q, std::vector<std::string> unknown_names = {});

  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int q() const { return q_; }
  [[nodiscard]] std::size_t num_unknowns() const { return names_.size(); }
  [[nodiscard]] const std::vector<std::string>& unknown_names() const { return names_; }

  /// Adds `value` to the constant part of the slot.
  void add_known(int i, int j, const Word& w, double value);
  /// Adds coeff * theta^k to the slot.
  void add_unknown(int i, int j, const Word& w, std::size_t k, double coeff = 1.0);

  [[nodiscard]] const std::map<ThetaSlot, AffineValue>& slots() const { return slots_; }

  /// Substitutes numeric values for all unknowns; the result has none.
  [[nodiscard]] Theta bind(std::span<const double> values) const;

  /// Unknown k is a diffusion unknown when every slot it enters has col >= 1.
  [[nodiscard]] std::vector<bool> diffusion_unknowns() const;

  /// Numeric theta_{i,j}; requires num_unknowns() == 0.
  [[nodiscard]] TruncTensor entry(int i, int j) const;

 private:
  int m_ = 0;
  int n_ = 0;
  int q_ = 0;
  std::vector<std::string> names_;
  std::map<ThetaSlot, AffineValue> slots_;

  AffineValue& slot(int i, int j, const Word& w);
};

}  // namespace sigsde
