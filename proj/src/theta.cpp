#include "sigsde/theta.hpp"

#include <stdexcept>
#include <string>

namespace sigsde {

Theta::Theta(int m, int n, int q, std::vector<std::string> unknown_names)
    : m_(m), n_(n), q_(q), names_(std::move(unknown_names)) {
  if (m < 1 || n < 0 || q < 0 || m + 1 > kMaxAlphabetSize || n + 1 > kMaxAlphabetSize) {
    throw std::invalid_argument("Theta: need m >= 1, n >= 0, q >= 0 within alphabet limits");
  }
  if (names_.size() > tensor_size(m + 1, q)) {
    throw std::invalid_argument("Theta: more unknowns than dim T^(<=q)(R^{m+1})");
  }
}

AffineValue& Theta::slot(int i, int j, const Word& w) {
  if (i < 1 || i > m_) throw std::out_of_range("theta row " + std::to_string(i) + " outside 1..m");
  if (j < 0 || j > n_) throw std::out_of_range("theta column " + std::to_string(j) + " outside 0..n");
  if (static_cast<int>(w.size()) > q_) throw std::out_of_range("theta word " + w.to_string() + " longer than q");
  if (w.max_letter() > m_) throw std::out_of_range("theta word " + w.to_string() + " uses a letter > m");
  return slots_[ThetaSlot{i, j, w}];
}

void Theta::add_known(int i, int j, const Word& w, double value) { slot(i, j, w).constant += value; }

void Theta::add_unknown(int i, int j, const Word& w, std::size_t k, double coeff) {
  if (k >= names_.size()) throw std::out_of_range("unknown index " + std::to_string(k) + " out of range");
  slot(i, j, w).unknowns.emplace_back(k, coeff);
}

Theta Theta::bind(std::span<const double> values) const {
  if (values.size() != names_.size()) {
    throw std::invalid_argument("bind: expected " + std::to_string(names_.size()) + " values, got " +
                                std::to_string(values.size()));
  }
  Theta out(m_, n_, q_);
  for (const auto& [s, v] : slots_) {
    double x = v.constant;
    for (auto [k, c] : v.unknowns) x += c * values[k];
    out.add_known(s.row, s.col, s.word, x);
  }
  return out;
}

std::vector<bool> Theta::diffusion_unknowns() const {
  std::vector<bool> diffusion(names_.size(), true), seen(names_.size(), false);
  for (const auto& [s, v] : slots_) {
    for (auto [k, c] : v.unknowns) {
      seen[k] = true;
      if (s.col == 0) diffusion[k] = false;
    }
  }
  for (std::size_t k = 0; k < names_.size(); ++k) diffusion[k] = diffusion[k] && seen[k];
  return diffusion;
}

TruncTensor Theta::entry(int i, int j) const {
  if (!names_.empty()) throw std::logic_error("theta has unbound unknowns");
  TruncTensor t(m_ + 1, q_);
  for (const auto& [s, v] : slots_) {
    if (s.row == i && s.col == j) t.add(s.word, v.constant);
  }
  return t;
}

}  // namespace sigsde
