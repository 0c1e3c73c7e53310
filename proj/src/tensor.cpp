#include "sigsde/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace sigsde {

TruncTensor::TruncTensor(int alphabet_size, int level)
    : alphabet_(alphabet_size), level_(level) {
  if (alphabet_size < 1 || alphabet_size > kMaxAlphabetSize || level < 0) {
    throw std::invalid_argument("TruncTensor: bad alphabet size or level");
  }
  coeffs_.assign(tensor_size(alphabet_size, level), 0.0);
}

TruncTensor TruncTensor::unit(int alphabet_size, int level) {
  TruncTensor t(alphabet_size, level);
  t.coeffs_[0] = 1.0;
  return t;
}

double TruncTensor::operator[](const Word& w) const {
  if (static_cast<int>(w.size()) > level_) return 0.0;
  return coeffs_[word_index(w, alphabet_)];
}

void TruncTensor::set(const Word& w, double value) {
  if (static_cast<int>(w.size()) > level_) throw std::out_of_range("word longer than tensor level");
  coeffs_[word_index(w, alphabet_)] = value;
}

void TruncTensor::add(const Word& w, double value) {
  if (static_cast<int>(w.size()) > level_) throw std::out_of_range("word longer than tensor level");
  coeffs_[word_index(w, alphabet_)] += value;
}

std::span<double> TruncTensor::level_block(int k) {
  const std::size_t b = level_offset(alphabet_, k);
  return std::span<double>(coeffs_).subspan(b, level_offset(alphabet_, k + 1) - b);
}

std::span<const double> TruncTensor::level_block(int k) const {
  const std::size_t b = level_offset(alphabet_, k);
  return std::span<const double>(coeffs_).subspan(b, level_offset(alphabet_, k + 1) - b);
}

void TruncTensor::check_compatible(const TruncTensor& o) const {
  if (alphabet_ != o.alphabet_ || level_ != o.level_) {
    throw std::invalid_argument("TruncTensor: alphabet or level mismatch");
  }
}

TruncTensor& TruncTensor::operator+=(const TruncTensor& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

TruncTensor& TruncTensor::operator-=(const TruncTensor& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

TruncTensor& TruncTensor::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

double TruncTensor::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void TruncTensor::write_csv(std::ostream& os, bool all) const {
  const auto words = enumerate_words(alphabet_, level_);
  char buf[64];
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!all && coeffs_[i] == 0.0) continue;
    std::snprintf(buf, sizeof buf, "%.17g", coeffs_[i]);
    os << words[i].to_string() << ';' << buf << '\n';
  }
}

TruncTensor concat_mul(const TruncTensor& s, const TruncTensor& t) {
  if (s.alphabet_size() != t.alphabet_size() || s.level() != t.level()) {
    throw std::invalid_argument("concat_mul: alphabet or level mismatch");
  }
  const int q = s.level();
  TruncTensor out(s.alphabet_size(), q);
  for (int k = 0; k <= q; ++k) {
    auto dst = out.level_block(k);
    for (int i = 0; i <= k; ++i) {
      auto left = s.level_block(i);
      auto right = t.level_block(k - i);
      const std::size_t rn = right.size();
      // word (K1, K2) sits at index(K1) * a^{|K2|} + index(K2) within level k
      for (std::size_t a = 0; a < left.size(); ++a) {
        const double la = left[a];
        if (la == 0.0) continue;
        double* d = dst.data() + a * rn;
        for (std::size_t b = 0; b < rn; ++b) d[b] += la * right[b];
      }
    }
  }
  return out;
}

TruncTensor trunc_exp(const TruncTensor& a) {
  if (a.at(0) != 0.0) throw std::invalid_argument("trunc_exp: scalar part must be zero");
  // Horner form: 1 + a(1 + a/2(1 + a/3(...)))
  TruncTensor result = TruncTensor::unit(a.alphabet_size(), a.level());
  for (int k = a.level(); k >= 1; --k) {
    result = concat_mul(a, result);
    result *= 1.0 / k;
    result.at(0) += 1.0;
  }
  return result;
}

double dot(const TruncTensor& a, const TruncTensor& b) {
  if (a.alphabet_size() != b.alphabet_size() || a.level() != b.level()) {
    throw std::invalid_argument("dot: alphabet or level mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.at(i) * b.at(i);
  return s;
}

double max_abs_diff(const TruncTensor& a, const TruncTensor& b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.at(i) - b.at(i)));
  return m;
}

}  // namespace sigsde
