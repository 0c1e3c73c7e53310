#include "sigsde/mpoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sigsde {

MPoly::MPoly(std::size_t num_vars) : num_vars_(num_vars) {
  if (num_vars > kMaxVars) throw std::invalid_argument("MPoly supports at most 8 variables");
}

MPoly MPoly::constant(std::size_t num_vars, double c) {
  MPoly p(num_vars);
  if (c != 0.0) p.terms_.emplace_back(0, c);
  return p;
}

MPoly MPoly::variable(std::size_t num_vars, std::size_t k, double coeff) {
  if (k >= num_vars) throw std::out_of_range("variable index out of range");
  MPoly p(num_vars);
  if (coeff != 0.0) p.terms_.emplace_back(Monomial{1} << (8 * k), coeff);
  return p;
}

MPoly::Monomial MPoly::monomial(std::span<const int> exponents) {
  if (exponents.size() > kMaxVars) throw std::invalid_argument("too many exponents");
  Monomial m = 0;
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    if (exponents[k] < 0 || exponents[k] > kMaxExponent) throw std::out_of_range("exponent out of range");
    m |= static_cast<Monomial>(exponents[k]) << (8 * k);
  }
  return m;
}

int MPoly::degree(Monomial mono) {
  int d = 0;
  for (std::size_t k = 0; k < kMaxVars; ++k) d += exponent(mono, k);
  return d;
}

int MPoly::total_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, degree(m));
  return d;
}

double MPoly::coefficient(Monomial mono) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), mono,
                             [](const Term& t, Monomial k) { return t.first < k; });
  return it != terms_.end() && it->first == mono ? it->second : 0.0;
}

double MPoly::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.second));
  return m;
}

void MPoly::check_vars(const MPoly& o) const {
  if (o.num_vars_ != num_vars_) throw std::invalid_argument("MPoly variable count mismatch");
}

void MPoly::prune() {
  const double cut = kPruneTol * max_abs_coefficient();
  std::erase_if(terms_, [cut](const Term& t) { return std::abs(t.second) <= cut; });
}

void MPoly::add_scaled(const MPoly& o, double s) {
  check_vars(o);
  if (o.terms_.empty() || s == 0.0) return;
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == terms_.end() || b->first < a->first) {
      merged.emplace_back(b->first, s * b->second);
      ++b;
    } else {
      merged.emplace_back(a->first, a->second + s * b->second);
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  prune();
}

MPoly& MPoly::operator+=(const MPoly& o) {
  add_scaled(o, 1.0);
  return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) {
  add_scaled(o, -1.0);
  return *this;
}

MPoly& MPoly::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= s;
  return *this;
}

MPoly operator*(const MPoly& a, const MPoly& b) {
  a.check_vars(b);
  MPoly out(a.num_vars_);
  if (a.terms_.empty() || b.terms_.empty()) return out;
  if (a.terms_.size() == 1 && a.terms_[0].first == 0) return b * a.terms_[0].second;
  if (b.terms_.size() == 1 && b.terms_[0].first == 0) return a * b.terms_[0].second;
  std::vector<MPoly::Term> raw;
  raw.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      // exponents are bounded by kMaxExponent per variable, so packed keys add
      // without carries as long as degrees stay below 256
      raw.emplace_back(ma + mb, ca * cb);
    }
  }
  std::sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& t : raw) {
    if (!out.terms_.empty() && out.terms_.back().first == t.first) {
      out.terms_.back().second += t.second;
    } else {
      out.terms_.push_back(t);
    }
  }
  out.prune();
  return out;
}

MPoly MPoly::derivative(std::size_t k) const {
  if (k >= num_vars_) throw std::out_of_range("derivative variable out of range");
  MPoly out(num_vars_);
  const Monomial unit = Monomial{1} << (8 * k);
  for (const auto& [m, c] : terms_) {
    const int e = exponent(m, k);
    if (e > 0) out.terms_.emplace_back(m - unit, c * e);
  }
  // lowering one exponent keeps keys ordered
  return out;
}

double MPoly::evaluate(std::span<const double> x) const {
  if (x.size() != num_vars_) throw std::invalid_argument("evaluate: wrong number of values");
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = c;
    for (std::size_t k = 0; k < num_vars_; ++k) {
      for (int e = exponent(m, k); e > 0; --e) v *= x[k];
    }
    sum += v;
  }
  return sum;
}

std::string MPoly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::string s;
  char buf[64];
  // highest degree first reads more naturally
  std::vector<Term> sorted = terms_;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Term& x, const Term& y) { return degree(x.first) > degree(y.first); });
  bool first = true;
  for (const auto& [m, c] : sorted) {
    double mag = c;
    if (first) {
      if (c < 0) s += "-";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    mag = std::abs(c);
    std::snprintf(buf, sizeof buf, "%.17g", mag);
    bool wrote_coeff = false;
    if (m == 0 || mag != 1.0) {
      s += buf;
      wrote_coeff = true;
    }
    for (std::size_t k = 0; k < num_vars_; ++k) {
      const int e = exponent(m, k);
      if (e == 0) continue;
      if (wrote_coeff) s += "*";
      s += k < names.size() ? names[k] : "x" + std::to_string(k + 1);
      if (e > 1) s += "^" + std::to_string(e);
      wrote_coeff = true;
    }
    first = false;
  }
  return s;
}

}  // namespace sigsde
