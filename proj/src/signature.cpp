#include "sigsde/signature.hpp"

#include <stdexcept>
#include <string>

namespace sigsde {

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> times, std::vector<double> values,
                                         std::size_t dim)
    : times_(std::move(times)), values_(std::move(values)), dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("path dimension must be positive");
  if (values_.size() != times_.size() * dim_) {
    throw std::invalid_argument("path has " + std::to_string(times_.size()) + " times but " +
                                std::to_string(values_.size()) + " values for dim " + std::to_string(dim_));
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("path times must be strictly increasing");
  }
}

std::vector<double> PiecewiseLinearPath::increment(std::size_t i) const {
  std::vector<double> d(dim_);
  for (std::size_t k = 0; k < dim_; ++k) d[k] = values_[(i + 1) * dim_ + k] - values_[i * dim_ + k];
  return d;
}

void extend_by_segment(TruncTensor& s, std::span<const double> increment) {
  const int a = s.alphabet_size();
  if (static_cast<std::size_t>(a) != increment.size()) {
    throw std::invalid_argument("increment dimension does not match tensor alphabet");
  }
  const int q = s.level();
  std::vector<double> work, next;
  // new_k = sum_{j=0}^{k} s_{k-j} (x) inc^{(x)j} / j!, evaluated as
  // ((s_0 inc/k + s_1) inc/(k-1) + s_2) ... + s_k. Top-down so lower levels
  // are still the old values when read.
  for (int k = q; k >= 1; --k) {
    work.assign(1, s.at(0) / k);
    for (int i = 1; i <= k; ++i) {
      next.assign(work.size() * increment.size(), 0.0);
      for (std::size_t w = 0; w < work.size(); ++w) {
        const double v = work[w];
        for (std::size_t l = 0; l < increment.size(); ++l) next[w * increment.size() + l] = v * increment[l];
      }
      auto block = s.level_block(i);
      if (i < k) {
        const double scale = 1.0 / (k - i);
        for (std::size_t w = 0; w < next.size(); ++w) next[w] = (next[w] + block[w]) * scale;
      } else {
        for (std::size_t w = 0; w < next.size(); ++w) block[w] += next[w];
      }
      work.swap(next);
    }
  }
}

TruncTensor segment_signature(std::span<const double> increment, int q) {
  TruncTensor s = TruncTensor::unit(static_cast<int>(increment.size()), q);
  extend_by_segment(s, increment);
  return s;
}

TruncTensor path_signature(const PiecewiseLinearPath& path, std::size_t s, std::size_t t, int q) {
  if (s > t || t >= path.num_points()) throw std::out_of_range("path_signature: bad grid indices");
  TruncTensor sig = TruncTensor::unit(static_cast<int>(path.dim()), q);
  for (std::size_t i = s; i < t; ++i) {
    const auto inc = path.increment(i);
    extend_by_segment(sig, inc);
  }
  return sig;
}

TruncTensor path_signature(const PiecewiseLinearPath& path, int q) {
  if (path.num_points() == 0) throw std::invalid_argument("path_signature: empty path");
  return path_signature(path, 0, path.num_points() - 1, q);
}

PiecewiseLinearPath augment_time(const std::vector<double>& times, const std::vector<double>& values,
                                 std::size_t dim) {
  if (values.size() != times.size() * dim) throw std::invalid_argument("augment_time: size mismatch");
  std::vector<double> out;
  out.reserve(times.size() * (dim + 1));
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.push_back(times[i]);
    for (std::size_t k = 0; k < dim; ++k) out.push_back(values[i * dim + k]);
  }
  return PiecewiseLinearPath(times, std::move(out), dim + 1);
}

PiecewiseLinearPath drop_time(const PiecewiseLinearPath& path) {
  if (path.dim() < 2) throw std::invalid_argument("drop_time: path has no coordinate besides time");
  std::vector<double> out;
  out.reserve(path.num_points() * (path.dim() - 1));
  for (std::size_t i = 0; i < path.num_points(); ++i) {
    auto p = path.point(i);
    out.insert(out.end(), p.begin() + 1, p.end());
  }
  return PiecewiseLinearPath(path.times(), std::move(out), path.dim() - 1);
}

PiecewiseLinearPath reversed(const PiecewiseLinearPath& path) {
  const std::size_t n = path.num_points();
  std::vector<double> times(n), values;
  values.reserve(path.values().size());
  const double t0 = path.times().front(), t1 = path.times().back();
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = t0 + (t1 - path.times()[n - 1 - i]);
    auto p = path.point(n - 1 - i);
    values.insert(values.end(), p.begin(), p.end());
  }
  return PiecewiseLinearPath(std::move(times), std::move(values), path.dim());
}

}  // namespace sigsde
