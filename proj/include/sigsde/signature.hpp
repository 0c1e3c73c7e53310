#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sigsde/tensor.hpp"

namespace sigsde {

/// Piecewise-linear path sampled on a strictly increasing time grid.
/// Values are stored row-major: point i occupies [i*dim, (i+1)*dim).
class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath() = default;
  PiecewiseLinearPath(std::vector<double> times, std::vector<double> values, std::size_t dim);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t num_points() const { return times_.size(); }
  [[nodiscard]] std::size_t num_segments() const { return times_.empty() ? 0 : times_.size() - 1; }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] std::span<const double> point(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * dim_, dim_);
  }
  /// Increment over segment i, i.e. point(i+1) - point(i).
  [[nodiscard]] std::vector<double> increment(std::size_t i) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::size_t dim_ = 0;
};

/// exp(increment) truncated at level q: the signature of a straight segment.
TruncTensor segment_signature(std::span<const double> increment, int q);

/// In place s <- s (x) exp(increment), level by level (Horner form).
void extend_by_segment(TruncTensor& s, std::span<const double> increment);

/// Signature of the path over grid points [s, t] via Chen's identity.
TruncTensor path_signature(const PiecewiseLinearPath& path, std::size_t s, std::size_t t, int q);
/// Signature over the whole path.
TruncTensor path_signature(const PiecewiseLinearPath& path, int q);

/// Prepends the grid time as coordinate 0.
PiecewiseLinearPath augment_time(const std::vector<double>& times, const std::vector<double>& values,
                                 std::size_t dim);
/// Drops coordinate 0.
PiecewiseLinearPath drop_time(const PiecewiseLinearPath& path);

/// The same trace run backwards (on the mirrored grid T - t).
PiecewiseLinearPath reversed(const PiecewiseLinearPath& path);

}  // namespace sigsde
