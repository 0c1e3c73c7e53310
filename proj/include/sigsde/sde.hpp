#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sigsde/signature.hpp"
#include "sigsde/tensor.hpp"
#include "sigsde/theta.hpp"

namespace sigsde {

/// F_theta evaluated at a state: (m+1) x (n+1), row-major.
struct FieldMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  [[nodiscard]] double operator()(int i, int j) const {
    return values[static_cast<std::size_t>(i * cols + j)];
  }
};

/// Numeric vector field of a fully bound Theta, compiled to sparse dot
/// products over the flat state layout.
class VectorField {
 public:
  VectorField() = default;
  /// Throws std::invalid_argument if theta still has unknowns.
  explicit VectorField(const Theta& theta);

  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int q() const { return q_; }

  /// Row 0 is (1, 0, ..., 0); entry (i, j) is <theta_{i,j}, s>.
  [[nodiscard]] FieldMatrix eval(const TruncTensor& s) const;

  /// v = F(s) dx.
  void apply(const TruncTensor& s, std::span<const double> dx, std::span<double> v) const;

  /// tens(s)(F(s) dx): the increment of the lifted equation.
  [[nodiscard]] TruncTensor lifted_apply(const TruncTensor& s, std::span<const double> dx) const;
  /// out += scale * lifted_apply(s, dx), without allocating.
  void lifted_apply_add(const TruncTensor& s, std::span<const double> dx, double scale, TruncTensor& out) const;

 private:
  struct Term {
    std::size_t index;
    double value;
  };
  int m_ = 0, n_ = 0, q_ = 0;
  std::vector<std::vector<Term>> rows_;  // (i-1)*(n+1)+j -> sparse theta_{i,j}
};

FieldMatrix eval_F(const Theta& theta, const TruncTensor& s);
TruncTensor lifted_apply(const Theta& theta, const TruncTensor& s, std::span<const double> dx);

enum class Scheme { heun, midpoint };

/// Heun predictor-corrector for the Stratonovich lifted equation.
TruncTensor heun_step(const VectorField& field, const TruncTensor& s, std::span<const double> dx);
/// Explicit midpoint rule: s + L(s + L(s, dx)/2, dx).
TruncTensor midpoint_step(const VectorField& field, const TruncTensor& s, std::span<const double> dx);
TruncTensor heun_step(const Theta& theta, const TruncTensor& s, std::span<const double> dx);

struct SimulationOptions {
  double T = 1.0;
  double dt = 1e-3;
  Scheme scheme = Scheme::heun;
  /// A trajectory whose state leaves [-cap, cap] coefficient-wise aborts.
  double state_cap = 1e6;
  bool record_states = false;
};

struct Trajectory {
  std::vector<double> grid;
  /// Level-1 solution (t, Y^1, ..., Y^m) with Y_0 = 0.
  PiecewiseLinearPath path;
  /// Lifted states Y_t, only filled when record_states is set.
  std::vector<TruncTensor> states;
  TruncTensor final_state;
  bool aborted = false;
  std::string diagnostic;
};

/// Simulates dY = F(Y) dX from Y_0 = 1 with dX = (dt, dW_1..dW_n).
/// `increments` holds steps*n Brownian increments, row-major.
Trajectory simulate_with_increments(const VectorField& field, const SimulationOptions& options,
                                    std::span<const double> increments);

/// Standard normal increments scaled by sqrt(dt), steps*n of them, drawn
/// from substream (seed, a, b).
std::vector<double> brownian_increments(std::size_t steps, int n, double dt, std::uint64_t seed,
                                        std::uint64_t a, std::uint64_t b = 0);

/// One trajectory from substream (seed, a, b).
Trajectory simulate(const VectorField& field, const SimulationOptions& options, std::uint64_t seed,
                    std::uint64_t a = 0, std::uint64_t b = 0);
Trajectory simulate(const Theta& theta, double T, double dt, std::uint64_t seed);

struct TrajectoryBatch {
  std::vector<Trajectory> trajectories;  // completed ones only
  std::size_t aborted = 0;
  std::vector<std::string> diagnostics;
};

/// N trajectories; trajectory k uses substream (seed, stream, k).
TrajectoryBatch simulate_batch(const VectorField& field, const SimulationOptions& options, std::size_t N,
                               std::uint64_t seed, std::uint64_t stream, unsigned threads = 0);

}  // namespace sigsde
