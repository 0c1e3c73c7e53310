#include "sigsde/sde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sigsde/driving_moments.hpp"
#include "sigsde/parallel.hpp"
#include "sigsde/rng.hpp"

namespace sigsde {

VectorField::VectorField(const Theta& theta) : m_(theta.m()), n_(theta.n()), q_(theta.q()) {
  if (theta.num_unknowns() != 0) throw std::invalid_argument("vector field has unbound unknowns");
  rows_.resize(static_cast<std::size_t>(m_ * (n_ + 1)));
  for (const auto& [slot, value] : theta.slots()) {
    if (value.constant == 0.0) continue;
    rows_[static_cast<std::size_t>((slot.row - 1) * (n_ + 1) + slot.col)].push_back(
        Term{word_index(slot.word, m_ + 1), value.constant});
  }
}

FieldMatrix VectorField::eval(const TruncTensor& s) const {
  FieldMatrix f{m_ + 1, n_ + 1, std::vector<double>(static_cast<std::size_t>((m_ + 1) * (n_ + 1)), 0.0)};
  f.values[0] = 1.0;
  for (int i = 1; i <= m_; ++i) {
    for (int j = 0; j <= n_; ++j) {
      double acc = 0.0;
      for (const Term& t : rows_[static_cast<std::size_t>((i - 1) * (n_ + 1) + j)]) acc += t.value * s.at(t.index);
      f.values[static_cast<std::size_t>(i * (n_ + 1) + j)] = acc;
    }
  }
  return f;
}

void VectorField::apply(const TruncTensor& s, std::span<const double> dx, std::span<double> v) const {
  v[0] = dx[0];
  for (int i = 1; i <= m_; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= n_; ++j) {
      const double x = dx[static_cast<std::size_t>(j)];
      if (x == 0.0) continue;
      double e = 0.0;
      for (const Term& t : rows_[static_cast<std::size_t>((i - 1) * (n_ + 1) + j)]) e += t.value * s.at(t.index);
      acc += e * x;
    }
    v[static_cast<std::size_t>(i)] = acc;
  }
}

void VectorField::lifted_apply_add(const TruncTensor& s, std::span<const double> dx, double scale,
                                   TruncTensor& out) const {
  if (s.alphabet_size() != m_ + 1 || s.level() != q_) throw std::invalid_argument("state shape mismatch");
  if (dx.size() != static_cast<std::size_t>(n_ + 1)) throw std::invalid_argument("dx must have n+1 entries");
  const std::size_t a = static_cast<std::size_t>(m_ + 1);
  double v[kMaxAlphabetSize];
  apply(s, dx, std::span<double>(v, a));
  for (std::size_t i = 0; i < a; ++i) v[i] *= scale;
  // level k gets s_{k-1} (x) v, with the scalar part of tens fixed to 1
  for (int k = 1; k <= q_; ++k) {
    auto dst = out.level_block(k);
    if (k == 1) {
      for (std::size_t i = 0; i < a; ++i) dst[i] += v[i];
      continue;
    }
    auto src = s.level_block(k - 1);
    for (std::size_t w = 0; w < src.size(); ++w) {
      const double c = src[w];
      if (c == 0.0) continue;
      double* d = dst.data() + w * a;
      for (std::size_t i = 0; i < a; ++i) d[i] += c * v[i];
    }
  }
}

TruncTensor VectorField::lifted_apply(const TruncTensor& s, std::span<const double> dx) const {
  TruncTensor out(m_ + 1, q_);
  lifted_apply_add(s, dx, 1.0, out);
  return out;
}

FieldMatrix eval_F(const Theta& theta, const TruncTensor& s) { return VectorField(theta).eval(s); }

TruncTensor lifted_apply(const Theta& theta, const TruncTensor& s, std::span<const double> dx) {
  return VectorField(theta).lifted_apply(s, dx);
}

TruncTensor heun_step(const VectorField& field, const TruncTensor& s, std::span<const double> dx) {
  TruncTensor inc = field.lifted_apply(s, dx);
  TruncTensor pred = s + inc;
  TruncTensor out = s;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) += 0.5 * inc.at(i);
  field.lifted_apply_add(pred, dx, 0.5, out);
  return out;
}

TruncTensor midpoint_step(const VectorField& field, const TruncTensor& s, std::span<const double> dx) {
  TruncTensor mid = s;
  field.lifted_apply_add(s, dx, 0.5, mid);
  TruncTensor out = s;
  field.lifted_apply_add(mid, dx, 1.0, out);
  return out;
}

TruncTensor heun_step(const Theta& theta, const TruncTensor& s, std::span<const double> dx) {
  return heun_step(VectorField(theta), s, dx);
}

std::vector<double> brownian_increments(std::size_t steps, int n, double dt, std::uint64_t seed,
                                        std::uint64_t a, std::uint64_t b) {
  Engine rng = make_engine(seed, a, b);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(dt);
  std::vector<double> inc(steps * static_cast<std::size_t>(n));
  for (double& x : inc) x = sd * normal(rng);
  return inc;
}

Trajectory simulate_with_increments(const VectorField& field, const SimulationOptions& options,
                                    std::span<const double> increments) {
  const std::size_t steps = grid_steps(options.T, options.dt);
  const double h = options.T / static_cast<double>(steps);
  const int m = field.m(), n = field.n();
  if (increments.size() != steps * static_cast<std::size_t>(n)) {
    throw std::invalid_argument("simulate: expected " + std::to_string(steps * static_cast<std::size_t>(n)) +
                                " Brownian increments");
  }
  const std::size_t dim = static_cast<std::size_t>(m + 1);

  Trajectory traj;
  traj.grid.resize(steps + 1);
  std::vector<double> values((steps + 1) * dim, 0.0);
  TruncTensor state = TruncTensor::unit(m + 1, field.q());
  if (options.record_states) {
    traj.states.reserve(steps + 1);
    traj.states.push_back(state);
  }
  std::vector<double> dx(static_cast<std::size_t>(n + 1));
  dx[0] = h;
  for (std::size_t k = 0; k < steps; ++k) {
    for (int j = 1; j <= n; ++j) dx[static_cast<std::size_t>(j)] = increments[k * static_cast<std::size_t>(n) + j - 1];
    state = options.scheme == Scheme::heun ? heun_step(field, state, dx) : midpoint_step(field, state, dx);
    const double t = h * static_cast<double>(k + 1);
    traj.grid[k + 1] = t;
    bool bad = false;
    for (double c : state.coeffs()) {
      if (!std::isfinite(c) || std::abs(c) > options.state_cap) {
        bad = true;
        break;
      }
    }
    if (bad) {
      traj.aborted = true;
      traj.diagnostic = "state exceeded cap " + std::to_string(options.state_cap) + " at t=" + std::to_string(t);
      values.resize((k + 2) * dim);
      traj.grid.resize(k + 2);
      for (std::size_t i = 1; i < dim; ++i) values[(k + 1) * dim + i] = state.at(1 + i);
      values[(k + 1) * dim] = t;
      break;
    }
    values[(k + 1) * dim] = t;
    for (std::size_t i = 1; i < dim; ++i) values[(k + 1) * dim + i] = state.at(1 + i);
    if (options.record_states) traj.states.push_back(state);
  }
  traj.final_state = state;
  traj.path = PiecewiseLinearPath(traj.grid, std::move(values), dim);
  return traj;
}

Trajectory simulate(const VectorField& field, const SimulationOptions& options, std::uint64_t seed,
                    std::uint64_t a, std::uint64_t b) {
  const std::size_t steps = grid_steps(options.T, options.dt);
  const auto inc = brownian_increments(steps, field.n(), options.T / static_cast<double>(steps), seed, a, b);
  return simulate_with_increments(field, options, inc);
}

Trajectory simulate(const Theta& theta, double T, double dt, std::uint64_t seed) {
  SimulationOptions opts;
  opts.T = T;
  opts.dt = dt;
  return simulate(VectorField(theta), opts, seed);
}

TrajectoryBatch simulate_batch(const VectorField& field, const SimulationOptions& options, std::size_t N,
                               std::uint64_t seed, std::uint64_t stream, unsigned threads) {
  std::vector<Trajectory> all(N);
  parallel_for(N, threads, [&](std::size_t k) { all[k] = simulate(field, options, seed, stream, k); });
  TrajectoryBatch batch;
  batch.trajectories.reserve(N);
  for (auto& t : all) {
    if (t.aborted) {
      ++batch.aborted;
      batch.diagnostics.push_back(std::move(t.diagnostic));
    } else {
      batch.trajectories.push_back(std::move(t));
    }
  }
  return batch;
}

}  // namespace sigsde
