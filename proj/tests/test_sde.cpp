#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "sigsde/sde.hpp"

using namespace sigsde;

namespace {

Theta experiment1_field() {
  Theta th(1, 1, 2);
  th.add_known(1, 0, Word{}, -1.0);
  th.add_known(1, 0, Word{1}, 1.0);
  th.add_known(1, 1, Word{1, 1}, 4.0);
  return th;
}

// y' = 0.3 + 0.5 t - y + 0.4 y^2, which is what the lifted system solves when
// Y^(1,1) = y^2 / 2
Theta ode_field() {
  Theta th(1, 0, 3);
  th.add_known(1, 0, Word{}, 0.3);
  th.add_known(1, 0, Word{0}, 0.5);
  th.add_known(1, 0, Word{1}, -1.0);
  th.add_known(1, 0, Word{1, 1}, 0.8);
  return th;
}

double rk4_oracle(double T, std::size_t steps) {
  auto f = [](double t, double y) { return 0.3 + 0.5 * t - y + 0.4 * y * y; };
  const double h = T / static_cast<double>(steps);
  double y = 0.0, t = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double k1 = f(t, y), k2 = f(t + h / 2, y + h / 2 * k1), k3 = f(t + h / 2, y + h / 2 * k2),
                 k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return y;
}

}  // namespace

TEST_CASE("eval_F") {
  const auto zero = eval_F(Theta(2, 1, 2), TruncTensor::unit(3, 2));
  CHECK(zero.rows == 3);
  CHECK(zero.cols == 2);
  CHECK(zero(0, 0) == 1.0);
  CHECK(zero(0, 1) == 0.0);
  for (int i = 1; i <= 2; ++i) {
    for (int j = 0; j <= 1; ++j) CHECK(zero(i, j) == 0.0);
  }

  TruncTensor s = TruncTensor::unit(2, 2);
  s.set(Word{1}, 0.3);
  s.set(Word{1, 1}, 0.045);
  const auto F = eval_F(experiment1_field(), s);
  CHECK(F(0, 0) == 1.0);
  CHECK(F(0, 1) == 0.0);
  CHECK(F(1, 0) == doctest::Approx(-0.7));
  CHECK(F(1, 1) == doctest::Approx(0.18));

  std::mt19937_64 rng(21);
  const Theta th = testing_util::random_theta(rng, 2, 2, 2, 1.0);
  TruncTensor s1(3, 2), s2(3, 2);
  std::normal_distribution<double> nd;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    s1.at(i) = nd(rng);
    s2.at(i) = nd(rng);
  }
  const auto a = eval_F(th, s1 + s2), b = eval_F(th, s1), c = eval_F(th, s2);
  for (int i = 1; i <= 2; ++i) {
    for (int j = 0; j <= 2; ++j) CHECK(std::abs(a(i, j) - b(i, j) - c(i, j)) < 1e-12);
  }

  Theta unbound(1, 1, 1, {"theta1"});
  unbound.add_unknown(1, 0, Word{}, 0);
  CHECK_THROWS_AS(VectorField{unbound}, std::invalid_argument);
}

TEST_CASE("lifted_apply hand table") {
  const double a = 0.7, b = -1.3, dt = 0.01;
  Theta th(1, 1, 2);
  th.add_known(1, 1, Word{}, b);
  TruncTensor s = TruncTensor::unit(2, 2);
  s.set(Word{1}, a);
  const std::vector<double> dx{dt, 1.0};
  const auto inc = lifted_apply(th, s, dx);
  CHECK(inc[Word{}] == 0.0);
  CHECK(inc[Word{0}] == doctest::Approx(dt));
  CHECK(inc[Word{1}] == doctest::Approx(b));
  CHECK(inc[Word{0, 0}] == 0.0);
  CHECK(inc[Word{0, 1}] == 0.0);
  CHECK(inc[Word{1, 0}] == doctest::Approx(a * dt));
  CHECK(inc[Word{1, 1}] == doctest::Approx(a * b));

  const auto unit_inc = lifted_apply(Theta(1, 1, 2), TruncTensor::unit(2, 2), std::vector<double>{1.0, 0.0});
  CHECK(max_abs_diff(unit_inc, [] {
          TruncTensor e(2, 2);
          e.set(Word{0}, 1.0);
          return e;
        }()) == 0.0);
}

TEST_CASE("heun step") {
  Theta th(1, 0, 1);
  th.add_known(1, 0, Word{1}, 1.0);
  TruncTensor s = TruncTensor::unit(2, 1);
  s.set(Word{1}, 1.0);
  const auto next = heun_step(th, s, std::vector<double>{0.1});
  CHECK(next[Word{1}] == doctest::Approx(1.105));
  CHECK(next[Word{0}] == doctest::Approx(0.1));

  std::mt19937_64 rng(22);
  const Theta big = testing_util::random_theta(rng, 2, 1, 3, 1.0);
  TruncTensor st(3, 3);
  std::normal_distribution<double> nd;
  for (std::size_t i = 0; i < st.size(); ++i) st.at(i) = nd(rng);
  st.at(0) = 1.0;
  CHECK(max_abs_diff(heun_step(big, st, std::vector<double>{0.0, 0.0}), st) == 0.0);

  // (s' - s)/dt -> L(s, (1,0)) at first order
  const auto target = lifted_apply(big, st, std::vector<double>{1.0, 0.0});
  double err[2];
  const double dts[2] = {1e-2, 1e-3};
  for (int k = 0; k < 2; ++k) {
    const auto step = heun_step(big, st, std::vector<double>{dts[k], 0.0});
    err[k] = max_abs_diff((step - st) * (1.0 / dts[k]), target);
  }
  CHECK(err[1] < err[0]);
  CHECK(err[0] / err[1] == doctest::Approx(10.0).epsilon(0.1));
}

TEST_CASE("zero field gives the time ray") {
  const auto traj = simulate(Theta(2, 2, 2), 0.5, 0.01, 3);
  CHECK_FALSE(traj.aborted);
  for (std::size_t i = 0; i < traj.path.num_points(); ++i) {
    CHECK(traj.path.point(i)[0] == doctest::Approx(traj.grid[i]));
    CHECK(traj.path.point(i)[1] == 0.0);
    CHECK(traj.path.point(i)[2] == 0.0);
  }
  CHECK(traj.final_state[Word{0, 0}] == doctest::Approx(0.125));
}

TEST_CASE("deterministic run against an RK4 oracle") {
  const VectorField field(ode_field());
  SimulationOptions opts;
  opts.T = 1.0;
  opts.dt = 1e-3;
  opts.record_states = true;
  const auto traj = simulate_with_increments(field, opts, {});
  const double y = traj.path.point(traj.path.num_points() - 1)[1];
  CHECK(std::abs(y - rk4_oracle(1.0, 10000)) < 1e-4);

  // constant drift: Y^(1)_T = T
  Theta c(1, 0, 2);
  c.add_known(1, 0, Word{}, 1.0);
  const auto tc = simulate_with_increments(VectorField(c), opts, {});
  CHECK(tc.final_state[Word{1}] == doctest::Approx(1.0).epsilon(1e-12));

  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    CHECK(s[Word{}] == 1.0);
    CHECK(std::abs(s[Word{0}] - traj.grid[k]) < 1e-12);
    for (int i = 0; i <= 1; ++i) {
      for (int j = 0; j <= 1; ++j) {
        const double lhs = s[Word{i}] * s[Word{j}];
        const double rhs = s[Word{i, j}] + s[Word{j, i}];
        CHECK(std::abs(lhs - rhs) <= 5e-3 * std::max(1.0, std::abs(lhs)));
      }
    }
  }

  // signature of the recorded path vs the lifted state
  const auto sig = path_signature(traj.path, 3);
  const auto& fin = traj.final_state;
  CHECK(max_abs_diff(sig, fin) <= 5e-3 * fin.max_abs());
}

TEST_CASE("stochastic runs") {
  const VectorField field(experiment1_field());
  SimulationOptions opts;
  opts.T = 0.2;
  opts.dt = 1e-3;
  opts.record_states = true;
  const auto a = simulate(field, opts, 77, 4, 9);
  const auto b = simulate(field, opts, 77, 4, 9);
  const auto c = simulate(field, opts, 77, 4, 10);
  CHECK(a.path.values() == b.path.values());
  CHECK(a.path.values() != c.path.values());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(a.states[k][Word{}] == 1.0);
    CHECK(std::abs(a.states[k][Word{0}] - a.grid[k]) < 1e-12);
  }

  const auto batch = simulate_batch(field, opts, 6, 77, 4, 2);
  CHECK(batch.trajectories.size() == 6);
  CHECK(batch.trajectories[2].path.values() == simulate(field, opts, 77, 4, 2).path.values());

  CHECK_THROWS(simulate_with_increments(field, opts, std::vector<double>(3)));
}

TEST_CASE("blow-up aborts") {
  Theta th(1, 0, 2);
  th.add_known(1, 0, Word{1, 1}, 50.0);
  th.add_known(1, 0, Word{}, 1.0);
  SimulationOptions opts;
  opts.T = 1.0;
  opts.dt = 1e-3;
  opts.state_cap = 1e6;
  const auto traj = simulate_with_increments(VectorField(th), opts, {});
  CHECK(traj.aborted);
  CHECK_FALSE(traj.diagnostic.empty());
}
