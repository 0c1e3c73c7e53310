#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sigsde/mpoly.hpp"
#include "sigsde/picard.hpp"
#include "sigsde/sde.hpp"
#include "sigsde/theta.hpp"

namespace sigsde {

/// Average of coefficient I_k of the level-q signature of each path.
/// Paths must share their time grid.
std::vector<double> empirical_moments(const std::vector<PiecewiseLinearPath>& paths, const std::vector<Word>& words,
                                      int q);
std::vector<double> empirical_moments(const std::vector<Trajectory>& trajectories, const std::vector<Word>& words,
                                      int q);

/// Moment polynomials P_r^{I_k}(theta), one per word.
std::vector<MPoly> moment_polys(AlphaTable& table, int r, const std::vector<Word>& words,
                                const TruncTensor& driving_moments);

/// k-th entry is P_r^{I_k}(theta) - moments[k].
std::vector<MPoly> assemble_system(AlphaTable& table, int r, const std::vector<Word>& words,
                                   const std::vector<double>& moments, const TruncTensor& driving_moments);
std::vector<MPoly> shift_system(std::vector<MPoly> polys, const std::vector<double>& moments);

struct SolverOptions {
  std::size_t starts = 200;
  double box = 10.0;
  double tol = 1e-10;
  int max_iterations = 100;
  double dedup = 1e-6;
  std::uint64_t seed = 0;
};

struct Root {
  std::vector<double> x;
  double residual = 0.0;  // infinity norm
  std::size_t hits = 0;   // starts that converged here
};

struct SolveResult {
  std::vector<Root> roots;  // sorted by residual
  std::size_t starts = 0;
  std::size_t converged = 0;
  /// More than 20% of converged starts landed on distinct roots.
  bool flagged = false;
  std::string diagnostic;
};

/// Damped Newton from the origin and `starts` uniform points in
/// [-box, box]^d. Throws std::invalid_argument unless the system is square.
SolveResult solve_system(const std::vector<MPoly>& polys, const SolverOptions& options = {});

/// Infinity norm of the system at x.
double residual_norm(const std::vector<MPoly>& polys, const std::vector<double>& x);

/// Root closest to `reference` in l1; ties go to the smaller residual, then
/// the lexicographically smaller point. Throws on an empty list.
const Root& select_estimate(const std::vector<Root>& roots, const std::vector<double>& reference);

struct WordSet {
  std::string name;
  std::vector<Word> words;
};

struct ExperimentConfig {
  std::string name;
  Theta model;  // unknowns are the estimated parameters
  std::vector<double> theta0;
  double T = 1.0;
  double dt = 1e-3;
  std::size_t N = 2000;
  Scheme scheme = Scheme::heun;
  double state_cap = 1e6;
  /// Fraction of aborted trajectories above which the run is reported as
  /// numerically failed.
  double max_abort_fraction = 0.01;
  int r = 3;
  std::vector<WordSet> word_sets;
  SolverOptions solver;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct TrialResult {
  std::size_t trial = 0;
  std::vector<double> moments;
  SolveResult solve;
  bool found = false;
  std::vector<double> estimate;
};

struct WordSetReport {
  WordSet set;
  std::vector<TrialResult> trials;
  std::vector<double> mean;
  std::vector<double> stddev;
  std::size_t failed = 0;   // trials without a real root
  std::size_t flagged = 0;  // trials whose solver flagged many roots
};

struct ExperimentReport {
  std::string name;
  std::vector<std::string> unknown_names;
  std::vector<double> theta0;
  std::vector<WordSetReport> sets;
  std::size_t trajectories = 0;
  std::size_t aborted = 0;
  bool abort_threshold_exceeded = false;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Every trial simulates N trajectories from the substreams (seed, trial, k)
/// and estimates theta with every word set from the same sample.
ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Writes roots.csv, summary.csv and moments.csv into `dir`.
void write_report(const ExperimentReport& report, const std::string& dir);

/// The two systems of the hidden-dynamics example, driven by one Brownian
/// draw and integrated with the midpoint rule.
struct NonidentResult {
  Trajectory a;
  Trajectory b;
  double distance = 0.0;  // ||Y_A(T) - Y_B(T)||_2 over coordinates 1..3
};

Theta nonident_system_a();
Theta nonident_system_b();
NonidentResult nonident_demo(double T, double dt, std::uint64_t seed);
/// Same driver for two given systems (m = 3, n = 2).
NonidentResult compare_systems(const Theta& a, const Theta& b, double T, double dt, std::uint64_t seed);

}  // namespace sigsde
