#include "sigsde/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "sigsde/driving_moments.hpp"
#include "sigsde/parallel.hpp"
#include "sigsde/rng.hpp"

namespace sigsde {

std::vector<double> empirical_moments(const std::vector<PiecewiseLinearPath>& paths, const std::vector<Word>& words,
                                      int q) {
  if (paths.empty()) throw std::invalid_argument("empirical_moments: empty sample");
  for (const Word& w : words) {
    if (static_cast<int>(w.size()) > q) throw std::invalid_argument("empirical_moments: word " + w.to_string() + " longer than q");
  }
  const auto& grid = paths.front().times();
  std::vector<double> sum(words.size(), 0.0);
  for (const auto& p : paths) {
    if (p.times() != grid) throw std::invalid_argument("empirical_moments: paths do not share a grid");
    const TruncTensor sig = path_signature(p, q);
    for (std::size_t k = 0; k < words.size(); ++k) sum[k] += sig[words[k]];
  }
  for (double& s : sum) s /= static_cast<double>(paths.size());
  return sum;
}

std::vector<double> empirical_moments(const std::vector<Trajectory>& trajectories, const std::vector<Word>& words,
                                      int q) {
  std::vector<PiecewiseLinearPath> paths;
  paths.reserve(trajectories.size());
  for (const auto& t : trajectories) paths.push_back(t.path);
  return empirical_moments(paths, words, q);
}

std::vector<MPoly> moment_polys(AlphaTable& table, int r, const std::vector<Word>& words,
                                const TruncTensor& driving_moments) {
  std::vector<MPoly> out;
  out.reserve(words.size());
  for (const Word& w : words) out.push_back(moment_poly(table, r, w, driving_moments));
  return out;
}

std::vector<MPoly> shift_system(std::vector<MPoly> polys, const std::vector<double>& moments) {
  if (polys.size() != moments.size()) throw std::invalid_argument("shift_system: size mismatch");
  for (std::size_t k = 0; k < polys.size(); ++k) polys[k] -= MPoly::constant(polys[k].num_vars(), moments[k]);
  return polys;
}

std::vector<MPoly> assemble_system(AlphaTable& table, int r, const std::vector<Word>& words,
                                   const std::vector<double>& moments, const TruncTensor& driving_moments) {
  if (words.size() != table.num_vars()) {
    throw std::invalid_argument("assemble_system: " + std::to_string(words.size()) + " words for " +
                                std::to_string(table.num_vars()) + " unknowns");
  }
  return shift_system(moment_polys(table, r, words, driving_moments), moments);
}

double residual_norm(const std::vector<MPoly>& polys, const std::vector<double>& x) {
  double r = 0.0;
  for (const auto& p : polys) r = std::max(r, std::abs(p.evaluate(x)));
  return r;
}

namespace {

struct NewtonSystem {
  std::vector<MPoly> f;
  std::vector<std::vector<MPoly>> jac;

  explicit NewtonSystem(const std::vector<MPoly>& polys) : f(polys) {
    const std::size_t d = polys.size();
    jac.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) jac[i].push_back(polys[i].derivative(k));
    }
  }

  Eigen::VectorXd value(const Eigen::VectorXd& x) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    for (std::size_t i = 0; i < f.size(); ++i) v[static_cast<Eigen::Index>(i)] = f[i].evaluate(xs);
    return v;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    const auto d = static_cast<Eigen::Index>(f.size());
    Eigen::MatrixXd J(d, d);
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) {
        J(i, k) = jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].evaluate(xs);
      }
    }
    return J;
  }
};

// Extra full steps after convergence so that starts reaching the same
// root agree well inside the dedup radius.
void polish(const NewtonSystem& sys, Eigen::VectorXd& x, double& residual) {
  Eigen::VectorXd fx = sys.value(x);
  for (int it = 0; it < 8; ++it) {
    const Eigen::VectorXd dx = sys.jacobian(x).colPivHouseholderQr().solve(-fx);
    if (!dx.allFinite()) return;
    const Eigen::VectorXd xn = x + dx;
    const Eigen::VectorXd fn = sys.value(xn);
    if (!(fn.lpNorm<Eigen::Infinity>() <= fx.lpNorm<Eigen::Infinity>())) return;
    x = xn;
    fx = fn;
    residual = fx.lpNorm<Eigen::Infinity>();
    if (dx.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>())) return;
  }
}

bool newton(const NewtonSystem& sys, Eigen::VectorXd& x, const SolverOptions& opt, double& residual) {
  Eigen::VectorXd fx = sys.value(x);
  double nf = fx.lpNorm<Eigen::Infinity>();
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (!std::isfinite(nf)) return false;
    if (nf <= opt.tol) {
      residual = nf;
      return true;
    }
    const Eigen::VectorXd dx = sys.jacobian(x).colPivHouseholderQr().solve(-fx);
    if (!dx.allFinite()) return false;
    double lambda = 1.0;
    Eigen::VectorXd xn, fn;
    double merit = fx.squaredNorm(), nn = 0.0;
    for (int h = 0; h < 30; ++h) {
      xn = x + lambda * dx;
      fn = sys.value(xn);
      nn = fn.squaredNorm();
      if (std::isfinite(nn) && nn < merit) break;
      lambda *= 0.5;
    }
    if (!std::isfinite(nn)) return false;
    const double step = (lambda * dx).lpNorm<Eigen::Infinity>();
    x = xn;
    fx = fn;
    nf = fx.lpNorm<Eigen::Infinity>();
    if (x.lpNorm<Eigen::Infinity>() > 1e8) return false;
    if (step <= opt.tol * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      // stalled at the rounding floor
      residual = nf;
      return nf <= 10.0 * opt.tol;
    }
  }
  residual = nf;
  return nf <= opt.tol;
}

}  // namespace

SolveResult solve_system(const std::vector<MPoly>& polys, const SolverOptions& options) {
  const std::size_t d = polys.size();
  if (d == 0) throw std::invalid_argument("solve_system: empty system");
  for (const auto& p : polys) {
    if (p.num_vars() != d) throw std::invalid_argument("solve_system: system is not square");
  }
  const NewtonSystem sys(polys);
  Engine rng = make_engine(options.seed, 0x5017);
  std::uniform_real_distribution<double> u(-options.box, options.box);

  SolveResult res;
  res.starts = options.starts + 1;
  for (std::size_t s = 0; s <= options.starts; ++s) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    if (s > 0) {
      for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = u(rng);
    }
    double resid = 0.0;
    if (!newton(sys, x, options, resid)) continue;
    polish(sys, x, resid);
    ++res.converged;
    std::vector<double> pt(x.data(), x.data() + x.size());
    bool merged = false;
    for (auto& r : res.roots) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d; ++k) dist = std::max(dist, std::abs(r.x[k] - pt[k]));
      if (dist <= options.dedup) {
        ++r.hits;
        if (resid < r.residual) {
          r.x = pt;
          r.residual = resid;
        }
        merged = true;
        break;
      }
    }
    if (!merged) res.roots.push_back(Root{pt, resid, 1});
  }
  std::stable_sort(res.roots.begin(), res.roots.end(),
                   [](const Root& a, const Root& b) { return a.residual < b.residual; });
  if (res.roots.empty()) {
    res.diagnostic = "no start converged (" + std::to_string(res.starts) + " starts)";
  } else {
    res.flagged = static_cast<double>(res.roots.size()) > 0.2 * static_cast<double>(res.converged);
  }
  return res;
}

const Root& select_estimate(const std::vector<Root>& roots, const std::vector<double>& reference) {
  if (roots.empty()) throw std::invalid_argument("select_estimate: no roots");
  auto l1 = [&](const Root& r) {
    if (r.x.size() != reference.size()) throw std::invalid_argument("select_estimate: dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < r.x.size(); ++k) s += std::abs(r.x[k] - reference[k]);
    return s;
  };
  const Root* best = &roots.front();
  double best_d = l1(*best);
  for (const Root& r : roots) {
    const double dist = l1(r);
    if (dist < best_d || (dist == best_d && (r.residual < best->residual ||
                                             (r.residual == best->residual && r.x < best->x)))) {
      best = &r;
      best_d = dist;
    }
  }
  return *best;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  const Theta& model = config.model;
  const std::size_t d = model.num_unknowns();
  if (config.theta0.size() != d) throw std::invalid_argument("run_experiment: theta0 has the wrong length");
  if (config.word_sets.empty()) throw std::invalid_argument("run_experiment: no word sets");
  int sig_level = 0, moment_level = 0;
  for (const auto& ws : config.word_sets) {
    if (ws.words.size() != d) {
      throw std::invalid_argument("run_experiment: word set " + ws.name + " has " + std::to_string(ws.words.size()) +
                                  " words for " + std::to_string(d) + " unknowns");
    }
    for (const Word& w : ws.words) {
      sig_level = std::max(sig_level, static_cast<int>(w.size()));
      moment_level = std::max(moment_level, q_bound(config.r, static_cast<int>(w.size())));
    }
  }

  ExperimentReport report;
  report.name = config.name;
  report.unknown_names = model.unknown_names();
  report.theta0 = config.theta0;

  AlphaTable table(model);
  const TruncTensor driving = expected_signature_bm_time(model.n(), config.T, moment_level);
  std::vector<std::vector<MPoly>> base;
  for (const auto& ws : config.word_sets) {
    if (progress) progress("building polynomials for " + ws.name);
    base.push_back(moment_polys(table, config.r, ws.words, driving));
    report.sets.push_back(WordSetReport{ws, {}, {}, {}, 0, 0});
  }

  const VectorField field(model.bind(config.theta0));
  SimulationOptions sim;
  sim.T = config.T;
  sim.dt = config.dt;
  sim.scheme = config.scheme;
  sim.state_cap = config.state_cap;

  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    TrajectoryBatch batch = simulate_batch(field, sim, config.N, config.seed, trial, config.threads);
    report.trajectories += config.N;
    report.aborted += batch.aborted;
    if (batch.trajectories.empty()) throw std::runtime_error("run_experiment: every trajectory aborted");
    std::vector<TruncTensor> sigs(batch.trajectories.size());
    parallel_for(sigs.size(), config.threads,
                 [&](std::size_t k) { sigs[k] = path_signature(batch.trajectories[k].path, sig_level); });
    for (std::size_t s = 0; s < config.word_sets.size(); ++s) {
      const auto& words = config.word_sets[s].words;
      TrialResult tr;
      tr.trial = trial;
      tr.moments.assign(d, 0.0);
      for (const auto& sig : sigs) {
        for (std::size_t k = 0; k < d; ++k) tr.moments[k] += sig[words[k]];
      }
      for (double& v : tr.moments) v /= static_cast<double>(sigs.size());
      SolverOptions so = config.solver;
      so.seed = stream_seed(config.seed, trial, 1000 + s);
      tr.solve = solve_system(shift_system(base[s], tr.moments), so);
      if (!tr.solve.roots.empty()) {
        tr.found = true;
        tr.estimate = select_estimate(tr.solve.roots, config.theta0).x;
      }
      auto& rep = report.sets[s];
      if (!tr.found) ++rep.failed;
      if (tr.solve.flagged) ++rep.flagged;
      rep.trials.push_back(std::move(tr));
    }
    if (progress) progress("trial " + std::to_string(trial + 1) + "/" + std::to_string(config.trials) + " done");
  }
  report.abort_threshold_exceeded =
      static_cast<double>(report.aborted) > config.max_abort_fraction * static_cast<double>(report.trajectories);

  for (auto& rep : report.sets) {
    rep.mean.assign(d, std::numeric_limits<double>::quiet_NaN());
    rep.stddev.assign(d, std::numeric_limits<double>::quiet_NaN());
    std::vector<const std::vector<double>*> used;
    for (const auto& tr : rep.trials) {
      if (tr.found) used.push_back(&tr.estimate);
    }
    if (used.empty()) continue;
    for (std::size_t k = 0; k < d; ++k) {
      double s = 0.0;
      for (auto* e : used) s += (*e)[k];
      const double mean = s / static_cast<double>(used.size());
      double ss = 0.0;
      for (auto* e : used) ss += ((*e)[k] - mean) * ((*e)[k] - mean);
      rep.mean[k] = mean;
      rep.stddev[k] = used.size() > 1 ? std::sqrt(ss / static_cast<double>(used.size() - 1)) : 0.0;
    }
  }
  return report;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

}  // namespace

void write_report(const ExperimentReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto& names = report.unknown_names;

  auto roots = open_out(fs::path(dir) / "roots.csv");
  roots << "word_set,trial,root";
  for (const auto& n : names) roots << ',' << n;
  roots << ",residual,hits,selected\n";
  for (const auto& rep : report.sets) {
    for (const auto& tr : rep.trials) {
      for (std::size_t i = 0; i < tr.solve.roots.size(); ++i) {
        const Root& r = tr.solve.roots[i];
        roots << rep.set.name << ',' << tr.trial << ',' << i;
        for (double v : r.x) roots << ',' << num(v);
        roots << ',' << num(r.residual) << ',' << r.hits << ',' << (tr.found && r.x == tr.estimate ? 1 : 0) << '\n';
      }
    }
  }

  auto summary = open_out(fs::path(dir) / "summary.csv");
  summary << "word_set,parameter,true_value,mean,std_dev,trials_used,trials_failed,trials_flagged\n";
  for (const auto& rep : report.sets) {
    const std::size_t used = rep.trials.size() - rep.failed;
    for (std::size_t k = 0; k < names.size(); ++k) {
      summary << rep.set.name << ',' << names[k] << ',' << num(report.theta0[k]) << ',' << num(rep.mean[k]) << ','
              << num(rep.stddev[k]) << ',' << used << ',' << rep.failed << ',' << rep.flagged << '\n';
    }
  }

  auto moments = open_out(fs::path(dir) / "moments.csv");
  moments << "word_set,trial,word,value\n";
  for (const auto& rep : report.sets) {
    for (const auto& tr : rep.trials) {
      for (std::size_t k = 0; k < tr.moments.size(); ++k) {
        moments << rep.set.name << ',' << tr.trial << ',' << rep.set.words[k].to_string() << ',' << num(tr.moments[k])
                << '\n';
      }
    }
  }
}

Theta nonident_system_a() {
  Theta th(3, 2, 2);
  th.add_known(1, 0, Word{1}, 1.0);
  th.add_known(1, 1, Word{}, 1.0);
  th.add_known(2, 0, Word{2}, -1.0);
  th.add_known(2, 2, Word{}, 1.0);
  th.add_known(3, 0, Word{1, 2}, -1.0);
  th.add_known(3, 0, Word{2, 1}, -1.0);
  th.add_known(3, 1, Word{2}, -0.5);
  th.add_known(3, 2, Word{1}, 0.5);
  return th;
}

Theta nonident_system_b() {
  Theta th = nonident_system_a();
  // hidden dynamics (H - Y^(3)) dt on every row
  for (int i = 1; i <= 3; ++i) {
    th.add_known(i, 0, Word{1, 2}, 0.5);
    th.add_known(i, 0, Word{2, 1}, -0.5);
    th.add_known(i, 0, Word{3}, -1.0);
  }
  return th;
}

NonidentResult compare_systems(const Theta& a, const Theta& b, double T, double dt, std::uint64_t seed) {
  if (a.m() != b.m() || a.n() != b.n()) throw std::invalid_argument("compare_systems: shape mismatch");
  const std::size_t steps = grid_steps(T, dt);
  const auto inc = brownian_increments(steps, a.n(), T / static_cast<double>(steps), seed, 0, 0);
  SimulationOptions opts;
  opts.T = T;
  opts.dt = dt;
  opts.scheme = Scheme::midpoint;
  opts.state_cap = 1e12;
  NonidentResult res;
  res.a = simulate_with_increments(VectorField(a), opts, inc);
  res.b = simulate_with_increments(VectorField(b), opts, inc);
  const auto pa = res.a.path.point(res.a.path.num_points() - 1);
  const auto pb = res.b.path.point(res.b.path.num_points() - 1);
  double s = 0.0;
  for (std::size_t i = 1; i < pa.size(); ++i) s += (pa[i] - pb[i]) * (pa[i] - pb[i]);
  res.distance = std::sqrt(s);
  return res;
}

NonidentResult nonident_demo(double T, double dt, std::uint64_t seed) {
  return compare_systems(nonident_system_a(), nonident_system_b(), T, dt, seed);
}

}  // namespace sigsde
