#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sigsde/config.hpp"
#include "sigsde/csv_io.hpp"
#include "sigsde/driving_moments.hpp"
#include "sigsde/estimator.hpp"
#include "sigsde/picard.hpp"

using namespace sigsde;
namespace fs = std::filesystem;

namespace {

constexpr int kConfigError = 2;
constexpr int kNoRoots = 3;
constexpr int kAbortThreshold = 4;

unsigned threads_flag = 0;

unsigned threads() {
  if (threads_flag != 0) return threads_flag;
  if (const char* env = std::getenv("SIGSDE_THREADS")) return static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  return 0;
}

// Explicit --out wins, then SIGSDE_OUT_DIR/<name>, then the fallback.
std::string out_dir(const std::string& flag, const std::string& name, const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SIGSDE_OUT_DIR")) return (fs::path(env) / name).string();
  return fallback;
}

std::ofstream open_file(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void print_summary(const ExperimentReport& rep) {
  for (const auto& s : rep.sets) {
    std::printf("%s: %zu trials, %zu without roots, %zu flagged\n", s.set.name.c_str(), s.trials.size(), s.failed,
                s.flagged);
    for (std::size_t k = 0; k < rep.unknown_names.size(); ++k) {
      std::printf("  %-8s true %9.4f  mean %9.4f  std %9.4f\n", rep.unknown_names[k].c_str(), rep.theta0[k], s.mean[k],
                  s.stddev[k]);
    }
  }
  if (rep.aborted > 0) std::printf("aborted trajectories: %zu of %zu\n", rep.aborted, rep.trajectories);
}

int finish_experiment(const RunConfig& rc, const std::string& dir) {
  auto progress = [](const std::string& msg) { std::fprintf(stderr, "%s\n", msg.c_str()); };
  ExperimentReport rep = run_experiment(rc.experiment, progress);
  write_report(rep, dir);
  print_summary(rep);
  std::printf("wrote %s\n", dir.c_str());
  if (rep.abort_threshold_exceeded) {
    std::fprintf(stderr, "error: %zu of %zu trajectories aborted\n", rep.aborted, rep.trajectories);
    return kAbortThreshold;
  }
  for (const auto& s : rep.sets) {
    if (s.failed == s.trials.size()) {
      std::fprintf(stderr, "error: no real root in any trial for %s\n", s.set.name.c_str());
      return kNoRoots;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter estimation for linear signature SDEs by expected signature matching"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", threads_flag, "Worker threads (0 = all cores)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate trajectories of a configured model at theta0");
  std::string sim_config, sim_out;
  std::size_t sim_n = 0, sim_trial = 0;
  sim->add_option("--config", sim_config, "Run configuration (JSON)")->required();
  sim->add_option("--N", sim_n, "Number of trajectories (default: config)");
  sim->add_option("--trial", sim_trial, "Trial index selecting the random substream");
  sim->add_option("--out", sim_out, "Output CSV file");

  // sig
  auto* sig = app.add_subcommand("sig", "Signatures of paths read from CSV");
  std::string sig_in, sig_out;
  int sig_level = 3;
  bool sig_no_time = false;
  sig->add_option("--in", sig_in, "Path CSV (t,x1,...) or trajectory CSV")->required();
  sig->add_option("--level", sig_level, "Truncation level");
  sig->add_flag("--no-time", sig_no_time, "Drop the time coordinate");
  sig->add_option("--out", sig_out, "Output CSV (default stdout)");

  // expected-sig
  auto* es = app.add_subcommand("expected-sig", "Expected signature of time-augmented Brownian motion");
  int es_n = 1, es_level = 4;
  double es_T = 1.0, es_dt = 1e-3;
  std::size_t es_mc = 0;
  std::uint64_t es_seed = 0;
  std::string es_out;
  es->add_option("--n", es_n, "Brownian dimension");
  es->add_option("--T", es_T, "Horizon");
  es->add_option("--level", es_level, "Truncation level");
  es->add_option("--mc", es_mc, "Monte Carlo sample size for a comparison column");
  es->add_option("--dt", es_dt, "Monte Carlo grid step");
  es->add_option("--seed", es_seed, "Monte Carlo seed");
  es->add_option("--out", es_out, "Output CSV (default stdout)");

  // build-poly
  auto* bp = app.add_subcommand("build-poly", "Moment polynomials P_r^I of a configured model");
  std::string bp_config, bp_out, bp_set;
  std::vector<std::string> bp_words;
  int bp_r = -1;
  bp->add_option("--config", bp_config, "Run configuration (JSON)")->required();
  bp->add_option("--words", bp_words, "Words such as 1.1 (default: every word of the word sets)");
  bp->add_option("--set", bp_set, "Only this word set");
  bp->add_option("--r", bp_r, "Picard depth (default: config)");
  bp->add_option("--out", bp_out, "Output directory for polys.txt and polys.csv");

  // estimate
  auto* est = app.add_subcommand("estimate", "Run the estimation experiment of a configuration");
  std::string est_config, est_out;
  std::size_t est_trials = 0;
  std::uint64_t est_seed = 0;
  est->add_option("--config", est_config, "Run configuration (JSON)")->required();
  est->add_option("--out", est_out, "Report directory");
  auto* est_trials_opt = est->add_option("--trials", est_trials, "Override the trial count");
  auto* est_seed_opt = est->add_option("--seed", est_seed, "Override the seed");

  // experiment
  auto* ex = app.add_subcommand("experiment", "Bundled experiments 1, 2 and 3");
  int ex_id = 1;
  std::size_t ex_trials = 0;
  std::uint64_t ex_seed = 0;
  bool ex_full = false;
  std::string ex_out;
  ex->add_option("id", ex_id, "Experiment number")->required()->check(CLI::Range(1, 3));
  auto* ex_trials_opt = ex->add_option("--trials", ex_trials, "Override the trial count");
  auto* ex_seed_opt = ex->add_option("--seed", ex_seed, "Override the seed");
  ex->add_flag("--full", ex_full, "Use the full trial count (100)");
  ex->add_option("--out", ex_out, "Report directory");

  // nonident-demo
  auto* nd = app.add_subcommand("nonident-demo", "Two parameter sets with hidden dynamics on one Brownian draw");
  double nd_T = 0.3, nd_dt = 1e-3;
  std::uint64_t nd_seed = 0;
  std::string nd_out;
  nd->add_option("--T", nd_T, "Horizon");
  nd->add_option("--dt", nd_dt, "Step size");
  nd->add_option("--seed", nd_seed, "Seed of the Brownian draw");
  nd->add_option("--out", nd_out, "Directory for path_a.csv and path_b.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      RunConfig rc = parse_config(sim_config);
      auto& e = rc.experiment;
      SimulationOptions opts;
      opts.T = e.T;
      opts.dt = e.dt;
      opts.scheme = e.scheme;
      opts.state_cap = e.state_cap;
      const std::size_t N = sim_n > 0 ? sim_n : e.N;
      TrajectoryBatch batch = simulate_batch(VectorField(e.model.bind(e.theta0)), opts, N, e.seed, sim_trial, threads());
      std::vector<PiecewiseLinearPath> paths;
      for (const auto& t : batch.trajectories) paths.push_back(t.path);
      const std::string file =
          sim_out.empty() ? (fs::path(out_dir("", e.name, rc.out_dir)) / "paths.csv").string() : sim_out;
      auto os = open_file(file);
      write_paths_csv(os, paths);
      std::printf("wrote %zu trajectories to %s\n", paths.size(), file.c_str());
      if (static_cast<double>(batch.aborted) > e.max_abort_fraction * static_cast<double>(N)) {
        std::fprintf(stderr, "error: %zu of %zu trajectories aborted\n", batch.aborted, N);
        return kAbortThreshold;
      }
      return 0;
    }

    if (*sig) {
      auto paths = read_paths_csv(sig_in);
      std::ofstream file;
      std::ostream* os = &std::cout;
      if (!sig_out.empty()) {
        file = open_file(sig_out);
        os = &file;
      }
      *os << "sample,word,coefficient\n";
      for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto path = sig_no_time ? drop_time(paths[p]) : paths[p];
        const TruncTensor s = path_signature(path, sig_level);
        const auto words = enumerate_words(s.alphabet_size(), sig_level);
        for (std::size_t i = 0; i < words.size(); ++i) {
          *os << p << ',' << words[i].to_string() << ',' << format_double(s.at(i)) << '\n';
        }
      }
      return 0;
    }

    if (*es) {
      const TruncTensor exact = expected_signature_bm_time(es_n, es_T, es_level);
      MonteCarloSignature mc;
      if (es_mc > 0) {
        MonteCarloOptions mo;
        mo.threads = threads();
        mc = mc_expected_signature(es_n, es_T, es_level, es_mc, es_dt, es_seed, mo);
      }
      std::ofstream file;
      std::ostream* os = &std::cout;
      if (!es_out.empty()) {
        file = open_file(es_out);
        os = &file;
      }
      *os << "word,closed_form";
      if (es_mc > 0) *os << ",mc_mean,mc_std_error,z";
      *os << '\n';
      const auto words = enumerate_words(es_n + 1, es_level);
      for (std::size_t i = 0; i < words.size(); ++i) {
        *os << words[i].to_string() << ',' << format_double(exact.at(i));
        if (es_mc > 0) {
          const double se = mc.std_error.at(i);
          const double z = se > 0 ? (mc.mean.at(i) - exact.at(i)) / se : 0.0;
          *os << ',' << format_double(mc.mean.at(i)) << ',' << format_double(se) << ',' << format_double(z);
        }
        *os << '\n';
      }
      if (es_mc > 0) {
        const McComparison cmp = compare_mc(exact, mc);
        std::fprintf(stderr, "%zu coefficients with sampling noise: %zu outside 2 SE, %zu outside 3 SE\n",
                     cmp.compared, cmp.outside2, cmp.outside3);
      }
      return 0;
    }

    if (*bp) {
      RunConfig rc = parse_config(bp_config);
      auto& e = rc.experiment;
      const int r = bp_r >= 0 ? bp_r : e.r;
      std::vector<Word> words;
      for (const auto& w : bp_words) words.push_back(parse_word(w));
      if (words.empty()) {
        for (const auto& ws : e.word_sets) {
          if (!bp_set.empty() && ws.name != bp_set) continue;
          for (const Word& w : ws.words) {
            if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
          }
        }
      }
      if (words.empty()) throw ConfigError("estimation.word_sets", "no words selected");
      int level = 0;
      for (const Word& w : words) level = std::max(level, q_bound(r, static_cast<int>(w.size())));
      AlphaTable table(e.model);
      const TruncTensor moments = expected_signature_bm_time(e.model.n(), e.T, level);
      const auto& names = e.model.unknown_names();
      std::ostringstream text, csv;
      csv << "word";
      for (const auto& n : names) csv << ',' << n;
      csv << ",coefficient\n";
      for (const Word& w : words) {
        const MPoly p = moment_poly(table, r, w, moments);
        text << "P_" << r << "^" << w.to_string() << " = " << p.to_string(names) << '\n';
        for (const auto& [mono, c] : p.terms()) {
          csv << w.to_string();
          for (std::size_t k = 0; k < names.size(); ++k) csv << ',' << MPoly::exponent(mono, k);
          csv << ',' << format_double(c) << '\n';
        }
      }
      std::cout << text.str();
      if (!bp_out.empty()) {
        fs::create_directories(bp_out);
        open_file(fs::path(bp_out) / "polys.txt") << text.str();
        open_file(fs::path(bp_out) / "polys.csv") << csv.str();
        std::printf("wrote %s\n", bp_out.c_str());
      }
      return 0;
    }

    if (*est) {
      RunConfig rc = parse_config(est_config);
      if (est_trials_opt->count() > 0) rc.experiment.trials = est_trials;
      if (est_seed_opt->count() > 0) rc.experiment.seed = est_seed;
      rc.experiment.threads = threads();
      return finish_experiment(rc, out_dir(est_out, rc.experiment.name, rc.out_dir));
    }

    if (*ex) {
      RunConfig rc = bundled_experiment(ex_id);
      if (ex_full) rc.experiment.trials = rc.full_trials;
      if (ex_trials_opt->count() > 0) rc.experiment.trials = ex_trials;
      if (ex_seed_opt->count() > 0) rc.experiment.seed = ex_seed;
      rc.experiment.threads = threads();
      return finish_experiment(rc, out_dir(ex_out, rc.experiment.name, rc.out_dir));
    }

    if (*nd) {
      NonidentResult res = nonident_demo(nd_T, nd_dt, nd_seed);
      std::printf("T=%g distance %.6g\n", nd_T, res.distance);
      const std::string dir = out_dir(nd_out, "nonident", "");
      if (!dir.empty()) {
        fs::create_directories(dir);
        write_paths_csv((fs::path(dir) / "path_a.csv").string(), {res.a.path});
        write_paths_csv((fs::path(dir) / "path_b.csv").string(), {res.b.path});
        std::printf("wrote %s\n", dir.c_str());
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
