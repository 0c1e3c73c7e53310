#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "sigsde/config.hpp"
#include "sigsde/csv_io.hpp"
#include "sigsde/estimator.hpp"

using namespace sigsde;

namespace {

std::string error_path(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

const char* kMinimal = R"({
  "model": {"m": 1, "n": 1, "unknowns": ["a"],
            "theta": [{"row": 1, "col": 0, "terms": {"e": "a"}}]},
  "theta0": [0.5],
  "estimation": {"word_sets": [{"name": "W", "words": ["1"]}]}
})";

}  // namespace

TEST_CASE("bundled configs") {
  const auto c1 = bundled_experiment(1);
  CHECK(c1.experiment.theta0 == std::vector<double>{-1.0, 0.0, 4.0});
  REQUIRE(c1.experiment.word_sets.size() == 2);
  CHECK(c1.experiment.word_sets[0].name == "W1");
  CHECK(c1.experiment.word_sets[0].words == std::vector<Word>{Word{0, 1, 0}, Word{0, 1, 1}, Word{1, 0, 1}});
  CHECK(c1.experiment.word_sets[1].words == std::vector<Word>{Word{1}, Word{1, 1}, Word{0, 1, 1}});
  CHECK(c1.experiment.N == 2000);
  CHECK(c1.experiment.r == 3);
  CHECK(c1.full_trials == 100);
  CHECK(bundled_experiment(2).experiment.model.num_unknowns() == 5);
  CHECK(bundled_experiment(3).experiment.model.num_unknowns() == 6);
  CHECK_THROWS(bundled_config(4));
}

TEST_CASE("defaults") {
  const auto c = parse_config_text(kMinimal);
  CHECK(c.experiment.model.q() == 3);
  CHECK(c.experiment.dt == 0.001);
  CHECK(c.experiment.N == 2000);
  CHECK(c.experiment.r == 3);
  CHECK(c.experiment.model.slots().size() == 1);
}

TEST_CASE("validation names the field") {
  CHECK(error_path(R"({"model": {"n": 1}})") == "model.m");
  CHECK(error_path("not json") == "(root)");
  std::string s = kMinimal;
  CHECK(error_path(std::string(s).replace(s.find("[\"1\"]"), 5, "[\"1.x\"]")) == "estimation.word_sets[0].words[0]");
  CHECK(error_path(std::string(s).replace(s.find("[0.5]"), 5, "[0.5, 1]")) == "theta0");
  CHECK(error_path(std::string(s).replace(s.find("[\"1\"]"), 5, "[\"1\", \"0\"]")) == "estimation.word_sets[0].words");
  CHECK(error_path(std::string(s).replace(s.find("\"a\"}"), 3, "\"b\"")) != "<none>");
}

TEST_CASE("term grammar") {
  const std::string text = R"({
    "model": {"m": 1, "n": 1, "unknowns": ["a", "b"],
              "theta": [{"row": 1, "col": 0, "terms": {"e": "-a", "1": "0.5*b", "0": 2}},
                        {"row": 1, "col": 1, "terms": {"1.1": {"const": 1, "a": 3}}}]},
    "theta0": {"a": 1, "b": 2},
    "estimation": {"word_sets": [{"name": "W", "words": ["1", "0.1.1"]}]}
  })";
  const auto c = parse_config_text(text);
  const Theta bound = c.experiment.model.bind(c.experiment.theta0);
  CHECK(bound.entry(1, 0)[Word{}] == -1.0);
  CHECK(bound.entry(1, 0)[Word{1}] == 1.0);
  CHECK(bound.entry(1, 0)[Word{0}] == 2.0);
  CHECK(bound.entry(1, 1)[Word{1, 1}] == 4.0);
  CHECK(c.experiment.word_sets[0].words[1] == Word{0, 1, 1});
}

TEST_CASE("path csv round trip") {
  std::mt19937_64 rng(51);
  std::vector<PiecewiseLinearPath> paths;
  for (int k = 0; k < 3; ++k) {
    auto raw = testing_util::random_path(rng, 2, 5);
    std::vector<double> vals;
    for (std::size_t i = 0; i < raw.num_points(); ++i) {
      vals.push_back(raw.times()[i]);
      for (double x : raw.point(i)) vals.push_back(x);
    }
    paths.emplace_back(raw.times(), vals, 3);
  }
  std::stringstream ss;
  write_paths_csv(ss, paths);
  CHECK(ss.str().rfind("sample,t,y0,y1,y2\n", 0) == 0);
  const auto back = read_paths_csv(ss);
  REQUIRE(back.size() == paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    CHECK(back[k].times() == paths[k].times());
    REQUIRE(back[k].values().size() == paths[k].values().size());
    for (std::size_t i = 0; i < paths[k].values().size(); ++i) {
      CHECK(std::abs(back[k].values()[i] - paths[k].values()[i]) <= 1e-12);
    }
  }

  std::stringstream plain("t,x1\n0,0\n0.5,1\n1,0\n");
  const auto p = read_paths_csv(plain);
  REQUIRE(p.size() == 1);
  CHECK(p[0].dim() == 2);
  CHECK(p[0].values() == std::vector<double>{0.0, 0.0, 0.5, 1.0, 1.0, 0.0});

  std::stringstream bad("t,x1\n0,0,1\n");
  CHECK_THROWS(read_paths_csv(bad));
}

TEST_CASE("simulate, write, read, moments") {
  auto cfg = bundled_experiment(1).experiment;
  const VectorField field(cfg.model.bind(cfg.theta0));
  SimulationOptions opts;
  opts.T = cfg.T;
  opts.dt = cfg.dt;
  const auto batch = simulate_batch(field, opts, 5, cfg.seed, 0, 1);
  std::vector<PiecewiseLinearPath> paths;
  for (const auto& t : batch.trajectories) paths.push_back(t.path);
  std::stringstream ss;
  write_paths_csv(ss, paths);
  const auto back = read_paths_csv(ss);
  const auto& words = cfg.word_sets[0].words;
  const auto a = empirical_moments(batch.trajectories, words, 3);
  const auto b = empirical_moments(back, words, 3);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
}
