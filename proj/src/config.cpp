#include "sigsde/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sigsde/driving_moments.hpp"

namespace sigsde {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
  return obj.at(key);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

long long get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<long long>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

template <class T>
T opt(const json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  const std::string p = join(path, key);
  if constexpr (std::is_same_v<T, double>) {
    return get_number(v, p);
  } else if constexpr (std::is_same_v<T, std::string>) {
    return get_string(v, p);
  } else {
    const long long x = get_int(v, p);
    if (x < 0) throw ConfigError(p, "must be non-negative");
    return static_cast<T>(x);
  }
}

Word word_field(const json& v, const std::string& path) {
  const std::string s = get_string(v, path);
  try {
    return parse_word(s);
  } catch (const std::exception& e) {
    throw ConfigError(path, std::string("bad word \"") + s + "\": " + e.what());
  }
}

// "theta1", "-theta1", "0.5*theta1"
std::pair<std::size_t, double> parse_unknown_ref(const std::string& text, const std::map<std::string, std::size_t>& names,
                                                 const std::string& path) {
  std::string s = text;
  double coeff = 1.0;
  if (auto star = s.find('*'); star != std::string::npos) {
    try {
      std::size_t used = 0;
      coeff = std::stod(s.substr(0, star), &used);
      if (used != star) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ConfigError(path, "bad coefficient in \"" + text + "\"");
    }
    s = s.substr(star + 1);
  } else if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    if (s[0] == '-') coeff = -1.0;
    s = s.substr(1);
  }
  auto it = names.find(s);
  if (it == names.end()) throw ConfigError(path, "unknown parameter \"" + s + "\"");
  return {it->second, coeff};
}

Theta parse_model(const json& model, const std::string& path) {
  expect_object(model, path);
  const int m = static_cast<int>(get_int(require(model, path, "m"), join(path, "m")));
  const int n = static_cast<int>(get_int(require(model, path, "n"), join(path, "n")));
  const int q = opt<int>(model, path, "q", 3);
  std::vector<std::string> unknowns;
  std::map<std::string, std::size_t> index;
  if (model.contains("unknowns")) {
    const json& u = model.at("unknowns");
    const std::string up = join(path, "unknowns");
    if (!u.is_array()) throw ConfigError(up, "expected an array of names");
    for (std::size_t i = 0; i < u.size(); ++i) {
      std::string name = get_string(u[i], at_index(up, i));
      if (!index.emplace(name, i).second) throw ConfigError(at_index(up, i), "duplicate unknown \"" + name + "\"");
      unknowns.push_back(std::move(name));
    }
  }
  Theta theta = [&] {
    try {
      return Theta(m, n, q, unknowns);
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }();
  std::vector<bool> used(unknowns.size(), false);
  const std::string tp = join(path, "theta");
  const json& entries = require(model, path, "theta");
  if (!entries.is_array()) throw ConfigError(tp, "expected an array");
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::string ep = at_index(tp, e);
    const json& entry = entries[e];
    expect_object(entry, ep);
    const int row = static_cast<int>(get_int(require(entry, ep, "row"), join(ep, "row")));
    const int col = static_cast<int>(get_int(require(entry, ep, "col"), join(ep, "col")));
    const json& terms = require(entry, ep, "terms");
    const std::string termp = join(ep, "terms");
    expect_object(terms, termp);
    for (const auto& [key, value] : terms.items()) {
      const std::string kp = join(termp, key);
      Word w;
      try {
        w = parse_word(key);
      } catch (const std::exception& ex) {
        throw ConfigError(kp, std::string("bad word: ") + ex.what());
      }
      try {
        if (value.is_number()) {
          theta.add_known(row, col, w, value.get<double>());
        } else if (value.is_string()) {
          auto [k, c] = parse_unknown_ref(value.get<std::string>(), index, kp);
          theta.add_unknown(row, col, w, k, c);
          used[k] = true;
        } else if (value.is_object()) {
          for (const auto& [name, c] : value.items()) {
            const std::string np = join(kp, name);
            const double coef = get_number(c, np);
            if (name == "const") {
              theta.add_known(row, col, w, coef);
            } else {
              auto it = index.find(name);
              if (it == index.end()) throw ConfigError(np, "unknown parameter \"" + name + "\"");
              theta.add_unknown(row, col, w, it->second, coef);
              used[it->second] = true;
            }
          }
        } else {
          throw ConfigError(kp, "expected a number, a parameter name or an object");
        }
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& ex) {
        throw ConfigError(kp, ex.what());
      }
    }
  }
  for (std::size_t k = 0; k < used.size(); ++k) {
    if (!used[k]) throw ConfigError(join(path, "unknowns"), "parameter \"" + unknowns[k] + "\" enters no theta slot");
  }
  return theta;
}

RunConfig parse_root(const json& root) {
  expect_object(root, "(root)");
  RunConfig rc;
  ExperimentConfig& ex = rc.experiment;
  ex.name = opt<std::string>(root, "", "name", "run");
  ex.model = parse_model(require(root, "", "model"), "model");
  const auto& names = ex.model.unknown_names();

  ex.theta0.assign(names.size(), 0.0);
  if (root.contains("theta0")) {
    const json& t0 = root.at("theta0");
    if (t0.is_array()) {
      if (t0.size() != names.size()) throw ConfigError("theta0", "expected " + std::to_string(names.size()) + " values");
      for (std::size_t k = 0; k < t0.size(); ++k) ex.theta0[k] = get_number(t0[k], at_index("theta0", k));
    } else if (t0.is_object()) {
      for (std::size_t k = 0; k < names.size(); ++k) {
        ex.theta0[k] = get_number(require(t0, "theta0", names[k].c_str()), join("theta0", names[k]));
      }
      for (const auto& [key, v] : t0.items()) {
        if (std::find(names.begin(), names.end(), key) == names.end()) {
          throw ConfigError(join("theta0", key), "not a declared unknown");
        }
      }
    } else {
      throw ConfigError("theta0", "expected an array or an object");
    }
  } else if (!names.empty()) {
    throw ConfigError("theta0", "missing required field");
  }

  const json empty = json::object();
  const json& sim = root.contains("simulation") ? root.at("simulation") : empty;
  expect_object(sim, "simulation");
  ex.T = opt<double>(sim, "simulation", "T", 1.0);
  ex.dt = opt<double>(sim, "simulation", "dt", 1e-3);
  if (!(ex.T > 0)) throw ConfigError("simulation.T", "must be positive");
  if (!(ex.dt > 0)) throw ConfigError("simulation.dt", "must be positive");
  try {
    (void)grid_steps(ex.T, ex.dt);
  } catch (const std::exception& e) {
    throw ConfigError("simulation.dt", e.what());
  }
  ex.N = opt<std::size_t>(sim, "simulation", "N", 2000);
  if (ex.N == 0) throw ConfigError("simulation.N", "must be positive");
  ex.seed = opt<std::uint64_t>(sim, "simulation", "seed", 0);
  ex.state_cap = opt<double>(sim, "simulation", "state_cap", 1e6);
  ex.max_abort_fraction = opt<double>(sim, "simulation", "max_abort_fraction", 0.01);
  const std::string scheme = opt<std::string>(sim, "simulation", "scheme", "heun");
  if (scheme == "heun") {
    ex.scheme = Scheme::heun;
  } else if (scheme == "midpoint") {
    ex.scheme = Scheme::midpoint;
  } else {
    throw ConfigError("simulation.scheme", "expected \"heun\" or \"midpoint\"");
  }

  const json& est = root.contains("estimation") ? root.at("estimation") : empty;
  expect_object(est, "estimation");
  ex.r = opt<int>(est, "estimation", "r", 3);
  if (ex.r > 4) throw ConfigError("estimation.r", "Picard depth above 4 is not supported");
  ex.trials = opt<std::size_t>(est, "estimation", "trials", 20);
  rc.full_trials = opt<std::size_t>(est, "estimation", "full_trials", 100);
  if (est.contains("word_sets")) {
    const json& sets = est.at("word_sets");
    if (!sets.is_array()) throw ConfigError("estimation.word_sets", "expected an array");
    std::set<std::string> seen_names;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const std::string sp = at_index("estimation.word_sets", s);
      expect_object(sets[s], sp);
      WordSet ws;
      ws.name = opt<std::string>(sets[s], sp, "name", "W" + std::to_string(s + 1));
      if (!seen_names.insert(ws.name).second) throw ConfigError(join(sp, "name"), "duplicate word set name");
      const json& words = require(sets[s], sp, "words");
      const std::string wp = join(sp, "words");
      if (!words.is_array()) throw ConfigError(wp, "expected an array");
      std::set<Word> distinct;
      for (std::size_t i = 0; i < words.size(); ++i) {
        const std::string ip = at_index(wp, i);
        Word w = word_field(words[i], ip);
        if (w.max_letter() > ex.model.m()) throw ConfigError(ip, "word uses a letter above m");
        if (static_cast<int>(w.size()) > ex.model.q()) throw ConfigError(ip, "word longer than q");
        if (w.empty()) throw ConfigError(ip, "the empty word carries no information");
        if (!distinct.insert(w).second) throw ConfigError(ip, "duplicate word");
        ws.words.push_back(w);
      }
      if (ws.words.size() != names.size()) {
        throw ConfigError(wp, "needs exactly " + std::to_string(names.size()) + " words (one per unknown)");
      }
      ex.word_sets.push_back(std::move(ws));
    }
  }
  if (est.contains("solver")) {
    const json& so = est.at("solver");
    expect_object(so, "estimation.solver");
    ex.solver.starts = opt<std::size_t>(so, "estimation.solver", "starts", ex.solver.starts);
    ex.solver.box = opt<double>(so, "estimation.solver", "box", ex.solver.box);
    ex.solver.tol = opt<double>(so, "estimation.solver", "tol", ex.solver.tol);
    ex.solver.max_iterations = opt<int>(so, "estimation.solver", "max_iterations", ex.solver.max_iterations);
    ex.solver.dedup = opt<double>(so, "estimation.solver", "dedup", ex.solver.dedup);
    if (!(ex.solver.tol > 0)) throw ConfigError("estimation.solver.tol", "must be positive");
  }
  const json& out = root.contains("output") ? root.at("output") : empty;
  expect_object(out, "output");
  rc.out_dir = opt<std::string>(out, "output", "dir", "out/" + ex.name);
  return rc;
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(root)", std::string("invalid JSON: ") + e.what());
  }
  return parse_root(root);
}

RunConfig parse_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("(file)", "cannot open " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig bundled_experiment(int k) { return parse_config_text(bundled_config(k)); }

}  // namespace sigsde
