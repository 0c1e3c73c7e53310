#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "sigsde/config.hpp"
#include "sigsde/driving_moments.hpp"
#include "sigsde/estimator.hpp"
#include "sigsde/picard.hpp"
#include "sigsde/signature.hpp"

namespace py = pybind11;
using namespace sigsde;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Word to_word(const py::handle& h) {
  if (py::isinstance<py::str>(h)) return parse_word(h.cast<std::string>());
  return Word(std::span<const int>(h.cast<std::vector<int>>()));
}

py::tuple from_word(const Word& w) {
  py::tuple t(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) t[i] = w[i];
  return t;
}

PiecewiseLinearPath to_path(const Array& values, const py::object& times, bool add_time) {
  if (values.ndim() != 2) throw std::invalid_argument("values must be a 2-d array (points x dim)");
  const std::size_t n = static_cast<std::size_t>(values.shape(0)), dim = static_cast<std::size_t>(values.shape(1));
  std::vector<double> v(values.data(), values.data() + n * dim), t(n);
  if (times.is_none()) {
    for (std::size_t i = 0; i < n; ++i) t[i] = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
  } else {
    t = times.cast<std::vector<double>>();
  }
  if (add_time) return augment_time(t, v, dim);
  return PiecewiseLinearPath(t, v, dim);
}

py::array_t<double> path_array(const PiecewiseLinearPath& p) {
  py::array_t<double> out({p.num_points(), p.dim()});
  std::copy(p.values().begin(), p.values().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const ExperimentReport& rep) {
  py::list sets;
  for (const auto& s : rep.sets) {
    py::list trials;
    for (const auto& tr : s.trials) {
      py::list roots;
      for (const auto& r : tr.solve.roots) roots.append(py::make_tuple(r.x, r.residual, r.hits));
      py::dict d;
      d["trial"] = tr.trial;
      d["moments"] = tr.moments;
      d["roots"] = roots;
      d["estimate"] = tr.found ? py::cast(tr.estimate) : py::none();
      d["flagged"] = tr.solve.flagged;
      trials.append(d);
    }
    py::dict d;
    d["name"] = s.set.name;
    d["mean"] = s.mean;
    d["std"] = s.stddev;
    d["failed"] = s.failed;
    d["flagged"] = s.flagged;
    d["trials"] = trials;
    sets.append(d);
  }
  py::dict out;
  out["name"] = rep.name;
  out["unknowns"] = rep.unknown_names;
  out["theta0"] = rep.theta0;
  out["sets"] = sets;
  out["trajectories"] = rep.trajectories;
  out["aborted"] = rep.aborted;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Expected signature matching for linear signature SDEs";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "shuffle",
      [](const py::object& a, const py::object& b) {
        py::dict out;
        for (const auto& [w, c] : shuffle(to_word(a), to_word(b))) out[from_word(w)] = c;
        return out;
      },
      py::arg("a"), py::arg("b"), "Shuffle product as {word: multiplicity}.");
  m.def(
      "enumerate_words",
      [](int a, int q) {
        py::list out;
        for (const Word& w : enumerate_words(a, q)) out.append(from_word(w));
        return out;
      },
      py::arg("alphabet_size"), py::arg("max_len"));
  m.def("q_bound", &q_bound, py::arg("r"), py::arg("ell"));

  py::class_<TruncTensor>(m, "Tensor")
      .def(py::init<int, int>(), py::arg("alphabet_size"), py::arg("level"))
      .def_static("unit", &TruncTensor::unit)
      .def_property_readonly("alphabet_size", &TruncTensor::alphabet_size)
      .def_property_readonly("level", &TruncTensor::level)
      .def("__len__", &TruncTensor::size)
      .def("__getitem__", [](const TruncTensor& t, const py::object& w) { return t[to_word(w)]; })
      .def("__setitem__", [](TruncTensor& t, const py::object& w, double v) { t.set(to_word(w), v); })
      .def_property(
          "coeffs",
          [](const TruncTensor& t) {
            py::array_t<double> a(static_cast<py::ssize_t>(t.size()));
            std::copy(t.coeffs().begin(), t.coeffs().end(), a.mutable_data());
            return a;
          },
          [](TruncTensor& t, const Array& a) {
            if (static_cast<std::size_t>(a.size()) != t.size()) throw std::invalid_argument("coefficient count mismatch");
            std::copy(a.data(), a.data() + a.size(), t.coeffs().begin());
          })
      .def("words",
           [](const TruncTensor& t) {
             py::list out;
             for (const Word& w : enumerate_words(t.alphabet_size(), t.level())) out.append(from_word(w));
             return out;
           })
      .def("__matmul__", &concat_mul)
      .def("__add__", [](const TruncTensor& a, const TruncTensor& b) { return a + b; })
      .def("__sub__", [](const TruncTensor& a, const TruncTensor& b) { return a - b; })
      .def("__mul__", [](const TruncTensor& a, double s) { return a * s; })
      .def("__rmul__", [](const TruncTensor& a, double s) { return a * s; });

  m.def("concat_mul", &concat_mul);
  m.def("trunc_exp", &trunc_exp);
  m.def("segment_signature", [](const std::vector<double>& inc, int q) { return segment_signature(inc, q); });
  m.def(
      "signature",
      [](const Array& values, int level, const py::object& times, bool add_time) {
        return path_signature(to_path(values, times, add_time), level);
      },
      py::arg("values"), py::arg("level"), py::arg("times") = py::none(), py::arg("add_time") = false,
      "Signature of the piecewise-linear path through the rows of `values`.");

  m.def("expected_signature_bm_time", &expected_signature_bm_time, py::arg("n"), py::arg("T"), py::arg("level"));
  m.def(
      "mc_expected_signature",
      [](int n, double T, int level, std::size_t N, double dt, std::uint64_t seed, bool richardson) {
        MonteCarloOptions o;
        o.richardson = richardson;
        const auto r = mc_expected_signature(n, T, level, N, dt, seed, o);
        return py::make_tuple(r.mean, r.std_error);
      },
      py::arg("n"), py::arg("T"), py::arg("level"), py::arg("N"), py::arg("dt"), py::arg("seed") = 0,
      py::arg("richardson") = true, "(mean, standard error) tensors.");

  py::class_<MPoly>(m, "Poly")
      .def_property_readonly("num_vars", &MPoly::num_vars)
      .def_property_readonly("degree", &MPoly::total_degree)
      .def("__call__", [](const MPoly& p, const std::vector<double>& x) { return p.evaluate(x); })
      .def("derivative", &MPoly::derivative)
      .def("terms",
           [](const MPoly& p) {
             py::list out;
             for (const auto& [mono, c] : p.terms()) {
               py::tuple e(p.num_vars());
               for (std::size_t k = 0; k < p.num_vars(); ++k) e[k] = MPoly::exponent(mono, k);
               out.append(py::make_tuple(e, c));
             }
             return out;
           })
      .def("to_string", &MPoly::to_string, py::arg("names") = std::vector<std::string>{})
      .def("__repr__", [](const MPoly& p) { return "Poly(" + p.to_string() + ")"; });

  py::class_<ExperimentConfig>(m, "Experiment")
      .def_readonly("name", &ExperimentConfig::name)
      .def_readwrite("theta0", &ExperimentConfig::theta0)
      .def_readwrite("T", &ExperimentConfig::T)
      .def_readwrite("dt", &ExperimentConfig::dt)
      .def_readwrite("N", &ExperimentConfig::N)
      .def_readwrite("r", &ExperimentConfig::r)
      .def_readwrite("trials", &ExperimentConfig::trials)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_property_readonly("unknowns", [](const ExperimentConfig& c) { return c.model.unknown_names(); })
      .def_property_readonly("word_sets", [](const ExperimentConfig& c) {
        py::dict out;
        for (const auto& ws : c.word_sets) {
          py::list words;
          for (const Word& w : ws.words) words.append(w.to_string());
          out[py::str(ws.name)] = words;
        }
        return out;
      });

  m.def(
      "load_config", [](const std::string& file) { return parse_config(file).experiment; }, py::arg("path"));
  m.def(
      "parse_config", [](const std::string& text) { return parse_config_text(text).experiment; }, py::arg("text"));
  m.def(
      "bundled_experiment", [](int k) { return bundled_experiment(k).experiment; }, py::arg("k"));

  m.def(
      "simulate",
      [](const ExperimentConfig& c, const py::object& theta, std::uint64_t trial, std::uint64_t index) {
        const std::vector<double> th = theta.is_none() ? c.theta0 : theta.cast<std::vector<double>>();
        SimulationOptions o;
        o.T = c.T;
        o.dt = c.dt;
        o.scheme = c.scheme;
        o.state_cap = c.state_cap;
        const auto traj = simulate(VectorField(c.model.bind(th)), o, c.seed, trial, index);
        if (traj.aborted) throw std::runtime_error(traj.diagnostic);
        return path_array(traj.path);
      },
      py::arg("experiment"), py::arg("theta") = py::none(), py::arg("trial") = 0, py::arg("index") = 0,
      "Level-1 solution, one row (t, Y1..Ym) per grid point.");

  m.def(
      "moment_polys",
      [](const ExperimentConfig& c, const std::vector<std::string>& words, int r) {
        std::vector<Word> ws;
        int level = 0;
        for (const auto& s : words) {
          ws.push_back(parse_word(s));
          level = std::max(level, q_bound(r, static_cast<int>(ws.back().size())));
        }
        AlphaTable table(c.model);
        return moment_polys(table, r, ws, expected_signature_bm_time(c.model.n(), c.T, level));
      },
      py::arg("experiment"), py::arg("words"), py::arg("r") = 3, "P_r^I(theta) for every word I.");

  m.def(
      "solve_system",
      [](const std::vector<MPoly>& polys, const std::vector<double>& shift, std::size_t starts, double box,
         double tol, std::uint64_t seed) {
        SolverOptions o;
        o.starts = starts;
        o.box = box;
        o.tol = tol;
        o.seed = seed;
        auto sys = shift.empty() ? polys : shift_system(polys, shift);
        const auto res = solve_system(sys, o);
        py::list out;
        for (const auto& r : res.roots) out.append(py::make_tuple(r.x, r.residual, r.hits));
        return out;
      },
      py::arg("polys"), py::arg("moments") = std::vector<double>{}, py::arg("starts") = 200, py::arg("box") = 10.0,
      py::arg("tol") = 1e-10, py::arg("seed") = 0, "Real roots of polys - moments as (x, residual, hits).");

  m.def(
      "run_experiment",
      [](const ExperimentConfig& c) {
        ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = run_experiment(c);
        }
        return report_dict(rep);
      },
      py::arg("experiment"));

  m.def(
      "nonident_demo",
      [](double T, double dt, std::uint64_t seed) {
        const auto r = nonident_demo(T, dt, seed);
        return py::make_tuple(r.distance, path_array(r.a.path), path_array(r.b.path));
      },
      py::arg("T") = 0.3, py::arg("dt") = 0.001, py::arg("seed") = 0);
}
