#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "branchlab/bohm.hpp"
#include "branchlab/bornlaw.hpp"
#include "branchlab/collapse.hpp"
#include "branchlab/finegrain.hpp"
#include "branchlab/largen.hpp"
#include "branchlab/rng.hpp"
#include "branchlab/runner.hpp"

namespace py = pybind11;
using namespace branchlab;
using nlohmann::json;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(json_to_py(v));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = json_to_py(v);
      return out;
    }
    default:
      return py::none();
  }
}

json py_to_json(const py::handle& obj) {
  return json::parse(py::str(py::module_::import("json").attr("dumps")(obj)).cast<std::string>());
}

ProbabilityLaw make_law(const std::string& name, double alpha, double beta, double epsilon) {
  if (name == "born") return ProbabilityLaw::born();
  if (name == "affine_quadratic") return ProbabilityLaw::affine_quadratic(alpha, beta);
  if (name == "odd_counterexample") return ProbabilityLaw::odd_counterexample(epsilon);
  throw std::invalid_argument("unknown law '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_branchlab, m) {
  m.doc() = "numerical experiments on branching, probability laws, collapse "
            "linearity, and guided trajectories";
  m.attr("__version__") = kVersion;

  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"),
        "stateless per-task seed derivation");

  m.def(
      "run_experiment",
      [](const std::string& experiment, const py::dict& config) {
        const RunManifest manifest = run(parse_config(experiment, py_to_json(config)));
        return json_to_py(manifest.to_json());
      },
      py::arg("experiment"), py::arg("config") = py::dict(),
      "run a named experiment and return its manifest as a dict");

  m.def(
      "fine_grain",
      [](const std::vector<std::pair<long long, long long>>& weights) {
        std::vector<Rational> w;
        for (const auto& [num, den] : weights) w.emplace_back(num, den);
        const FineGrainedState fg = fine_grain(w);
        json j = fine_grained_to_json(fg);
        json probs = json::array();
        for (const auto& p : branch_count_probability(fg.plan))
          probs.push_back({{"num", p.numerator()}, {"den", p.denominator()}});
        j["coarse_probabilities"] = probs;
        return json_to_py(j);
      },
      py::arg("weights"),
      "fine-grain rational weights (as (num, den) pairs) into equal branches");

  m.def(
      "check_constraints",
      [](const std::string& law, int n, std::size_t samples, std::uint64_t seed, double alpha,
         double beta, double epsilon) {
        const auto rep = check_constraints(make_law(law, alpha, beta, epsilon), n, samples, seed);
        return json_to_py({{"max_sum_violation", rep.max_sum_violation},
                           {"max_range_violation", rep.max_range_violation},
                           {"n", rep.n},
                           {"samples", rep.samples}});
      },
      py::arg("law"), py::arg("n"), py::arg("samples") = 2000, py::arg("seed") = 1,
      py::arg("alpha") = 0.8, py::arg("beta") = 0.2, py::arg("epsilon") = 0.05);

  m.def(
      "derive_born_coefficients",
      [](int n) {
        const BornSolution sol = derive_born({{0, 0.6, {0.2, 0.5}},
                                              {0, 0.3, {0.2, 0.5}},
                                              {1, 0.4, {0.3, 0.6}},
                                              {1, 0.7, {0.3, 0.6}}},
                                             n);
        return json_to_py({{"lambda", sol.lambda}, {"c", sol.c}});
      },
      py::arg("n") = 2, "solve the affine family from the default probe set");

  m.def(
      "macro_distribution",
      [](const std::string& law, std::uint64_t n_runs, double p, double alpha, double beta,
         double epsilon) {
        const MacroDistribution d =
            induced_macro_distribution(make_law(law, alpha, beta, epsilon), n_runs, p);
        return json_to_py({{"mode", d.mode},
                           {"mean", d.mean},
                           {"sigma", d.sigma},
                           {"N", d.n_runs},
                           {"p", d.p},
                           {"law", d.law_name}});
      },
      py::arg("law"), py::arg("N"), py::arg("p"), py::arg("alpha") = 0.8, py::arg("beta") = 0.2,
      py::arg("epsilon") = 0.05);

  m.def("versions_count_digits",
        [](std::uint64_t n) { return decimal_digits(versions_count(n)); }, py::arg("N"));
  m.def("branch_count_ratio_log10", &branch_count_ratio_log10, py::arg("N"), py::arg("n1"),
        py::arg("n2"));

  m.def(
      "collapse_statistics",
      [](const std::vector<double>& amplitudes, std::uint64_t runs, std::uint64_t seed) {
        const CollapseStatistics st =
            collapse_statistics(amplitudes, runs, CollapseParams{}, seed);
        return json_to_py({{"target", st.target},
                           {"frequency", st.frequency},
                           {"ci_halfwidth", st.ci_halfwidth},
                           {"unresolved", st.unresolved},
                           {"pass", st.pass}});
      },
      py::arg("amplitudes"), py::arg("runs") = 1000, py::arg("seed") = 1);

  m.def(
      "equivariance",
      [](double a1_sq, std::size_t samples, std::uint64_t seed) {
        const PacketPair p = PacketPair::make(std::sqrt(a1_sq), std::sqrt(1.0 - a1_sq));
        const EquivarianceReport rep = equivariance_report(p, samples, seed);
        return json_to_py({{"fraction1", rep.fraction1},
                           {"fraction2", rep.fraction2},
                           {"target1", rep.target1},
                           {"target2", rep.target2},
                           {"ci_halfwidth", rep.ci_halfwidth},
                           {"unresolved", rep.unresolved},
                           {"pass", rep.pass}});
      },
      py::arg("a1_sq") = 0.9, py::arg("samples") = 2000, py::arg("seed") = 1);
}
