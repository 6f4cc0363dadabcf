#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "tailbalance/condorcet.hpp"
#include "tailbalance/errors.hpp"
#include "tailbalance/io.hpp"
#include "tailbalance/jury_sim.hpp"
#include "tailbalance/signal_model.hpp"
#include "tailbalance/tail_balance.hpp"

namespace py = pybind11;
namespace tb = tailbalance;

namespace {

tb::State parse_state(const std::string& s) {
  if (s == "A") return tb::State::A;
  if (s == "B") return tb::State::B;
  throw std::invalid_argument("state must be 'A' or 'B', got '" + s + "'");
}

tb::DegeneratePolicy policy(bool uniform_limit) {
  return uniform_limit ? tb::DegeneratePolicy::UniformLimit : tb::DegeneratePolicy::Reject;
}

tb::JuryConfig make_jury(const std::vector<double>& abilities, double theta,
                         const std::string& tie_break, std::int64_t trials, std::uint64_t seed) {
  tb::JuryConfig c;
  for (double a : abilities) c.abilities.emplace_back(a);
  c.prior = tb::Prior(theta);
  c.tie_break = tb::tie_break_from_string(tie_break);
  c.trials = trials;
  c.seed = seed;
  return c;
}

py::dict stats_dict(const tb::VerdictStats& s) {
  py::dict d;
  d["p_correct"] = s.p_correct;
  d["method"] = std::string(tb::to_string(s.method));
  d["std_error"] = s.std_error;
  d["trials_used"] = s.trials_used;
  d["p_correct_given_A"] = s.p_correct_given_A;
  d["p_correct_given_B"] = s.p_correct_given_B;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tailbalance, m) {
  m.doc() = "Tail-balance solvers, ability-indexed signals and a sequential jury simulator.";

  auto solver_error = py::register_exception<tb::SolverError>(m, "SolverError", PyExc_ArithmeticError);
  py::register_exception<tb::DegenerateAlpha>(m, "DegenerateAlpha", solver_error.ptr());
  py::register_exception<tb::DegenerateAbility>(m, "DegenerateAbility", solver_error.ptr());
  py::register_exception<tb::SingularCoefficients>(m, "SingularCoefficients", solver_error.ptr());
  py::register_exception<tb::ZeroAbility>(m, "ZeroAbility", solver_error.ptr());
  py::register_exception<tb::InvalidBoundary>(m, "InvalidBoundary", PyExc_ValueError);
  py::register_exception<tb::EvenJury>(m, "EvenJury", PyExc_ValueError);
  py::register_exception<tb::SizeLimit>(m, "SizeLimit", PyExc_ValueError);

  // Signals.
  m.def("cdf", [](double a, double t, const std::string& state) {
    return tb::cdf_given_state(tb::Ability(a), tb::Signal(t), parse_state(state));
  }, py::arg("a"), py::arg("t"), py::arg("state") = "A");
  m.def("pdf", [](double a, double s, const std::string& state) {
    return tb::pdf_given_state(tb::Ability(a), tb::Signal(s), parse_state(state));
  }, py::arg("a"), py::arg("s"), py::arg("state") = "A");
  m.def("quantile", [](double a, double u, const std::string& state) {
    return tb::quantile_given_state(tb::Ability(a), u, parse_state(state)).value();
  }, py::arg("a"), py::arg("u"), py::arg("state") = "A");
  m.def("sample", [](double a, const std::string& state, std::size_t n, std::uint64_t seed) {
    tb::RngStream rng(seed);
    const tb::State st = parse_state(state);
    std::vector<double> out(n);
    for (double& x : out) x = tb::sample_signal(tb::Ability(a), st, rng).value();
    return out;
  }, py::arg("a"), py::arg("state") = "A", py::arg("n") = 1000, py::arg("seed") = 0);
  m.def("posterior", [](double a, double s, double theta) {
    return tb::posterior_from_signal(tb::Ability(a), tb::Signal(s), tb::Prior(theta));
  }, py::arg("a"), py::arg("s"), py::arg("theta") = 0.5);

  // Alpha specs and solved CDFs.
  py::class_<tb::AlphaSpec>(m, "AlphaSpec")
      .def_static("linear", [](double theta, double a) {
        return tb::AlphaSpec::linear(tb::Prior(theta), tb::Ability(a));
      }, py::arg("theta"), py::arg("a"))
      .def_static("affine", [](double intercept, double slope, double theta) {
        return tb::AlphaSpec::affine(intercept, slope, tb::Prior(theta));
      }, py::arg("intercept"), py::arg("slope"), py::arg("theta"))
      .def_static("table", [](std::vector<tb::Knot> points, std::optional<double> theta) {
        std::optional<tb::Prior> prior;
        if (theta) prior = tb::Prior(*theta);
        return tb::AlphaSpec::table(std::move(points), prior);
      }, py::arg("points"), py::arg("theta") = py::none())
      .def_static("from_json", [](const std::string& text) {
        return tb::alpha_from_json(nlohmann::json::parse(text));
      })
      .def("to_json", [](const tb::AlphaSpec& a) { return tb::to_json(a).dump(); })
      .def("__call__", &tb::AlphaSpec::operator())
      .def_property_readonly("theta", [](const tb::AlphaSpec& a) { return a.prior().theta(); })
      .def_property_readonly("kind", [](const tb::AlphaSpec& a) { return std::string(a.kind_name()); });

  py::class_<tb::SolvedCdf>(m, "SolvedCdf")
      .def("__call__", &tb::SolvedCdf::operator())
      .def("evaluate", [](const tb::SolvedCdf& h, const std::vector<double>& ts) {
        std::vector<double> out;
        out.reserve(ts.size());
        for (double t : ts) out.push_back(h(t));
        return out;
      })
      .def_property_readonly("provenance", [](const tb::SolvedCdf& h) {
        return std::string(tb::to_string(h.provenance()));
      })
      .def_property_readonly("max_residual", &tb::SolvedCdf::max_residual)
      .def_property_readonly("residual_at", &tb::SolvedCdf::residual_at)
      .def_property_readonly("is_valid_cdf", &tb::SolvedCdf::is_valid_cdf);

  m.def("solve_balanced", [](const tb::AlphaSpec& alpha, bool uniform_limit) {
    return tb::solve_balanced(alpha, policy(uniform_limit));
  }, py::arg("alpha"), py::arg("uniform_limit") = false);
  m.def("solve_odds", [](const tb::AlphaSpec& alpha, bool uniform_limit) {
    return tb::solve_odds(alpha, alpha.prior(), policy(uniform_limit));
  }, py::arg("alpha"), py::arg("uniform_limit") = false);
  m.def("solve_affine_pair", [](std::function<double(double)> gamma,
                                std::function<double(double)> delta) {
    return tb::solve_affine_pair({std::move(gamma), std::move(delta)});
  }, py::arg("gamma"), py::arg("delta"));
  m.def("closed_form_linear", [](double a) { return tb::closed_form_linear(tb::Ability(a)); },
        py::arg("a"));
  m.def("closed_form_linear_odds", [](double a, double theta, bool uniform_limit) {
    return tb::closed_form_linear_odds(tb::Ability(a), tb::Prior(theta), policy(uniform_limit));
  }, py::arg("a"), py::arg("theta"), py::arg("uniform_limit") = false);
  m.def("alt_decomposition_solver",
        [](double a) { return tb::alt_decomposition_solver(tb::Ability(a)); }, py::arg("a"));
  m.def("residual_check", [](const tb::SolvedCdf& h, const tb::AlphaSpec& alpha, int grid) {
    const tb::ResidualReport r = tb::residual_check(h, alpha, alpha.prior(), grid);
    return py::make_tuple(r.max_residual, r.argmax);
  }, py::arg("h"), py::arg("alpha"), py::arg("grid") = 1001);
  m.def("posterior_tail", [](const tb::SolvedCdf& h, double t, double theta) {
    return tb::posterior_tail(h, t, tb::Prior(theta));
  }, py::arg("h"), py::arg("t"), py::arg("theta") = 0.5);

  // Jury.
  m.def("exact_verdict", [](const std::vector<double>& abilities, double theta,
                            const std::string& tie_break) {
    return stats_dict(tb::exact_verdict_probability(make_jury(abilities, theta, tie_break, 1, 0)));
  }, py::arg("abilities"), py::arg("theta") = 0.5, py::arg("tie_break") = "follow_signal");
  m.def("monte_carlo_verdict", [](const std::vector<double>& abilities, double theta,
                                  std::int64_t trials, std::uint64_t seed,
                                  const std::string& tie_break, const std::string& mode,
                                  unsigned threads) {
    if (mode != "prior" && mode != "per-state") {
      throw std::invalid_argument("mode must be 'prior' or 'per-state'");
    }
    const tb::JuryConfig c = make_jury(abilities, theta, tie_break, trials, seed);
    tb::VerdictStats s;
    {
      py::gil_scoped_release release;
      s = tb::monte_carlo_verdict(
          c, mode == "prior" ? tb::SamplingMode::PriorDraw : tb::SamplingMode::PerState, threads);
    }
    return stats_dict(s);
  }, py::arg("abilities"), py::arg("theta") = 0.5, py::arg("trials") = 10000,
     py::arg("seed") = 0, py::arg("tie_break") = "follow_signal", py::arg("mode") = "prior",
     py::arg("threads") = 0);
  m.def("order_scan", [](const std::vector<double>& abilities, double theta,
                         const std::string& tie_break) {
    std::vector<tb::Ability> as;
    for (double a : abilities) as.emplace_back(a);
    py::list out;
    for (const tb::OrderingResult& r :
         tb::order_scan(as, tb::Prior(theta), tb::tie_break_from_string(tie_break))) {
      out.append(py::make_tuple(r.ordering, r.p_correct, r.rank));
    }
    return out;
  }, py::arg("abilities"), py::arg("theta") = 0.5, py::arg("tie_break") = "follow_signal");

  // Condorcet baseline.
  m.def("condorcet_exact", [](double p, int n) { return tb::condorcet_exact({p, n}); },
        py::arg("p"), py::arg("n"));
  m.def("condorcet_curve", [](double p, int n_max) {
    std::vector<std::pair<int, double>> out;
    for (const tb::CurvePoint& c : tb::condorcet_curve(p, n_max)) out.emplace_back(c.n, c.probability);
    return out;
  }, py::arg("p"), py::arg("n_max"));
}
