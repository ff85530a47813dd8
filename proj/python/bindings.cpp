#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "commands.hpp"
#include "tvckit/diagnostics.hpp"
#include "tvckit/error.hpp"
#include "tvckit/euler.hpp"
#include "tvckit/problem.hpp"
#include "tvckit/solver.hpp"
#include "tvckit/transversality.hpp"

namespace py = pybind11;
using namespace tvckit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const Path& path) {
    Array out({static_cast<py::ssize_t>(path.length()), static_cast<py::ssize_t>(path.dim())});
    auto v = out.mutable_unchecked<2>();
    for (int t = 0; t < path.length(); ++t) {
        for (int i = 0; i < path.dim(); ++i) v(t, i) = path(t, i);
    }
    return out;
}

Path to_path(const ProblemSpec& spec, const Array& values) {
    const auto info = values.request();
    if (info.ndim == 1 && spec.dim() == 1) {
        const auto* p = static_cast<const double*>(info.ptr);
        return Path::from_values(1, std::vector<double>(p, p + info.shape[0]));
    }
    if (info.ndim != 2 || info.shape[1] != spec.dim() || info.shape[0] < 1) {
        throw Error(ErrorKind::Semantic,
                    "path must have shape (H+1, " + std::to_string(spec.dim()) + ")");
    }
    const auto* p = static_cast<const double*>(info.ptr);
    return Path::from_values(spec.dim(),
                             std::vector<double>(p, p + info.shape[0] * info.shape[1]));
}

AssemblyMode mode_of(const std::string& text) { return parse_mode(text); }

TailPolicy tail_of(const std::string& text) {
    if (text == "steady-state-clamp") return TailPolicy::SteadyStateClamp;
    if (text == "replicate-last") return TailPolicy::ReplicateLast;
    throw Error(ErrorKind::Semantic, "unknown tail policy '" + text + "'");
}

const PerturbationSpec& pick(const ProblemSpec& spec, const std::optional<std::string>& name) {
    if (name) return spec.perturbation(*name);
    if (spec.perturbations.empty()) throw Error(ErrorKind::Semantic, "problem declares no perturbation");
    return spec.perturbations.front().spec;
}

py::object limit(const IteratedLimit& l) {
    if (l.divergent) return py::str("divergent");
    return py::float_(l.value);
}

py::dict solve(const ProblemSpec& spec, int horizon, const std::string& mode,
               const std::string& tail, std::optional<double> guess) {
    SolveOptions opts;
    opts.tail_policy = tail_of(tail);
    opts.constant_guess = guess;
    SolveReport report;
    {
        py::gil_scoped_release release;
        report = solve_truncated(assemble_system(spec, horizon, mode_of(mode)), opts);
    }
    py::dict out;
    out["path"] = to_array(report.path);
    out["converged"] = report.converged;
    out["iterations"] = report.iterations;
    out["residual_norm"] = report.final_residual_norm;
    out["tail_policy"] = to_string(report.tail_used);
    out["steady_state"] = report.steady_state ? py::cast(*report.steady_state) : py::none();
    return out;
}

py::dict tvc(const ProblemSpec& spec, const Array& values, std::optional<std::string> perturb,
             std::optional<double> michel, std::pair<int, int> window) {
    if (perturb && michel) throw Error(ErrorKind::Semantic, "perturb and michel are exclusive");
    const auto path = to_path(spec, values);
    const auto series = michel ? michel_series(spec, path, *michel, window.first, window.second)
                               : tvc_series(spec, path, pick(spec, perturb), window.first,
                                            window.second);
    const auto verdict = classify_tvc(series, default_tvc_threshold(series));
    std::vector<int> t;
    std::vector<double> b;
    for (const auto& e : series.entries) {
        t.push_back(e.t_prime);
        b.push_back(e.value);
    }
    py::dict out;
    out["T_prime"] = t;
    out["boundary_term"] = b;
    out["running_inf"] = series.running_inf();
    out["liminf_estimate"] = verdict.liminf_estimate;
    out["limsup_estimate"] = verdict.limsup_estimate;
    out["classification"] = to_string(verdict.classification);
    out["threshold"] = verdict.threshold;
    out["drift"] = verdict.drift;
    return out;
}

py::dict diagnose(const ProblemSpec& spec, const Array& values, std::optional<std::string> perturb,
                  const std::vector<double>& eps, const std::vector<int>& t_axis, int threads,
                  double tol) {
    const auto path = to_path(spec, values);
    const auto& q = pick(spec, perturb);
    DiagGrid grid;
    AssumptionVerdict verdict;
    {
        py::gil_scoped_release release;
        grid = build_a_grid(spec, path, q, eps, t_axis, threads);
        verdict = assess_assumptions(grid, tol);
    }
    Array a({static_cast<py::ssize_t>(grid.a.rows()), static_cast<py::ssize_t>(grid.a.cols())});
    auto v = a.mutable_unchecked<2>();
    for (std::size_t r = 0; r < grid.a.rows(); ++r) {
        for (std::size_t c = 0; c < grid.a.cols(); ++c) {
            v(static_cast<py::ssize_t>(r), static_cast<py::ssize_t>(c)) = grid.a(r, c);
        }
    }
    py::dict out;
    out["eps"] = grid.eps_values;
    out["T_prime"] = grid.t_values;
    out["A"] = a;
    out["L1"] = limit(verdict.l1);
    out["L2"] = limit(verdict.l2);
    out["classification"] = to_string(verdict.classification);
    out["uniformity_defect"] = verdict.uniformity_defect;
    return out;
}

py::dict compare(const ProblemSpec& spec, const Array& first, const Array& second,
                 std::optional<int> t_max) {
    const auto a = to_path(spec, first);
    const auto b = to_path(spec, second);
    const int common = std::min(a.horizon(), b.horizon()) - spec.order + 1;
    const auto c = overtaking_compare(spec, a, b, t_max.value_or(common));
    py::dict out;
    out["D"] = c.d;
    out["t_max"] = c.t_max;
    out["margin"] = c.margin;
    out["verdict"] = to_string(c.verdict);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Euler equations, transversality checks and limit diagnostics for discrete-time problems";

    static auto* error = new py::exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error->ptr())(e.what());
            std::string kind = to_string(e.kind());
            kind = kind.substr(0, kind.find(' '));
            exc.attr("kind") = kind;
            PyErr_SetObject(error->ptr(), exc.ptr());
        }
    });

    py::class_<ProblemSpec>(m, "Problem")
        .def_static("parse", [](const std::string& text) { return parse_problem(text); },
                    py::arg("text"))
        .def_static("load", &load_problem, py::arg("path"))
        .def_readonly("order", &ProblemSpec::order)
        .def_readonly("vars", &ProblemSpec::vars)
        .def_property_readonly("params",
                               [](const ProblemSpec& s) {
                                   py::dict d;
                                   for (std::size_t k = 0; k < s.param_names.size(); ++k) {
                                       d[py::str(s.param_names[k])] = s.param_values[k];
                                   }
                                   return d;
                               })
        .def_property_readonly("perturbations",
                               [](const ProblemSpec& s) {
                                   std::vector<std::string> names;
                                   for (const auto& p : s.perturbations) names.push_back(p.name);
                                   return names;
                               })
        .def("set_param", &ProblemSpec::set_param, py::arg("name"), py::arg("value"))
        .def("canonical", [](const ProblemSpec& s) { return print_canonical(s); })
        .def("__repr__", [](const ProblemSpec& s) {
            return "<Problem order=" + std::to_string(s.order) + " dim=" + std::to_string(s.dim()) +
                   ">";
        });

    m.def("steady_state",
          [](const ProblemSpec& spec, std::optional<std::vector<double>> guess) {
              return steady_state(spec, guess.value_or(default_seed(spec)));
          },
          py::arg("problem"), py::arg("guess") = py::none());
    m.def("solve", &solve, py::arg("problem"), py::arg("horizon"),
          py::arg("mode") = "free-initial", py::arg("tail") = "steady-state-clamp",
          py::arg("guess") = py::none());
    m.def("euler_residual",
          [](const ProblemSpec& spec, const Array& values, int t) {
              return euler_residual(spec, to_path(spec, values), t);
          },
          py::arg("problem"), py::arg("path"), py::arg("t"));
    m.def("tvc", &tvc, py::arg("problem"), py::arg("path"), py::arg("perturb") = py::none(),
          py::arg("michel") = py::none(), py::arg("window") = std::pair<int, int>{5, 50});
    m.def("diagnose", &diagnose, py::arg("problem"), py::arg("path"),
          py::arg("perturb") = py::none(),
          py::arg("eps") = std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4},
          py::arg("t_axis") = std::vector<int>{10, 20, 40, 80, 160, 320, 640},
          py::arg("threads") = 1, py::arg("tol") = 1e-6);
    m.def("compare", &compare, py::arg("problem"), py::arg("first"), py::arg("second"),
          py::arg("t_max") = py::none());
    m.def("cli",
          [](std::vector<std::string> args) {
              args.insert(args.begin(), "tvckit");
              std::vector<char*> argv;
              for (auto& a : args) argv.push_back(a.data());
              return cli::main(static_cast<int>(argv.size()), argv.data());
          },
          py::arg("args"));
}
