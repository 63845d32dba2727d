#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "fraclab/cantor.hpp"
#include "fraclab/cli.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/follmer.hpp"
#include "fraclab/fracops.hpp"
#include "fraclab/isometry.hpp"
#include "fraclab/registry.hpp"
#include "fraclab/variation.hpp"

namespace py = pybind11;
using namespace fraclab;
using nlohmann::json;

namespace {

json to_json(const py::object& o) {
    if (o.is_none()) return json::object();
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::object from_json(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

SampledPath make_path(std::vector<double> times, std::vector<double> values) {
    return SampledPath(std::move(times), std::move(values));
}

SmoothFn make_fn(const std::string& name, const py::object& params, int order) {
    return function_registry(name, to_json(params), order);
}

py::dict result_dict(const CompensatedResult& r) {
    py::dict d;
    d["levels"] = r.levels;
    d["sums"] = r.sums;
    d["residuals"] = r.residuals;
    d["gaps"] = r.gaps;
    d["lhs"] = r.lhs;
    d["threshold"] = r.threshold;
    d["converged"] = r.converged;
    return d;
}

}  // namespace

PYBIND11_MODULE(_fraclab, m) {
    m.doc() = "Pathwise fractional calculus along partition sequences";
    m.attr("__version__") = cli::library_version;

    // messages start with the error kind, e.g. "invalid-parameter: ..."
    py::register_exception<Error>(m, "FraclabError", PyExc_ValueError);

    m.def("fbm_path", [](double H, std::size_t N, double T, std::uint64_t seed) {
        const SampledPath s = fbm_path({H, N, T, seed});
        return py::make_tuple(std::vector<double>(s.times().begin(), s.times().end()),
                              std::vector<double>(s.values().begin(), s.values().end()));
    }, py::arg("H"), py::arg("N"), py::arg("T") = 1.0, py::arg("seed") = 0);

    m.def("cantor_distance", [](double p, const std::vector<double>& t, int depth) {
        const AnalyticPath s = AnalyticPath::cantor_distance(p, depth);
        std::vector<double> out;
        for (double u : t) out.push_back(s(u));
        return out;
    }, py::arg("p"), py::arg("t"), py::arg("depth") = 20);
    m.def("cantor_bump", [](double p, const std::vector<double>& t, int depth) {
        const AnalyticPath s = AnalyticPath::cantor_bump(p, depth);
        std::vector<double> out;
        for (double u : t) out.push_back(s(u));
        return out;
    }, py::arg("p"), py::arg("t"), py::arg("depth") = 8);
    m.def("takagi", [](const std::vector<double>& t, int b, double alpha, int depth) {
        const AnalyticPath s = AnalyticPath::takagi(b, alpha, Wave::triangle, depth);
        std::vector<double> out;
        for (double u : t) out.push_back(s(u));
        return out;
    }, py::arg("t"), py::arg("b") = 2, py::arg("alpha") = 0.5, py::arg("depth") = 30);
    m.def("cantor_function", [](double t) { return cantor_function(t); }, py::arg("t"));

    m.def("badic", [](double T, int n, int b) {
        const Partition p = badic(T, n, b);
        return std::vector<double>(p.times().begin(), p.times().end());
    }, py::arg("T"), py::arg("n"), py::arg("b") = 2);

    m.def("pth_variation", [](std::vector<double> times, std::vector<double> values, std::vector<double> partition,
                              double p, double t) {
        return pth_variation_partial(make_path(std::move(times), std::move(values)), Partition(std::move(partition)), p, t);
    }, py::arg("times"), py::arg("values"), py::arg("partition"), py::arg("p"), py::arg("t"));

    m.def("variation_table", [](std::vector<double> times, std::vector<double> values, double p, int nmin,
                                int nmax, const std::vector<double>& eval_times, int b, int jobs) {
        const SampledPath s = make_path(std::move(times), std::move(values));
        const VariationTable v = variation_table(s, badic_sequence(s.horizon(), b, nmin, nmax), p, eval_times, jobs);
        py::dict d;
        d["levels"] = v.levels;
        d["partial_sums"] = v.partial_sums;
        d["limit_estimate"] = v.limit_estimate;
        d["cauchy_gaps"] = v.cauchy_gaps;
        return d;
    }, py::arg("times"), py::arg("values"), py::arg("p"), py::arg("nmin"), py::arg("nmax"),
       py::arg("eval_times"), py::arg("b") = 2, py::arg("jobs") = 1);

    m.def("rl_integral", [](const std::string& name, const py::object& params, double a, double alpha, double x) {
        return rl_integral(make_fn(name, params, 1), a, alpha, x);
    }, py::arg("name"), py::arg("params") = py::none(), py::arg("a") = 0.0, py::arg("alpha") = 0.5, py::arg("x") = 1.0);
    m.def("caputo", [](const std::string& name, const py::object& params, double a, double p, double x) {
        const FracOrder P(p);
        return caputo(make_fn(name, params, P.m + 1), a, P, x);
    }, py::arg("name"), py::arg("params") = py::none(), py::arg("a") = 0.0, py::arg("p") = 0.5, py::arg("x") = 1.0);
    m.def("caputo_power", [](double a, double k, double q, double p, double x) {
        return caputo_power(a, k, q, FracOrder(p), x);
    }, py::arg("a"), py::arg("k"), py::arg("q"), py::arg("p"), py::arg("x"));

    m.def("ito_check", [](const std::string& name, const py::object& params, std::vector<double> times,
                          std::vector<double> values, double p, int nmin, int nmax, double t, double tolerance,
                          int b, int jobs) {
        const SampledPath s = make_path(std::move(times), std::move(values));
        const FracOrder P(p);
        return result_dict(ito_check(make_fn(name, params, P.m), s, badic_sequence(s.horizon(), b, nmin, nmax), P,
                                     t, VerdictRule{tolerance, 4}, jobs));
    }, py::arg("name"), py::arg("params"), py::arg("times"), py::arg("values"), py::arg("p"), py::arg("nmin"),
       py::arg("nmax"), py::arg("t") = 1.0, py::arg("tolerance") = 1e-2, py::arg("b") = 2, py::arg("jobs") = 1);

    m.def("nonzero_atom_weights", [](double p, int k_max) {
        std::vector<std::pair<double, double>> out;
        for (const AngleWeight& a : nonzero_atom_weights(p, k_max)) out.emplace_back(a.angle, a.weight);
        return out;
    }, py::arg("p"), py::arg("k_max"));

    m.def("phi_hat", [](const std::string& phi, double x) {
        if (phi == "log-modulated") return phi_hat(PhiSpec::log_modulated(), x).value;
        if (phi.rfind("power:", 0) == 0) return phi_hat(PhiSpec::power(std::stod(phi.substr(6))), x).value;
        fail(ErrorKind::invalid_phi, "expected power:<p> or log-modulated, got '" + phi + "'");
    }, py::arg("phi"), py::arg("x"));

    m.def("run", [](const py::object& config, const std::string& output_dir, int jobs) {
        const json cfg = py::isinstance<py::str>(config) ? cli::parse_config(config.cast<std::string>(), "<python>")
                                                         : cli::parse_config(to_json(config).dump(), "<python>");
        cli::RunOptions o;
        o.output_dir = output_dir;
        o.jobs = jobs;
        const cli::RunResult r = cli::run(cfg, o);
        py::dict d;
        d["status"] = r.status;
        d["output_dir"] = r.output_dir;
        d["outputs"] = r.outputs;
        d["verdict"] = from_json(r.verdict);
        return d;
    }, py::arg("config"), py::arg("output_dir"), py::arg("jobs") = 1);
}
