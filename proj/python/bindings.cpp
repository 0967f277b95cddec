#include "lfc/config.hpp"
#include "lfc/regulator.hpp"
#include "lfc/simulation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace lfc;

namespace {

std::string default_config() { return std::string(LFC_SOURCE_DIR) + "/config/four_area.ini"; }

ScenarioConfig resolve(const std::optional<std::string>& path, std::optional<int> scenario,
                       std::optional<std::string> controller, std::optional<double> horizon,
                       std::optional<std::uint64_t> seed, std::optional<double> noise_std,
                       std::optional<Vec> omega0) {
    ScenarioConfig cfg = load_config_file(path.value_or(default_config()));
    if (scenario) cfg.sim.scenario = *scenario;
    if (controller) cfg.sim.controller = *controller;
    if (horizon) cfg.sim.horizon = *horizon;
    if (seed) cfg.sim.seed = *seed;
    if (noise_std) cfg.sim.noise_std = *noise_std;
    if (omega0) cfg.sim.omega0 = *omega0;
    if (cfg.sim.scenario < 1 || cfg.sim.scenario > 3) throw ConfigError("scenario must be 1, 2 or 3");
    finalize_config(cfg);
    return cfg;
}

Mat stack(const std::vector<Vec>& rows, int offset, int count) {
    Mat out(static_cast<Eigen::Index>(rows.size()), count);
    for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = rows[k].segment(offset, count).transpose();
    return out;
}

py::dict run_simulation(const std::optional<std::string>& config, std::optional<int> scenario,
                  std::optional<std::string> controller, std::optional<double> horizon,
                  std::optional<std::uint64_t> seed, std::optional<double> noise_std, std::optional<Vec> omega0) {
    const ScenarioConfig cfg = resolve(config, scenario, controller, horizon, seed, noise_std, std::move(omega0));
    SimTrace tr;
    {
        py::gil_scoped_release release;
        const Network net(cfg.network);
        tr = run_scenario(net, cfg.sim);
    }
    const int m = tr.m, n = tr.n;
    py::dict out;
    out["t"] = Vec(Eigen::Map<const Vec>(tr.t.data(), static_cast<Eigen::Index>(tr.t.size())));
    out["theta"] = stack(tr.x, 0, m);
    out["omega"] = stack(tr.x, m, n);
    out["V"] = stack(tr.x, m + n, n);
    out["P_c"] = stack(tr.x, m + 2 * n, n);
    out["delta"] = stack(tr.x, m + 3 * n, n);
    out["u"] = stack(tr.u, 0, n);
    out["P_d"] = stack(tr.P_d, 0, n);
    out["err_norm"] = Vec(Eigen::Map<const Vec>(tr.err_norm.data(), static_cast<Eigen::Index>(tr.err_norm.size())));
    out["metrics"] = tr.metrics;
    out["warnings"] = tr.warnings;
    out["aborted"] = tr.aborted;
    out["abort_reason"] = tr.abort_reason;
    return out;
}

py::dict check_solvability(const std::optional<std::string>& config, int scenario) {
    const ScenarioConfig cfg = resolve(config, scenario, std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                                       std::nullopt);
    const Network net(cfg.network);
    const ExoScenario exo = scenario == 3 ? build_scenario3_exo(cfg.sim.exo3) : build_scenario1_exo(cfg.sim.exo1);
    const Vec d_bar = exo.model.equilibrium_like(exo.d0);
    const SteadyState ss = steady_state_solve(exo.model.output(d_bar), net);
    const HyperbolicityReport r = hyperbolicity_check(net, exo.model, d_bar, ss.state);
    py::dict out;
    out["passes"] = r.passes;
    out["hyperbolic_modulo_family"] = r.hyperbolic_modulo_family;
    out["near_zero"] = r.near_zero;
    out["min_sigma"] = r.min_sigma;
    out["a11_margin"] = r.a11_margin;
    out["a33_negative_definite"] = r.a33_negative_definite;
    out["jacobian"] = r.A;
    out["notes"] = r.notes;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Load-frequency control core";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

    m.def("default_config", &default_config);
    m.def(
        "optimal_dispatch",
        [](const Vec& P_d, const Vec& q, const std::optional<Vec>& r) {
            CostModel c;
            c.q = q;
            c.r = r.value_or(Vec::Zero(q.size()));
            c.c = Vec::Zero(q.size());
            if (P_d.size() != q.size() || c.r.size() != q.size()) throw ConfigError("P_d, q and r must have equal length");
            return optimal_dispatch(P_d, c);
        },
        py::arg("P_d"), py::arg("q"), py::arg("r") = py::none());
    m.def("simulate", &run_simulation, py::arg("config") = py::none(), py::arg("scenario") = py::none(),
          py::arg("controller") = py::none(), py::arg("horizon") = py::none(), py::arg("seed") = py::none(),
          py::arg("noise_std") = py::none(), py::arg("omega0") = py::none());
    m.def("check_solvability", &check_solvability, py::arg("config") = py::none(), py::arg("scenario") = 1);
    m.def("format_config", [](const std::optional<std::string>& path) {
        ScenarioConfig cfg = load_config_file(path.value_or(default_config()));
        finalize_config(cfg);
        return format_config(cfg);
    }, py::arg("config") = py::none());
}
