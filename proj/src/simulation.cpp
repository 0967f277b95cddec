#include "lfc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace lfc {

double default_horizon(int scenario) { return scenario == 3 ? 600.0 : 200.0; }

Vec ScenarioSetup::plant_injection(double t, const Vec& d) const {
    Vec wind = exo.model.output_wind(d);
    Vec load = exo.model.output_load(d);
    for (std::size_t i = 0; i < load_profile.size(); ++i) {
        if (load_profile[i]) load[static_cast<Eigen::Index>(i)] = load_profile[i]->at(t);
    }
    for (std::size_t i = 0; i < wind_profile.size(); ++i) {
        if (wind_profile[i]) wind[static_cast<Eigen::Index>(i)] = wind_profile[i]->at(t);
    }
    return wind - load;
}

ScenarioSetup prepare_scenario(const Network& net, const SimConfig& cfg) {
    if (cfg.scenario < 1 || cfg.scenario > 3) throw ConfigError("scenario must be 1, 2 or 3");
    const int n = net.n();
    ScenarioSetup s;
    if (cfg.scenario == 3) {
        s.exo = build_scenario3_exo(cfg.exo3);
        s.load_profile.resize(static_cast<std::size_t>(n));
        s.wind_profile.resize(static_cast<std::size_t>(n));
        if (cfg.data_dir.empty()) {
            s.warnings.push_back("no data directory given; plant driven by the exosystem outputs");
        } else {
            namespace fs = std::filesystem;
            for (int i = 0; i < n; ++i) {
                for (const char* kind : {"load", "wind"}) {
                    const fs::path path = fs::path(cfg.data_dir) / ("area" + std::to_string(i + 1) + "_" + kind + ".csv");
                    auto& slot = std::string(kind) == "load" ? s.load_profile[static_cast<std::size_t>(i)]
                                                             : s.wind_profile[static_cast<std::size_t>(i)];
                    if (!fs::exists(path)) {
                        s.warnings.push_back("missing " + path.string() + "; area " + std::to_string(i + 1) + " " +
                                             kind + " falls back to the exosystem output");
                        continue;
                    }
                    slot = read_profile_csv(path.string(), cfg.data_units, net.params().S_base, cfg.time_compression);
                }
            }
        }
    } else {
        s.exo = build_scenario1_exo(cfg.exo1);
    }
    const Vec P0 = s.plant_injection(0.0, s.exo.d0);
    s.pre_switch = steady_state_solve(P0, net);
    if (!s.pre_switch.security.secure) s.warnings.push_back("pre-switch steady state violates the security margins");
    s.x0 = s.pre_switch.state;
    if (cfg.omega0) {
        if (cfg.omega0->size() != n) throw ConfigError("omega0 must have one entry per area");
        s.x0.omega = *cfg.omega0;
    }
    return s;
}

ApproxSolution solve_scenario_approx(const Network& net, const ScenarioSetup& setup, const ApproxOptions& opts) {
    PenaltyProblem problem(net, setup.exo.model, setup.exo.d0, PhaseBasis(setup.exo.model, opts.order), opts,
                           setup.pre_switch.state);
    const Mat U0 = problem.classical_initialization(setup.pre_switch.state);
    return penalty_descent(problem, U0, opts.eps_bar, opts.max_iter, opts.stall_iters);
}

std::unique_ptr<Controller> make_controller(const std::string& name, const Network& net, const ScenarioSetup& setup,
                                            const SimConfig& cfg, const ApproxSolution* approx) {
    if (name == "classical") {
        return std::make_unique<ClassicalController>(net, setup.exo.model, setup.pre_switch.state, cfg.tracker);
    }
    if (name == "droop" || name == "droop-delta") return std::make_unique<DroopDeltaController>(net);
    if (name == "approx" || name == "approximate") {
        if (approx) return std::make_unique<ApproxController>(net, setup.exo.model, *approx);
        return std::make_unique<ApproxController>(net, setup.exo.model, solve_scenario_approx(net, setup, cfg.approx));
    }
    throw ConfigError("unknown controller '" + name + "' (classical | approx | droop)");
}

Vec inject_measurement_noise(const Vec& P_c, double std, std::mt19937_64& rng) {
    if (std < 0.0) throw std::invalid_argument("noise std must be non-negative");
    if (std == 0.0) return P_c;
    std::normal_distribution<double> dist(0.0, std);
    Vec out = P_c;
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += dist(rng);
    return out;
}

SimTrace simulate(const Network& net, const SimConfig& cfg, const ScenarioSetup& setup, Controller& controller) {
    if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(cfg.integrator.dt > 0.0)) throw ConfigError("integrator step must be positive");
    const int n = net.n(), m = net.m(), nx = net.state_dim();
    const ExoModel& exo = setup.exo.model;
    const int nd = exo.dim();

    SimTrace tr;
    tr.m = m;
    tr.n = n;
    tr.warnings = setup.warnings;
    for (const auto& w : net.warnings()) tr.warnings.push_back(w);
    if (cfg.scenario == 3) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "time_compression = %.17g", cfg.time_compression);
        tr.header_notes.emplace_back(buf);
    }

    const Vec z0 = controller.initial_internal(setup.x0, setup.exo.d0);
    const int nz = static_cast<int>(z0.size());
    std::vector<double> y(static_cast<std::size_t>(nx + nd + nz));
    const Vec x0 = setup.x0.pack();
    std::copy(x0.data(), x0.data() + nx, y.begin());
    std::copy(setup.exo.d0.data(), setup.exo.d0.data() + nd, y.begin() + nx);
    std::copy(z0.data(), z0.data() + nz, y.begin() + nx + nd);

    const bool noisy = cfg.noise || cfg.scenario == 2;
    std::mt19937_64 rng(cfg.seed);
    Vec eta = Vec::Zero(n);
    std::vector<double> u(static_cast<std::size_t>(n)), pcm(static_cast<std::size_t>(n));

    auto rhs = [&](const double* s, double* ds, double t) {
        const double* d = s + nx;
        const double* z = s + nx + nd;
        const Vec Pd = setup.plant_injection(t, Eigen::Map<const Vec>(d, nd));
        controller.control(s, d, z, u.data());
        const double* pc_meas = nullptr;
        if (noisy) {
            for (int i = 0; i < n; ++i) pcm[i] = s[net.off_Pc() + i] + eta[i];
            pc_meas = pcm.data();
        }
        dynamics_rhs_flat(s, Pd.data(), u.data(), pc_meas, ds, net);
        exo.derivative_flat(d, ds + nx);
        if (nz > 0) controller.internal_rhs(s, d, z, ds + nx + nd);
    };
    auto hook = [&](double) {
        if (noisy) eta = inject_measurement_noise(Vec::Zero(n), cfg.noise_std, rng);
    };
    auto observe = [&](double t, const double* s) {
        const Eigen::Map<const Vec> xs(s, nx);
        if (!xs.allFinite() || xs.norm() > cfg.divergence_norm) {
            throw SimulationAbort("state diverged (norm above " + std::to_string(cfg.divergence_norm) + ")", t);
        }
        const double* d = s + nx;
        Vec uu(n);
        controller.control(s, d, s + nx + nd, uu.data());
        const Vec Pd = setup.plant_injection(t, Eigen::Map<const Vec>(d, nd));
        const Vec Pe = xs.segment(net.off_Pc(), n) - optimal_dispatch(Pd, net.cost());
        tr.t.push_back(t);
        tr.x.emplace_back(xs);
        tr.u.push_back(uu);
        tr.P_d.push_back(Pd);
        tr.P_e.push_back(Pe);
        tr.err_norm.push_back(std::sqrt(xs.segment(net.off_omega(), n).squaredNorm() + Pe.squaredNorm()));
    };

    try {
        integrate(rhs, y, 0.0, cfg.horizon, cfg.integrator, observe, cfg.record_dt, hook);
    } catch (const SimulationAbort& e) {
        tr.aborted = true;
        tr.abort_reason = e.what();
        tr.abort_time = e.time();
    } catch (const ConvergenceError& e) {
        tr.aborted = true;
        tr.abort_reason = e.what();
        tr.abort_time = tr.t.empty() ? 0.0 : tr.t.back();
    } catch (const InfeasibleError& e) {
        tr.aborted = true;
        tr.abort_reason = e.what();
        tr.abort_time = tr.t.empty() ? 0.0 : tr.t.back();
    } catch (const DomainError& e) {
        tr.aborted = true;
        tr.abort_reason = e.what();
        tr.abort_time = tr.t.empty() ? 0.0 : tr.t.back();
    }
    if (auto* cc = dynamic_cast<ClassicalController*>(&controller)) tr.metrics["tracker_merge_gap"] = cc->merge_gap();
    if (!tr.t.empty()) {
        for (const auto& [k, v] : compute_metrics(tr, cfg.settle_band)) tr.metrics[k] = v;
    }
    return tr;
}

SimTrace run_scenario(const Network& net, const SimConfig& cfg, const ApproxSolution* approx) {
    const ScenarioSetup setup = prepare_scenario(net, cfg);
    std::optional<ApproxSolution> loaded;
    if (!approx && !cfg.approx_solution.empty() && (cfg.controller == "approx" || cfg.controller == "approximate")) {
        loaded = load_solution(cfg.approx_solution);
        approx = &*loaded;
    }
    auto controller = make_controller(cfg.controller, net, setup, cfg, approx);
    return simulate(net, cfg, setup, *controller);
}

double time_to_threshold(const std::vector<double>& t, const std::vector<double>& values, double threshold) {
    if (t.empty() || t.size() != values.size()) throw std::invalid_argument("time_to_threshold: size mismatch");
    if (!(values.back() < threshold)) return std::numeric_limits<double>::quiet_NaN();
    std::size_t k = values.size();
    for (std::size_t i = values.size(); i-- > 0;) {
        if (!(values[i] < threshold)) {
            k = i;
            break;
        }
    }
    if (k == values.size()) return t.front();
    const double a = values[k], b = values[k + 1];
    double s;
    if (a > 0.0 && b > 0.0) s = (std::log(threshold) - std::log(a)) / (std::log(b) - std::log(a));
    else s = (threshold - a) / (b - a);
    s = std::clamp(s, 0.0, 1.0);
    return t[k] + s * (t[k + 1] - t[k]);
}

Metrics compute_metrics(const SimTrace& trace, double settle_band) {
    if (trace.t.empty()) throw std::invalid_argument("compute_metrics: empty trace");
    const int m = trace.m, n = trace.n;
    const std::size_t N = trace.t.size();
    std::vector<double> wmax(N);
    double max_w = 0.0, max_w60 = 0.0, vmin = INFINITY, vmax = -INFINITY, pe_peak = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        const Vec& x = trace.x[k];
        wmax[k] = x.segment(m, n).lpNorm<Eigen::Infinity>();
        max_w = std::max(max_w, wmax[k]);
        if (trace.t[k] > 60.0) max_w60 = std::max(max_w60, wmax[k]);
        vmin = std::min(vmin, x.segment(m + n, n).minCoeff());
        vmax = std::max(vmax, x.segment(m + n, n).maxCoeff());
        pe_peak = std::max(pe_peak, trace.P_e[k].lpNorm<Eigen::Infinity>());
    }
    Metrics out;
    out["max_abs_omega"] = max_w;
    out["max_abs_omega_after_60s"] = max_w60;
    out["settling_time"] = time_to_threshold(trace.t, wmax, settle_band);
    out["final_err_norm"] = trace.err_norm.back();
    out["time_to_err_1e-3"] = time_to_threshold(trace.t, trace.err_norm, 1e-3);
    out["time_to_err_1e-6"] = time_to_threshold(trace.t, trace.err_norm, 1e-6);
    out["peak_abs_Pe"] = pe_peak;
    out["terminal_abs_Pe"] = trace.P_e.back().lpNorm<Eigen::Infinity>();
    out["V_min"] = vmin;
    out["V_max"] = vmax;
    // largest per-area time average of |omega_i| over the last 50 s (trapezoid)
    const double t_end = trace.t.back(), t_start = std::max(trace.t.front(), t_end - 50.0);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 1; k < N; ++k) {
            if (trace.t[k] <= t_start) continue;
            const double a = std::abs(trace.x[k - 1][m + i]), b = std::abs(trace.x[k][m + i]);
            const double t0 = std::max(trace.t[k - 1], t_start);
            const double s = (t0 - trace.t[k - 1]) / (trace.t[k] - trace.t[k - 1]);
            acc += 0.5 * (a + s * (b - a) + b) * (trace.t[k] - t0);
        }
        const double span = t_end - t_start;
        worst = std::max(worst, span > 0.0 ? acc / span : std::abs(trace.x.back()[m + i]));
    }
    out["mean_abs_omega_final_50s"] = worst;
    return out;
}

namespace {

void put(std::FILE* f, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::fputs(buf, f);
}

}  // namespace

void write_trace_csv(const SimTrace& trace, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot write trace file '" + path + "'");
    for (const auto& note : trace.header_notes) std::fprintf(f, "# %s\n", note.c_str());
    const int m = trace.m, n = trace.n;
    std::fputs("t", f);
    for (int i = 1; i <= m; ++i) std::fprintf(f, ",theta_%d", i);
    for (const char* name : {"omega", "V", "Pc", "delta", "u", "Pd", "Pe"}) {
        for (int i = 1; i <= n; ++i) std::fprintf(f, ",%s_%d", name, i);
    }
    std::fputs(",err_norm\n", f);
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
        put(f, trace.t[k]);
        auto row = [&](const Vec& v) {
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                std::fputc(',', f);
                put(f, v[i]);
            }
        };
        row(trace.x[k]);
        row(trace.u[k]);
        row(trace.P_d[k]);
        row(trace.P_e[k]);
        std::fputc(',', f);
        put(f, trace.err_norm[k]);
        std::fputc('\n', f);
    }
    std::fclose(f);
}

void write_metrics(const Metrics& metrics, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot write metrics file '" + path + "'");
    for (const auto& [k, v] : metrics) {
        std::fprintf(f, "%s = ", k.c_str());
        put(f, v);
        std::fputc('\n', f);
    }
    std::fclose(f);
}

}  // namespace lfc
