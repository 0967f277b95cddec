// lfc: command-line driver for simulations, solvability checks, the approximate
// regulator solve, dispatch tables and exosystem fitting.

#include "lfc/approx.hpp"
#include "lfc/config.hpp"
#include "lfc/regulator.hpp"
#include "lfc/simulation.hpp"
#include "lfc/sinusoid_fit.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using lfc::Mat;
using lfc::Vec;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumeric = 2, kSolvability = 3, kStall = 4 };

struct Common {
    std::string config;
    std::string output;
    std::vector<std::string> argv;
};

std::string default_config() { return std::string(LFC_SOURCE_DIR) + "/config/four_area.ini"; }

fs::path output_dir(const Common& c) {
    std::string dir = c.output;
    if (dir.empty()) {
        const char* env = std::getenv("LFC_OUTPUT_DIR");
        dir = env && *env ? env : "lfc_out";
    }
    fs::create_directories(dir);
    return dir;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Vec parse_list(const std::string& s) {
    std::vector<double> vals;
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',') {
            if (!cur.empty()) {
                char* end = nullptr;
                const double v = std::strtod(cur.c_str(), &end);
                if (!end || *end != '\0') throw lfc::ConfigError("bad number '" + cur + "' in list '" + s + "'");
                vals.push_back(v);
            }
            cur.clear();
        } else if (ch != ' ') {
            cur += ch;
        }
    }
    return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void write_manifest(const fs::path& path, const std::string& subcommand, const Common& c,
                    const lfc::ScenarioConfig* cfg, const json& outputs, const json& extra) {
    json m;
    m["tool"] = "lfc";
    m["subcommand"] = subcommand;
    m["argv"] = c.argv;
    m["config_file"] = c.config;
    if (cfg) m["resolved_config"] = lfc::format_config(*cfg);
    m["outputs"] = outputs;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    std::ofstream out(path);
    out << m.dump(2) << '\n';
}

struct SimOverrides {
    std::optional<int> scenario;
    std::optional<std::string> controller;
    std::optional<double> horizon;
    std::optional<long> seed;
    std::optional<double> noise_std;
    bool noise = false;
    std::optional<std::string> data;
    std::optional<std::string> solution;
    std::optional<std::string> omega0;
    std::optional<std::string> integrator;
    std::optional<double> dt;
    std::optional<double> eps_bar;
    std::optional<double> record_dt;
    std::string tag;
    std::string sweep;
};

lfc::ScenarioConfig resolve(const Common& c, const SimOverrides& o) {
    lfc::ScenarioConfig cfg = lfc::load_config_file(c.config);
    auto& s = cfg.sim;
    if (o.scenario) s.scenario = *o.scenario;
    if (o.controller) s.controller = *o.controller;
    if (o.horizon) s.horizon = *o.horizon;
    if (o.seed) s.seed = static_cast<std::uint64_t>(*o.seed);
    if (o.noise_std) s.noise_std = *o.noise_std;
    if (o.noise) s.noise = true;
    if (o.data) s.data_dir = *o.data;
    if (o.solution) s.approx_solution = *o.solution;
    if (o.omega0) s.omega0 = parse_list(*o.omega0);
    if (o.integrator) {
        try {
            s.integrator.method = lfc::parse_method(*o.integrator);
        } catch (const std::invalid_argument& e) {
            throw lfc::ConfigError(e.what());
        }
    }
    if (o.dt) s.integrator.dt = *o.dt;
    if (o.eps_bar) s.approx.eps_bar = *o.eps_bar;
    if (o.record_dt) s.record_dt = *o.record_dt;
    if (s.scenario < 1 || s.scenario > 3) throw lfc::ConfigError("--scenario must be 1, 2 or 3");
    if (s.noise_std < 0.0) throw lfc::ConfigError("--noise-std must be non-negative");
    lfc::finalize_config(cfg);
    return cfg;
}

int run_one(const Common& c, const lfc::ScenarioConfig& cfg, const fs::path& dir, const std::string& stem) {
    const lfc::Network net(cfg.network);
    const auto t0 = std::chrono::steady_clock::now();
    const lfc::SimTrace tr = lfc::run_scenario(net, cfg.sim);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const fs::path trace = dir / (stem + ".csv"), metrics = dir / (stem + "_metrics.txt");
    lfc::write_trace_csv(tr, trace.string());
    lfc::write_metrics(tr.metrics, metrics.string());
    for (const auto& w : tr.warnings) std::cerr << "warning: " << w << '\n';
    json extra;
    extra["warnings"] = tr.warnings;
    extra["aborted"] = tr.aborted;
    if (tr.aborted) extra["abort_reason"] = tr.abort_reason;
    extra["elapsed_seconds"] = elapsed;
    write_manifest(dir / (stem + "_manifest.json"), "simulate", c, &cfg,
                   {{"trace", trace.string()}, {"metrics", metrics.string()}}, extra);
    if (tr.aborted) {
        std::cerr << "simulation aborted: " << tr.abort_reason << '\n';
        return kNumeric;
    }
    std::printf("%s: %zu samples, max|omega| %.3e, final |e| %.3e (%.2f s)\n", stem.c_str(), tr.t.size(),
                tr.metrics.at("max_abs_omega"), tr.metrics.at("final_err_norm"), elapsed);
    return kOk;
}

int cmd_simulate(const Common& c, const SimOverrides& o) {
    const lfc::ScenarioConfig cfg = resolve(c, o);
    const fs::path dir = output_dir(c);
    const std::string stem =
        o.tag.empty() ? "scenario" + std::to_string(cfg.sim.scenario) + "_" + cfg.sim.controller : o.tag;
    if (o.sweep.empty()) return run_one(c, cfg, dir, stem);

    // one isolated run per seed, each in its own subdirectory
    const Vec seeds = parse_list(o.sweep);
    std::atomic<int> worst{kOk};
    std::atomic<Eigen::Index> next{0};
    std::mutex io;
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                             static_cast<unsigned>(seeds.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (Eigen::Index k = next++; k < seeds.size(); k = next++) {
                lfc::ScenarioConfig run = cfg;
                run.sim.seed = static_cast<std::uint64_t>(seeds[k]);
                const fs::path sub = dir / ("seed_" + std::to_string(run.sim.seed));
                fs::create_directories(sub);
                int rc;
                try {
                    rc = run_one(c, run, sub, stem);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(io);
                    std::cerr << "seed " << run.sim.seed << ": " << e.what() << '\n';
                    rc = kNumeric;
                }
                int cur = worst.load();
                while (rc > cur && !worst.compare_exchange_weak(cur, rc)) {
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    return worst.load();
}

int cmd_check(const Common& c, int scenario) {
    SimOverrides o;
    o.scenario = scenario;
    const lfc::ScenarioConfig cfg = resolve(c, o);
    const lfc::Network net(cfg.network);
    const lfc::ExoScenario exo =
        scenario == 3 ? lfc::build_scenario3_exo(cfg.sim.exo3) : lfc::build_scenario1_exo(cfg.sim.exo1);
    const Vec d_bar = exo.model.equilibrium_like(exo.d0);
    const lfc::SteadyState ss = lfc::steady_state_solve(exo.model.output(d_bar), net);
    const lfc::HyperbolicityReport r = lfc::hyperbolicity_check(net, exo.model, d_bar, ss.state);

    std::ostringstream rep;
    rep << "equilibrium residual " << fmt(ss.residual) << ", secure " << (ss.security.secure ? "yes" : "no") << '\n';
    rep << "A11 eigenvalues:";
    for (Eigen::Index i = 0; i < r.eig_A11.size(); ++i) rep << ' ' << fmt(r.eig_A11[i].real()) << (r.eig_A11[i].imag() >= 0 ? "+" : "") << fmt(r.eig_A11[i].imag()) << 'i';
    rep << "\nA11 margin (min |Re|) " << fmt(r.a11_margin) << '\n';
    rep << "A33 symmetric-part eigenvalues:";
    for (Eigen::Index i = 0; i < r.eig_A33_sym.size(); ++i) rep << ' ' << fmt(r.eig_A33_sym[i]);
    rep << "\nA33 negative definite " << (r.a33_negative_definite ? "yes" : "no") << '\n';
    rep << "min |det| over rho grid " << fmt(r.min_abs_det) << " at rho " << fmt(r.rho_at_min_det) << " ("
        << r.grid_points << " points, " << r.refinements << " refinements)\n";
    rep << "min singular value of the Schur complement " << fmt(r.min_sigma) << " at rho " << fmt(r.rho_at_min_sigma) << '\n';
    rep << "full Jacobian eigenvalues:";
    for (Eigen::Index i = 0; i < r.eig_full.size(); ++i) rep << ' ' << fmt(r.eig_full[i].real());
    rep << "\nnear-zero eigenvalues " << r.near_zero << " (threshold " << fmt(r.threshold) << ")\n";
    rep << "hyperbolic modulo the equilibrium family " << (r.hyperbolic_modulo_family ? "yes" : "no") << '\n';
    for (const auto& n : r.notes) rep << "note: " << n << '\n';
    rep << "solvability conditions " << (r.passes ? "hold" : "FAIL") << '\n';
    std::cout << rep.str();

    const fs::path dir = output_dir(c);
    const fs::path report = dir / "solvability.txt";
    std::ofstream(report) << rep.str();
    write_manifest(dir / "solvability_manifest.json", "check-solvability", c, &cfg, {{"report", report.string()}},
                   {{"passes", r.passes}, {"hyperbolic_modulo_family", r.hyperbolic_modulo_family}});
    return r.passes ? kOk : kSolvability;
}

int cmd_solve_approx(const Common& c, const SimOverrides& o, const std::string& init, std::optional<int> max_iter,
                     const std::string& name) {
    lfc::ScenarioConfig cfg = resolve(c, o);
    if (max_iter) cfg.sim.approx.max_iter = *max_iter;
    const lfc::Network net(cfg.network);
    const lfc::ScenarioSetup setup = lfc::prepare_scenario(net, cfg.sim);
    const auto& a = cfg.sim.approx;
    lfc::PenaltyProblem problem(net, setup.exo.model, setup.exo.d0, lfc::PhaseBasis(setup.exo.model, a.order), a,
                                setup.pre_switch.state);
    Mat U0;
    if (!init.empty()) {
        const lfc::ApproxSolution prev = lfc::load_solution(init);
        if (!prev.basis.compatible(setup.exo.model) || prev.basis.order() != a.order ||
            prev.u_coef.rows() != net.n()) {
            throw lfc::ConfigError("initial solution '" + init + "' does not match this scenario and basis");
        }
        U0 = prev.u_coef;
    } else {
        U0 = problem.classical_initialization(setup.pre_switch.state);
    }
    const auto t0 = std::chrono::steady_clock::now();
    const lfc::ApproxSolution sol = lfc::penalty_descent(problem, U0, a.eps_bar, a.max_iter, a.stall_iters);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = output_dir(c);
    const std::string stem = name.empty() ? "approx_scenario" + std::to_string(cfg.sim.scenario) : name;
    const fs::path solution = dir / (stem + ".json"), log = dir / (stem + "_penalty.csv");
    lfc::save_solution(sol, solution.string());
    {
        std::ofstream out(log);
        out << "accepted_step,penalty\n";
        for (std::size_t k = 0; k < sol.penalty_log.size(); ++k) out << k << ',' << fmt(sol.penalty_log[k]) << '\n';
    }
    write_manifest(dir / (stem + "_manifest.json"), "solve-approx", c, &cfg,
                   {{"solution", solution.string()}, {"penalty_log", log.string()}},
                   {{"status", sol.status}, {"penalty", sol.penalty}, {"iterations", sol.iterations},
                    {"invariance_residual", sol.invariance_residual}, {"elapsed_seconds", elapsed},
                    {"initial_solution", init}});
    std::printf("%s: penalty %.6e after %d iterations (%s), invariance residual %.3e (%.1f s)\n", stem.c_str(),
                sol.penalty, sol.iterations, sol.status.c_str(), sol.invariance_residual, elapsed);
    if (sol.status == "converged" || sol.status == "skipped") return kOk;
    std::cerr << "penalty descent did not reach eps_bar; best solution written to " << solution << '\n';
    return kStall;
}

int cmd_dispatch(const Common& c, const std::string& pd, const SimOverrides& o, double step) {
    const lfc::ScenarioConfig cfg = resolve(c, o);
    const lfc::Network net(cfg.network);
    const int n = net.n();
    const fs::path dir = output_dir(c);
    const fs::path table = dir / "dispatch.csv";
    std::ofstream out(table);
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",Pd_" << i;
    for (int i = 1; i <= n; ++i) out << ",Pc_opt_" << i;
    out << ",cost\n";
    auto row = [&](double t, const Vec& P) {
        const Vec Pc = lfc::optimal_dispatch(P, net.cost());
        out << fmt(t);
        for (int i = 0; i < n; ++i) out << ',' << fmt(P[i]);
        for (int i = 0; i < n; ++i) out << ',' << fmt(Pc[i]);
        out << ',' << fmt(lfc::generation_cost(Pc, net.cost())) << '\n';
    };
    if (!pd.empty()) {
        const Vec P = parse_list(pd);
        if (P.size() != n) throw lfc::ConfigError("--pd needs one value per area");
        row(0.0, P);
        std::cout << "P_c^opt = " << lfc::optimal_dispatch(P, net.cost()).transpose() << '\n';
    } else {
        if (!(step > 0.0)) throw lfc::ConfigError("--step must be positive");
        const lfc::ScenarioSetup setup = lfc::prepare_scenario(net, cfg.sim);
        std::vector<double> d(setup.exo.d0.data(), setup.exo.d0.data() + setup.exo.d0.size());
        lfc::IntegratorOptions io;
        io.dt = std::min(1e-2, step);
        lfc::integrate([&](const double* z, double* dz, double) { setup.exo.model.derivative_flat(z, dz); }, d, 0.0,
                       cfg.sim.horizon, io,
                       [&](double t, const double* z) {
                           row(t, setup.plant_injection(t, Eigen::Map<const Vec>(z, setup.exo.d0.size())));
                       },
                       step);
        for (const auto& w : setup.warnings) std::cerr << "warning: " << w << '\n';
    }
    write_manifest(dir / "dispatch_manifest.json", "dispatch", c, &cfg, {{"table", table.string()}}, json::object());
    std::cout << "dispatch table written to " << table.string() << '\n';
    return kOk;
}

int cmd_fit(const Common& c, const std::vector<std::string>& files, const std::string& units, double compression,
            int K) {
    const lfc::ScenarioConfig cfg = resolve(c, {});
    lfc::PowerUnits u;
    if (units == "MW" || units == "mw") u = lfc::PowerUnits::MW;
    else if (units == "pu") u = lfc::PowerUnits::PerUnit;
    else throw lfc::ConfigError("--units must be MW or pu");
    const fs::path dir = output_dir(c);
    const fs::path frag = dir / "fit.ini";
    std::ofstream out(frag);
    out << "[exo.scenario3]\n";
    json fits = json::array();
    for (const auto& f : files) {
        const lfc::Profile p = lfc::read_profile_csv(f, u, cfg.network.S_base, compression);
        const lfc::SinusoidFit fit = lfc::fit_sinusoid_bank(p.t, p.value, K);
        std::string key = fs::path(f).stem().string();
        // area3_load -> load_3
        const auto us = key.find('_');
        if (key.rfind("area", 0) == 0 && us != std::string::npos) key = key.substr(us + 1) + "_" + key.substr(4, us - 4);
        std::string bank = fmt(fit.params.offset);
        for (const auto& t : fit.params.terms) bank += " | " + fmt(t.amplitude) + " " + fmt(t.rate) + " " + fmt(t.phase);
        out << key << " = " << bank << '\n';
        std::printf("%s = %s   # rms %.3e, condition %.3e\n", key.c_str(), bank.c_str(), fit.rms, fit.condition);
        fits.push_back({{"file", f}, {"key", key}, {"rms", fit.rms}, {"condition", fit.condition}});
    }
    write_manifest(dir / "fit_manifest.json", "fit-exo", c, &cfg, {{"fragment", frag.string()}},
                   {{"fits", fits}, {"units", units}, {"time_compression", compression}, {"components", K}});
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Load-frequency control: simulation, regulator synthesis and checks"};
    app.fallthrough();
    app.require_subcommand(1);
    Common common;
    common.config = default_config();
    common.argv.assign(argv, argv + argc);
    app.add_option("-c,--config", common.config, "Scenario configuration file")->check(CLI::ExistingFile);
    app.add_option("-o,--output", common.output, "Output directory (default $LFC_OUTPUT_DIR or ./lfc_out)");

    SimOverrides sim;
    auto add_common_sim = [&](CLI::App* sub, bool full) {
        sub->add_option("--scenario", sim.scenario, "Scenario 1, 2 or 3");
        if (!full) return;
        sub->add_option("--controller", sim.controller, "classical | approx | droop");
        sub->add_option("--horizon", sim.horizon, "Simulated time in seconds");
        sub->add_option("--seed", sim.seed, "Noise seed");
        sub->add_option("--noise-std", sim.noise_std, "Measurement noise std (p.u.)");
        sub->add_flag("--noise", sim.noise, "Enable measurement noise");
        sub->add_option("--data", sim.data, "Directory with area<i>_load.csv / area<i>_wind.csv");
        sub->add_option("--solution", sim.solution, "Approximate-regulator solution file");
        sub->add_option("--omega0", sim.omega0, "Initial frequency deviations, comma separated");
        sub->add_option("--integrator", sim.integrator, "rk4 | dopri5");
        sub->add_option("--dt", sim.dt, "Integrator step");
        sub->add_option("--record-dt", sim.record_dt, "Trace sampling interval");
        sub->add_option("--eps-bar", sim.eps_bar, "Penalty target when solving on the fly");
    };

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write trace, metrics and manifest");
    add_common_sim(simulate, true);
    simulate->add_option("--tag", sim.tag, "File stem for the outputs");
    simulate->add_option("--sweep", sim.sweep, "Comma-separated seeds, run concurrently into seed_<k>/");

    int check_scenario = 1;
    auto* check = app.add_subcommand("check-solvability", "Zero-dynamics hyperbolicity conditions at equilibrium");
    check->add_option("--scenario", check_scenario, "Exosystem whose equilibrium is used (1 or 3)");

    std::string init, name;
    std::optional<int> max_iter;
    auto* solve = app.add_subcommand("solve-approx", "Penalty descent for the approximate regulator");
    add_common_sim(solve, false);
    solve->add_option("--eps-bar", sim.eps_bar, "Penalty target (inf skips the descent)");
    solve->add_option("--max-iter", max_iter, "Iteration budget");
    solve->add_option("--init", init, "Start from a saved solution")->check(CLI::ExistingFile);
    solve->add_option("--name", name, "File stem for the outputs");

    std::string pd;
    double step = 1.0;
    auto* dispatch = app.add_subcommand("dispatch", "Optimal dispatch for given or scenario injections");
    dispatch->add_option("--pd", pd, "Uncontrolled injections, comma separated");
    dispatch->add_option("--scenario", sim.scenario, "Tabulate along a scenario's injections");
    dispatch->add_option("--horizon", sim.horizon, "Table length in seconds");
    dispatch->add_option("--step", step, "Table spacing in seconds");
    dispatch->add_option("--data", sim.data, "Scenario-3 data directory");

    std::vector<std::string> files;
    std::string units = "MW";
    double compression = 144.0;
    int K = 2;
    auto* fit = app.add_subcommand("fit-exo", "Fit sinusoid banks to injection profiles");
    fit->add_option("files", files, "Profile CSV files (t, P)")->required()->check(CLI::ExistingFile);
    fit->add_option("--units", units, "MW or pu");
    fit->add_option("--compression", compression, "Time compression factor");
    fit->add_option("-K,--components", K, "Sinusoids per bank");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*simulate) return cmd_simulate(common, sim);
        if (*check) return cmd_check(common, check_scenario);
        if (*solve) return cmd_solve_approx(common, sim, init, max_iter, name);
        if (*dispatch) return cmd_dispatch(common, pd, sim, step);
        if (*fit) return cmd_fit(common, files, units, compression, K);
    } catch (const lfc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const lfc::FitError& e) {
        std::cerr << "fit failed: " << e.what() << '\n';
        return kNumeric;
    } catch (const lfc::ConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const lfc::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kNumeric;
    } catch (const lfc::DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
