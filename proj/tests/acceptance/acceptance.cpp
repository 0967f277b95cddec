// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 when every
// criterion was evaluated, whatever its verdict; 1 if an evaluation itself broke.

#include "lfc/approx.hpp"
#include "lfc/regulator.hpp"
#include "lfc/simulation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace lfc;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_omega_after(const SimTrace& tr, double t_from) {
    double w = 0.0;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        if (tr.t[k] > t_from) w = std::max(w, tr.x[k].segment(tr.m, tr.n).lpNorm<Eigen::Infinity>());
    }
    return w;
}

SimConfig scenario(int s, const std::string& controller) {
    SimConfig c;
    c.scenario = s;
    c.controller = controller;
    c.horizon = default_horizon(s);
    c.data_dir = std::string(LFC_SOURCE_DIR) + "/data/scenario3";
    return c;
}

struct Shared {
    Network net{benchmark_params()};
    ApproxSolution approx1;  // scenario 1, eps_bar = 1e-7
    bool have_approx = false;
};

Verdict criterion1(Shared& s) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimTrace tr = run_scenario(s.net, scenario(1, "classical"));
    const double wall = seconds_since(t0);
    const double w60 = tr.metrics.at("max_abs_omega_after_60s");
    return {!tr.aborted && w60 < 1e-3 && wall < 60.0,
            "max|omega| after 60 s " + num(w60) + " (< 1e-3), runtime " + num(wall) + " s (< 60)"};
}

Verdict criterion2(Shared& s) {
    SimConfig c = scenario(1, "approx");
    c.approx.eps_bar = 1e-7;
    const ScenarioSetup setup = prepare_scenario(s.net, c);
    s.approx1 = solve_scenario_approx(s.net, setup, c.approx);
    s.have_approx = true;
    const SimTrace tr = run_scenario(s.net, c, &s.approx1);
    const double t3 = tr.metrics.at("time_to_err_1e-3"), t6 = tr.metrics.at("time_to_err_1e-6");
    const bool ok = !tr.aborted && s.approx1.penalty <= 1e-7 && t3 <= 20.0 && t6 <= 110.0;
    return {ok, "penalty " + num(s.approx1.penalty) + " (" + s.approx1.status + "), |e| < 1e-3 from t = " + num(t3) +
                    " s (<= 20), |e| < 1e-6 from t = " + num(t6) + " s (<= 110), final |e| " +
                    num(tr.metrics.at("final_err_norm"))};
}

Vec kkt_oracle(const Vec& P_d, const CostModel& c) {
    const int n = static_cast<int>(P_d.size());
    Mat K = Mat::Zero(n + 1, n + 1);
    Vec b(n + 1);
    K.topLeftCorner(n, n) = 2.0 * c.q.asDiagonal();
    K.block(0, n, n, 1).setOnes();
    K.block(n, 0, 1, n).setOnes();
    b.head(n) = -c.r;
    b[n] = -P_d.sum();
    return K.fullPivLu().solve(b).head(n);
}

Verdict criterion3(Shared& s) {
    const auto cfg1 = scenario1_defaults();
    ScenarioSetup setup;
    setup.exo.model = ExoModel(4);
    setup.exo.d0 = Vec::Zero(setup.exo.model.dim());
    for (int i = 0; i < 4; ++i) {
        setup.exo.d0[setup.exo.model.constant_index(i)] = cfg1.wind_base[i] + cfg1.wind_offset[i];
        setup.exo.d0[setup.exo.model.constant_index(i) + 1] = cfg1.load_base[i];
    }
    setup.load_profile.assign(4, std::nullopt);
    setup.wind_profile.assign(4, std::nullopt);
    const Vec P_d = setup.exo.model.output(setup.exo.d0);
    setup.pre_switch = steady_state_solve(P_d, s.net);
    // start from the optimum of a 10% heavier load
    Vec P_before = P_d;
    for (int i = 0; i < 4; ++i) P_before[i] -= 0.1 * cfg1.load_base[i];
    setup.x0 = steady_state_solve(P_before, s.net).state;

    SimConfig c;
    c.scenario = 1;
    c.horizon = 200.0;
    ApproxOptions o;
    o.eps_bar = 0.0;
    const PenaltyProblem problem(s.net, setup.exo.model, setup.exo.d0, PhaseBasis(setup.exo.model, 1), o,
                                 setup.pre_switch.state);
    const ApproxSolution sol =
        penalty_descent(problem, problem.classical_initialization(setup.pre_switch.state), 0.0, o.max_iter);
    ApproxController ctrl(s.net, setup.exo.model, sol);
    const SimTrace tr = simulate(s.net, c, setup, ctrl);
    const double pe = tr.metrics.at("terminal_abs_Pe");

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uq(0.1, 3.0), ur(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        CostModel cm;
        cm.q.resize(4);
        cm.r.resize(4);
        cm.c = Vec::Zero(4);
        Vec pd(4);
        for (int i = 0; i < 4; ++i) {
            cm.q[i] = uq(rng);
            cm.r[i] = ur(rng);
            pd[i] = ur(rng);
        }
        worst = std::max(worst, (optimal_dispatch(pd, cm) - kkt_oracle(pd, cm)).lpNorm<Eigen::Infinity>());
    }
    return {!tr.aborted && pe < 1e-6 && worst < 1e-8,
            "|P_c - P_opt| at 200 s " + num(pe) + " (< 1e-6), penalty " + num(sol.penalty) +
                ", dispatch vs QP oracle on 100 instances " + num(worst) + " (< 1e-8)"};
}

Verdict criterion4(Shared& s) {
    Vec w0(4);
    w0 << 0.05, 0.02, 0.09, 0.11;
    std::string detail;
    bool ok = true;
    for (const std::string ctl : {"classical", "approx"}) {
        SimConfig c = scenario(1, ctl);
        c.omega0 = w0;
        const SimTrace tr = run_scenario(s.net, c, s.have_approx ? &s.approx1 : nullptr);
        const double settle = tr.metrics.at("settling_time");
        const bool pass = !tr.aborted && std::isfinite(settle);
        ok = ok && pass;
        if (!detail.empty()) detail += "; ";
        detail += ctl + (tr.aborted ? " aborted (" + tr.abort_reason + ")" : " |omega| < 1e-3 from t = " + num(settle) + " s");
    }
    return {ok, detail};
}

Verdict criterion5(Shared& s) {
    SimConfig c = scenario(2, "classical");
    c.noise_std = 1e-3;
    const ScenarioSetup setup = prepare_scenario(s.net, c);
    const SimTrace tr = run_scenario(s.net, c);
    const Vec& Vn = setup.pre_switch.state.V;
    double dev = 0.0;
    for (const Vec& x : tr.x) {
        dev = std::max(dev, (x.segment(tr.m + tr.n, tr.n) - Vn).cwiseQuotient(Vn).lpNorm<Eigen::Infinity>());
    }
    const double mean = tr.metrics.at("mean_abs_omega_final_50s");
    return {!tr.aborted && mean < 5e-3 && dev < 0.1,
            "mean|omega| over final 50 s " + num(mean) + " (< 5e-3), max relative voltage deviation " + num(dev) +
                " (< 0.1)"};
}

Verdict criterion6(Shared& s) {
    const SimConfig c = scenario(3, "classical");
    const SimTrace tr = run_scenario(s.net, c);
    const double w60 = max_omega_after(tr, 60.0), w_half = max_omega_after(tr, 0.5 * c.horizon);
    std::string detail = "max|omega| after 60 s " + num(w60) + " (< 5e-3), over the second half " + num(w_half);
    if (!tr.warnings.empty()) detail += ", " + std::to_string(tr.warnings.size()) + " warning(s)";
    return {!tr.aborted && w60 < 5e-3, detail};
}

Verdict criterion7(Shared& s) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rnd = [&](int n, double lo, double hi) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = lo + 0.5 * (u(rng) + 1.0) * (hi - lo);
        return v;
    };
    std::vector<LieSample> samples;
    for (int k = 0; k < 50; ++k) {
        LieSample ls;
        ls.x = {rnd(4, -0.5, 0.5), rnd(4, -0.05, 0.05), rnd(4, 0.3, 0.7), rnd(4, -0.5, 0.5), rnd(4, -0.5, 0.5)};
        ls.P_d = rnd(4, -0.4, 0.4);
        samples.push_back(ls);
    }
    const LieReport lie = lie_relative_degree_check(s.net, samples);
    const bool lie_ok = lie.max_abs_Lg_h == 0.0 && lie.max_dev_LgLf_h < 1e-6;

    double min_eig = INFINITY;
    for (int k = 0; k < 1000; ++k) {
        const Mat E = e_matrix(rnd(4, -M_PI, M_PI), s.net);
        min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Mat>(E).eigenvalues().minCoeff());
    }
    const bool e_ok = min_eig > 0.0;

    const ExoScenario exo = build_scenario1_exo(scenario1_defaults());
    const Vec d_bar = exo.model.equilibrium_like(exo.d0);
    const SteadyState ss = steady_state_solve(exo.model.output(d_bar), s.net);
    const HyperbolicityReport hyp = hyperbolicity_check(s.net, exo.model, d_bar, ss.state);

    const ScenarioSetup setup = prepare_scenario(s.net, scenario(1, "approx"));
    const ApproxOptions opts;
    const PenaltyProblem problem(s.net, setup.exo.model, setup.exo.d0, PhaseBasis(setup.exo.model, opts.order), opts,
                                 setup.pre_switch.state);
    const Mat U = s.have_approx ? s.approx1.u_coef : problem.classical_initialization(setup.pre_switch.state);
    const double inv = problem.invariance_residual(U, 100);

    bool mono = s.have_approx && s.approx1.penalty_log.size() >= 1;
    if (s.have_approx) {
        for (std::size_t k = 1; k < s.approx1.penalty_log.size(); ++k) {
            mono = mono && s.approx1.penalty_log[k] <= s.approx1.penalty_log[k - 1];
        }
    }

    const Mat U0 = problem.classical_initialization(setup.pre_switch.state);
    const Vec r = problem.residual(U0);
    const Mat J = problem.jacobian(U0);
    Mat dir(U0.rows(), U0.cols());
    for (Eigen::Index k = 0; k < dir.size(); ++k) dir.data()[k] = u(rng);
    dir *= 1e-4 / dir.norm();
    const double secant = (problem.penalty(U0 + dir) - problem.penalty(U0 - dir)) / 2.0;
    const double linear = 2.0 * r.dot(J * Eigen::Map<const Vec>(dir.data(), dir.size()));
    const double grad_rel = std::abs(secant - linear) / std::abs(linear);
    const bool grad_ok = grad_rel <= 1e-4;

    auto tag = [](bool b) { return b ? "ok" : "FAILED"; };
    const bool ok = lie_ok && e_ok && hyp.passes && inv < 1e-8 && mono && grad_ok;
    std::string detail = std::string("Lie ") + tag(lie_ok) + " (Lg h " + num(lie.max_abs_Lg_h) + ", LgLf h dev " +
                         num(lie.max_dev_LgLf_h) + "); E(theta) " + tag(e_ok) + " (min eig " + num(min_eig) +
                         "); solvability " + tag(hyp.passes) + " (" + std::to_string(hyp.near_zero) +
                         " eigenvalues on the imaginary axis, min sigma " + num(hyp.min_sigma) +
                         (hyp.hyperbolic_modulo_family ? ", hyperbolic modulo the equilibrium family" : "") +
                         "); invariance residual " + num(inv) + " " + tag(inv < 1e-8) + "; penalty monotone " +
                         tag(mono) + "; gradient vs secant " + num(grad_rel) + " " + tag(grad_ok);
    return {ok, detail};
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict criterion8(Shared& s) {
    const fs::path dir = fs::temp_directory_path() / "lfc_acceptance_determinism";
    fs::create_directories(dir);
    SimConfig c = scenario(2, "classical");
    c.seed = 12345;
    std::vector<std::string> files;
    for (int k = 0; k < 2; ++k) {
        const SimTrace tr = run_scenario(s.net, c);
        files.push_back((dir / ("run" + std::to_string(k) + ".csv")).string());
        write_trace_csv(tr, files.back());
    }
    const std::string a = slurp(files[0]), b = slurp(files[1]);
    fs::remove_all(dir);
    return {!a.empty() && a == b, "two noisy scenario-2 runs with seed 12345: " + std::to_string(a.size()) +
                                      " bytes, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main() {
    Shared shared;
    const std::vector<std::function<Verdict(Shared&)>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                                criterion5, criterion6, criterion7, criterion8};
    int passed = 0, broken = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Verdict v;
        try {
            v = criteria[k](shared);
        } catch (const std::exception& e) {
            v = {false, std::string("evaluation error: ") + e.what()};
            ++broken;
        }
        passed += v.pass;
        std::printf("criterion %zu: %s  %s\n", k + 1, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria pass\n", passed, criteria.size());
    return broken == 0 ? 0 : 1;
}
