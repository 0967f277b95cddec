#include "catch_amalgamated.hpp"

#include "lfc/approx.hpp"
#include "lfc/regulator.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

using namespace lfc;

namespace {

ApproxOptions short_opts() {
    ApproxOptions o;
    o.t_trans = 20.0;
    o.t_avg = 20.0;
    o.dt = 0.01;
    o.node_dt = 0.04;
    return o;
}

// Four areas with constant wind and load only.
ExoModel constant_exo(Vec& d) {
    ExoModel m(4);
    d = Vec::Zero(m.dim());
    const double wind[] = {0.105, 0.104, 0.106, 0.1045};
    const double load[] = {0.31, 0.366, 0.278, 0.342};
    for (int i = 0; i < 4; ++i) {
        d[m.constant_index(i)] = wind[i];
        d[m.constant_index(i) + 1] = load[i];
    }
    return m;
}

struct Scenario1Fixture {
    Network net{benchmark_params()};
    ExoScenario exo = build_scenario1_exo(scenario1_defaults());
    SteadyState ss = steady_state_solve(exo.model.output(exo.d0), net);
};

}  // namespace

TEST_CASE("extended output and tracking error", "[approx]") {
    const Network net(benchmark_params());
    GridState x = GridState::zeros(net);
    x.omega << 0.1, 0.0, 0.0, 0.0;
    Vec P_d(4);
    P_d << -0.2, -0.25, -0.15, -0.2;
    x.P_c = optimal_dispatch(P_d, net.cost());
    const Vec q = extended_output(x);
    REQUIRE(q.size() == 8);
    CHECK(q[0] == 0.1);
    const TrackingError te = tracking_error(x, P_d, net.cost());
    CHECK(te.norm == Catch::Approx(0.1));
    CHECK(te.e.tail(4).norm() < 1e-15);
}

TEST_CASE("phase groups of the scenario 1 exosystem", "[approx]") {
    const ExoScenario exo = build_scenario1_exo(scenario1_defaults());
    const auto groups = phase_groups(exo.model);
    REQUIRE(groups.size() == 5);
    int winds = 0;
    for (const auto& g : groups) {
        if (g.wind) {
            ++winds;
            CHECK(g.blocks.size() == 1);
        } else {
            CHECK(g.blocks.size() == 4);
            CHECK(g.rate == Catch::Approx(0.41887902047863906));
        }
    }
    CHECK(winds == 4);
    const PhaseBasis b(exo.model, 1);
    CHECK(b.size() == 11);
    CHECK(b.compatible(exo.model));
    const Vec phi = b.eval(exo.model, exo.d0);
    CHECK(phi[0] == 1.0);
    for (int k = 0; k < 5; ++k) CHECK(std::hypot(phi[1 + 2 * k], phi[2 + 2 * k]) == Catch::Approx(1.0));
    CHECK_FALSE(b.compatible(build_scenario3_exo(scenario3_defaults()).model));
}

TEST_CASE("rotation phase advances at the block rate", "[approx][property]") {
    ExoModel m(1);
    const int bi = m.add_rotation(0, Channel::Load, 0.5, 1.0, 0.0);
    const ExoBlock& b = m.blocks()[static_cast<std::size_t>(bi)];
    for (double t : {0.0, 0.7, 2.0, 5.5}) {
        double d[4] = {0.0, 0.0, std::cos(0.5 * t), -std::sin(0.5 * t)};
        CHECK(std::remainder(block_phase(b, d) - 0.5 * t, 2 * M_PI) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("constant offset penalty equals its square", "[approx][oracle]") {
    Scenario1Fixture f;
    const PenaltyProblem p(f.net, f.exo.model, f.exo.d0, PhaseBasis(f.exo.model, 1), short_opts(), f.ss.state);
    double wsum = 0.0;
    for (double w : p.weights()) wsum += w;
    CHECK(wsum == Catch::Approx(1.0).epsilon(1e-12));
    std::vector<Vec> xs;
    const double c = 3e-3;
    for (const Vec& d : p.node_d()) {
        GridState x = f.ss.state;
        x.P_c = optimal_dispatch(f.exo.model.output(d), f.net.cost());
        x.omega.setConstant(c);
        xs.push_back(x.pack());
    }
    CHECK(p.residual_from_states(xs).squaredNorm() == Catch::Approx(4 * c * c).epsilon(1e-12));
}

TEST_CASE("constant injections reach exact regulation", "[approx][oracle]") {
    const Network net(benchmark_params());
    Vec d;
    const ExoModel m = constant_exo(d);
    const SteadyState ss = steady_state_solve(m.output(d), net);
    const PenaltyProblem p(net, m, d, PhaseBasis(m, 1), short_opts(), ss.state);
    REQUIRE(p.is_constant());
    REQUIRE(p.n_params() == 4);
    const ApproxSolution sol = penalty_descent(p, Mat::Zero(4, 1), 0.0, 50);
    CHECK(std::sqrt(sol.penalty) < 1e-9);
    const auto xs = p.solve_invariance(sol.u_coef);
    const GridState x = GridState::unpack(xs.front(), net);
    CHECK(tracking_error(x, m.output(d), net.cost()).norm < 1e-9);
    // the classical manifold is already optimal for constant injections
    CHECK(std::sqrt(p.penalty(p.classical_initialization(ss.state))) < 1e-8);
}

TEST_CASE("penalty descent on the scenario 1 orbit", "[approx][property]") {
    Scenario1Fixture f;
    const PenaltyProblem p(f.net, f.exo.model, f.exo.d0, PhaseBasis(f.exo.model, 1), short_opts(), f.ss.state);
    const Mat U0 = p.classical_initialization(f.ss.state);

    SECTION("eps_bar = inf returns the initialization") {
        const ApproxSolution s = penalty_descent(p, U0, std::numeric_limits<double>::infinity(), 100);
        CHECK(s.status == "skipped");
        CHECK(s.iterations == 0);
        CHECK(s.u_coef == U0);
    }
    SECTION("penalty log is non-increasing") {
        const ApproxSolution s = penalty_descent(p, U0, 0.0, 3, 2);
        REQUIRE(s.penalty_log.size() >= 2);
        for (std::size_t k = 1; k < s.penalty_log.size(); ++k) CHECK(s.penalty_log[k] <= s.penalty_log[k - 1]);
        CHECK(s.penalty < s.penalty_log.front());
        // restarting from the result does not move it
        const ApproxSolution again = penalty_descent(p, s.u_coef, s.penalty * 1.0000001, 10);
        CHECK(again.iterations == 0);
        CHECK(again.u_coef == s.u_coef);
    }
    SECTION("Jacobian agrees with a secant of the penalty") {
        const Vec r = p.residual(U0);
        const Mat J = p.jacobian(U0);
        Mat dir = Mat::Zero(U0.rows(), U0.cols());
        for (Eigen::Index k = 0; k < dir.size(); ++k) dir.data()[k] = std::sin(1.0 + 0.37 * static_cast<double>(k));
        dir *= 1e-4 / dir.norm();
        const double secant = (p.penalty(U0 + dir) - p.penalty(U0 - dir)) / 2.0;
        const double linear = 2.0 * r.dot(J * Eigen::Map<const Vec>(dir.data(), dir.size()));
        CHECK(std::abs(secant - linear) <= 1e-4 * std::abs(linear));
    }
}

TEST_CASE("penalty is stable under quadrature refinement", "[approx][property]") {
    Scenario1Fixture f;
    ApproxOptions coarse = short_opts(), fine = short_opts();
    fine.dt = 0.005;
    fine.node_dt = 0.02;
    const PenaltyProblem pc(f.net, f.exo.model, f.exo.d0, PhaseBasis(f.exo.model, 1), coarse, f.ss.state);
    const PenaltyProblem pf(f.net, f.exo.model, f.exo.d0, PhaseBasis(f.exo.model, 1), fine, f.ss.state);
    const Mat U0 = pc.classical_initialization(f.ss.state);
    const double a = pc.penalty(U0), b = pf.penalty(U0);
    CHECK(std::abs(a - b) <= 0.02 * b);
    CHECK(pc.invariance_residual(U0, 50) < 1e-6);

    ApproxOptions bad = short_opts();
    bad.node_dt = 0.035;
    CHECK_THROWS(PenaltyProblem(f.net, f.exo.model, f.exo.d0, PhaseBasis(f.exo.model, 1), bad, f.ss.state));
}

TEST_CASE("solution files round-trip", "[approx]") {
    const ExoScenario exo = build_scenario1_exo(scenario1_defaults());
    ApproxSolution s;
    s.basis = PhaseBasis(exo.model, 1);
    s.u_coef = Mat::Random(4, 11);
    s.x_coef = Mat::Random(20, 11);
    s.penalty = 5.49e-8;
    s.eps_bar = std::numeric_limits<double>::infinity();
    s.penalty_log = {1e-4, 5.49e-8};
    s.iterations = 1;
    s.status = "skipped";
    s.invariance_residual = 2.4e-9;
    const auto path = (std::filesystem::temp_directory_path() / "lfc_sol_roundtrip.json").string();
    save_solution(s, path);
    const ApproxSolution t = load_solution(path);
    CHECK(t.u_coef == s.u_coef);
    CHECK(t.x_coef == s.x_coef);
    CHECK(std::isinf(t.eps_bar));
    CHECK(t.penalty == s.penalty);
    CHECK(t.penalty_log == s.penalty_log);
    CHECK(t.status == s.status);
    CHECK(t.basis.size() == 11);
    CHECK(t.basis.compatible(exo.model));
    CHECK_THROWS(load_solution("/nonexistent/sol.json"));
}
