#include "catch_amalgamated.hpp"

#include "lfc/regulator.hpp"

#include <cmath>
#include <random>

using namespace lfc;

namespace {

Vec uniform(int n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

Vec balanced_dispatch(const Vec& P_d, std::mt19937_64& rng) {
    Vec P_c = uniform(static_cast<int>(P_d.size()), 0.1, 0.4, rng);
    P_c.array() -= (P_c + P_d).mean();
    return P_c;
}

// omega-dot along the flow of (x, d) with input u.
Vec omega_dot(const GridState& x, const Vec& d, const Vec& u, const ExoModel& exo, const Network& net) {
    return dynamics_rhs(x, exo.output(d), u, net).omega;
}

}  // namespace

TEST_CASE("relative degree two in every channel", "[regulator][oracle]") {
    const Network net(benchmark_params());
    std::mt19937_64 rng(1);
    std::vector<LieSample> samples;
    for (int k = 0; k < 25; ++k) {
        LieSample s;
        s.x.theta = uniform(4, -0.5, 0.5, rng);
        s.x.omega = uniform(4, -0.05, 0.05, rng);
        s.x.V = uniform(4, 0.3, 0.7, rng);
        s.x.P_c = uniform(4, -0.5, 0.5, rng);
        s.x.delta = uniform(4, -0.5, 0.5, rng);
        s.P_d = uniform(4, -0.4, 0.4, rng);
        samples.push_back(s);
    }
    const LieReport r = lie_relative_degree_check(net, samples);
    CHECK(r.max_abs_Lg_h == 0.0);
    CHECK(r.max_dev_LgLf_h < 1e-7);
    CHECK(r.LgLf_h.determinant() != 0.0);
}

TEST_CASE("feasible angles solve the balance equation", "[regulator][property]") {
    const Network net(benchmark_params());
    std::mt19937_64 rng(9);
    for (int k = 0; k < 50; ++k) {
        const Vec P_d = uniform(4, -0.4, 0.1, rng);
        const Vec P_c = balanced_dispatch(P_d, rng);
        const Vec V = uniform(4, 0.35, 0.55, rng);
        const FeasibleAngles fa = solve_feasible_angles(P_c, V, P_d, net);
        CHECK(fa.residual < 1e-10);
        CHECK((net.incidence().transpose() * fa.phi - fa.theta).norm() < 1e-12);
    }
    Vec P_d = Vec::Constant(4, -0.2), P_c = Vec::Constant(4, 0.3);
    CHECK_THROWS_AS(solve_feasible_angles(P_c, Vec::Constant(4, 0.45), P_d, net), std::invalid_argument);
}

TEST_CASE("equivalent control keeps omega at rest to second order", "[regulator][oracle]") {
    const Network net(benchmark_params());
    const ExoScenario exo = build_scenario1_exo(scenario1_defaults());
    std::mt19937_64 rng(21);
    for (int k = 0; k < 20; ++k) {
        const Vec& d = exo.d0;
        const Vec P_d = exo.model.output(d);
        Vec xb(12);
        xb << uniform(4, 0.38, 0.5, rng), balanced_dispatch(P_d, rng), uniform(4, -0.3, 0.3, rng);
        const ManifoldPoint mp = manifold_point(xb, d, exo.model, net);
        const GridState x = mp.state();

        CHECK(omega_dot(x, d, mp.u, exo.model, net).lpNorm<Eigen::Infinity>() < 1e-12);

        auto second = [&](const Vec& u) {
            const Vec xs = x.pack(), dx = dynamics_rhs(x, P_d, u, net).pack();
            const Vec dd = exo.model.derivative(d);
            const double h = 1e-5;
            const Vec up = omega_dot(GridState::unpack(xs + h * dx, net), d + h * dd, u, exo.model, net);
            const Vec dn = omega_dot(GridState::unpack(xs - h * dx, net), d - h * dd, u, exo.model, net);
            return Vec((up - dn) / (2.0 * h));
        };
        CHECK(second(mp.u).lpNorm<Eigen::Infinity>() < 1e-7);
        CHECK(second(mp.u + Vec::Constant(4, 0.05)).lpNorm<Eigen::Infinity>() > 1e-4);
    }
}

TEST_CASE("manifold point matches the flat zero dynamics", "[regulator]") {
    const Network net(benchmark_params());
    const ExoScenario exo = build_scenario1_exo(scenario1_defaults());
    const Vec P_d = exo.model.output(exo.d0);
    const SteadyState ss = steady_state_solve(P_d, net);
    Vec xb(12);
    xb << ss.state.V, ss.state.P_c, ss.state.delta;
    const ManifoldPoint mp = manifold_point(xb, exo.d0, exo.model, net);
    const GridState dx = dynamics_rhs(mp.state(), P_d, mp.u, net);
    const Vec rho = zero_dynamics_rhs(xb, exo.d0, exo.model, net);
    CHECK((rho.segment(0, 4) - dx.V).norm() < 1e-14);
    CHECK((rho.segment(4, 4) - dx.P_c).norm() < 1e-14);
    CHECK((rho.segment(8, 4) - dx.delta).norm() < 1e-14);
    CHECK(dx.omega.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("tracker copies merge", "[regulator][oracle]") {
    const Network net(benchmark_params());
    SECTION("scenario 1 exosystem") {
        const ExoScenario exo = build_scenario1_exo(scenario1_defaults());
        const ManifoldTracker tr(net, exo.model);
        const SteadyState ss = steady_state_solve(exo.model.output(exo.d0), net);
        const Vec xb = tr.warm_start(exo.d0, ss.state);
        CHECK(tr.last_merge_gap() < 1e-7);
        CHECK(xb.size() == 12);
        CHECK(xb.segment(0, 4).minCoeff() > 0.0);
    }
    SECTION("scenario 3 exosystem") {
        const ExoScenario exo = build_scenario3_exo(scenario3_defaults());
        const ManifoldTracker tr(net, exo.model);
        const SteadyState ss = steady_state_solve(exo.model.output(exo.d0), net);
        (void)tr.warm_start(exo.d0, ss.state);
        CHECK(tr.last_merge_gap() < 1e-7);
    }
}

TEST_CASE("hyperbolicity of constructed Jacobians", "[regulator][oracle]") {
    SECTION("strictly stable diagonal passes") {
        Mat A = Vec::LinSpaced(3, -1.0, -3.0).asDiagonal();
        const auto r = analyze_hyperbolicity(A, 1);
        CHECK(r.passes);
        CHECK(r.min_sigma > 1.9);
        CHECK(r.near_zero == 0);
        CHECK_FALSE(r.hyperbolic_modulo_family);
    }
    SECTION("a centre in the second block fails on the imaginary axis") {
        Mat A = Mat::Zero(6, 6);
        A.block(0, 0, 2, 2) = -Mat::Identity(2, 2);
        A(2, 3) = 1.0;
        A(3, 2) = -1.0;
        A.block(4, 4, 2, 2) = -2.0 * Mat::Identity(2, 2);
        const auto r = analyze_hyperbolicity(A, 2);
        CHECK_FALSE(r.passes);
        CHECK(r.a11_margin == Catch::Approx(1.0));
        CHECK(r.a33_negative_definite);
        CHECK(r.min_sigma < 1e-6);
        CHECK(std::abs(r.rho_at_min_sigma - 1.0) < 1e-3);
        CHECK(r.near_zero == 2);
    }
    SECTION("a stable but non-normal third block fails definiteness") {
        Mat A = -Mat::Identity(6, 6);
        A(4, 5) = 10.0;
        const auto r = analyze_hyperbolicity(A, 2);
        CHECK(r.full_margin == Catch::Approx(1.0));
        CHECK_FALSE(r.a33_negative_definite);
        CHECK_FALSE(r.passes);
    }
    SECTION("wrong shape") { CHECK_THROWS_AS(analyze_hyperbolicity(Mat::Zero(4, 4), 2), std::invalid_argument); }
}

TEST_CASE("four-area benchmark is hyperbolic only modulo the equilibrium family", "[regulator][oracle]") {
    const Network net(benchmark_params());
    const ExoScenario exo = build_scenario1_exo(scenario1_defaults());
    const Vec d_bar = exo.model.equilibrium_like(exo.d0);
    const SteadyState ss = steady_state_solve(exo.model.output(d_bar), net);
    const HyperbolicityReport r = hyperbolicity_check(net, exo.model, d_bar, ss.state);
    CHECK_FALSE(r.passes);
    CHECK(r.hyperbolic_modulo_family);
    CHECK(r.near_zero == 4);
    CHECK(r.a11_margin > r.threshold);
    CHECK_THROWS_AS(hyperbolicity_check(net, exo.model, exo.d0, ss.state), std::invalid_argument);
}
