#include "catch_amalgamated.hpp"

#include "lfc/controller.hpp"

using namespace lfc;

TEST_CASE("droop law returns delta", "[controller]") {
    const Network net(benchmark_params());
    DroopDeltaController c(net);
    GridState x = GridState::zeros(net);
    x.delta << 0.1, -0.2, 0.3, -0.4;
    const Vec xs = x.pack();
    Vec u(4);
    c.control(xs.data(), nullptr, nullptr, u.data());
    CHECK(u == x.delta);
    CHECK(c.internal_dim() == 0);
}

TEST_CASE("classical law on its own manifold is the equivalent control", "[controller][oracle]") {
    const Network net(benchmark_params());
    const ExoScenario exo = build_scenario1_exo(scenario1_defaults());
    const SteadyState ss = steady_state_solve(exo.model.output(exo.d0), net);
    ClassicalController c(net, exo.model, ss.state);
    REQUIRE(c.internal_dim() == 12);
    const Vec z = c.initial_internal(ss.state, exo.d0);
    CHECK(c.merge_gap() < 1e-7);
    const ManifoldPoint mp = manifold_point(z, exo.d0, exo.model, net);
    Vec u(4);
    const Vec xs = mp.state().pack();
    c.control(xs.data(), exo.d0.data(), z.data(), u.data());
    CHECK((u - mp.u).lpNorm<Eigen::Infinity>() < 1e-12);

    // off the manifold the law adds the delta deviation
    GridState off = mp.state();
    off.delta.array() += 0.01;
    const Vec xo = off.pack();
    c.control(xo.data(), exo.d0.data(), z.data(), u.data());
    CHECK((u - mp.u).lpNorm<Eigen::Infinity>() == Catch::Approx(0.01).epsilon(1e-9));

    // the internal state follows the zero dynamics
    Vec dz(12);
    c.internal_rhs(xs.data(), exo.d0.data(), z.data(), dz.data());
    CHECK((dz - zero_dynamics_rhs(z, exo.d0, exo.model, net)).norm() < 1e-14);
}
