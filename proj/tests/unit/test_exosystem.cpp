#include "catch_amalgamated.hpp"

#include "lfc/exosystem.hpp"
#include "lfc/integrate.hpp"

#include <cmath>

using namespace lfc;

namespace {

// First integral of the wind block: sum over both states of the integral of z (kappa ln z - kappa h + s0^2/2).
double wind_energy(const WindParams& w, double z1, double z2) {
    const double c = -w.kappa0 * w.h + 0.5 * w.s0 * w.s0;
    auto F = [&](double z) { return w.kappa0 * (0.5 * z * z * std::log(z) - 0.25 * z * z) + 0.5 * c * z * z; };
    return F(z1) + F(z2);
}

}  // namespace

TEST_CASE("wind fixed point", "[exo][oracle]") {
    const auto cfg = scenario1_defaults();
    const WindParams& w = cfg.wind[0];
    CHECK(w.kappa0 == -8.78);
    CHECK(std::abs(w.fixed_point() - 1.526e4) < 5.0);
    ExoModel m(1);
    m.add_wind(0, w);
    Vec d = Vec::Zero(m.dim());
    d.tail(2).setConstant(w.fixed_point());
    CHECK(m.is_fixed_point(d));
    CHECK(m.derivative(d).lpNorm<Eigen::Infinity>() < 1e-9 * w.fixed_point());
}

TEST_CASE("wind orbits conserve their first integral", "[exo][property]") {
    const WindParams w = scenario1_defaults().wind[1];
    ExoModel m(1);
    m.add_wind(0, w);
    const double zs = w.fixed_point();
    std::vector<double> d{0.0, 0.0, zs + 0.01, zs - 0.02};
    const double H0 = wind_energy(w, d[2], d[3]);
    IntegratorOptions o;
    o.method = Method::Dopri5;
    o.abs_tol = 1e-12;
    o.rel_tol = 1e-13;
    double worst = 0.0;
    integrate([&](const double* z, double* dz, double) { m.derivative_flat(z, dz); }, d, 0.0, 20.0, o,
              [&](double, const double* z) { worst = std::max(worst, std::abs(wind_energy(w, z[2], z[3]) - H0)); },
              0.1);
    CHECK(worst / std::abs(H0) < 1e-12);
}

TEST_CASE("wind block rejects non-positive states", "[exo]") {
    ExoModel m(1);
    m.add_wind(0, scenario1_defaults().wind[0]);
    Vec d = Vec::Zero(4), dd(4);
    d[2] = 0.0;
    d[3] = 1.0;
    CHECK_THROWS_AS(m.derivative_flat(d.data(), dd.data()), DomainError);
}

TEST_CASE("scenario 1 exosystem starts near equilibrium", "[exo]") {
    const auto cfg = scenario1_defaults();
    const ExoScenario s = build_scenario1_exo(cfg);
    const Vec Pw = s.model.output_wind(s.d0), Pl = s.model.output_load(s.d0);
    CHECK((Pw - cfg.wind_base - cfg.wind_offset).norm() < 1e-9);
    CHECK((Pl - cfg.load_base - cfg.load_amplitude).norm() < 1e-12);
    CHECK((s.model.output(s.d0) - (Pw - Pl)).norm() < 1e-10);
    const Vec dbar = s.model.equilibrium_like(s.d0);
    CHECK(s.model.is_fixed_point(dbar));
    CHECK_FALSE(s.model.is_fixed_point(s.d0));
    CHECK(s.model.varying_indices().size() == 16);
}

TEST_CASE("a wind orbit stays bounded and recurs", "[exo][oracle]") {
    const WindParams w = scenario1_defaults().wind[0];
    ExoModel m(1);
    m.add_wind(0, w);
    Vec dbar = Vec::Zero(4);
    dbar.tail(2).setConstant(w.fixed_point());
    const ExoStabilityReport r = exo_equilibrium_check(m, dbar, 0.01, 30.0, 4, 1e-3);
    CHECK(r.bounded);
    CHECK(r.max_excursion < 0.05);
    CHECK(r.max_recurrence < 0.1 * r.max_excursion);
}

TEST_CASE("scenario 3 area 2 load at t = 0", "[exo][oracle]") {
    const ExoScenario s = build_scenario3_exo(scenario3_defaults());
    const double expect = 0.814 * std::sin(1.27) + 0.262 * std::sin(3.56) + 0.05;
    CHECK(std::abs(s.model.output_load(s.d0)[1] - expect) < 1e-14);
}

TEST_CASE("scenario 3 exosystem reproduces its sinusoid banks", "[exo][oracle]") {
    const auto cfg = scenario3_defaults();
    const ExoScenario s = build_scenario3_exo(cfg);
    std::vector<double> d(s.d0.data(), s.d0.data() + s.d0.size());
    IntegratorOptions o;
    o.dt = 5e-3;
    double worst = 0.0;
    integrate([&](const double* z, double* dz, double) { s.model.derivative_flat(z, dz); }, d, 0.0, 200.0, o,
              [&](double t, const double* z) {
                  const Eigen::Map<const Vec> dm(z, s.d0.size());
                  const Vec Pl = s.model.output_load(dm), Pw = s.model.output_wind(dm);
                  for (int i = 0; i < 4; ++i) {
                      worst = std::max(worst, std::abs(Pl[i] - cfg.load[i].eval(t)));
                      worst = std::max(worst, std::abs(Pw[i] - cfg.wind[i].eval(t)));
                  }
              },
              1.0);
    CHECK(worst < 1e-8);
}

TEST_CASE("area 1 load bank ships as default", "[exo]") {
    const auto cfg = scenario3_defaults();
    REQUIRE(cfg.load[0].terms.size() == 2);
    CHECK(cfg.load[0].offset == 0.0375);
    CHECK(cfg.load[0].terms[0].amplitude == 11.88);
    CHECK(cfg.load[0].terms[0].rate == 0.059);
    CHECK(cfg.load[0].terms[1].phase == 3.96);
}

TEST_CASE("rotation blocks preserve their radius", "[exo][property]") {
    ExoModel m(2);
    m.add_rotation(1, Channel::Load, 0.7, 1.0, 0.0);
    Vec d = Vec::Zero(m.dim());
    d[4] = 0.3;
    d[5] = -0.4;
    const Vec dd = m.derivative(d);
    CHECK(std::abs(d.dot(dd)) < 1e-15);
    CHECK(dd[4] == Catch::Approx(0.7 * -0.4));
}

TEST_CASE("jacobian bound is finite near the wind fixed point", "[exo]") {
    const ExoScenario s = build_scenario1_exo(scenario1_defaults());
    const double b = sampled_jacobian_bound(s.model, s.model.equilibrium_like(s.d0), 0.01, 10);
    CHECK(std::isfinite(b));
    CHECK(b > 0.0);
}
