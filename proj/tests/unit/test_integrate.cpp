#include "catch_amalgamated.hpp"

#include "lfc/integrate.hpp"

#include <cmath>

using namespace lfc;

namespace {

double decay(Method m, double dt) {
    std::vector<double> x{1.0};
    IntegratorOptions o;
    o.method = m;
    o.dt = dt;
    o.abs_tol = o.rel_tol = 1e-12;
    integrate([](const double* s, double* ds, double) { ds[0] = -s[0]; }, x, 0.0, 1.0, o);
    return x[0];
}

}  // namespace

TEST_CASE("exponential decay", "[integrate][oracle]") {
    CHECK(std::abs(decay(Method::RK4, 1e-3) - std::exp(-1.0)) < 1e-9);
    CHECK(std::abs(decay(Method::Dopri5, 1e-3) - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("RK4 is fourth order", "[integrate][oracle]") {
    const double e1 = std::abs(decay(Method::RK4, 0.1) - std::exp(-1.0));
    const double e2 = std::abs(decay(Method::RK4, 0.05) - std::exp(-1.0));
    CHECK(e1 / e2 > 14.0);
    CHECK(e1 / e2 < 18.0);
}

TEST_CASE("harmonic oscillator energy with dopri5", "[integrate][oracle]") {
    std::vector<double> x{1.0, 0.0};
    IntegratorOptions o;
    o.method = Method::Dopri5;
    o.abs_tol = o.rel_tol = 1e-10;
    integrate([](const double* s, double* ds, double) {
        ds[0] = s[1];
        ds[1] = -s[0];
    }, x, 0.0, 20.0 * M_PI, o);
    CHECK(std::abs(0.5 * (x[0] * x[0] + x[1] * x[1]) - 0.5) < 1e-7);
}

TEST_CASE("observer grid and step hook", "[integrate]") {
    std::vector<double> x{0.0};
    std::vector<double> seen;
    int hooks = 0;
    IntegratorOptions o;
    o.dt = 0.01;
    integrate([](const double*, double* ds, double) { ds[0] = 1.0; }, x, 0.0, 1.0, o,
              [&](double t, const double* s) {
                  seen.push_back(t);
                  CHECK(std::abs(s[0] - t) < 1e-12);
              },
              0.25, [&](double) { ++hooks; });
    REQUIRE(seen.size() == 5);
    CHECK(seen.front() == 0.0);
    CHECK(seen.back() == 1.0);
    CHECK(hooks == 100);
}

TEST_CASE("method names", "[integrate]") {
    CHECK(parse_method("rk4") == Method::RK4);
    CHECK(parse_method("rk45") == Method::Dopri5);
    CHECK(method_name(Method::Dopri5) == "dopri5");
    CHECK_THROWS_AS(parse_method("euler"), std::invalid_argument);
}
