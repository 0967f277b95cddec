#include "lfc/integrate.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lfc {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

Method parse_method(const std::string& name) {
    if (name == "rk4") return Method::RK4;
    if (name == "dopri5" || name == "rk45") return Method::Dopri5;
    throw std::invalid_argument("unknown integrator '" + name + "' (expected rk4 or dopri5)");
}

std::string method_name(Method m) { return m == Method::RK4 ? "rk4" : "dopri5"; }

void integrate(const RhsFn& rhs, std::vector<double>& x, double t0, double t1,
               const IntegratorOptions& opts, const ObserverFn& observer, double obs_dt,
               const StepHookFn& hook) {
    if (!(opts.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
    if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 < t0");
    auto sys = [&rhs](const State& s, State& ds, double t) { rhs(s.data(), ds.data(), t); };

    const double span = t1 - t0;
    const long intervals =
        obs_dt > 0.0 ? std::max(1L, static_cast<long>(std::ceil(span / obs_dt - 1e-9))) : 1L;
    if (observer) observer(t0, x.data());
    if (span == 0.0) return;

    odeint::runge_kutta4<State> rk4;
    auto dopri = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
    double dt_adapt = opts.dt;

    for (long k = 0; k < intervals; ++k) {
        const double a = t0 + span * static_cast<double>(k) / static_cast<double>(intervals);
        const double b = k + 1 == intervals
                             ? t1
                             : t0 + span * static_cast<double>(k + 1) / static_cast<double>(intervals);
        if (opts.method == Method::RK4) {
            const long steps = std::max(1L, static_cast<long>(std::ceil((b - a) / opts.dt - 1e-9)));
            const double h = (b - a) / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s) {
                const double t = a + h * static_cast<double>(s);
                if (hook) hook(t);
                rk4.do_step(sys, x, t, h);
            }
        } else {
            if (hook) hook(a);
            double t = a;
            while (t < b) {
                double h = std::min(dt_adapt, b - t);
                int tries = 0;
                while (dopri.try_step(sys, x, t, h) == odeint::fail) {
                    if (++tries > 200) throw std::runtime_error("integrate: step size underflow");
                }
                dt_adapt = h;
                if (b - t < 1e-12 * std::max(1.0, std::abs(b))) t = b;
            }
        }
        if (observer) observer(b, x.data());
    }
}

}  // namespace lfc
