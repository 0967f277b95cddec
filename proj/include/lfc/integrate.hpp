#pragma once

// Thin wrapper over Boost.Odeint with a flat double* interface.

#include <functional>
#include <string>
#include <vector>

namespace lfc {

enum class Method { RK4, Dopri5 };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct IntegratorOptions {
    Method method = Method::RK4;
    double dt = 1e-2;        // RK4 step; initial step for Dopri5
    double abs_tol = 1e-9;   // Dopri5 only
    double rel_tol = 1e-9;
};

using RhsFn = std::function<void(const double* x, double* dx, double t)>;
/// Called on the observation grid t0, t0 + obs_dt, ..., t1 (t1 always included).
using ObserverFn = std::function<void(double t, const double* x)>;
/// Called before every RK4 step with the step's start time; with Dopri5 it is called
/// before every observation interval instead.
using StepHookFn = std::function<void(double t)>;

/// Integrates x from t0 to t1 in place. obs_dt <= 0 observes only the end points.
void integrate(const RhsFn& rhs, std::vector<double>& x, double t0, double t1,
               const IntegratorOptions& opts, const ObserverFn& observer = {}, double obs_dt = 0.0,
               const StepHookFn& hook = {});

}  // namespace lfc
