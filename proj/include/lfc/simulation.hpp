#pragma once

// Closed-loop scenarios: setup, integration, measurement noise, metrics, traces.

#include "lfc/approx.hpp"
#include "lfc/common.hpp"
#include "lfc/controller.hpp"
#include "lfc/exosystem.hpp"
#include "lfc/integrate.hpp"
#include "lfc/network.hpp"
#include "lfc/regulator.hpp"
#include "lfc/sinusoid_fit.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace lfc {

struct SimConfig {
    int scenario = 1;
    std::string controller = "classical";  // classical | approx | droop
    IntegratorOptions integrator{Method::RK4, 1e-3, 1e-8, 1e-8};
    double horizon = 200.0;
    double record_dt = 0.1;
    bool noise = false;  // forced on for scenario 2
    double noise_std = 1e-3;
    std::uint64_t seed = 1;
    std::optional<Vec> omega0;
    double divergence_norm = 1e6;
    double settle_band = 1e-3;
    TrackerOptions tracker;
    Scenario1ExoConfig exo1 = scenario1_defaults();
    Scenario3ExoConfig exo3 = scenario3_defaults();
    std::string data_dir;         // scenario 3 profiles
    PowerUnits data_units = PowerUnits::MW;
    double time_compression = 144.0;  // one day of data onto 600 s
    ApproxOptions approx;
    std::string approx_solution;  // solved on the fly when empty
};

/// Horizon default for a scenario: 200 s for scenarios 1-2, 600 s for scenario 3.
double default_horizon(int scenario);

struct ScenarioSetup {
    ExoScenario exo;
    std::vector<std::optional<Profile>> load_profile;  // scenario 3, per area
    std::vector<std::optional<Profile>> wind_profile;
    SteadyState pre_switch;  // optimal steady state for the t = 0 injection
    GridState x0;
    std::vector<std::string> warnings;

    /// Injection seen by the plant: profiles where available, exosystem output otherwise.
    [[nodiscard]] Vec plant_injection(double t, const Vec& d) const;
};

ScenarioSetup prepare_scenario(const Network& net, const SimConfig& cfg);

/// Runs the penalty descent for the scenario's exosystem from the classical initialization.
ApproxSolution solve_scenario_approx(const Network& net, const ScenarioSetup& setup, const ApproxOptions& opts);

std::unique_ptr<Controller> make_controller(const std::string& name, const Network& net, const ScenarioSetup& setup,
                                            const SimConfig& cfg, const ApproxSolution* approx = nullptr);

/// P_c + N(0, std^2) per area; identity when std == 0.
Vec inject_measurement_noise(const Vec& P_c, double std, std::mt19937_64& rng);

using Metrics = std::map<std::string, double>;

struct SimTrace {
    int m = 0, n = 0;
    std::vector<double> t;
    std::vector<Vec> x;  // flat grid state
    std::vector<Vec> u;
    std::vector<Vec> P_d;
    std::vector<Vec> P_e;  // P_c - P_c^opt(P_d)
    std::vector<double> err_norm;
    Metrics metrics;
    std::vector<std::string> warnings;
    std::vector<std::string> header_notes;  // written as '#' lines before the CSV header
    bool aborted = false;
    std::string abort_reason;
    double abort_time = 0.0;
};

SimTrace simulate(const Network& net, const SimConfig& cfg, const ScenarioSetup& setup, Controller& controller);
SimTrace run_scenario(const Network& net, const SimConfig& cfg, const ApproxSolution* approx = nullptr);

/// First time after which `values` stays strictly below `threshold`, interpolated
/// (log-linear for positive data) between the last sample at or above it and the next.
/// Returns NaN if the final sample is not below, 0 if all samples are.
double time_to_threshold(const std::vector<double>& t, const std::vector<double>& values, double threshold);

Metrics compute_metrics(const SimTrace& trace, double settle_band = 1e-3);

void write_trace_csv(const SimTrace& trace, const std::string& path);
void write_metrics(const Metrics& metrics, const std::string& path);

}  // namespace lfc
