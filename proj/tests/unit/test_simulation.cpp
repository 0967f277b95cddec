#include "catch_amalgamated.hpp"

#include "lfc/simulation.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace lfc;
namespace fs = std::filesystem;

namespace {

SimConfig short_run(int scenario, double horizon = 10.0) {
    SimConfig c;
    c.scenario = scenario;
    c.horizon = horizon;
    return c;
}

SimTrace flat_trace(const Network& net, int samples) {
    SimTrace tr;
    tr.m = net.m();
    tr.n = net.n();
    for (int k = 0; k < samples; ++k) {
        tr.t.push_back(0.1 * k);
        Vec x = Vec::Zero(net.state_dim());
        x.segment(tr.m + tr.n, tr.n).setConstant(0.45);
        tr.x.push_back(x);
        tr.u.push_back(Vec::Zero(4));
        tr.P_d.push_back(Vec::Zero(4));
        tr.P_e.push_back(Vec::Zero(4));
        tr.err_norm.push_back(0.0);
    }
    return tr;
}

}  // namespace

TEST_CASE("time to threshold on an exponential", "[sim][oracle]") {
    std::vector<double> t, v;
    for (int k = 0; k <= 100; ++k) {
        t.push_back(0.1 * k);
        v.push_back(std::exp(-t.back()));
    }
    CHECK(time_to_threshold(t, v, 1e-3) == Catch::Approx(std::log(1e3)).epsilon(1e-12));
    CHECK(std::isnan(time_to_threshold(t, v, 1e-6)));
    CHECK(time_to_threshold(t, v, 2.0) == 0.0);
    v[60] = 1.0;  // a late excursion resets the clock
    CHECK(time_to_threshold(t, v, 1e-2) > 6.0);
}

TEST_CASE("metrics of a motionless trace", "[sim]") {
    const Network net(benchmark_params());
    const Metrics m = compute_metrics(flat_trace(net, 1001));
    CHECK(m.at("settling_time") == 0.0);
    CHECK(m.at("max_abs_omega") == 0.0);
    CHECK(m.at("mean_abs_omega_final_50s") == 0.0);
    CHECK(m.at("V_min") == 0.45);
    CHECK(m.at("time_to_err_1e-6") == 0.0);
    CHECK_THROWS(compute_metrics(SimTrace{}));
}

TEST_CASE("final-window mean of a constant omega", "[sim][property]") {
    const Network net(benchmark_params());
    SimTrace tr = flat_trace(net, 1001);
    for (auto& x : tr.x) x[tr.m + 2] = -2e-3;
    CHECK(compute_metrics(tr).at("mean_abs_omega_final_50s") == Catch::Approx(2e-3).epsilon(1e-12));
}

TEST_CASE("measurement noise statistics", "[sim][property]") {
    std::mt19937_64 rng(77);
    const Vec base = Vec::LinSpaced(4, 0.1, 0.4);
    double s = 0.0, s2 = 0.0;
    const int draws = 25000;
    for (int k = 0; k < draws; ++k) {
        const Vec e = inject_measurement_noise(base, 1e-3, rng) - base;
        s += e.sum();
        s2 += e.squaredNorm();
    }
    const double N = 4.0 * draws, mean = s / N, sd = std::sqrt(s2 / N - mean * mean);
    CHECK(std::abs(sd - 1e-3) < 0.02e-3);
    CHECK(std::abs(mean) < 2e-5);
    CHECK(inject_measurement_noise(base, 0.0, rng) == base);
}

TEST_CASE("scenario 2 is deterministic per seed", "[sim]") {
    const Network net(benchmark_params());
    const SimTrace a = run_scenario(net, short_run(2));
    const SimTrace b = run_scenario(net, short_run(2));
    REQUIRE_FALSE(a.aborted);
    REQUIRE(a.x.size() == b.x.size());
    for (std::size_t k = 0; k < a.x.size(); ++k) REQUIRE(a.x[k] == b.x[k]);
    SimConfig other = short_run(2);
    other.seed = 2;
    CHECK(run_scenario(net, other).x.back() != a.x.back());
}

TEST_CASE("noise-free scenario 2 equals scenario 1", "[sim]") {
    const Network net(benchmark_params());
    SimConfig quiet = short_run(2);
    quiet.noise_std = 0.0;
    const SimTrace a = run_scenario(net, quiet);
    const SimTrace b = run_scenario(net, short_run(1));
    REQUIRE(a.x.size() == b.x.size());
    double gap = 0.0;
    for (std::size_t k = 0; k < a.x.size(); ++k) gap = std::max(gap, (a.x[k] - b.x[k]).lpNorm<Eigen::Infinity>());
    CHECK(gap == 0.0);
}

TEST_CASE("fixed-step and adaptive integration agree", "[sim][oracle]") {
    const Network net(benchmark_params());
    SimConfig rk = short_run(1, 5.0), dp = short_run(1, 5.0);
    dp.integrator.method = Method::Dopri5;
    dp.integrator.abs_tol = 1e-10;
    dp.integrator.rel_tol = 1e-10;
    const SimTrace a = run_scenario(net, rk), b = run_scenario(net, dp);
    REQUIRE(a.t.size() == b.t.size());
    double gap = 0.0;
    for (std::size_t k = 0; k < a.x.size(); ++k) gap = std::max(gap, (a.x[k] - b.x[k]).lpNorm<Eigen::Infinity>());
    CHECK(gap < 1e-5);
}

TEST_CASE("scenario 1 classical run settles", "[sim]") {
    const Network net(benchmark_params());
    const SimTrace tr = run_scenario(net, short_run(1, 40.0));
    REQUIRE_FALSE(tr.aborted);
    CHECK(tr.metrics.at("max_abs_omega") < 1e-3);
    CHECK(tr.metrics.at("tracker_merge_gap") < 1e-7);
    CHECK(tr.t.back() == Catch::Approx(40.0));
}

TEST_CASE("scenario 3 falls back to the exosystem without data", "[sim]") {
    const Network net(benchmark_params());
    const fs::path empty = fs::temp_directory_path() / "lfc_empty_data";
    fs::create_directories(empty);
    SimConfig c = short_run(3, 2.0);
    c.data_dir = empty.string();
    const ScenarioSetup s = prepare_scenario(net, c);
    CHECK(s.warnings.size() == 8);
    for (const auto& p : s.load_profile) CHECK_FALSE(p.has_value());
    CHECK((s.plant_injection(0.0, s.exo.d0) - s.exo.model.output(s.exo.d0)).norm() < 1e-14);

    std::ofstream(empty / "area2_load.csv") << "t_s,P_MW\n0,500\n86400,500\n";
    const ScenarioSetup t = prepare_scenario(net, c);
    CHECK(t.warnings.size() == 7);
    REQUIRE(t.load_profile[1].has_value());
    CHECK(t.plant_injection(1.0, t.exo.d0)[1] ==
          Catch::Approx(t.exo.model.output_wind(t.exo.d0)[1] - 0.5));
    fs::remove_all(empty);
}

TEST_CASE("trace CSV layout", "[sim]") {
    const Network net(benchmark_params());
    SimTrace tr = flat_trace(net, 3);
    tr.header_notes.push_back("time_compression = 144");
    const auto path = (fs::temp_directory_path() / "lfc_trace.csv").string();
    write_trace_csv(tr, path);
    std::ifstream in(path);
    std::string note, header, row;
    std::getline(in, note);
    std::getline(in, header);
    std::getline(in, row);
    CHECK(note == "# time_compression = 144");
    CHECK(header.rfind("t,theta_1,theta_2,theta_3,theta_4,omega_1", 0) == 0);
    CHECK(header.size() > 10);
    CHECK(header.substr(header.size() - 9) == ",err_norm");
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}

TEST_CASE("controller names", "[sim]") {
    const Network net(benchmark_params());
    SimConfig c = short_run(1);
    const ScenarioSetup s = prepare_scenario(net, c);
    CHECK(make_controller("classical", net, s, c)->name() == "classical");
    CHECK_THROWS_AS(make_controller("pid", net, s, c), ConfigError);
}
