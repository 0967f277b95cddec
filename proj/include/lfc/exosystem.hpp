#pragma once

// Exosystems generating the uncontrolled injections: d' = S(d), P_d = Gamma d.
// Each area owns a constant block (wind offset, load offset) followed by any number
// of wind or rotation blocks feeding either its wind or its load channel.

#include "lfc/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lfc {

struct WindParams {
    double kappa0 = 0.0;
    double s0 = 0.0;
    double h = 0.0;
    /// z1 = z2 = exp(h - s0^2/(2 kappa0)), where both bracket terms vanish.
    [[nodiscard]] double fixed_point() const;
};

enum class BlockKind { Constant, Wind, Rotation };
enum class Channel { Wind, Load };

struct ExoBlock {
    BlockKind kind = BlockKind::Constant;
    int area = 0;
    int offset = 0;  // first state index in d
    int dim = 0;
    Channel channel = Channel::Load;
    double rate = 0.0;    // rotation: z1' = rate z2, z2' = -rate z1
    WindParams wind;      // wind blocks only
    double gain[2] = {0.0, 0.0};  // contribution of (z1, z2) to the channel
};

class ExoModel {
public:
    ExoModel() = default;
    explicit ExoModel(int n_areas);

    /// Appends a block and returns its index. The per-area constant blocks are
    /// created by the constructor.
    int add_wind(int area, const WindParams& w);
    int add_rotation(int area, Channel ch, double rate, double gain_cos, double gain_sin);

    [[nodiscard]] int n_areas() const noexcept { return n_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] const std::vector<ExoBlock>& blocks() const noexcept { return blocks_; }
    /// Index of the constant (wind offset, load offset) pair of an area.
    [[nodiscard]] int constant_index(int area) const { return 2 * area; }

    /// P_d = Gamma d with Gamma = Gamma_w - Gamma_l.
    [[nodiscard]] const Mat& gamma() const noexcept { return gamma_; }
    [[nodiscard]] const Mat& gamma_wind() const noexcept { return gamma_w_; }
    [[nodiscard]] const Mat& gamma_load() const noexcept { return gamma_l_; }

    [[nodiscard]] Vec derivative(const Vec& d) const;
    /// Throws DomainError when a wind state drops to 1e-9 or below.
    void derivative_flat(const double* d, double* dd) const;
    [[nodiscard]] Vec output(const Vec& d) const;
    [[nodiscard]] Vec output_wind(const Vec& d) const { return gamma_w_ * d; }
    [[nodiscard]] Vec output_load(const Vec& d) const { return gamma_l_ * d; }

    /// Indices of the states that move (everything except the constant blocks).
    [[nodiscard]] std::vector<int> varying_indices() const;

    /// |S(d)|_inf <= tol * max(1, |d|_inf); the scaling absorbs round-off at large wind states.
    [[nodiscard]] bool is_fixed_point(const Vec& d, double tol = 1e-10) const;

    /// d with every moving block placed at its fixed point and constants copied from `d`.
    [[nodiscard]] Vec equilibrium_like(const Vec& d) const;

private:
    void rebuild_gamma();
    int n_ = 0;
    int dim_ = 0;
    std::vector<ExoBlock> blocks_;
    Mat gamma_, gamma_w_, gamma_l_;
};

/// An exosystem together with its initial state.
struct ExoScenario {
    ExoModel model;
    Vec d0;
};

struct Scenario1ExoConfig {
    std::vector<WindParams> wind;  // per area
    Vec wind_base;        // P_w at t = 0 with the oscillating part at its fixed point
    Vec wind_offset;      // z1(0) - z*; z2(0) = z*
    Vec load_base;        // P_l constant part
    Vec load_amplitude;   // z1(0), z2(0) = 0
    double load_rate = 0.0;
};

/// Benchmark wind parameters and the default near-equilibrium initial offsets.
Scenario1ExoConfig scenario1_defaults();
ExoScenario build_scenario1_exo(const Scenario1ExoConfig& cfg);

struct Sinusoid {
    double amplitude = 0.0;
    double rate = 0.0;  // rad/s
    double phase = 0.0;
};

struct SinusoidBankParams {
    double offset = 0.0;
    std::vector<Sinusoid> terms;
    [[nodiscard]] double eval(double t) const;
};

struct Scenario3ExoConfig {
    std::vector<SinusoidBankParams> load;  // per area
    std::vector<SinusoidBankParams> wind;  // per area
};

/// The published four-area load and renewable sinusoid fits.
Scenario3ExoConfig scenario3_defaults();
/// Rotation blocks start at (1, 0); A sin(w t + p) is read out with gains (A sin p, -A cos p).
ExoScenario build_scenario3_exo(const Scenario3ExoConfig& cfg);

struct ExoStabilityReport {
    double max_excursion = 0.0;   // max |d(t) - d_bar| over all samples
    double max_recurrence = 0.0;  // max over samples of min_{t >= T/2} |d(t) - d(0)|
    bool bounded = false;         // no escape beyond 10 x radius
};

/// Samples `samples` initial states in the ball of `radius` around the fixed point
/// (moving states only) and integrates each over `horizon` with RK4 step `dt`.
ExoStabilityReport exo_equilibrium_check(const ExoModel& model, const Vec& d_bar, double radius,
                                         double horizon, int samples = 8, double dt = 1e-2,
                                         std::uint64_t seed = 1);

/// Largest Frobenius norm of the finite-difference Jacobian of S over random points in a ball.
double sampled_jacobian_bound(const ExoModel& model, const Vec& centre, double radius, int samples,
                              std::uint64_t seed = 1);

}  // namespace lfc
