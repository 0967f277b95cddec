#pragma once

// Classical output regulation: relative-degree checks, feasible angles, the
// equivalent control, zero dynamics, the online manifold tracker and the
// solvability (hyperbolicity) test.

#include "lfc/common.hpp"
#include "lfc/exosystem.hpp"
#include "lfc/integrate.hpp"
#include "lfc/network.hpp"

#include <string>
#include <utility>
#include <vector>

namespace lfc {

struct LieSample {
    GridState x;
    Vec P_d;
};

struct LieReport {
    double max_abs_Lg_h = 0.0;       // should be exactly zero
    double max_dev_LgLf_h = 0.0;     // |FD - diag(1/(tau_p tau_c))|
    Mat LgLf_h;                      // finite-difference estimate at the last sample
};

/// Directional finite differences of h = omega along the input vector fields.
LieReport lie_relative_degree_check(const Network& net, const std::vector<LieSample>& samples,
                                    double step = 1e-6);

struct FeasibleAngles {
    Vec theta;
    Vec phi;
    double residual = 0.0;
};

/// Angles with P_c + P_d = A Upsilon(V) sin(theta) on the secure branch.
/// Requires 1'(P_c + P_d) = 0.
FeasibleAngles solve_feasible_angles(const Vec& P_c, const Vec& V, const Vec& P_d, const Network& net);

/// P_c - tau_c Gamma S(d) - tau_c A [sin theta] Upsilon(V) |A|' [V]^-1 tau_v^-1 (chi E(theta) V - E_f).
/// `gamma_s` is Gamma S(d).
Vec equivalent_control(const Vec& theta, const Vec& V, const Vec& P_c, const Vec& gamma_s, const Network& net);

struct ManifoldPoint {
    Vec theta;
    Vec V;
    Vec P_c;
    Vec delta;
    Vec u;  // equivalent control at the point
    [[nodiscard]] GridState state() const;  // omega = 0
};

/// x_b = (V, P_c, delta) stacked.
ManifoldPoint manifold_point(const Vec& xb, const Vec& d, const ExoModel& exo, const Network& net);
Vec zero_dynamics_rhs(const Vec& xb, const Vec& d, const ExoModel& exo, const Network& net);

struct TrackerOptions {
    double warmup = 300.0;
    double dt = 1e-2;
    double merge_tol = 1e-7;
};

/// Realizes x_b(d(t)) by co-integrating an internal copy of the exosystem with the
/// zero dynamics. The equilibrium family is pinned by the line angles of `reference`.
class ManifoldTracker {
public:
    ManifoldTracker(const Network& net, const ExoModel& exo, TrackerOptions opts = {});

    /// x_b consistent with angles theta_ref for the current d.
    [[nodiscard]] Vec seed(const Vec& d, const Vec& theta_ref, const Vec& V) const;

    /// Integrates the exosystem backwards by the warm-up horizon, then exosystem and
    /// zero dynamics forwards from two different seeds; returns x_b at d0. Throws
    /// ConvergenceError if the two copies have not merged.
    [[nodiscard]] Vec warm_start(const Vec& d0, const GridState& reference) const;

    struct Trajectory {
        std::vector<double> t;
        std::vector<Vec> d;
        std::vector<Vec> xb;
    };
    [[nodiscard]] Trajectory follow(const Vec& d0, const Vec& xb0, double horizon, double record_dt) const;

    [[nodiscard]] double last_merge_gap() const noexcept { return merge_gap_; }

private:
    const Network& net_;
    const ExoModel& exo_;
    TrackerOptions opts_;
    mutable double merge_gap_ = 0.0;
};

struct HyperbolicityOptions {
    double fd_step = 1e-6;
    int grid_points = 2000;
    double rho_max = 1e3;
    double det_floor = 1e-6;  // refine where |det| dips below this
    double rel_tol = 1e-7;    // eigenvalue / singular-value threshold relative to |A|
};

struct HyperbolicityReport {
    Mat A;  // d rho / d x_b, 3n x 3n
    Mat A11, A12, A21, A22, A33;
    CVec eig_A11;
    double a11_margin = 0.0;           // min |Re| of eig(A11)
    Vec eig_A33_sym;                   // eigenvalues of the symmetric part of A33
    bool a33_negative_definite = false;
    double min_abs_det = 0.0;
    double rho_at_min_det = 0.0;
    double min_sigma = 0.0;            // smallest singular value of the Schur complement
    double rho_at_min_sigma = 0.0;
    int grid_points = 0;
    int refinements = 0;
    CVec eig_full;
    double full_margin = 0.0;          // min |Re| of eig(A)
    int near_zero = 0;                 // eigenvalues of A with |Re| below threshold
    double threshold = 0.0;
    bool passes = false;               // all three conditions
    bool hyperbolic_modulo_family = false;  // exactly n neutral modes, the rest strictly stable
    std::vector<std::string> notes;
};

/// Analysis of an assembled Jacobian A with n x n blocks (V, P_c, delta).
HyperbolicityReport analyze_hyperbolicity(const Mat& A, int n, const HyperbolicityOptions& opts = {});

/// Finite-difference Jacobian of the zero dynamics at an equilibrium (eq, d_bar) and its analysis.
HyperbolicityReport hyperbolicity_check(const Network& net, const ExoModel& exo, const Vec& d_bar,
                                        const GridState& eq, const HyperbolicityOptions& opts = {});

}  // namespace lfc
