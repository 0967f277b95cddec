#pragma once

// Approximate output regulation: extended output, tracking error, the phase basis
// for u~(d), the penalty over the exosystem attractor and the outer optimizer.

#include "lfc/common.hpp"
#include "lfc/controller.hpp"
#include "lfc/exosystem.hpp"
#include "lfc/network.hpp"

#include <string>
#include <vector>

namespace lfc {

/// q = (omega, P_c)
Vec extended_output(const GridState& x);

struct TrackingError {
    Vec e;
    double norm = 0.0;
};

/// e = q(x) - (0, P_c^opt(P_d)). `P_d` is the injection the dispatch is referred to.
TrackingError tracking_error(const GridState& x, const Vec& P_d, const CostModel& cost);
TrackingError tracking_error(const GridState& x, const Vec& d, const CostModel& cost, const ExoModel& exo);

/// Phase of an oscillatory block, atan2(-(z2 - c), z1 - c) with c its fixed point; it
/// advances at the block rate (kappa_0 for wind blocks, near the fixed point).
double block_phase(const ExoBlock& b, const double* d);

struct PhaseGroup {
    double rate = 0.0;
    bool wind = false;
    std::vector<int> blocks;  // indices into ExoModel::blocks(); the first defines the phase
};

/// Rotation blocks sharing a rate share a phase; wind blocks never do.
std::vector<PhaseGroup> phase_groups(const ExoModel& exo);

/// 1, cos(k a_g), sin(k a_g) for k = 1..order and every phase group g.
class PhaseBasis {
public:
    PhaseBasis() = default;
    PhaseBasis(const ExoModel& exo, int order);
    PhaseBasis(std::vector<PhaseGroup> groups, int order);
    [[nodiscard]] int size() const noexcept { return 1 + 2 * order_ * static_cast<int>(groups_.size()); }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] const std::vector<PhaseGroup>& groups() const noexcept { return groups_; }
    void eval(const ExoModel& exo, const double* d, double* out) const;
    [[nodiscard]] Vec eval(const ExoModel& exo, const Vec& d) const;
    /// Same group structure (rates, kinds, block indices) as the basis built from `exo`.
    [[nodiscard]] bool compatible(const ExoModel& exo) const;

private:
    std::vector<PhaseGroup> groups_;
    int order_ = 0;
};

struct ApproxOptions {
    int order = 1;
    double t_trans = 150.0;  // closed-loop transient discarded before averaging
    double t_avg = 150.0;    // averaging window along the attractor
    double dt = 0.01;        // RK4 step of the inner solve
    double node_dt = 0.04;   // spacing of quadrature nodes, a multiple of dt
    double eps_bar = 1e-7;
    int max_iter = 500;
    int stall_iters = 10;
    double fd_step = 1e-6;
    double lm_lambda0 = 1e-3;
};

/// The penalty problem for a fixed plant, exosystem orbit and basis. The inner
/// invariance solve integrates the closed loop u = U basis(d) + delta along the
/// orbit through d0; for exosystems without moving states the closed-loop
/// equilibrium is solved algebraically instead.
class PenaltyProblem {
public:
    PenaltyProblem(const Network& net, const ExoModel& exo, const Vec& d0, PhaseBasis basis, ApproxOptions opts,
                   GridState x_init);

    [[nodiscard]] int n_params() const noexcept { return net_.n() * basis_.size(); }
    [[nodiscard]] const PhaseBasis& basis() const noexcept { return basis_; }
    [[nodiscard]] const ApproxOptions& options() const noexcept { return opts_; }
    [[nodiscard]] const Network& network() const noexcept { return net_; }
    [[nodiscard]] const ExoModel& exo() const noexcept { return exo_; }
    [[nodiscard]] bool is_constant() const noexcept { return constant_; }
    [[nodiscard]] const std::vector<double>& node_times() const noexcept { return node_t_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return w_; }
    [[nodiscard]] const std::vector<Vec>& node_d() const noexcept { return node_d_; }
    [[nodiscard]] const Mat& node_basis() const noexcept { return node_phi_; }  // nodes x basis

    /// Grid states x(d) at every node for coefficients U (n x basis).
    [[nodiscard]] std::vector<Vec> solve_invariance(const Mat& U) const;
    [[nodiscard]] std::vector<Vec> solve_invariance(const Mat& U, const Vec& x_start) const;

    /// Stacked sqrt(w_k) e_k over the nodes.
    [[nodiscard]] Vec residual(const Mat& U) const;
    [[nodiscard]] Vec residual_from_states(const std::vector<Vec>& xs) const;
    [[nodiscard]] double penalty(const Mat& U) const { return residual(U).squaredNorm(); }
    /// Central-difference Jacobian of the residual with respect to vec(U) (column-major).
    [[nodiscard]] Mat jacobian(const Mat& U) const;

    /// Along-flow defect |x_{k+1} - flow(x_k, d_k)| / span, with the flow over one node
    /// spacing integrated on a 64x finer grid. Together with a small
    /// initialization_gap this certifies that the nodes sample the invariant graph.
    [[nodiscard]] double invariance_residual(const Mat& U, int nodes = 100) const;
    /// Gap between node states computed from two different closed-loop initial states.
    [[nodiscard]] double initialization_gap(const Mat& U, int nodes = 100) const;

    /// Classical-regulator manifold u(d) - delta(d) projected onto the basis.
    [[nodiscard]] Mat classical_initialization(const GridState& reference) const;

    /// Closed-loop vector field with u = U basis(d) + delta, on the flat (x, d) layout.
    void closed_loop_rhs(const Mat& U, const double* xd, double* dxd) const;

private:
    void precompute_orbit();
    const Network& net_;
    const ExoModel& exo_;
    Vec d0_;
    PhaseBasis basis_;
    ApproxOptions opts_;
    GridState x_init_;
    bool constant_ = false;
    // orbit samples at RK4 half steps from -t_trans to t_avg
    std::vector<Vec> orbit_Pd_;
    Mat orbit_phi_;  // samples x basis
    long steps_ = 0;
    std::vector<long> node_step_;
    std::vector<double> node_t_;
    std::vector<double> w_;
    std::vector<Vec> node_d_;
    std::vector<Vec> node_Pd_;
    Mat node_phi_;
};

struct ApproxSolution {
    int version = 1;
    PhaseBasis basis;
    Mat u_coef;  // n x basis
    Mat x_coef;  // state_dim x basis, least-squares fit of the node states
    double penalty = 0.0;
    double eps_bar = 0.0;
    std::vector<double> penalty_log;
    int iterations = 0;
    std::string status;  // converged | stalled | max_iter | skipped
    double invariance_residual = 0.0;
};

/// Gauss-Newton / Levenberg-Marquardt descent on the basis coefficients of u~(d).
/// Starts from `U0` and stops once the penalty is <= max(eps_bar, 1e-20); eps_bar = inf
/// returns the initialization untouched.
ApproxSolution penalty_descent(const PenaltyProblem& problem, const Mat& U0, double eps_bar, int max_iter,
                              int stall_iters = 10);

void save_solution(const ApproxSolution& sol, const std::string& path);
ApproxSolution load_solution(const std::string& path);

/// u = u_eps(d) + K_x (x - x_eps(d)) with u_eps(d) = u~(d) + delta_eps(d) and K_x x = delta.
class ApproxController final : public Controller {
public:
    ApproxController(const Network& net, const ExoModel& exo, ApproxSolution sol);
    [[nodiscard]] std::string name() const override { return "approx"; }
    void control(const double* x, const double* d, const double* z, double* u) override;

private:
    const Network& net_;
    const ExoModel& exo_;
    ApproxSolution sol_;
    std::vector<double> phi_;
};

}  // namespace lfc
