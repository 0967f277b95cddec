#pragma once

// Multi-area power network: topology, swing/voltage/turbine dynamics, generation
// cost, optimal dispatch, steady-state solving and the steady-state security test.

#include "lfc/common.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lfc {

/// Transmission line between two areas (0-based). `from` is the positive end and
/// is always the lower index.
struct Line {
    int from = 0;
    int to = 0;
    double susceptance = 0.0;  // B_ij > 0, p.u.
};

/// J(P_c) = P_c' diag(q) P_c + r' P_c + 1' c
struct CostModel {
    Vec q;
    Vec r;
    Vec c;
};

struct NetworkParams {
    int n = 0;
    std::vector<Line> lines;
    Vec B_self;     // B_ii < 0
    Vec tau_p;      // inertia
    Vec tau_v;      // transient open-circuit constant
    Vec tau_c;      // turbine
    Vec tau_delta;  // distributed auxiliary dynamics
    Vec psi;        // damping
    Vec xi;         // speed regulation
    Vec X_d;
    Vec X_d_prime;
    Vec E_f;        // constant exciter voltage
    CostModel cost;
    std::vector<std::pair<int, int>> comm_edges;  // unit-weight communication graph
    double omega_base = 0.0;                      // rad/s
    double S_base = 0.0;                          // MVA
};

/// Four-area benchmark parameters with its physical and
/// communication graphs; R = C = 0.
NetworkParams benchmark_params();

/// Validated, immutable network with its derived matrices.
class Network {
public:
    explicit Network(NetworkParams params);

    [[nodiscard]] const NetworkParams& params() const noexcept { return p_; }
    [[nodiscard]] int n() const noexcept { return p_.n; }
    [[nodiscard]] int m() const noexcept { return static_cast<int>(p_.lines.size()); }

    [[nodiscard]] const Mat& incidence() const noexcept { return A_; }
    [[nodiscard]] const Mat& abs_incidence() const noexcept { return A_abs_; }
    [[nodiscard]] const Mat& laplacian_com() const noexcept { return L_com_; }
    [[nodiscard]] const Vec& chi_d() const noexcept { return chi_d_; }
    [[nodiscard]] const CostModel& cost() const noexcept { return p_.cost; }

    /// Non-fatal parameter observations (e.g. B_ii not dominating the line susceptances).
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    // Flat state layout x = (theta, omega, V, P_c, delta).
    [[nodiscard]] int state_dim() const noexcept { return m() + 4 * n(); }
    [[nodiscard]] int off_omega() const noexcept { return m(); }
    [[nodiscard]] int off_V() const noexcept { return m() + n(); }
    [[nodiscard]] int off_Pc() const noexcept { return m() + 2 * n(); }
    [[nodiscard]] int off_delta() const noexcept { return m() + 3 * n(); }

private:
    NetworkParams p_;
    Mat A_;
    Mat A_abs_;
    Mat L_com_;
    Vec chi_d_;
    std::vector<std::string> warnings_;
};

struct GridState {
    Vec theta;  // m line angle differences
    Vec omega;  // n frequency deviations, rad/s
    Vec V;      // n voltages
    Vec P_c;    // n conventional generation
    Vec delta;  // n auxiliary consensus state

    [[nodiscard]] Vec pack() const;
    static GridState unpack(const Vec& x, const Network& net);
    static GridState zeros(const Network& net);
};

/// Node-line incidence matrix (n x m). Rejects self-loops, duplicate lines and
/// disconnected graphs.
Mat incidence_from_edges(std::span<const Line> lines, int n);

/// Graph Laplacian of an undirected unit-weight graph; rejects disconnected graphs.
Mat laplacian_from_edges(std::span<const std::pair<int, int>> edges, int n);

/// E(theta): E_ii = 1/chi_i - B_ii, E_ij = -B_ij cos(theta_k).
Mat e_matrix(const Vec& theta, const Network& net);

/// Diagonal of Upsilon(V): V_i V_j B_ij per line.
Vec line_coupling(const Vec& V, const Network& net);

/// A Upsilon(V) sin(theta): net power leaving each area over the lines.
Vec line_outflow(const Vec& theta, const Vec& V, const Network& net);

/// Time derivative of the augmented grid state. When `P_c_measured` is given the
/// auxiliary dynamics are driven by the measurement instead of the true P_c.
GridState dynamics_rhs(const GridState& x, const Vec& P_d, const Vec& u, const Network& net,
                       const Vec* P_c_measured = nullptr);

/// Allocation-free variant on the flat layout; `pc_measured` may be null.
void dynamics_rhs_flat(const double* x, const double* P_d, const double* u,
                       const double* pc_measured, double* dx, const Network& net);

double generation_cost(const Vec& P_c, const CostModel& cost);

/// Minimizer of J subject to 1'(P_c + P_d) = 0.
Vec optimal_dispatch(const Vec& P_d, const CostModel& cost);

/// delta-equilibrium for a given generation: (I + xi^-1 Q L Q) delta = P_c - xi^-1 Q L R.
Vec delta_equilibrium(const Vec& P_c, const Network& net);

struct PowerFlowResult {
    Vec theta;
    Vec phi;  // node angles, phi_0 = 0
    double residual = 0.0;
    double imbalance = 0.0;  // 1'injection / n removed before solving
    int iterations = 0;
};

/// Solves A Upsilon(V) sin(A' phi) = injection for phi (phi_0 = 0) by Newton from
/// phi = 0. The mean of `injection` is removed first (least-squares sense). Throws
/// InfeasibleError if Newton fails or any line leaves (-pi/2, pi/2).
PowerFlowResult solve_power_flow(const Vec& injection, const Vec& V, const Network& net,
                                 double tol = 1e-13, int max_iter = 60);

struct SecurityReport {
    bool secure = false;
    double min_angle_margin = 0.0;  // pi/2 - max |theta_l|
    Vec node_margins;
    double min_node_margin = 0.0;
};

SecurityReport security_check(const GridState& state, const Network& net);

struct SteadyStateOptions {
    std::optional<Vec> dispatch;  // balanced P_c; optimal dispatch when empty
    std::optional<Vec> phi_guess;
    std::optional<Vec> V_guess;
    double tol = 1e-10;
    int max_iter = 200;
};

struct SteadyState {
    GridState state;
    Vec u_bar;
    double residual = 0.0;
    int iterations = 0;
    SecurityReport security;
};

/// Equilibrium with omega = 0 for constant P_d. The dispatch family is closed
/// either by the optimal dispatch or a caller-provided balanced P_c; the network
/// and voltage equations are solved by damped Newton. Insecure solutions are
/// returned with `security.secure == false`.
SteadyState steady_state_solve(const Vec& P_d, const Network& net, const SteadyStateOptions& opts = {});

/// Infinity norm of the steady-state equations at (state, u_bar, P_d).
double steady_state_residual(const GridState& state, const Vec& u_bar, const Vec& P_d,
                             const Network& net);

}  // namespace lfc
