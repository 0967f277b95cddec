#include "lfc/network.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

namespace lfc {

namespace {

bool connected(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    int components = n;
    for (auto [a, b] : edges) {
        int ra = find(a), rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --components;
        }
    }
    return components == 1;
}

void check_edge_list(const std::vector<std::pair<int, int>>& edges, int n, const char* what) {
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n) {
            std::ostringstream os;
            os << what << ": line (" << a + 1 << "," << b + 1 << ") references a node outside 1.." << n;
            throw ConfigError(os.str());
        }
        if (a == b) {
            throw ConfigError(std::string(what) + ": self-loop at node " + std::to_string(a + 1));
        }
        auto key = std::minmax(a, b);
        if (!seen.insert(key).second) {
            std::ostringstream os;
            os << what << ": duplicate line " << key.first + 1 << "-" << key.second + 1;
            throw ConfigError(os.str());
        }
    }
    if (n > 1 && !connected(n, edges)) {
        throw ConfigError(std::string(what) + ": graph is not connected");
    }
}

void require_size(const Vec& v, int n, const char* name) {
    if (v.size() != n) {
        throw ConfigError(std::string(name) + " has " + std::to_string(v.size()) +
                          " entries, expected " + std::to_string(n));
    }
    if (!v.allFinite()) throw ConfigError(std::string(name) + " contains non-finite values");
}

void require_positive(const Vec& v, const char* name) {
    if ((v.array() <= 0.0).any()) throw ConfigError(std::string(name) + " must be strictly positive");
}

}  // namespace

NetworkParams benchmark_params() {
    NetworkParams p;
    p.n = 4;
    p.lines = {{0, 1, 28.1}, {0, 3, 22.8}, {1, 2, 30.7}, {2, 3, 17.9}};
    auto v4 = [](double a, double b, double c, double d) {
        Vec v(4);
        v << a, b, c, d;
        return v;
    };
    p.B_self = v4(-56.3, -58.5, -56.2, -49.4);
    p.tau_v = v4(6.32, 6.63, 7.15, 6.46);
    p.X_d = v4(1.76, 1.81, 1.87, 1.91);
    p.X_d_prime = v4(0.27, 0.17, 0.23, 0.35);
    p.E_f = v4(3.85, 4.43, 3.96, 3.88);
    p.tau_p = v4(3.95, 4.71, 5.23, 4.17);
    p.psi = v4(1.82, 1.61, 1.33, 1.55);
    p.tau_c = v4(7.2, 6.8, 8.9, 7.8);
    p.tau_delta = Vec::Constant(4, 0.23);
    p.xi = Vec::Constant(4, 0.73);
    p.cost.q = v4(0.95, 0.85, 1.2, 0.92);
    p.cost.r = Vec::Zero(4);
    p.cost.c = Vec::Zero(4);
    p.comm_edges = {{0, 3}, {1, 2}, {0, 2}, {2, 3}};
    p.omega_base = 120.0 * std::numbers::pi;
    p.S_base = 1000.0;
    return p;
}

Network::Network(NetworkParams params) : p_(std::move(params)) {
    const int n = p_.n;
    if (n < 1) throw ConfigError("network needs at least one area");
    for (auto& l : p_.lines) {
        if (l.from > l.to) std::swap(l.from, l.to);
    }
    A_ = incidence_from_edges(p_.lines, n);
    A_abs_ = A_.cwiseAbs();
    L_com_ = laplacian_from_edges(p_.comm_edges, n);

    require_size(p_.B_self, n, "B_self");
    require_size(p_.tau_p, n, "tau_p");
    require_size(p_.tau_v, n, "tau_v");
    require_size(p_.tau_c, n, "tau_c");
    require_size(p_.tau_delta, n, "tau_delta");
    require_size(p_.psi, n, "psi");
    require_size(p_.xi, n, "xi");
    require_size(p_.X_d, n, "X_d");
    require_size(p_.X_d_prime, n, "X_d_prime");
    require_size(p_.E_f, n, "E_f");
    require_size(p_.cost.q, n, "q");
    if (p_.cost.r.size() == 0) p_.cost.r = Vec::Zero(n);
    if (p_.cost.c.size() == 0) p_.cost.c = Vec::Zero(n);
    require_size(p_.cost.r, n, "R");
    require_size(p_.cost.c, n, "C");
    require_positive(p_.tau_p, "tau_p");
    require_positive(p_.tau_v, "tau_v");
    require_positive(p_.tau_c, "tau_c");
    require_positive(p_.tau_delta, "tau_delta");
    require_positive(p_.xi, "xi");
    require_positive(p_.cost.q, "q");
    if ((p_.psi.array() < 0.0).any()) throw ConfigError("psi must be non-negative");

    chi_d_ = p_.X_d - p_.X_d_prime;
    if ((chi_d_.array() <= 0.0).any()) {
        throw ConfigError("X_d must exceed X_d_prime in every area");
    }
    if ((p_.B_self.array() >= 0.0).any()) throw ConfigError("B_self must be negative");

    Vec line_sum = Vec::Zero(n);
    for (const auto& l : p_.lines) {
        if (!(l.susceptance > 0.0) || !std::isfinite(l.susceptance)) {
            throw ConfigError("line susceptances must be positive");
        }
        line_sum[l.from] += l.susceptance;
        line_sum[l.to] += l.susceptance;
    }
    for (int i = 0; i < n; ++i) {
        const double diag = 1.0 / chi_d_[i] - p_.B_self[i];
        if (!(diag > line_sum[i])) {
            throw ConfigError("E(theta) is not strictly diagonally dominant in area " +
                              std::to_string(i + 1));
        }
        if (!(-p_.B_self[i] > line_sum[i])) {
            std::ostringstream os;
            os << "area " << i + 1 << ": |B_ii| = " << -p_.B_self[i]
               << " does not exceed the sum of line susceptances " << line_sum[i]
               << "; E(theta) stays diagonally dominant through 1/chi_d";
            warnings_.push_back(os.str());
        }
    }
}

Vec GridState::pack() const {
    Vec x(theta.size() + 4 * omega.size());
    x << theta, omega, V, P_c, delta;
    return x;
}

GridState GridState::unpack(const Vec& x, const Network& net) {
    const int m = net.m(), n = net.n();
    if (x.size() != net.state_dim()) throw std::invalid_argument("GridState::unpack: wrong state size");
    GridState s;
    s.theta = x.segment(0, m);
    s.omega = x.segment(m, n);
    s.V = x.segment(m + n, n);
    s.P_c = x.segment(m + 2 * n, n);
    s.delta = x.segment(m + 3 * n, n);
    return s;
}

GridState GridState::zeros(const Network& net) {
    const int m = net.m(), n = net.n();
    return {Vec::Zero(m), Vec::Zero(n), Vec::Zero(n), Vec::Zero(n), Vec::Zero(n)};
}

Mat incidence_from_edges(std::span<const Line> lines, int n) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(lines.size());
    for (const auto& l : lines) edges.emplace_back(l.from, l.to);
    check_edge_list(edges, n, "physical network");
    Mat A = Mat::Zero(n, static_cast<Eigen::Index>(lines.size()));
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const auto [lo, hi] = std::minmax(lines[k].from, lines[k].to);
        A(lo, static_cast<Eigen::Index>(k)) = 1.0;
        A(hi, static_cast<Eigen::Index>(k)) = -1.0;
    }
    return A;
}

Mat laplacian_from_edges(std::span<const std::pair<int, int>> edges, int n) {
    std::vector<std::pair<int, int>> e(edges.begin(), edges.end());
    check_edge_list(e, n, "communication network");
    Mat L = Mat::Zero(n, n);
    for (auto [a, b] : e) {
        L(a, a) += 1.0;
        L(b, b) += 1.0;
        L(a, b) -= 1.0;
        L(b, a) -= 1.0;
    }
    return L;
}

Mat e_matrix(const Vec& theta, const Network& net) {
    if (theta.size() != net.m()) throw std::invalid_argument("e_matrix: theta must have m entries");
    const auto& p = net.params();
    Mat E = Mat::Zero(net.n(), net.n());
    for (int i = 0; i < net.n(); ++i) E(i, i) = 1.0 / net.chi_d()[i] - p.B_self[i];
    for (int k = 0; k < net.m(); ++k) {
        const auto& l = p.lines[k];
        const double v = -l.susceptance * std::cos(theta[k]);
        E(l.from, l.to) = v;
        E(l.to, l.from) = v;
    }
    return E;
}

Vec line_coupling(const Vec& V, const Network& net) {
    Vec u(net.m());
    for (int k = 0; k < net.m(); ++k) {
        const auto& l = net.params().lines[k];
        u[k] = V[l.from] * V[l.to] * l.susceptance;
    }
    return u;
}

Vec line_outflow(const Vec& theta, const Vec& V, const Network& net) {
    Vec out = Vec::Zero(net.n());
    for (int k = 0; k < net.m(); ++k) {
        const auto& l = net.params().lines[k];
        const double f = V[l.from] * V[l.to] * l.susceptance * std::sin(theta[k]);
        out[l.from] += f;
        out[l.to] -= f;
    }
    return out;
}

void dynamics_rhs_flat(const double* x, const double* P_d, const double* u,
                       const double* pc_measured, double* dx, const Network& net) {
    const auto& p = net.params();
    const int n = net.n(), m = net.m();
    const double* theta = x;
    const double* omega = x + m;
    const double* V = x + m + n;
    const double* Pc = x + m + 2 * n;
    const double* delta = x + m + 3 * n;
    double* dtheta = dx;
    double* domega = dx + m;
    double* dV = dx + m + n;
    double* dPc = dx + m + 2 * n;
    double* ddelta = dx + m + 3 * n;
    const double* chi = net.chi_d().data();

    for (int i = 0; i < n; ++i) {
        domega[i] = -p.psi[i] * omega[i] + Pc[i] + P_d[i];
        dV[i] = (1.0 / chi[i] - p.B_self[i]) * V[i];
    }
    for (int k = 0; k < m; ++k) {
        const auto& l = p.lines[k];
        const int a = l.from, b = l.to;
        dtheta[k] = omega[a] - omega[b];
        const double s = std::sin(theta[k]), c = std::cos(theta[k]);
        const double flow = V[a] * V[b] * l.susceptance * s;
        domega[a] -= flow;
        domega[b] += flow;
        dV[a] -= l.susceptance * c * V[b];
        dV[b] -= l.susceptance * c * V[a];
    }
    const Mat& L = net.laplacian_com();
    const double* pcm = pc_measured != nullptr ? pc_measured : Pc;
    for (int i = 0; i < n; ++i) {
        domega[i] /= p.tau_p[i];
        dV[i] = (-chi[i] * dV[i] + p.E_f[i]) / p.tau_v[i];
        dPc[i] = (-Pc[i] - omega[i] / p.xi[i] + u[i]) / p.tau_c[i];
        double lap = 0.0;
        for (int j = 0; j < n; ++j) {
            const double lij = L(i, j);
            if (lij != 0.0) lap += lij * (p.cost.q[j] * delta[j] + p.cost.r[j]);
        }
        ddelta[i] = (-delta[i] + pcm[i] - p.cost.q[i] / p.xi[i] * lap) / p.tau_delta[i];
    }
}

GridState dynamics_rhs(const GridState& x, const Vec& P_d, const Vec& u, const Network& net,
                       const Vec* P_c_measured) {
    const Vec flat = x.pack();
    const int n = net.n();
    if (flat.size() != net.state_dim() || P_d.size() != n || u.size() != n) {
        throw std::invalid_argument("dynamics_rhs: dimension mismatch");
    }
    if (!flat.allFinite() || !P_d.allFinite() || !u.allFinite() ||
        (P_c_measured != nullptr && !P_c_measured->allFinite())) {
        throw std::invalid_argument("dynamics_rhs: non-finite input");
    }
    Vec dx(flat.size());
    dynamics_rhs_flat(flat.data(), P_d.data(), u.data(),
                      P_c_measured != nullptr ? P_c_measured->data() : nullptr, dx.data(), net);
    return GridState::unpack(dx, net);
}

double generation_cost(const Vec& P_c, const CostModel& cost) {
    return P_c.dot(cost.q.cwiseProduct(P_c)) + cost.r.dot(P_c) + cost.c.sum();
}

Vec optimal_dispatch(const Vec& P_d, const CostModel& cost) {
    // Stationarity of J: 2 Q P + R = lambda 1, with 1'(P + P_d) = 0.
    const Vec qinv = cost.q.cwiseInverse();
    const Vec half_r = 0.5 * cost.r;
    const double lam = (qinv.dot(half_r) - P_d.sum()) / qinv.sum();
    return qinv.cwiseProduct(Vec::Constant(P_d.size(), lam) - half_r);
}

Vec delta_equilibrium(const Vec& P_c, const Network& net) {
    const auto& p = net.params();
    const int n = net.n();
    const Mat Q = p.cost.q.asDiagonal();
    const Mat Xinv = p.xi.cwiseInverse().asDiagonal();
    const Mat M = Mat::Identity(n, n) + Xinv * Q * net.laplacian_com() * Q;
    const Vec rhs = P_c - Xinv * Q * net.laplacian_com() * p.cost.r;
    return M.partialPivLu().solve(rhs);
}

namespace {

double dc_loading_estimate(const Vec& injection, const Vec& V, const Network& net) {
    // least-norm flows f with A f = injection, compared against line capacities
    const Mat& A = net.incidence();
    const Vec f = A.completeOrthogonalDecomposition().solve(injection);
    const Vec cap = line_coupling(V, net);
    double worst = 0.0;
    for (int k = 0; k < net.m(); ++k) worst = std::max(worst, std::abs(f[k]) / cap[k]);
    return worst;
}

}  // namespace

PowerFlowResult solve_power_flow(const Vec& injection, const Vec& V, const Network& net, double tol,
                                 int max_iter) {
    const int n = net.n(), m = net.m();
    if (injection.size() != n || V.size() != n) throw std::invalid_argument("solve_power_flow: size");
    if ((V.array() <= 0.0).any()) throw DomainError("solve_power_flow: voltages must be positive");
    const auto& lines = net.params().lines;
    PowerFlowResult r;
    r.imbalance = injection.mean();
    const Vec inj = injection.array() - r.imbalance;
    const double scale = std::max(1.0, inj.lpNorm<Eigen::Infinity>());
    r.phi = Vec::Zero(n);
    r.theta = Vec::Zero(m);
    if (n == 1) return r;

    const Vec ups = line_coupling(V, net);
    auto residual = [&](const Vec& theta, Vec& F) {
        F = -inj;
        for (int k = 0; k < m; ++k) {
            const double f = ups[k] * std::sin(theta[k]);
            F[lines[k].from] += f;
            F[lines[k].to] -= f;
        }
    };
    Vec F(n), theta(m);
    residual(r.theta, F);
    double res = F.lpNorm<Eigen::Infinity>();
    Mat J(n - 1, n - 1);
    for (int it = 0; it < max_iter && res > tol * scale; ++it) {
        J.setZero();
        for (int k = 0; k < m; ++k) {
            const double w = ups[k] * std::cos(r.theta[k]);
            const int a = lines[k].from - 1, b = lines[k].to - 1;
            if (a >= 0) J(a, a) += w;
            if (b >= 0) J(b, b) += w;
            if (a >= 0 && b >= 0) {
                J(a, b) -= w;
                J(b, a) -= w;
            }
        }
        const Vec step = J.partialPivLu().solve(-F.tail(n - 1));
        if (!step.allFinite()) break;
        double alpha = 1.0;
        Vec phi_new(n);
        for (int h = 0; h < 30; ++h) {
            phi_new = r.phi;
            phi_new.tail(n - 1) += alpha * step;
            for (int k = 0; k < m; ++k) theta[k] = phi_new[lines[k].from] - phi_new[lines[k].to];
            Vec Fn(n);
            residual(theta, Fn);
            const double rn = Fn.lpNorm<Eigen::Infinity>();
            if (rn < res || h == 29) {
                r.phi = phi_new;
                r.theta = theta;
                F = Fn;
                res = rn;
                break;
            }
            alpha *= 0.5;
        }
        r.iterations = it + 1;
    }
    r.residual = res;
    const double max_angle = r.theta.cwiseAbs().maxCoeff();
    if (!(res <= tol * scale * 10.0) || !(max_angle < std::numbers::pi / 2)) {
        throw InfeasibleError("power flow has no solution on the secure branch",
                              dc_loading_estimate(inj, V, net));
    }
    return r;
}

SecurityReport security_check(const GridState& s, const Network& net) {
    const auto& p = net.params();
    const int n = net.n();
    SecurityReport rep;
    rep.min_angle_margin = std::numbers::pi / 2 -
                           (s.theta.size() > 0 ? s.theta.cwiseAbs().maxCoeff() : 0.0);
    bool angles_ok = rep.min_angle_margin > 0.0;
    rep.node_margins.resize(n);
    for (int i = 0; i < n; ++i) rep.node_margins[i] = 1.0 / net.chi_d()[i] - p.B_self[i];
    bool nodes_ok = true;
    for (int k = 0; k < net.m(); ++k) {
        const auto& l = p.lines[k];
        const double c = std::cos(s.theta[k]);
        const double s2 = std::pow(std::sin(s.theta[k]), 2);
        if (!(c > 0.0)) {
            nodes_ok = false;
            rep.node_margins[l.from] = -std::numeric_limits<double>::infinity();
            rep.node_margins[l.to] = -std::numeric_limits<double>::infinity();
            continue;
        }
        rep.node_margins[l.from] += l.susceptance * (s.V[l.from] + s.V[l.to] * s2) / (s.V[l.from] * c);
        rep.node_margins[l.to] += l.susceptance * (s.V[l.to] + s.V[l.from] * s2) / (s.V[l.to] * c);
    }
    rep.min_node_margin = rep.node_margins.minCoeff();
    nodes_ok = nodes_ok && rep.min_node_margin > 0.0;
    rep.secure = angles_ok && nodes_ok;
    return rep;
}

double steady_state_residual(const GridState& s, const Vec& u_bar, const Vec& P_d, const Network& net) {
    const auto& p = net.params();
    const Vec out = line_outflow(s.theta, s.V, net);
    const Mat E = e_matrix(s.theta, net);
    double r = (net.incidence().transpose() * s.omega).lpNorm<Eigen::Infinity>();
    r = std::max(r, (-p.psi.cwiseProduct(s.omega) + s.P_c + P_d - out).lpNorm<Eigen::Infinity>());
    r = std::max(r, (-net.chi_d().cwiseProduct(E * s.V) + p.E_f).lpNorm<Eigen::Infinity>());
    r = std::max(r, (-s.P_c - s.omega.cwiseQuotient(p.xi) + u_bar).lpNorm<Eigen::Infinity>());
    const Vec marg = p.cost.q.cwiseProduct(s.delta) + p.cost.r;
    const Vec lap = net.laplacian_com() * marg;
    r = std::max(r, (-s.delta + s.P_c - p.cost.q.cwiseProduct(lap).cwiseQuotient(p.xi))
                        .lpNorm<Eigen::Infinity>());
    return r;
}

SteadyState steady_state_solve(const Vec& P_d, const Network& net, const SteadyStateOptions& opts) {
    const auto& p = net.params();
    const int n = net.n(), m = net.m();
    if (P_d.size() != n) throw std::invalid_argument("steady_state_solve: P_d size");

    const Vec Pc = opts.dispatch ? *opts.dispatch : optimal_dispatch(P_d, p.cost);
    if (Pc.size() != n) throw std::invalid_argument("steady_state_solve: dispatch size");
    const double imbalance = (Pc + P_d).sum();
    if (std::abs(imbalance) > 1e-9 * std::max(1.0, P_d.cwiseAbs().sum())) {
        throw std::invalid_argument("steady_state_solve: dispatch does not balance P_d (1'(P_c+P_d) = " +
                                    std::to_string(imbalance) + ")");
    }
    const Vec inj = Pc + P_d;
    const Vec& chi = net.chi_d();
    const auto& lines = p.lines;

    Vec phi = opts.phi_guess ? *opts.phi_guess : Vec::Zero(n);
    Vec V;
    if (opts.V_guess) {
        V = *opts.V_guess;
    } else {
        const Mat E0 = e_matrix(Vec::Zero(m), net);
        V = (chi.asDiagonal() * E0).partialPivLu().solve(p.E_f);
    }
    if (phi.size() != n || V.size() != n || (V.array() <= 0.0).any()) {
        throw std::invalid_argument("steady_state_solve: initial guess must have positive voltages");
    }

    auto theta_of = [&](const Vec& ph) {
        Vec th(m);
        for (int k = 0; k < m; ++k) th[k] = ph[lines[k].from] - ph[lines[k].to];
        return th;
    };
    // F = (outflow - inj on rows 1..n-1, chi E V - E_f on all rows)
    auto residual = [&](const Vec& ph, const Vec& v) {
        const Vec th = theta_of(ph);
        const Vec out = line_outflow(th, v, net) - inj;
        const Vec g = chi.cwiseProduct(e_matrix(th, net) * v) - p.E_f;
        Vec F(2 * n - 1);
        F << out.tail(n - 1), g;
        return F;
    };
    auto jacobian = [&](const Vec& ph, const Vec& v) {
        const Vec th = theta_of(ph);
        Mat J = Mat::Zero(2 * n, 2 * n);  // rows: out(n), g(n); cols: phi(n), V(n)
        for (int i = 0; i < n; ++i) J(n + i, n + i) = chi[i] * (1.0 / chi[i] - p.B_self[i]);
        for (int k = 0; k < m; ++k) {
            const int a = lines[k].from, b = lines[k].to;
            const double B = lines[k].susceptance;
            const double s = std::sin(th[k]), c = std::cos(th[k]);
            const double w = v[a] * v[b] * B * c;  // d flow / d theta
            // flow_k = Va Vb B sin(theta), theta = phi_a - phi_b; out_a += flow, out_b -= flow
            J(a, a) += w;
            J(a, b) -= w;
            J(b, a) -= w;
            J(b, b) += w;
            J(a, n + a) += v[b] * B * s;
            J(a, n + b) += v[a] * B * s;
            J(b, n + a) -= v[b] * B * s;
            J(b, n + b) -= v[a] * B * s;
            // g_a = chi_a (E_aa Va - B cos(theta) Vb), g_b symmetric
            J(n + a, n + b) -= chi[a] * B * c;
            J(n + b, n + a) -= chi[b] * B * c;
            J(n + a, a) += chi[a] * B * s * v[b];
            J(n + a, b) -= chi[a] * B * s * v[b];
            J(n + b, a) += chi[b] * B * s * v[a];
            J(n + b, b) -= chi[b] * B * s * v[a];
        }
        Mat Jr(2 * n - 1, 2 * n - 1);
        Jr << J.block(1, 1, n - 1, n - 1), J.block(1, n, n - 1, n), J.block(n, 1, n, n - 1),
            J.block(n, n, n, n);
        return Jr;
    };

    SteadyState out;
    Vec F = residual(phi, V);
    double res = F.lpNorm<Eigen::Infinity>();
    int it = 0;
    for (; it < opts.max_iter && res > 1e-3 * opts.tol; ++it) {
        const Vec step = jacobian(phi, V).partialPivLu().solve(-F);
        if (!step.allFinite()) break;
        double alpha = 1.0;
        bool improved = false;
        for (int h = 0; h < 40; ++h) {
            Vec phi_n = phi, V_n = V;
            phi_n.tail(n - 1) += alpha * step.head(n - 1);
            V_n += alpha * step.tail(n);
            if ((V_n.array() > 0.0).all()) {
                const Vec Fn = residual(phi_n, V_n);
                const double rn = Fn.lpNorm<Eigen::Infinity>();
                if (rn < res) {
                    phi = phi_n;
                    V = V_n;
                    F = Fn;
                    res = rn;
                    improved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!improved) break;
    }
    if (!(res <= opts.tol)) {
        throw ConvergenceError("steady_state_solve: Newton did not converge", res);
    }

    out.state.theta = theta_of(phi);
    out.state.omega = Vec::Zero(n);
    out.state.V = V;
    out.state.P_c = Pc;
    out.state.delta = delta_equilibrium(Pc, net);
    out.u_bar = Pc;
    out.iterations = it;
    out.residual = steady_state_residual(out.state, out.u_bar, P_d, net);
    out.security = security_check(out.state, net);
    return out;
}

}  // namespace lfc
