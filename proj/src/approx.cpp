#include "lfc/approx.hpp"

#include "lfc/integrate.hpp"
#include "lfc/regulator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace lfc {

Vec extended_output(const GridState& x) {
    Vec q(x.omega.size() + x.P_c.size());
    q << x.omega, x.P_c;
    return q;
}

TrackingError tracking_error(const GridState& x, const Vec& P_d, const CostModel& cost) {
    const int n = static_cast<int>(x.omega.size());
    TrackingError te;
    te.e = extended_output(x);
    te.e.tail(n) -= optimal_dispatch(P_d, cost);
    te.norm = te.e.norm();
    return te;
}

TrackingError tracking_error(const GridState& x, const Vec& d, const CostModel& cost, const ExoModel& exo) {
    return tracking_error(x, exo.output(d), cost);
}

double block_phase(const ExoBlock& b, const double* d) {
    const double c = b.kind == BlockKind::Wind ? b.wind.fixed_point() : 0.0;
    return std::atan2(-(d[b.offset + 1] - c), d[b.offset] - c);
}

std::vector<PhaseGroup> phase_groups(const ExoModel& exo) {
    std::vector<PhaseGroup> groups;
    const auto& blocks = exo.blocks();
    for (int i = 0; i < static_cast<int>(blocks.size()); ++i) {
        const auto& b = blocks[i];
        if (b.kind == BlockKind::Constant) continue;
        if (b.kind == BlockKind::Wind) {
            groups.push_back({b.wind.kappa0, true, {i}});
            continue;
        }
        auto it = std::find_if(groups.begin(), groups.end(), [&](const PhaseGroup& g) {
            return !g.wind && std::abs(g.rate - b.rate) <= 1e-12 * std::abs(b.rate);
        });
        if (it == groups.end()) groups.push_back({b.rate, false, {i}});
        else it->blocks.push_back(i);
    }
    return groups;
}

PhaseBasis::PhaseBasis(const ExoModel& exo, int order) : PhaseBasis(phase_groups(exo), order) {}

PhaseBasis::PhaseBasis(std::vector<PhaseGroup> groups, int order) : groups_(std::move(groups)), order_(order) {
    if (order < 0) throw std::invalid_argument("PhaseBasis: order must be non-negative");
}

void PhaseBasis::eval(const ExoModel& exo, const double* d, double* out) const {
    out[0] = 1.0;
    int k = 1;
    for (const auto& g : groups_) {
        const double a = block_phase(exo.blocks()[static_cast<std::size_t>(g.blocks.front())], d);
        for (int h = 1; h <= order_; ++h) {
            out[k++] = std::cos(h * a);
            out[k++] = std::sin(h * a);
        }
    }
}

Vec PhaseBasis::eval(const ExoModel& exo, const Vec& d) const {
    Vec out(size());
    eval(exo, d.data(), out.data());
    return out;
}

bool PhaseBasis::compatible(const ExoModel& exo) const {
    const auto ref = phase_groups(exo);
    if (ref.size() != groups_.size()) return false;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        if (ref[i].wind != groups_[i].wind || ref[i].blocks != groups_[i].blocks) return false;
        if (std::abs(ref[i].rate - groups_[i].rate) > 1e-12 * std::max(1.0, std::abs(ref[i].rate))) return false;
    }
    return true;
}

PenaltyProblem::PenaltyProblem(const Network& net, const ExoModel& exo, const Vec& d0, PhaseBasis basis,
                               ApproxOptions opts, GridState x_init)
    : net_(net), exo_(exo), d0_(d0), basis_(std::move(basis)), opts_(opts), x_init_(std::move(x_init)) {
    if (d0.size() != exo.dim()) throw std::invalid_argument("PenaltyProblem: d0 dimension mismatch");
    if (!basis_.compatible(exo)) throw std::invalid_argument("PenaltyProblem: basis does not match the exosystem");
    constant_ = exo.varying_indices().empty();
    if (constant_) {
        node_t_ = {0.0};
        w_ = {1.0};
        node_d_ = {d0_};
        node_Pd_ = {exo.output(d0_)};
        node_phi_ = basis_.eval(exo, d0_).transpose();
    } else {
        precompute_orbit();
    }
}

void PenaltyProblem::precompute_orbit() {
    const double h = opts_.dt;
    if (!(h > 0.0) || !(opts_.t_avg > 0.0) || !(opts_.t_trans >= 0.0) || !(opts_.node_dt >= h)) {
        throw std::invalid_argument("PenaltyProblem: need dt > 0, t_avg > 0, t_trans >= 0 and node_dt >= dt");
    }
    const long n_trans = std::lround(opts_.t_trans / h);
    const long n_avg = std::lround(opts_.t_avg / h);
    const long stride = std::max(1L, std::lround(opts_.node_dt / h));
    if (std::abs(static_cast<double>(stride) * h - opts_.node_dt) > 1e-9 * opts_.node_dt) {
        throw std::invalid_argument("PenaltyProblem: node_dt must be a multiple of dt");
    }
    steps_ = n_trans + n_avg;
    const int nd = exo_.dim(), nb = basis_.size();
    const long samples = 2 * steps_ + 1;
    orbit_Pd_.assign(static_cast<std::size_t>(samples), Vec());
    orbit_phi_.resize(samples, nb);
    std::vector<Vec> orbit_d(static_cast<std::size_t>(samples));

    IntegratorOptions io;
    io.dt = 0.5 * h;
    auto store = [&](long j, const double* z) {
        const Eigen::Map<const Vec> dm(z, nd);
        orbit_d[static_cast<std::size_t>(j)] = dm;
    };
    const long zero = 2 * n_trans;
    std::vector<double> d(d0_.data(), d0_.data() + nd);
    long j = zero;
    integrate([&](const double* z, double* dz, double) { exo_.derivative_flat(z, dz); }, d, 0.0,
              0.5 * h * static_cast<double>(2 * n_avg), io, [&](double, const double* z) { store(j++, z); }, 0.5 * h);
    d.assign(d0_.data(), d0_.data() + nd);
    j = zero;
    if (n_trans > 0) {
        integrate(
            [&](const double* z, double* dz, double) {
                exo_.derivative_flat(z, dz);
                for (int i = 0; i < nd; ++i) dz[i] = -dz[i];
            },
            d, 0.0, 0.5 * h * static_cast<double>(2 * n_trans), io, [&](double, const double* z) { store(j--, z); },
            0.5 * h);
    }
    for (long s = 0; s < samples; ++s) {
        const auto& ds = orbit_d[static_cast<std::size_t>(s)];
        orbit_Pd_[static_cast<std::size_t>(s)] = exo_.output(ds);
        orbit_phi_.row(s) = basis_.eval(exo_, ds).transpose();
    }

    const long K = n_avg / stride;
    std::vector<double> raw;
    for (long k = 1; k < K; ++k) {
        const double sk = static_cast<double>(k) / static_cast<double>(K);
        node_step_.push_back(n_trans + k * stride);
        node_t_.push_back(static_cast<double>(k * stride) * h);
        raw.push_back(std::exp(-1.0 / (sk * (1.0 - sk))));
    }
    double total = 0.0;
    for (double v : raw) total += v;
    w_.resize(raw.size());
    node_phi_.resize(static_cast<Eigen::Index>(raw.size()), nb);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        w_[k] = raw[k] / total;
        const long s = 2 * node_step_[k];
        node_d_.push_back(orbit_d[static_cast<std::size_t>(s)]);
        node_Pd_.push_back(orbit_Pd_[static_cast<std::size_t>(s)]);
        node_phi_.row(static_cast<Eigen::Index>(k)) = orbit_phi_.row(s);
    }
}

void PenaltyProblem::closed_loop_rhs(const Mat& U, const double* xd, double* dxd) const {
    const int nx = net_.state_dim(), nd = exo_.dim(), n = net_.n();
    const double* d = xd + nx;
    Vec phi = basis_.eval(exo_, Eigen::Map<const Vec>(d, nd));
    Vec u = U * phi;
    for (int i = 0; i < n; ++i) u[i] += xd[net_.off_delta() + i];
    const Vec Pd = exo_.output(Eigen::Map<const Vec>(d, nd));
    dynamics_rhs_flat(xd, Pd.data(), u.data(), nullptr, dxd, net_);
    exo_.derivative_flat(d, dxd + nx);
}

namespace {

/// Closed-loop equilibrium for constant injection and input offset: unknowns
/// (phi_2..n, common frequency, V, P_c, delta).
GridState constant_equilibrium(const Network& net, const Vec& P_d, const Vec& u_off, const GridState& guess) {
    const auto& p = net.params();
    const int n = net.n(), m = net.m();
    const Mat& A = net.incidence();
    Vec phi0 = A.transpose().completeOrthogonalDecomposition().solve(guess.theta);
    phi0.array() -= phi0[0];
    Vec y(4 * n);
    y << phi0.tail(n - 1), guess.omega.mean(), guess.V, guess.P_c, guess.delta;
    auto unpack = [&](const Vec& v) {
        GridState s;
        Vec phi(n);
        phi << 0.0, v.head(n - 1);
        s.theta = A.transpose() * phi;
        s.omega = Vec::Constant(n, v[n - 1]);
        s.V = v.segment(n, n);
        s.P_c = v.segment(2 * n, n);
        s.delta = v.segment(3 * n, n);
        return s;
    };
    auto F = [&](const Vec& v) {
        const GridState s = unpack(v);
        const Vec u = u_off + s.delta;
        Vec r(4 * n);
        r.segment(0, n) = -p.psi.cwiseProduct(s.omega) + s.P_c + P_d - line_outflow(s.theta, s.V, net);
        r.segment(n, n) = -net.chi_d().cwiseProduct(e_matrix(s.theta, net) * s.V) + p.E_f;
        r.segment(2 * n, n) = -s.P_c - s.omega.cwiseQuotient(p.xi) + u;
        const Vec lap = net.laplacian_com() * (p.cost.q.cwiseProduct(s.delta) + p.cost.r);
        r.segment(3 * n, n) = -s.delta + s.P_c - p.cost.q.cwiseProduct(lap).cwiseQuotient(p.xi);
        return r;
    };
    (void)m;
    Vec r = F(y);
    double res = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 100 && res > 1e-14; ++it) {
        Mat J(4 * n, 4 * n);
        for (int j = 0; j < 4 * n; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(y[j]));
            Vec yp = y, ym = y;
            yp[j] += h;
            ym[j] -= h;
            J.col(j) = (F(yp) - F(ym)) / (2.0 * h);
        }
        const Vec step = J.partialPivLu().solve(-r);
        double alpha = 1.0;
        bool improved = false;
        for (int k = 0; k < 40; ++k) {
            const Vec yn = y + alpha * step;
            const Vec rn = F(yn);
            const double resn = rn.lpNorm<Eigen::Infinity>();
            if (resn < res) {
                y = yn;
                r = rn;
                res = resn;
                improved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!improved) break;
    }
    if (!(res < 1e-9)) throw ConvergenceError("closed-loop equilibrium solve failed", res);
    return unpack(y);
}

}  // namespace

std::vector<Vec> PenaltyProblem::solve_invariance(const Mat& U) const { return solve_invariance(U, x_init_.pack()); }

std::vector<Vec> PenaltyProblem::solve_invariance(const Mat& U, const Vec& x_start) const {
    const int n = net_.n(), nx = net_.state_dim();
    if (U.rows() != n || U.cols() != basis_.size()) throw std::invalid_argument("solve_invariance: U has wrong shape");
    if (constant_) {
        const Vec u_off = U * node_phi_.row(0).transpose();
        return {constant_equilibrium(net_, node_Pd_[0], u_off, GridState::unpack(x_start, net_)).pack()};
    }
    const double h = opts_.dt;
    const int off_d = net_.off_delta();
    // u at every orbit sample without the delta feedback
    const Mat Uphi = orbit_phi_ * U.transpose();  // samples x n
    std::vector<double> x(x_start.data(), x_start.data() + nx), k1(nx), k2(nx), k3(nx), k4(nx), tmp(nx), u(n);
    auto f = [&](const double* xs, long sample, double* dx) {
        for (int i = 0; i < n; ++i) u[i] = Uphi(sample, i) + xs[off_d + i];
        dynamics_rhs_flat(xs, orbit_Pd_[static_cast<std::size_t>(sample)].data(), u.data(), nullptr, dx, net_);
    };
    std::vector<Vec> out;
    out.reserve(node_step_.size());
    std::size_t next = 0;
    for (long s = 0; s < steps_ && next < node_step_.size(); ++s) {
        const long j = 2 * s;
        f(x.data(), j, k1.data());
        for (int i = 0; i < nx; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        f(tmp.data(), j + 1, k2.data());
        for (int i = 0; i < nx; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        f(tmp.data(), j + 1, k3.data());
        for (int i = 0; i < nx; ++i) tmp[i] = x[i] + h * k3[i];
        f(tmp.data(), j + 2, k4.data());
        for (int i = 0; i < nx; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (s + 1 == node_step_[next]) {
            out.emplace_back(Eigen::Map<const Vec>(x.data(), nx));
            if (!out.back().allFinite()) throw ConvergenceError("inner invariance solve diverged", INFINITY);
            ++next;
        }
    }
    return out;
}

Vec PenaltyProblem::residual_from_states(const std::vector<Vec>& xs) const {
    const int n = net_.n();
    Vec r(static_cast<Eigen::Index>(2 * n * xs.size()));
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const GridState s = GridState::unpack(xs[k], net_);
        const double sw = std::sqrt(w_[k]);
        r.segment(static_cast<Eigen::Index>(2 * n * k), n) = sw * s.omega;
        r.segment(static_cast<Eigen::Index>(2 * n * k + n), n) = sw * (s.P_c - optimal_dispatch(node_Pd_[k], net_.cost()));
    }
    return r;
}

Vec PenaltyProblem::residual(const Mat& U) const { return residual_from_states(solve_invariance(U)); }

Mat PenaltyProblem::jacobian(const Mat& U) const {
    const int np = n_params();
    Mat J;
    for (int j = 0; j < np; ++j) {
        const double h = opts_.fd_step * std::max(1.0, std::abs(U.data()[j]));
        Mat Up = U, Um = U;
        Up.data()[j] += h;
        Um.data()[j] -= h;
        const Vec col = (residual(Up) - residual(Um)) / (2.0 * h);
        if (J.size() == 0) J.resize(col.size(), np);
        J.col(j) = col;
    }
    return J;
}

namespace {

std::vector<std::size_t> pick_nodes(std::size_t available, int nodes) {
    std::vector<std::size_t> idx;
    const std::size_t want = std::min<std::size_t>(available, static_cast<std::size_t>(std::max(nodes, 1)));
    for (std::size_t k = 0; k < want; ++k) idx.push_back((k * available) / want + (available / want) / 2);
    for (auto& i : idx) i = std::min(i, available - 1);
    return idx;
}

}  // namespace

double PenaltyProblem::invariance_residual(const Mat& U, int nodes) const {
    const auto xs = solve_invariance(U);
    const int nx = net_.state_dim(), nd = exo_.dim();
    Vec xd(nx + nd), f(nx + nd);
    if (constant_) {
        xd << xs[0], node_d_[0];
        closed_loop_rhs(U, xd.data(), f.data());
        return f.head(nx).lpNorm<Eigen::Infinity>();
    }
    if (xs.size() < 2) throw std::invalid_argument("invariance_residual: fewer than two nodes");
    const double span = node_t_[1] - node_t_[0];
    IntegratorOptions io;
    io.dt = span / 64.0;
    double worst = 0.0;
    for (std::size_t k : pick_nodes(xs.size() - 1, nodes)) {
        std::vector<double> s(static_cast<std::size_t>(nx + nd));
        std::copy(xs[k].data(), xs[k].data() + nx, s.begin());
        std::copy(node_d_[k].data(), node_d_[k].data() + nd, s.begin() + nx);
        integrate([&](const double* z, double* dz, double) { closed_loop_rhs(U, z, dz); }, s, 0.0, span, io);
        const Eigen::Map<const Vec> flowed(s.data(), nx);
        worst = std::max(worst, (flowed - xs[k + 1]).lpNorm<Eigen::Infinity>() / span);
    }
    return worst;
}

double PenaltyProblem::initialization_gap(const Mat& U, int nodes) const {
    const auto a = solve_invariance(U);
    GridState alt = x_init_;
    alt.omega.array() += 0.01;
    alt.delta.array() += 0.01;
    alt.V *= 1.01;
    const auto b = solve_invariance(U, alt.pack());
    double worst = 0.0;
    for (std::size_t k : pick_nodes(a.size(), nodes)) worst = std::max(worst, (a[k] - b[k]).lpNorm<Eigen::Infinity>());
    return worst;
}

Mat PenaltyProblem::classical_initialization(const GridState& reference) const {
    const int n = net_.n(), nb = basis_.size();
    ManifoldTracker tracker(net_, exo_);
    if (constant_) {
        const ManifoldPoint mp = manifold_point(tracker.seed(d0_, reference.theta, reference.V), d0_, exo_, net_);
        Mat U = Mat::Zero(n, nb);
        U.col(0) = mp.u - mp.delta;
        return U;
    }
    const Vec xb0 = tracker.warm_start(d0_, reference);
    const auto tr = tracker.follow(d0_, xb0, node_t_.back() + 0.5 * opts_.node_dt, opts_.node_dt);
    Mat Y(static_cast<Eigen::Index>(node_t_.size()), n);
    for (std::size_t k = 0; k < node_t_.size(); ++k) {
        const auto idx = static_cast<std::size_t>(std::lround(node_t_[k] / opts_.node_dt));
        const ManifoldPoint mp = manifold_point(tr.xb[idx], tr.d[idx], exo_, net_);
        Y.row(static_cast<Eigen::Index>(k)) = (mp.u - mp.delta).transpose();
    }
    const Eigen::Map<const Vec> w(w_.data(), static_cast<Eigen::Index>(w_.size()));
    const Mat G = node_phi_.transpose() * w.asDiagonal() * node_phi_;
    const Mat B = node_phi_.transpose() * w.asDiagonal() * Y;
    return G.ldlt().solve(B).transpose();
}

ApproxSolution penalty_descent(const PenaltyProblem& problem, const Mat& U0, double eps_bar, int max_iter,
                              int stall_iters) {
    const auto& opts = problem.options();
    ApproxSolution sol;
    sol.basis = problem.basis();
    sol.eps_bar = eps_bar;
    Mat U = U0;
    Vec r = problem.residual(U);
    double I = r.squaredNorm();
    sol.penalty_log.push_back(I);
    const double tol = std::max(eps_bar, 1e-20);
    int iter = 0;
    if (std::isinf(eps_bar)) {
        sol.status = "skipped";
    } else {
        double lambda = opts.lm_lambda0;
        int fails = 0;
        while (I > tol && iter < max_iter && fails < stall_iters) {
            const Mat J = problem.jacobian(U);
            const Vec g = J.transpose() * r;
            const Mat H = J.transpose() * J;
            const Vec diag = H.diagonal().cwiseMax(1e-12 * std::max(1.0, H.diagonal().maxCoeff()));
            bool accepted = false;
            while (!accepted && iter < max_iter && fails < stall_iters) {
                ++iter;
                Mat Hl = H;
                Hl.diagonal() += lambda * diag;
                const Vec step = -Hl.ldlt().solve(g);
                Mat Un = U;
                Eigen::Map<Vec>(Un.data(), Un.size()) += step;
                const Vec rn = problem.residual(Un);
                const double In = rn.squaredNorm();
                // Armijo on I with gradient 2 J'r
                if (std::isfinite(In) && In <= I + 1e-4 * 2.0 * g.dot(step) && In < I) {
                    U = Un;
                    r = rn;
                    I = In;
                    sol.penalty_log.push_back(I);
                    lambda = std::max(lambda / 10.0, 1e-12);
                    fails = 0;
                    accepted = true;
                } else {
                    lambda *= 10.0;
                    ++fails;
                }
            }
        }
        if (I <= tol) sol.status = "converged";
        else if (fails >= stall_iters) sol.status = "stalled";
        else sol.status = "max_iter";
    }
    sol.iterations = iter;
    sol.u_coef = U;
    sol.penalty = I;

    const auto xs = problem.solve_invariance(U);
    const auto& w = problem.weights();
    const Mat& Phi = problem.node_basis();
    Mat X(static_cast<Eigen::Index>(xs.size()), problem.network().state_dim());
    for (std::size_t k = 0; k < xs.size(); ++k) X.row(static_cast<Eigen::Index>(k)) = xs[k].transpose();
    const Eigen::Map<const Vec> wm(w.data(), static_cast<Eigen::Index>(w.size()));
    const Mat G = Phi.transpose() * wm.asDiagonal() * Phi;
    sol.x_coef = G.ldlt().solve(Phi.transpose() * wm.asDiagonal() * X).transpose();
    sol.invariance_residual = problem.invariance_residual(U, 100);
    return sol;
}

namespace {

using nlohmann::json;

json mat_to_json(const Mat& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

Mat mat_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Mat M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols) throw ConfigError("solution file: ragged matrix");
        for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = j[i][k].get<double>();
    }
    return M;
}

}  // namespace

void save_solution(const ApproxSolution& sol, const std::string& path) {
    json j;
    j["format"] = "lfc-approx-solution";
    j["version"] = sol.version;
    j["order"] = sol.basis.order();
    json groups = json::array();
    for (const auto& g : sol.basis.groups()) groups.push_back({{"rate", g.rate}, {"wind", g.wind}, {"blocks", g.blocks}});
    j["groups"] = groups;
    j["u_coef"] = mat_to_json(sol.u_coef);
    j["x_coef"] = mat_to_json(sol.x_coef);
    j["penalty"] = sol.penalty;
    j["eps_bar"] = std::isinf(sol.eps_bar) ? json("inf") : json(sol.eps_bar);
    j["penalty_log"] = sol.penalty_log;
    j["iterations"] = sol.iterations;
    j["status"] = sol.status;
    j["invariance_residual"] = sol.invariance_residual;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write solution file '" + path + "'");
    out << j.dump(2) << '\n';
}

ApproxSolution load_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open solution file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("solution file '" + path + "': " + e.what());
    }
    if (j.value("format", "") != "lfc-approx-solution") throw ConfigError("'" + path + "' is not a solution file");
    if (j.value("version", 0) != 1) throw ConfigError("unsupported solution version in '" + path + "'");
    ApproxSolution sol;
    std::vector<PhaseGroup> groups;
    for (const auto& g : j.at("groups")) {
        groups.push_back({g.at("rate").get<double>(), g.at("wind").get<bool>(), g.at("blocks").get<std::vector<int>>()});
    }
    sol.basis = PhaseBasis(std::move(groups), j.at("order").get<int>());
    sol.u_coef = mat_from_json(j.at("u_coef"));
    sol.x_coef = mat_from_json(j.at("x_coef"));
    sol.penalty = j.at("penalty").get<double>();
    const auto& eb = j.at("eps_bar");
    sol.eps_bar = eb.is_string() ? std::numeric_limits<double>::infinity() : eb.get<double>();
    sol.penalty_log = j.at("penalty_log").get<std::vector<double>>();
    sol.iterations = j.at("iterations").get<int>();
    sol.status = j.at("status").get<std::string>();
    sol.invariance_residual = j.value("invariance_residual", 0.0);
    if (sol.u_coef.cols() != sol.basis.size() || sol.x_coef.cols() != sol.basis.size()) {
        throw ConfigError("solution file '" + path + "': coefficient shapes do not match the basis");
    }
    return sol;
}

ApproxController::ApproxController(const Network& net, const ExoModel& exo, ApproxSolution sol)
    : net_(net), exo_(exo), sol_(std::move(sol)) {
    if (!sol_.basis.compatible(exo)) throw ConfigError("approximate solution was computed for a different exosystem");
    if (sol_.u_coef.rows() != net.n() || sol_.x_coef.rows() != net.state_dim()) {
        throw ConfigError("approximate solution does not match the network size");
    }
    phi_.resize(static_cast<std::size_t>(sol_.basis.size()));
}

void ApproxController::control(const double* x, const double* d, const double*, double* u) {
    const int n = net_.n(), nb = sol_.basis.size();
    sol_.basis.eval(exo_, d, phi_.data());
    const Eigen::Map<const Vec> phi(phi_.data(), nb);
    for (int i = 0; i < n; ++i) {
        const double delta_eps = sol_.x_coef.row(net_.off_delta() + i).dot(phi);
        const double u_eps = sol_.u_coef.row(i).dot(phi) + delta_eps;
        u[i] = u_eps + (x[net_.off_delta() + i] - delta_eps);
    }
}

}  // namespace lfc
