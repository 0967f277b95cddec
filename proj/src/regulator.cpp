#include "lfc/regulator.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <complex>

namespace lfc {

LieReport lie_relative_degree_check(const Network& net, const std::vector<LieSample>& samples, double step) {
    const int n = net.n();
    const auto& p = net.params();
    LieReport rep;
    rep.LgLf_h = Mat::Zero(n, n);
    const Vec u0 = Vec::Zero(n);
    for (const auto& s : samples) {
        auto Lf_h = [&](const GridState& x) { return dynamics_rhs(x, s.P_d, u0, net).omega; };
        for (int j = 0; j < n; ++j) {
            // input vector field of u_j: e_{P_c,j} / tau_c,j
            const double g = 1.0 / p.tau_c[j];
            GridState xp = s.x, xm = s.x;
            xp.P_c[j] += step * g;
            xm.P_c[j] -= step * g;
            const Vec dh = (xp.omega - xm.omega) / (2.0 * step);
            rep.max_abs_Lg_h = std::max(rep.max_abs_Lg_h, dh.cwiseAbs().maxCoeff());
            const Vec col = (Lf_h(xp) - Lf_h(xm)) / (2.0 * step);
            rep.LgLf_h.col(j) = col;
            for (int i = 0; i < n; ++i) {
                const double expected = i == j ? 1.0 / (p.tau_p[i] * p.tau_c[j]) : 0.0;
                rep.max_dev_LgLf_h = std::max(rep.max_dev_LgLf_h, std::abs(col[i] - expected));
            }
        }
    }
    return rep;
}

FeasibleAngles solve_feasible_angles(const Vec& P_c, const Vec& V, const Vec& P_d, const Network& net) {
    const Vec inj = P_c + P_d;
    const double scale = std::max(1.0, P_c.cwiseAbs().sum() + P_d.cwiseAbs().sum());
    if (std::abs(inj.sum()) > 1e-8 * scale) {
        throw std::invalid_argument("solve_feasible_angles: injections are not balanced (1'(P_c + P_d) = " +
                                    std::to_string(inj.sum()) + ")");
    }
    const auto pf = solve_power_flow(inj, V, net);
    FeasibleAngles fa;
    fa.theta = pf.theta;
    fa.phi = pf.phi;
    fa.residual = (line_outflow(pf.theta, V, net) - inj).lpNorm<Eigen::Infinity>();
    return fa;
}

Vec equivalent_control(const Vec& theta, const Vec& V, const Vec& P_c, const Vec& gamma_s, const Network& net) {
    const auto& p = net.params();
    if ((V.array() <= 0.0).any()) throw DomainError("equivalent_control: voltages must be positive");
    const Vec r = net.chi_d().cwiseProduct(e_matrix(theta, net) * V) - p.E_f;
    const Vec w = r.cwiseQuotient(p.tau_v.cwiseProduct(V));
    Vec term = Vec::Zero(net.n());
    for (int k = 0; k < net.m(); ++k) {
        const auto& l = p.lines[k];
        const double s = std::sin(theta[k]) * V[l.from] * V[l.to] * l.susceptance * (w[l.from] + w[l.to]);
        term[l.from] += s;
        term[l.to] -= s;
    }
    return P_c - p.tau_c.cwiseProduct(gamma_s + term);
}

GridState ManifoldPoint::state() const { return {theta, Vec::Zero(V.size()), V, P_c, delta}; }

ManifoldPoint manifold_point(const Vec& xb, const Vec& d, const ExoModel& exo, const Network& net) {
    const int n = net.n();
    if (xb.size() != 3 * n) throw std::invalid_argument("manifold_point: x_b must have 3n entries");
    ManifoldPoint mp;
    mp.V = xb.segment(0, n);
    mp.P_c = xb.segment(n, n);
    mp.delta = xb.segment(2 * n, n);
    const Vec P_d = exo.output(d);
    mp.theta = solve_power_flow(mp.P_c + P_d, mp.V, net).theta;
    mp.u = equivalent_control(mp.theta, mp.V, mp.P_c, exo.gamma() * exo.derivative(d), net);
    return mp;
}

Vec zero_dynamics_rhs(const Vec& xb, const Vec& d, const ExoModel& exo, const Network& net) {
    const auto& p = net.params();
    const int n = net.n();
    const ManifoldPoint mp = manifold_point(xb, d, exo, net);
    Vec out(3 * n);
    out.segment(0, n) =
        (-net.chi_d().cwiseProduct(e_matrix(mp.theta, net) * mp.V) + p.E_f).cwiseQuotient(p.tau_v);
    out.segment(n, n) = (mp.u - mp.P_c).cwiseQuotient(p.tau_c);
    const Vec lap = net.laplacian_com() * (p.cost.q.cwiseProduct(mp.delta) + p.cost.r);
    out.segment(2 * n, n) =
        (-mp.delta + mp.P_c - p.cost.q.cwiseProduct(lap).cwiseQuotient(p.xi)).cwiseQuotient(p.tau_delta);
    return out;
}

ManifoldTracker::ManifoldTracker(const Network& net, const ExoModel& exo, TrackerOptions opts)
    : net_(net), exo_(exo), opts_(opts) {
    if (exo.n_areas() != net.n()) throw std::invalid_argument("ManifoldTracker: exosystem/network size mismatch");
}

Vec ManifoldTracker::seed(const Vec& d, const Vec& theta_ref, const Vec& V) const {
    const int n = net_.n();
    Vec xb(3 * n);
    const Vec P_c = line_outflow(theta_ref, V, net_) - exo_.output(d);
    xb << V, P_c, delta_equilibrium(P_c, net_);
    return xb;
}

Vec ManifoldTracker::warm_start(const Vec& d0, const GridState& reference) const {
    const int nd = exo_.dim(), nb = 3 * net_.n();
    IntegratorOptions io;
    io.dt = opts_.dt;
    std::vector<double> d(d0.data(), d0.data() + nd);
    if (opts_.warmup > 0.0) {
        integrate(
            [&](const double* z, double* dz, double) {
                exo_.derivative_flat(z, dz);
                for (int i = 0; i < nd; ++i) dz[i] = -dz[i];
            },
            d, 0.0, opts_.warmup, io);
    }
    const Eigen::Map<const Vec> d_start(d.data(), nd);
    const Vec xb1 = seed(d_start, reference.theta, reference.V);
    Vec xb2 = seed(d_start, reference.theta, 1.01 * reference.V);
    xb2.tail(net_.n()).array() += 0.01;

    std::vector<double> s(static_cast<std::size_t>(nd + 2 * nb));
    std::copy(d.begin(), d.end(), s.begin());
    std::copy(xb1.data(), xb1.data() + nb, s.begin() + nd);
    std::copy(xb2.data(), xb2.data() + nb, s.begin() + nd + nb);
    integrate(
        [&](const double* z, double* dz, double) {
            exo_.derivative_flat(z, dz);
            const Eigen::Map<const Vec> dm(z, nd);
            for (int c = 0; c < 2; ++c) {
                const Eigen::Map<const Vec> xb(z + nd + c * nb, nb);
                const Vec r = zero_dynamics_rhs(xb, dm, exo_, net_);
                std::copy(r.data(), r.data() + nb, dz + nd + c * nb);
            }
        },
        s, 0.0, opts_.warmup, io);
    const Eigen::Map<const Vec> a(s.data() + nd, nb), b(s.data() + nd + nb, nb);
    merge_gap_ = (a - b).lpNorm<Eigen::Infinity>();
    if (!(merge_gap_ <= opts_.merge_tol)) {
        throw ConvergenceError("manifold warm-up did not converge; increase the warm-up horizon", merge_gap_);
    }
    return a;
}

ManifoldTracker::Trajectory ManifoldTracker::follow(const Vec& d0, const Vec& xb0, double horizon,
                                                    double record_dt) const {
    const int nd = exo_.dim(), nb = 3 * net_.n();
    std::vector<double> s(static_cast<std::size_t>(nd + nb));
    std::copy(d0.data(), d0.data() + nd, s.begin());
    std::copy(xb0.data(), xb0.data() + nb, s.begin() + nd);
    IntegratorOptions io;
    io.dt = opts_.dt;
    Trajectory tr;
    integrate(
        [&](const double* z, double* dz, double) {
            exo_.derivative_flat(z, dz);
            const Vec r = zero_dynamics_rhs(Eigen::Map<const Vec>(z + nd, nb), Eigen::Map<const Vec>(z, nd), exo_, net_);
            std::copy(r.data(), r.data() + nb, dz + nd);
        },
        s, 0.0, horizon, io,
        [&](double t, const double* z) {
            tr.t.push_back(t);
            tr.d.emplace_back(Eigen::Map<const Vec>(z, nd));
            tr.xb.emplace_back(Eigen::Map<const Vec>(z + nd, nb));
        },
        record_dt);
    return tr;
}

namespace {

struct SchurEval {
    double abs_det = 0.0;
    double sigma = 0.0;
    bool a11_singular = false;
};

SchurEval schur_at(const HyperbolicityReport& r, double rho, double thr) {
    using C = std::complex<double>;
    const int n = static_cast<int>(r.A11.rows());
    const CMat I = CMat::Identity(n, n);
    const CMat M11 = r.A11.cast<C>() - C(0.0, rho) * I;
    SchurEval ev;
    Eigen::JacobiSVD<CMat> s11(M11);
    ev.a11_singular = s11.singularValues()[n - 1] < thr;
    const CMat S = r.A22.cast<C>() - C(0.0, rho) * I - r.A21.cast<C>() * M11.partialPivLu().solve(r.A12.cast<C>());
    ev.abs_det = std::abs(S.partialPivLu().determinant());
    Eigen::JacobiSVD<CMat> ss(S);
    ev.sigma = ss.singularValues()[n - 1];
    return ev;
}

}  // namespace

HyperbolicityReport analyze_hyperbolicity(const Mat& A, int n, const HyperbolicityOptions& opts) {
    if (A.rows() != 3 * n || A.cols() != 3 * n) throw std::invalid_argument("analyze_hyperbolicity: A must be 3n x 3n");
    HyperbolicityReport r;
    r.A = A;
    r.A11 = A.block(0, 0, n, n);
    r.A12 = A.block(0, n, n, n);
    r.A21 = A.block(n, 0, n, n);
    r.A22 = A.block(n, n, n, n);
    r.A33 = A.block(2 * n, 2 * n, n, n);
    const double scale = std::max(1.0, A.cwiseAbs().rowwise().sum().maxCoeff());
    r.threshold = opts.rel_tol * scale;

    r.eig_A11 = Eigen::EigenSolver<Mat>(r.A11).eigenvalues();
    r.a11_margin = r.eig_A11.real().cwiseAbs().minCoeff();
    r.eig_A33_sym = Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (r.A33 + r.A33.transpose())).eigenvalues();
    r.a33_negative_definite = r.eig_A33_sym.maxCoeff() < 0.0;

    std::vector<double> grid;
    const int half = std::max(2, opts.grid_points / 2);
    for (int k = 0; k < half; ++k) grid.push_back(opts.rho_max * k / (half - 1));
    const int nlog = std::max(2, opts.grid_points - half);
    const double decades = std::log10(opts.rho_max) + 4.0;
    for (int k = 0; k < nlog; ++k) grid.push_back(std::pow(10.0, -4.0 + decades * k / (nlog - 1)));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    r.grid_points = static_cast<int>(grid.size());

    std::vector<SchurEval> evals(grid.size());
    r.min_abs_det = INFINITY;
    r.min_sigma = INFINITY;
    auto record = [&](double rho, const SchurEval& ev) {
        if (ev.abs_det < r.min_abs_det) {
            r.min_abs_det = ev.abs_det;
            r.rho_at_min_det = rho;
        }
        if (ev.sigma < r.min_sigma) {
            r.min_sigma = ev.sigma;
            r.rho_at_min_sigma = rho;
        }
    };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        evals[k] = schur_at(r, grid[k], r.threshold);
        if (evals[k].a11_singular) {
            r.notes.push_back("A11 - j rho I nearly singular at rho = " + std::to_string(grid[k]));
        }
        record(grid[k], evals[k]);
    }
    // Brent on every local minimum of sigma (and of |det| below the floor).
    auto refine = [&](std::size_t k, auto key) {
        const double lo = k == 0 ? grid[0] : grid[k - 1];
        const double hi = k + 1 == grid.size() ? grid[k] : grid[k + 1];
        if (hi <= lo) return;
        const auto best = boost::math::tools::brent_find_minima(
            [&](double rho) { return key(schur_at(r, rho, r.threshold)); }, lo, hi, 40);
        record(best.first, schur_at(r, best.first, r.threshold));
        ++r.refinements;
    };
    auto is_local_min = [&](std::size_t k, auto key) {
        return (k == 0 || key(evals[k]) <= key(evals[k - 1])) &&
               (k + 1 == grid.size() || key(evals[k]) <= key(evals[k + 1]));
    };
    const auto by_sigma = [](const SchurEval& e) { return e.sigma; };
    const auto by_det = [](const SchurEval& e) { return e.abs_det; };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (is_local_min(k, by_sigma)) refine(k, by_sigma);
        if (is_local_min(k, by_det) && evals[k].abs_det < opts.det_floor) refine(k, by_det);
    }

    r.eig_full = Eigen::EigenSolver<Mat>(A).eigenvalues();
    r.full_margin = r.eig_full.real().cwiseAbs().minCoeff();
    int stable_others = 0;
    for (const auto& z : r.eig_full) {
        if (std::abs(z.real()) < r.threshold) ++r.near_zero;
        else if (z.real() < 0.0) ++stable_others;
    }
    r.passes = r.a11_margin > r.threshold && r.min_sigma > r.threshold && r.a33_negative_definite;
    r.hyperbolic_modulo_family = r.near_zero == n && stable_others == 2 * n;
    if (!r.passes && r.near_zero > 0) {
        r.notes.push_back(std::to_string(r.near_zero) +
                          " eigenvalue(s) of the zero-dynamics Jacobian lie on the imaginary axis");
    }
    return r;
}

HyperbolicityReport hyperbolicity_check(const Network& net, const ExoModel& exo, const Vec& d_bar,
                                        const GridState& eq, const HyperbolicityOptions& opts) {
    const int n = net.n();
    if (!exo.is_fixed_point(d_bar)) {
        throw std::invalid_argument("hyperbolicity_check: d_bar is not an exosystem equilibrium");
    }
    Vec xb(3 * n);
    xb << eq.V, eq.P_c, eq.delta;
    const double r0 = zero_dynamics_rhs(xb, d_bar, exo, net).lpNorm<Eigen::Infinity>();
    Mat A(3 * n, 3 * n);
    for (int j = 0; j < 3 * n; ++j) {
        const double h = opts.fd_step * std::max(1.0, std::abs(xb[j]));
        Vec xp = xb, xm = xb;
        xp[j] += h;
        xm[j] -= h;
        A.col(j) = (zero_dynamics_rhs(xp, d_bar, exo, net) - zero_dynamics_rhs(xm, d_bar, exo, net)) / (2.0 * h);
    }
    auto rep = analyze_hyperbolicity(A, n, opts);
    if (r0 > 1e-8) {
        rep.notes.push_back("zero-dynamics residual at the supplied equilibrium is " + std::to_string(r0));
    }
    return rep;
}

}  // namespace lfc
