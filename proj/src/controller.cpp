#include "lfc/controller.hpp"

#include <algorithm>

namespace lfc {

void DroopDeltaController::control(const double* x, const double*, const double*, double* u) {
    const double* delta = x + net_.off_delta();
    std::copy(delta, delta + net_.n(), u);
}

ClassicalController::ClassicalController(const Network& net, const ExoModel& exo, GridState reference,
                                         TrackerOptions opts)
    : net_(net), exo_(exo), reference_(std::move(reference)), opts_(opts) {}

Vec ClassicalController::initial_internal(const GridState&, const Vec& d0) {
    ManifoldTracker tracker(net_, exo_, opts_);
    Vec z = tracker.warm_start(d0, reference_);
    merge_gap_ = tracker.last_merge_gap();
    cache_valid_ = false;
    return z;
}

const ManifoldPoint& ClassicalController::point(const double* d, const double* z) {
    const int nd = exo_.dim(), nb = 3 * net_.n();
    const Eigen::Map<const Vec> dm(d, nd), zm(z, nb);
    if (!cache_valid_ || cache_d_ != dm || cache_z_ != zm) {
        cache_d_ = dm;
        cache_z_ = zm;
        cache_ = manifold_point(cache_z_, cache_d_, exo_, net_);
        cache_valid_ = true;
    }
    return cache_;
}

void ClassicalController::internal_rhs(const double*, const double* d, const double* z, double* dz) {
    const auto& p = net_.params();
    const int n = net_.n();
    const ManifoldPoint& mp = point(d, z);
    const Vec Vdot =
        (-net_.chi_d().cwiseProduct(e_matrix(mp.theta, net_) * mp.V) + p.E_f).cwiseQuotient(p.tau_v);
    const Vec lap = net_.laplacian_com() * (p.cost.q.cwiseProduct(mp.delta) + p.cost.r);
    for (int i = 0; i < n; ++i) {
        dz[i] = Vdot[i];
        dz[n + i] = (mp.u[i] - mp.P_c[i]) / p.tau_c[i];
        dz[2 * n + i] = (-mp.delta[i] + mp.P_c[i] - p.cost.q[i] * lap[i] / p.xi[i]) / p.tau_delta[i];
    }
}

void ClassicalController::control(const double* x, const double* d, const double* z, double* u) {
    const int n = net_.n();
    const ManifoldPoint& mp = point(d, z);
    const double* delta = x + net_.off_delta();
    for (int i = 0; i < n; ++i) u[i] = mp.u[i] + delta[i] - mp.delta[i];
}

}  // namespace lfc
