#pragma once

#include "lfc/common.hpp"
#include "lfc/exosystem.hpp"
#include "lfc/network.hpp"
#include "lfc/regulator.hpp"

#include <string>

namespace lfc {

/// Feedback law advanced together with the plant. The closed-loop state is
/// (grid state, exosystem state, controller internal state).
class Controller {
public:
    virtual ~Controller() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual int internal_dim() const { return 0; }
    virtual Vec initial_internal(const GridState& /*x0*/, const Vec& /*d0*/) { return {}; }
    virtual void internal_rhs(const double* /*x*/, const double* /*d*/, const double* /*z*/, double* /*dz*/) {}
    virtual void control(const double* x, const double* d, const double* z, double* u) = 0;
};

/// u = delta: the distributed stabilizing law, used as baseline.
class DroopDeltaController final : public Controller {
public:
    explicit DroopDeltaController(const Network& net) : net_(net) {}
    [[nodiscard]] std::string name() const override { return "droop"; }
    void control(const double* x, const double* d, const double* z, double* u) override;

private:
    const Network& net_;
};

/// u = u_e*(x(d), d) + delta - delta(d) with x(d) from the manifold tracker, whose
/// state is carried as the controller's internal state.
class ClassicalController final : public Controller {
public:
    /// `reference` pins the equilibrium family (normally the pre-switch steady state).
    ClassicalController(const Network& net, const ExoModel& exo, GridState reference, TrackerOptions opts = {});
    [[nodiscard]] std::string name() const override { return "classical"; }
    [[nodiscard]] int internal_dim() const override { return 3 * net_.n(); }
    Vec initial_internal(const GridState& x0, const Vec& d0) override;
    void internal_rhs(const double* x, const double* d, const double* z, double* dz) override;
    void control(const double* x, const double* d, const double* z, double* u) override;
    [[nodiscard]] double merge_gap() const noexcept { return merge_gap_; }

private:
    const ManifoldPoint& point(const double* d, const double* z);
    const Network& net_;
    const ExoModel& exo_;
    GridState reference_;
    TrackerOptions opts_;
    double merge_gap_ = 0.0;
    Vec cache_d_, cache_z_;
    ManifoldPoint cache_;
    bool cache_valid_ = false;
};

}  // namespace lfc
