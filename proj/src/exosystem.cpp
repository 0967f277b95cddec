#include "lfc/exosystem.hpp"

#include "lfc/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace lfc {

double WindParams::fixed_point() const { return std::exp(h - s0 * s0 / (2.0 * kappa0)); }

ExoModel::ExoModel(int n_areas) : n_(n_areas) {
    if (n_areas < 1) throw std::invalid_argument("ExoModel: need at least one area");
    for (int i = 0; i < n_; ++i) {
        ExoBlock b;
        b.kind = BlockKind::Constant;
        b.area = i;
        b.offset = dim_;
        b.dim = 2;
        b.gain[0] = 1.0;  // wind offset
        b.gain[1] = 1.0;  // load offset
        blocks_.push_back(b);
        dim_ += 2;
    }
    rebuild_gamma();
}

int ExoModel::add_wind(int area, const WindParams& w) {
    if (area < 0 || area >= n_) throw std::invalid_argument("ExoModel: area out of range");
    if (!(w.kappa0 != 0.0) || !std::isfinite(w.fixed_point())) {
        throw std::invalid_argument("ExoModel: wind parameters give no finite fixed point");
    }
    ExoBlock b;
    b.kind = BlockKind::Wind;
    b.area = area;
    b.offset = dim_;
    b.dim = 2;
    b.channel = Channel::Wind;
    b.wind = w;
    b.gain[0] = 1.0;
    blocks_.push_back(b);
    dim_ += 2;
    rebuild_gamma();
    return static_cast<int>(blocks_.size()) - 1;
}

int ExoModel::add_rotation(int area, Channel ch, double rate, double gain_cos, double gain_sin) {
    if (area < 0 || area >= n_) throw std::invalid_argument("ExoModel: area out of range");
    if (!(rate != 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("ExoModel: oscillatory components need a nonzero rate");
    }
    ExoBlock b;
    b.kind = BlockKind::Rotation;
    b.area = area;
    b.offset = dim_;
    b.dim = 2;
    b.channel = ch;
    b.rate = rate;
    b.gain[0] = gain_cos;
    b.gain[1] = gain_sin;
    blocks_.push_back(b);
    dim_ += 2;
    rebuild_gamma();
    return static_cast<int>(blocks_.size()) - 1;
}

void ExoModel::rebuild_gamma() {
    gamma_w_ = Mat::Zero(n_, dim_);
    gamma_l_ = Mat::Zero(n_, dim_);
    for (const auto& b : blocks_) {
        if (b.kind == BlockKind::Constant) {
            gamma_w_(b.area, b.offset) = b.gain[0];
            gamma_l_(b.area, b.offset + 1) = b.gain[1];
            continue;
        }
        Mat& g = b.channel == Channel::Wind ? gamma_w_ : gamma_l_;
        g(b.area, b.offset) += b.gain[0];
        g(b.area, b.offset + 1) += b.gain[1];
    }
    gamma_ = gamma_w_ - gamma_l_;
}

void ExoModel::derivative_flat(const double* d, double* dd) const {
    for (const auto& b : blocks_) {
        const int o = b.offset;
        switch (b.kind) {
            case BlockKind::Constant:
                dd[o] = 0.0;
                dd[o + 1] = 0.0;
                break;
            case BlockKind::Rotation:
                dd[o] = b.rate * d[o + 1];
                dd[o + 1] = -b.rate * d[o];
                break;
            case BlockKind::Wind: {
                const double z1 = d[o], z2 = d[o + 1];
                if (!(z1 > 1e-9) || !(z2 > 1e-9)) {
                    throw DomainError("wind exosystem state left the positive quadrant (area " +
                                      std::to_string(b.area + 1) + ")");
                }
                const auto& w = b.wind;
                const double c = -w.kappa0 * w.h + 0.5 * w.s0 * w.s0;
                dd[o] = z2 * (w.kappa0 * std::log(z2) + c);
                dd[o + 1] = -z1 * (w.kappa0 * std::log(z1) + c);
                break;
            }
        }
    }
}

Vec ExoModel::derivative(const Vec& d) const {
    if (d.size() != dim_) throw std::invalid_argument("ExoModel::derivative: dimension mismatch");
    Vec dd(dim_);
    derivative_flat(d.data(), dd.data());
    return dd;
}

Vec ExoModel::output(const Vec& d) const {
    if (d.size() != dim_) throw std::invalid_argument("ExoModel::output: dimension mismatch");
    return gamma_ * d;
}

std::vector<int> ExoModel::varying_indices() const {
    std::vector<int> idx;
    for (const auto& b : blocks_) {
        if (b.kind == BlockKind::Constant) continue;
        for (int k = 0; k < b.dim; ++k) idx.push_back(b.offset + k);
    }
    return idx;
}

bool ExoModel::is_fixed_point(const Vec& d, double tol) const {
    return derivative(d).lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, d.lpNorm<Eigen::Infinity>());
}

Vec ExoModel::equilibrium_like(const Vec& d) const {
    Vec out = d;
    for (const auto& b : blocks_) {
        if (b.kind == BlockKind::Rotation) {
            out[b.offset] = out[b.offset + 1] = 0.0;
        } else if (b.kind == BlockKind::Wind) {
            out[b.offset] = out[b.offset + 1] = b.wind.fixed_point();
        }
    }
    return out;
}

Scenario1ExoConfig scenario1_defaults() {
    Scenario1ExoConfig c;
    const double kappa[] = {-8.78, -8.82, -8.69, -8.58};
    const double s0[] = {0.23, 0.24, 0.25, 0.21};
    const double h[] = {9.63, 9.71, 9.59, 9.68};
    for (int i = 0; i < 4; ++i) c.wind.push_back({kappa[i], s0[i], h[i]});
    c.wind_base = Vec::Constant(4, 0.1);
    c.wind_offset = Vec(4);
    c.wind_offset << 0.005, 0.004, 0.006, 0.0045;
    c.load_base = Vec(4);
    c.load_base << 0.3, 0.36, 0.27, 0.33;
    c.load_amplitude = Vec(4);
    c.load_amplitude << 0.01, 0.006, 0.008, 0.012;
    c.load_rate = 2.0 * std::numbers::pi / 15.0;
    return c;
}

ExoScenario build_scenario1_exo(const Scenario1ExoConfig& cfg) {
    const int n = static_cast<int>(cfg.wind.size());
    if (n < 1 || cfg.wind_base.size() != n || cfg.wind_offset.size() != n || cfg.load_base.size() != n ||
        cfg.load_amplitude.size() != n) {
        throw ConfigError("scenario-1 exosystem: per-area vectors must all have the same length");
    }
    ExoModel model(n);
    for (int i = 0; i < n; ++i) model.add_wind(i, cfg.wind[i]);
    for (int i = 0; i < n; ++i) model.add_rotation(i, Channel::Load, cfg.load_rate, 1.0, 0.0);

    Vec d0 = Vec::Zero(model.dim());
    for (const auto& b : model.blocks()) {
        const int i = b.area;
        if (b.kind == BlockKind::Wind) {
            const double zs = b.wind.fixed_point();
            if (!(zs + cfg.wind_offset[i] > 1e-9)) throw ConfigError("scenario-1 wind offset leaves the domain");
            d0[b.offset] = zs + cfg.wind_offset[i];
            d0[b.offset + 1] = zs;
            d0[model.constant_index(i)] = cfg.wind_base[i] - zs;
        } else if (b.kind == BlockKind::Rotation) {
            d0[b.offset] = cfg.load_amplitude[i];
            d0[b.offset + 1] = 0.0;
            d0[model.constant_index(i) + 1] = cfg.load_base[i];
        }
    }
    return {std::move(model), d0};
}

double SinusoidBankParams::eval(double t) const {
    double v = offset;
    for (const auto& s : terms) v += s.amplitude * std::sin(s.rate * t + s.phase);
    return v;
}

Scenario3ExoConfig scenario3_defaults() {
    Scenario3ExoConfig c;
    c.load = {
        {0.0375, {{11.88, 0.059, 0.89}, {11.19, 0.063, 3.96}}},
        {0.05, {{0.814, 0.032, 1.27}, {0.262, 0.121, 3.56}}},
        {0.0375, {{0.968, 0.016, 1.75}, {0.211, 0.134, 3.28}}},
        {0.0125, {{1.129, 0.011, 0.65}, {0.168, 0.209, 2.42}}},
    };
    const SinusoidBankParams wind{0.05, {{0.19, 0.007, 1.22}, {0.071, 0.117, 1.26}}};
    c.wind.assign(4, wind);
    return c;
}

ExoScenario build_scenario3_exo(const Scenario3ExoConfig& cfg) {
    const int n = static_cast<int>(cfg.load.size());
    if (n < 1 || static_cast<int>(cfg.wind.size()) != n) {
        throw ConfigError("scenario-3 exosystem: load and wind banks must cover the same areas");
    }
    ExoModel model(n);
    auto add_bank = [&](int area, Channel ch, const SinusoidBankParams& bank) {
        for (const auto& s : bank.terms) {
            if (s.amplitude == 0.0) continue;
            model.add_rotation(area, ch, s.rate, s.amplitude * std::sin(s.phase),
                               -s.amplitude * std::cos(s.phase));
        }
    };
    for (int i = 0; i < n; ++i) {
        add_bank(i, Channel::Load, cfg.load[i]);
        add_bank(i, Channel::Wind, cfg.wind[i]);
    }
    Vec d0 = Vec::Zero(model.dim());
    for (int i = 0; i < n; ++i) {
        d0[model.constant_index(i)] = cfg.wind[i].offset;
        d0[model.constant_index(i) + 1] = cfg.load[i].offset;
    }
    for (const auto& b : model.blocks()) {
        if (b.kind == BlockKind::Rotation) d0[b.offset] = 1.0;
    }
    return {std::move(model), d0};
}

ExoStabilityReport exo_equilibrium_check(const ExoModel& model, const Vec& d_bar, double radius,
                                         double horizon, int samples, double dt, std::uint64_t seed) {
    if (d_bar.size() != model.dim()) throw std::invalid_argument("exo_equilibrium_check: dimension mismatch");
    if (!model.is_fixed_point(d_bar)) {
        throw std::invalid_argument("exo_equilibrium_check: d_bar is not a fixed point");
    }
    const auto idx = model.varying_indices();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    ExoStabilityReport rep;
    rep.bounded = true;
    IntegratorOptions opts;
    opts.dt = dt;
    for (int s = 0; s < samples && !idx.empty(); ++s) {
        Vec dir(static_cast<Eigen::Index>(idx.size()));
        for (auto& v : dir) v = gauss(rng);
        dir *= radius * std::pow(unif(rng), 1.0 / static_cast<double>(idx.size())) / dir.norm();
        Vec d0 = d_bar;
        for (std::size_t k = 0; k < idx.size(); ++k) d0[idx[k]] += dir[static_cast<Eigen::Index>(k)];
        std::vector<double> x(d0.data(), d0.data() + d0.size());
        double recurrence = std::numeric_limits<double>::infinity();
        bool escaped = false;
        try {
            integrate([&](const double* z, double* dz, double) { model.derivative_flat(z, dz); }, x, 0.0,
                      horizon, opts,
                      [&](double t, const double* z) {
                          const Eigen::Map<const Vec> zm(z, model.dim());
                          const double exc = (zm - d_bar).norm();
                          rep.max_excursion = std::max(rep.max_excursion, exc);
                          if (exc > 10.0 * radius) escaped = true;
                          if (t >= 0.5 * horizon) recurrence = std::min(recurrence, (zm - d0).norm());
                      },
                      dt);
        } catch (const DomainError&) {
            escaped = true;
        }
        if (escaped) rep.bounded = false;
        if (std::isfinite(recurrence)) rep.max_recurrence = std::max(rep.max_recurrence, recurrence);
    }
    return rep;
}

double sampled_jacobian_bound(const ExoModel& model, const Vec& centre, double radius, int samples,
                              std::uint64_t seed) {
    const auto idx = model.varying_indices();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int nd = model.dim();
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec d = centre;
        for (int k : idx) d[k] += radius * unif(rng) / std::sqrt(static_cast<double>(idx.size()));
        Mat J(nd, nd);
        for (int j = 0; j < nd; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(d[j]));
            Vec dp = d, dm = d;
            dp[j] += h;
            dm[j] -= h;
            J.col(j) = (model.derivative(dp) - model.derivative(dm)) / (2.0 * h);
        }
        worst = std::max(worst, J.norm());
    }
    return worst;
}

}  // namespace lfc
