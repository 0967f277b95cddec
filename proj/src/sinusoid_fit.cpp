#include "lfc/sinusoid_fit.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lfc {

double Profile::at(double time) const {
    if (t.empty()) throw std::logic_error("Profile::at on an empty profile");
    if (time <= t.front()) return value.front();
    if (time >= t.back()) return value.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const auto k = static_cast<std::size_t>(it - t.begin());
    const double w = (time - t[k - 1]) / (t[k] - t[k - 1]);
    return (1.0 - w) * value[k - 1] + w * value[k];
}

Profile read_profile_csv(const std::string& path, PowerUnits units, double S_base, double time_compression) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile '" + path + "'");
    if (!(time_compression > 0.0)) throw ConfigError("time compression must be positive");
    if (units == PowerUnits::MW && !(S_base > 0.0)) throw ConfigError("S_base must be positive for MW data");
    Profile p;
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header) {
            header = true;
            double probe = 0.0;
            std::istringstream hs(line.substr(0, line.find(',')));
            if (hs >> probe) throw ConfigError(path + ": header row required", lineno);
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError(path + ": expected two comma-separated columns", lineno);
        double tv = 0.0, pv = 0.0;
        try {
            std::size_t used = 0;
            tv = std::stod(line.substr(0, comma), &used);
            pv = std::stod(line.substr(comma + 1), &used);
        } catch (const std::exception&) {
            throw ConfigError(path + ": non-numeric value", lineno);
        }
        if (!std::isfinite(tv) || !std::isfinite(pv)) throw ConfigError(path + ": non-finite value", lineno);
        tv /= time_compression;
        if (!p.t.empty() && !(tv > p.t.back())) {
            throw ConfigError(path + ": time column must be strictly increasing", lineno);
        }
        p.t.push_back(tv);
        p.value.push_back(units == PowerUnits::MW ? pv / S_base : pv);
    }
    if (!header) throw ConfigError(path + ": empty file");
    if (p.t.size() < 2) throw ConfigError(path + ": need at least two samples");
    return p;
}

namespace {

Mat design(const std::vector<double>& t, const std::vector<double>& rates) {
    Mat D(static_cast<Eigen::Index>(t.size()), 1 + 2 * static_cast<Eigen::Index>(rates.size()));
    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        D(r, 0) = 1.0;
        for (std::size_t k = 0; k < rates.size(); ++k) {
            D(r, 1 + 2 * static_cast<Eigen::Index>(k)) = std::sin(rates[k] * t[i]);
            D(r, 2 + 2 * static_cast<Eigen::Index>(k)) = std::cos(rates[k] * t[i]);
        }
    }
    return D;
}

double residual_ss(const std::vector<double>& t, const Vec& y, const std::vector<double>& rates) {
    const Mat D = design(t, rates);
    const Vec c = D.colPivHouseholderQr().solve(y);
    return (D * c - y).squaredNorm();
}

}  // namespace

SinusoidFit least_squares_bank(const std::vector<double>& t, const std::vector<double>& y,
                               const std::vector<double>& rates) {
    if (t.size() != y.size()) throw std::invalid_argument("least_squares_bank: t and y differ in length");
    const Eigen::Map<const Vec> ym(y.data(), static_cast<Eigen::Index>(y.size()));
    const Mat D = design(t, rates);
    if (D.rows() < D.cols()) throw FitError("fewer samples than coefficients", INFINITY);
    Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    const double cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
    if (!(cond < 1e10)) throw FitError("rank-deficient sinusoid fit", cond);
    const Vec c = svd.solve(ym);
    SinusoidFit fit;
    fit.condition = cond;
    fit.params.offset = c[0];
    for (std::size_t k = 0; k < rates.size(); ++k) {
        const double a = c[1 + 2 * static_cast<Eigen::Index>(k)];
        const double b = c[2 + 2 * static_cast<Eigen::Index>(k)];
        fit.params.terms.push_back({std::hypot(a, b), rates[k], std::atan2(b, a)});
    }
    fit.rms = std::sqrt((D * c - ym).squaredNorm() / static_cast<double>(y.size()));
    return fit;
}

SinusoidFit fit_sinusoid_bank(const std::vector<double>& t, const std::vector<double>& y, int n_components) {
    const std::size_t N = t.size();
    if (n_components < 0) throw std::invalid_argument("fit_sinusoid_bank: negative component count");
    if (y.size() != N) throw std::invalid_argument("fit_sinusoid_bank: t and y differ in length");
    if (N < 4 * static_cast<std::size_t>(std::max(n_components, 1))) {
        throw std::invalid_argument("fit_sinusoid_bank: need at least 4 samples per component");
    }
    const double dt = (t.back() - t.front()) / static_cast<double>(N - 1);
    for (std::size_t i = 1; i < N; ++i) {
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) {
            throw std::invalid_argument("fit_sinusoid_bank: samples must be uniformly spaced");
        }
    }
    const Eigen::Map<const Vec> ym(y.data(), static_cast<Eigen::Index>(N));
    const double mean = ym.mean();
    const double var = (ym.array() - mean).square().mean();
    if (var <= 1e-24 * std::max(1.0, mean * mean)) {
        SinusoidFit fit;
        fit.params.offset = mean;
        fit.params.terms.assign(static_cast<std::size_t>(n_components), Sinusoid{});
        fit.rms = std::sqrt(var);
        fit.condition = 1.0;
        return fit;
    }

    const double T = t.back() - t.front();
    const double w_lo = 0.2 * std::numbers::pi / T;
    const double w_hi = 0.98 * std::numbers::pi / dt;
    const double spacing = std::max(std::numbers::pi / (4.0 * T), (w_hi - w_lo) / 4000.0);
    const Vec yv = ym;

    std::vector<double> rates;
    auto cost_with = [&](std::size_t slot, double w) {
        std::vector<double> r = rates;
        if (slot == r.size()) r.push_back(w);
        else r[slot] = w;
        return residual_ss(t, yv, r);
    };
    auto refine = [&](std::size_t slot, double centre) {
        const double lo = std::max(w_lo * 0.5, centre - spacing);
        const double hi = std::min(w_hi, centre + spacing);
        auto r = boost::math::tools::brent_find_minima([&](double w) { return cost_with(slot, w); }, lo, hi,
                                                      std::numeric_limits<double>::digits / 2 + 4);
        return r.first;
    };

    for (int k = 0; k < n_components; ++k) {
        double best_w = w_lo, best_c = INFINITY;
        for (double w = w_lo; w <= w_hi; w += spacing) {
            bool near = false;
            for (double r : rates) near = near || std::abs(w - r) < spacing;
            if (near) continue;
            const double c = cost_with(rates.size(), w);
            if (c < best_c) {
                best_c = c;
                best_w = w;
            }
        }
        rates.push_back(best_w);
        rates.back() = refine(rates.size() - 1, best_w);
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < rates.size(); ++k) rates[k] = refine(k, rates[k]);
    }
    return least_squares_bank(t, y, rates);
}

}  // namespace lfc
