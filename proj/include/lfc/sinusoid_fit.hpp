#pragma once

// Injection profiles from CSV and their sinusoid-bank approximation.

#include "lfc/common.hpp"
#include "lfc/exosystem.hpp"

#include <string>
#include <vector>

namespace lfc {

enum class PowerUnits { PerUnit, MW };

struct Profile {
    std::vector<double> t;
    std::vector<double> value;
    /// Linear interpolation, held constant outside the sampled range.
    [[nodiscard]] double at(double time) const;
};

/// Two columns (time in seconds, power) with a header row. MW values are divided
/// by `S_base`; times are divided by `time_compression`.
Profile read_profile_csv(const std::string& path, PowerUnits units, double S_base,
                         double time_compression = 1.0);

class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, double condition)
        : std::runtime_error(what + " (condition number " + std::to_string(condition) + ")"),
          condition_(condition) {}
    [[nodiscard]] double condition() const noexcept { return condition_; }

private:
    double condition_;
};

struct SinusoidFit {
    SinusoidBankParams params;
    double rms = 0.0;
    double condition = 0.0;  // of the final least-squares design matrix
};

/// Linear least squares for the offset and one (amplitude, phase) pair per fixed
/// frequency. Throws FitError when the design matrix is numerically rank deficient.
SinusoidFit least_squares_bank(const std::vector<double>& t, const std::vector<double>& y,
                               const std::vector<double>& rates);

/// offset + sum_k A_k sin(w_k t + p_k) by greedy frequency search on a grid, Brent
/// refinement and linear least squares. Requires uniform sampling and at least
/// 4 * n_components samples.
SinusoidFit fit_sinusoid_bank(const std::vector<double>& t, const std::vector<double>& y, int n_components = 2);

}  // namespace lfc
