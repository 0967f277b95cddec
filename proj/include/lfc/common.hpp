#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lfc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Malformed or inconsistent input data (config files, CSV, parameter records).
/// `line` is the 1-based source line when the error is anchored to a file, 0 otherwise.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

/// An iterative solver failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A power injection pattern has no solution on the secure angle branch.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double max_loading)
        : std::runtime_error(what + " (max line loading " + std::to_string(max_loading) + ")"),
          max_loading_(max_loading) {}
    [[nodiscard]] double max_loading() const noexcept { return max_loading_; }

private:
    double max_loading_;
};

/// Evaluation outside the domain of a model (e.g. log of a non-positive wind state).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A time integration left the admissible region and was aborted.
class SimulationAbort : public std::runtime_error {
public:
    SimulationAbort(const std::string& what, double t)
        : std::runtime_error(what + " at t=" + std::to_string(t)), time_(t) {}
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace lfc
