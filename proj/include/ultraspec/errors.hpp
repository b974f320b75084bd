#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ultraspec {

/// Adaptive sampling did not resolve a function before the size cap.
class ResolutionFailure : public std::runtime_error {
public:
    ResolutionFailure(const std::string& what, std::vector<double> tail)
        : std::runtime_error(what), tail_(std::move(tail)) {}

    /// Magnitudes of the trailing coefficients at the last attempted size.
    const std::vector<double>& tail() const noexcept { return tail_; }

private:
    std::vector<double> tail_;
};

/// The leading coefficient of the differential operator vanishes on [-1,1].
class SingularEquation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A diagonal pivot of the triangular factor is negligible.
class SingularSystem : public std::runtime_error {
public:
    SingularSystem(const std::string& what, std::size_t row)
        : std::runtime_error(what), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Adaptive QR hit the column cap before the forward error dropped below
/// tolerance.
class NoConvergence : public std::runtime_error {
public:
    NoConvergence(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}

    /// Forward-error norm after each reduced column.
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace ultraspec
