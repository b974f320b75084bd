#pragma once

// Chebyshev and ultraspherical series on [-1,1]: grids, value/coefficient
// transforms, adaptive approximation, evaluation and simple functionals.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "ultraspec/scalar.hpp"

namespace ultraspec {

/// Coefficients of a function in the Chebyshev T basis (basis == 0) or the
/// ultraspherical C^(lambda) basis (basis == lambda >= 1).
template <Scalar S>
class Series {
public:
    /// The zero series {0} in the T basis.
    Series() : coeffs_{S(0)} {}

    /// Throws std::invalid_argument for an empty or non-finite coefficient
    /// vector, or a negative basis index.
    explicit Series(std::vector<S> coeffs, int basis = 0);

    std::span<const S> coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }
    int basis() const { return basis_; }

    /// Coefficient k, zero past the end.
    S operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : S(0); }

    double max_abs() const;

    /// Drops trailing coefficients with magnitude at most tol * max_abs().
    /// Keeps at least one coefficient.
    Series chopped(double tol) const;

    bool is_zero() const { return max_abs() == 0.0; }

private:
    std::vector<S> coeffs_;
    int basis_ = 0;
};

/// The n points cos(k*pi/(n-1)), k = 0..n-1, from 1 down to -1.
std::vector<double> cheb_points(std::size_t n);

/// Coefficients of the degree n-1 interpolant of values sampled at
/// cheb_points(n).
template <Scalar S>
Series<S> vals_to_coeffs(std::span<const S> values);

/// Values of a T series at cheb_points(s.size()).
template <Scalar S>
std::vector<S> coeffs_to_vals(const Series<S>& s);

/// Values of a T series at cheb_points(n) for n >= s.size(): the series is
/// zero-padded first.
template <Scalar S>
std::vector<S> coeffs_to_vals(const Series<S>& s, std::size_t n);

struct InterpOptions {
    double tol = 50 * std::numeric_limits<double>::epsilon();
    std::size_t max_n = (std::size_t{1} << 20) + 1;
    /// Also accept a grid whose coefficients level off at a noise plateau
    /// above tol (see plateau_cutoff).
    bool accept_plateau = true;
};

/// Samples f on grids of 2^k + 1 points, k = 3, 4, ..., until the trailing
/// coefficients have decayed below tol relative to the largest, then chops.
/// Functions whose samples carry rounding noise above tol (for example
/// sin(w x^2) with large w) never meet that rule; with opts.accept_plateau
/// the coefficients are instead cut where they reach their noise plateau.
/// Throws ResolutionFailure past opts.max_n.
template <Scalar S>
Series<S> adaptive_interp(const std::function<S(double)>& f, const InterpOptions& opts = {});

/// True when the trailing max(2, ceil(n/100)) coefficients are below
/// tol * max|c|.
template <Scalar S>
bool tail_resolved(std::span<const S> c, double tol);

/// Number of coefficients to keep when the magnitudes b decay to a plateau,
/// by the envelope test of Aurentz and Trefethen ("Chopping a Chebyshev
/// series", 2017) with relative tolerance tol. Returns b.size() when no
/// plateau is found.
std::size_t plateau_cutoff(std::span<const double> b, double tol);

/// Value of a series (any basis) at x by Clenshaw's backward recurrence.
template <Scalar S>
S clenshaw_eval(const Series<S>& s, double x);

/// Integral over [-1,1] of a T series.
template <Scalar S>
S definite_integral(const Series<S>& s);

/// sqrt(sum |v_k|^2 (k+1)^(2 lambda)).
template <Scalar S>
double ell2_lambda_norm(std::span<const S> v, int lambda);

/// Sign changes of s(x) - level over oversample * len points equispaced in
/// angle. A diagnostic, not a rootfinder.
std::size_t count_crossings(const Series<double>& s, double level, std::size_t oversample = 4);

}  // namespace ultraspec
