#pragma once

// Linear ODE boundary value problems on [-1,1]:
//
//   a^N(x) u^(N)(x) + ... + a^1(x) u'(x) + a^0(x) u(x) = f(x),   B u = c.

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "ultraspec/almost_banded.hpp"
#include "ultraspec/boundary.hpp"
#include "ultraspec/cheb.hpp"
#include "ultraspec/operators.hpp"

namespace ultraspec {

template <Scalar S>
struct Problem {
    int order = 1;
    /// a^0 .. a^order as T series.
    std::vector<Series<S>> coeffs;
    Series<S> rhs;
    std::vector<BoundaryFunctional<S>> bcs;

    /// Throws std::invalid_argument on inconsistent sizes, bases or no
    /// boundary conditions.
    void validate() const;
};

/// Chebyshev approximation of a coefficient or right-hand-side function.
template <Scalar S>
Series<S> approximate(const std::function<S(double)>& f,
                      double tol = 50 * std::numeric_limits<double>::epsilon());

struct SolveOptions {
    double tol = 1e-14;
    std::size_t max_n = std::size_t{1} << 21;
    bool precondition = false;
};

template <Scalar S>
struct Solution {
    Series<S> u;
    std::size_t n_opt = 0;
    /// Norm of the exact residual of the truncated system (the lookahead).
    double residual = 0.0;
    double elapsed = 0.0;  // seconds
    /// Lookahead norm after each reduced column.
    std::vector<double> history;
};

/// The operator L for a problem.
template <Scalar S>
BandedOp<S> problem_operator(const Problem<S>& p);

/// S_{N-1} ... S_0 f.
template <Scalar S>
Series<S> transform_rhs(const Series<S>& f, int N);

/// Adaptive solve. Throws SingularEquation, NoConvergence or SingularSystem.
template <Scalar S>
Solution<S> solve(const Problem<S>& p, const SolveOptions& opts = {});

/// Solution of the n x n square truncation.
template <Scalar S>
Series<S> solve_fixed(const Problem<S>& p, std::size_t n, bool precondition = false);

/// T coefficients of the p-th derivative, by D_1 followed by an upper
/// triangular solve with S_0, p times.
template <Scalar S>
Series<S> differentiate_solution(const Series<S>& u, int p);

/// || u_n - u_m ||, m = ceil(1.01 n), in the l2_lambda norm.
template <Scalar S>
double cauchy_error(const Problem<S>& p, std::size_t n, int lambda = 0);

}  // namespace ultraspec
