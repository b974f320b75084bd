#include "ultraspec/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ultraspec/errors.hpp"

namespace ultraspec {

template <Scalar S>
void Problem<S>::validate() const {
    if (order < 1) throw std::invalid_argument("Problem: order must be >= 1");
    if (coeffs.size() != static_cast<std::size_t>(order) + 1)
        throw std::invalid_argument("Problem: need " + std::to_string(order + 1) + " coefficient series");
    for (const auto& a : coeffs)
        if (a.basis() != 0) throw std::invalid_argument("Problem: coefficients must be T series");
    if (rhs.basis() != 0) throw std::invalid_argument("Problem: right-hand side must be a T series");
    if (bcs.empty()) throw std::invalid_argument("Problem: at least one boundary condition is required");
}

template <Scalar S>
Series<S> approximate(const std::function<S(double)>& f, double tol) {
    InterpOptions o;
    o.tol = tol;
    return adaptive_interp<S>(f, o);
}

template <Scalar S>
BandedOp<S> problem_operator(const Problem<S>& p) {
    p.validate();
    return assemble_L<S>(std::span<const Series<S>>(p.coeffs), p.order);
}

template <Scalar S>
Series<S> transform_rhs(const Series<S>& f, int N) {
    if (N < 1) throw std::invalid_argument("transform_rhs: order must be >= 1");
    return to_ultra(f, N);
}

template <Scalar S>
Solution<S> solve(const Problem<S>& p, const SolveOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto L = problem_operator(p);
    const auto f = transform_rhs(p.rhs, p.order);
    AdaptiveOptions ao;
    ao.tol = opts.tol;
    ao.max_n = opts.max_n;
    if (opts.precondition) ao.col_scale = precondition_scale(p.order);
    auto res = adaptive_qr<S>(L, p.bcs, f.coeffs(), ao);
    auto u = back_substitute<S>(res.R, res.rhs.applied, res.n_opt);
    if (ao.col_scale)
        for (std::size_t k = 0; k < u.size(); ++k) u[k] *= ao.col_scale(k);
    Solution<S> sol;
    sol.u = Series<S>(std::move(u));
    sol.n_opt = res.n_opt;
    sol.residual = res.residual;
    sol.history = std::move(res.history);
    sol.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

template <Scalar S>
Series<S> solve_fixed(const Problem<S>& p, std::size_t n, bool precondition) {
    const auto L = problem_operator(p);
    const auto f = transform_rhs(p.rhs, p.order);
    ColumnScale d;
    if (precondition) d = precondition_scale(p.order);
    return Series<S>(solve_fixed_n<S>(L, p.bcs, f.coeffs(), n, d));
}

template <Scalar S>
Series<S> differentiate_solution(const Series<S>& u, int p) {
    if (p < 1) throw std::invalid_argument("differentiate_solution: need p >= 1");
    if (u.basis() != 0) throw std::invalid_argument("differentiate_solution: series must be in the T basis");
    std::vector<S> c(u.coeffs().begin(), u.coeffs().end());
    for (int t = 0; t < p; ++t) {
        const std::size_t n = c.size();
        if (n <= 1) {
            c.assign(1, S(0));
            continue;
        }
        std::vector<S> v(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) v[k] = static_cast<double>(k + 1) * c[k + 1];
        std::vector<S> w(n - 1, S(0));
        for (std::size_t k = n - 1; k-- > 1;) w[k] = 2.0 * v[k] + (k + 2 < n - 1 ? w[k + 2] : S(0));
        w[0] = v[0] + (n - 1 > 2 ? 0.5 * w[2] : S(0));
        c = std::move(w);
    }
    return Series<S>(std::move(c));
}

template <Scalar S>
double cauchy_error(const Problem<S>& p, std::size_t n, int lambda) {
    const auto L = problem_operator(p);
    const auto f = transform_rhs(p.rhs, p.order);
    const std::size_t m = (101 * n + 99) / 100;
    const auto a = solve_fixed_n<S>(L, p.bcs, f.coeffs(), n);
    const auto b = solve_fixed_n<S>(L, p.bcs, f.coeffs(), m);
    std::vector<S> d(b);
    for (std::size_t k = 0; k < a.size(); ++k) d[k] -= a[k];
    return ell2_lambda_norm<S>(d, lambda);
}

#define ULTRASPEC_INSTANTIATE(S)                                                        \
    template struct Problem<S>;                                                         \
    template Series<S> approximate<S>(const std::function<S(double)>&, double);         \
    template BandedOp<S> problem_operator<S>(const Problem<S>&);                        \
    template Series<S> transform_rhs<S>(const Series<S>&, int);                         \
    template Solution<S> solve<S>(const Problem<S>&, const SolveOptions&);              \
    template Series<S> solve_fixed<S>(const Problem<S>&, std::size_t, bool);            \
    template Series<S> differentiate_solution<S>(const Series<S>&, int);                \
    template double cauchy_error<S>(const Problem<S>&, std::size_t, int);

ULTRASPEC_INSTANTIATE(double)
ULTRASPEC_INSTANTIATE(cdouble)
#undef ULTRASPEC_INSTANTIATE

}  // namespace ultraspec
