#pragma once

// Reference implementations used only by the tests. Each one computes the
// same quantity as library code by a different route: quadrature instead of
// the DCT, explicit power sums in exact rationals instead of recurrences,
// dense Eigen products instead of banded row oracles.

#include <Eigen/Dense>
#include <boost/math/special_functions/airy.hpp>
#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// T coefficients of f by M-point Gauss-Chebyshev quadrature of
/// (2/pi) int f T_k / sqrt(1-x^2), halved for k = 0.
inline std::vector<double> cheb_coeffs_quadrature(const std::function<double(double)>& f, std::size_t n,
                                                  std::size_t M = 0) {
    if (M == 0) M = 4 * n + 64;
    std::vector<double> fx(M), th(M);
    for (std::size_t i = 0; i < M; ++i) {
        th[i] = (static_cast<double>(i) + 0.5) * std::numbers::pi / static_cast<double>(M);
        fx[i] = f(std::cos(th[i]));
    }
    std::vector<double> c(n);
    for (std::size_t k = 0; k < n; ++k) {
        long double s = 0;
        for (std::size_t i = 0; i < M; ++i) s += fx[i] * std::cos(static_cast<double>(k) * th[i]);
        c[k] = static_cast<double>(2.0L * s / M);
    }
    c[0] /= 2;
    return c;
}

/// T_k(x) = cos(k arccos x).
inline double cheb_t(std::size_t k, double x) { return std::cos(static_cast<double>(k) * std::acos(x)); }

inline double eval_t(const std::vector<double>& c, double x) {
    long double s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * cheb_t(k, x);
    return static_cast<double>(s);
}

inline mpq_class pochhammer(long lambda, long n) {
    mpz_class r = 1;
    for (long t = 0; t < n; ++t) r *= lambda + t;
    return mpq_class(r);
}

inline mpz_class factorial(unsigned long n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

/// C_n^(lambda)(x) by the explicit power sum
///   sum_m (-1)^m (lambda)_{n-m} / (m! (n-2m)!) (2x)^{n-2m}
/// in exact rational arithmetic (x is given as a rational).
inline mpq_class gegenbauer_exact(long lambda, long n, const mpq_class& x) {
    mpq_class s = 0;
    for (long m = 0; 2 * m <= n; ++m) {
        mpq_class term = pochhammer(lambda, n - m) / mpq_class(factorial(m) * factorial(n - 2 * m));
        mpq_class p = 1;
        for (long t = 0; t < n - 2 * m; ++t) p *= 2 * x;
        term *= p;
        s += (m % 2 ? -term : term);
    }
    return s;
}

/// T_n(x) from the power form of 2^{n-1} products, exact: uses
/// T_n = n/2 sum_m (-1)^m (n-m-1)!/(m!(n-2m)!) (2x)^{n-2m} for n >= 1.
inline mpq_class cheb_t_exact(long n, const mpq_class& x) {
    if (n == 0) return 1;
    mpq_class s = 0;
    for (long m = 0; 2 * m <= n; ++m) {
        mpq_class term = mpq_class(factorial(n - m - 1)) / mpq_class(factorial(m) * factorial(n - 2 * m));
        mpq_class p = 1;
        for (long t = 0; t < n - 2 * m; ++t) p *= 2 * x;
        term *= p;
        s += (m % 2 ? -term : term);
    }
    return s * n / 2;
}

/// Value of a series in basis lambda (0 = T) at the rational point x.
inline double eval_exact(const std::vector<double>& c, int lambda, const mpq_class& x) {
    mpq_class s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] == 0.0) continue;
        const mpq_class v = lambda == 0 ? cheb_t_exact(static_cast<long>(k), x)
                                        : gegenbauer_exact(lambda, static_cast<long>(k), x);
        s += mpq_class(c[k]) * v;
    }
    return s.get_d();
}

/// Carlitz linearization coefficient straight from the Pochhammer formula,
/// in exact rationals.
inline double carlitz_exact(long lambda, long s, long j, long k) {
    const mpq_class a(j + k + lambda - 2 * s, j + k + lambda - s);
    mpq_class r = a;
    r *= pochhammer(lambda, s) * pochhammer(lambda, j - s) * pochhammer(lambda, k - s);
    r /= mpq_class(factorial(s) * factorial(j - s) * factorial(k - s));
    r *= pochhammer(2 * lambda, j + k - s) / pochhammer(lambda, j + k - s);
    r *= mpq_class(factorial(j + k - 2 * s)) / pochhammer(2 * lambda, j + k - 2 * s);
    r.canonicalize();
    return r.get_d();
}

/// Dense n x n matrices of the basic operators, written from their entry
/// formulas.
inline Mat dense_diff(int lambda, int n) {
    Mat D = Mat::Zero(n, n);
    double f = std::ldexp(1.0, lambda - 1);
    for (int i = 2; i < lambda; ++i) f *= i;
    for (int j = 0; j + lambda < n; ++j) D(j, j + lambda) = f * (j + lambda);
    return D;
}

inline Mat dense_conv(int lambda, int n) {
    Mat S = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        if (lambda == 0) {
            S(k, k) = k == 0 ? 1.0 : 0.5;
            if (k + 2 < n) S(k, k + 2) = -0.5;
        } else {
            S(k, k) = k == 0 ? 1.0 : static_cast<double>(lambda) / (lambda + k);
            if (k + 2 < n) S(k, k + 2) = -static_cast<double>(lambda) / (lambda + k + 2);
        }
    }
    return S;
}

/// Multiplication by sum a_l T_l on T coefficients, from
/// T_l T_k = (T_{l+k} + T_{|l-k|}) / 2.
inline Mat dense_mult_cheb(const std::vector<double>& a, int n) {
    Mat M = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k)
        for (std::size_t l = 0; l < a.size(); ++l) {
            const int L = static_cast<int>(l);
            if (L + k < n) M(L + k, k) += 0.5 * a[l];
            if (std::abs(L - k) < n) M(std::abs(L - k), k) += 0.5 * a[l];
        }
    return M;
}

/// Gauss-Legendre nodes and weights (Golub-Welsch via Eigen).
inline std::pair<Vec, Vec> gauss_legendre(int m) {
    Mat J = Mat::Zero(m, m);
    for (int i = 1; i < m; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        J(i, i - 1) = J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(J);
    Vec w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    return {es.eigenvalues(), w};
}

/// sqrt(int_{-1}^{1} g(x)^2 dx) by m-point Gauss-Legendre.
inline double l2_norm(const std::function<double(double)>& g, int m = 200) {
    const auto [x, w] = gauss_legendre(m);
    long double s = 0;
    for (int i = 0; i < m; ++i) {
        const double v = g(x(i));
        s += w(i) * v * v;
    }
    return std::sqrt(static_cast<double>(s));
}

/// Composite Gauss-Legendre on [a, b] split into pieces panels.
inline double integrate(const std::function<double(double)>& g, double a, double b, int pieces, int m = 20) {
    const auto [x, w] = gauss_legendre(m);
    long double s = 0;
    const double h = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < m; ++i) s += 0.5 * h * w(i) * g(lo + 0.5 * h * (x(i) + 1.0));
    }
    return static_cast<double>(s);
}

inline double airy_ai(double x) { return boost::math::airy_ai(x); }
inline double airy_ai_prime(double x) { return boost::math::airy_ai_prime(x); }

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240501);
    return g;
}

inline std::vector<double> random_vector(std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng());
    return v;
}

/// Random vector with geometric decay rho^k, so its series is smooth.
inline std::vector<double> random_decaying(std::size_t n, double rho = 0.7) {
    auto v = random_vector(n);
    double f = 1;
    for (auto& x : v) {
        x *= f;
        f *= rho;
    }
    return v;
}

inline double random_uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

}  // namespace oracle

namespace oracle {

/// p-th derivative of T_n at x, differentiating the exact power form.
inline mpq_class cheb_t_deriv_exact(long n, long p, const mpq_class& x) {
    if (p == 0) return cheb_t_exact(n, x);
    if (n == 0) return 0;
    mpq_class s = 0;
    for (long m = 0; 2 * m <= n; ++m) {
        const long e = n - 2 * m;
        if (e < p) continue;
        mpq_class term = mpq_class(factorial(n - m - 1)) / mpq_class(factorial(m) * factorial(n - 2 * m));
        // d^p/dx^p (2x)^e = 2^p e!/(e-p)! (2x)^(e-p)
        term *= mpq_class(factorial(e)) / mpq_class(factorial(e - p));
        mpq_class q = 1;
        for (long t = 0; t < p; ++t) q *= 2;
        for (long t = 0; t < e - p; ++t) q *= 2 * x;
        term *= q;
        s += (m % 2 ? -term : term);
    }
    return s * n / 2;
}

/// p-th derivative of sum c_k T_k at the rational point x.
inline double eval_t_deriv_exact(const std::vector<double>& c, long p, const mpq_class& x) {
    mpq_class s = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] != 0.0) s += mpq_class(c[k]) * cheb_t_deriv_exact(static_cast<long>(k), p, x);
    return s.get_d();
}

inline mpq_class random_rational() {
    return mpq_class(static_cast<long>(random_uniform(-4096, 4096)), 4096);
}

}  // namespace oracle
