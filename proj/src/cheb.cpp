#include "ultraspec/cheb.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ultraspec/errors.hpp"

namespace ultraspec {

namespace {

// The FFTW planner is not reentrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Y_k = x_0 + (-1)^k x_{n-1} + 2 sum_{j=1}^{n-2} x_j cos(pi j k / (n-1)),
// evaluated as the real DFT of the even extension of length 2(n-1).
std::vector<double> dct1(std::span<const double> x) {
    const std::size_t n = x.size();
    const std::size_t m = 2 * (n - 1);
    double* in = fftw_alloc_real(m);
    fftw_complex* out = fftw_alloc_complex(m / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in, out, FFTW_ESTIMATE);
    }
    for (std::size_t j = 0; j < n; ++j) in[j] = x[j];
    for (std::size_t j = 1; j + 1 < n; ++j) in[m - j] = x[j];
    fftw_execute(plan);
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = out[k][0];
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return y;
}

std::vector<double> values_to_coeffs_real(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<double> c = dct1(v);
    const double scale = 1.0 / static_cast<double>(n - 1);
    for (auto& ck : c) ck *= scale;
    c.front() *= 0.5;
    c.back() *= 0.5;
    return c;
}

std::vector<double> coeffs_to_values_real(std::span<const double> c) {
    const std::size_t n = c.size();
    std::vector<double> d(c.begin(), c.end());
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] *= 0.5;
    return dct1(d);
}

template <Scalar S>
std::vector<S> split_apply(std::span<const S> in,
                           std::vector<double> (*f)(std::span<const double>)) {
    if constexpr (std::is_same_v<S, double>) {
        return f(in);
    } else {
        std::vector<double> re(in.size()), im(in.size());
        for (std::size_t k = 0; k < in.size(); ++k) {
            re[k] = in[k].real();
            im[k] = in[k].imag();
        }
        auto a = f(re);
        auto b = f(im);
        std::vector<S> out(in.size());
        for (std::size_t k = 0; k < in.size(); ++k) out[k] = S(a[k], b[k]);
        return out;
    }
}

}  // namespace

template <Scalar S>
Series<S>::Series(std::vector<S> coeffs, int basis) : coeffs_(std::move(coeffs)), basis_(basis) {
    if (coeffs_.empty()) throw std::invalid_argument("Series: empty coefficient vector");
    if (basis_ < 0) throw std::invalid_argument("Series: negative basis index");
    for (const auto& c : coeffs_)
        if (!is_finite(c)) throw std::invalid_argument("Series: non-finite coefficient");
}

template <Scalar S>
double Series<S>::max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

template <Scalar S>
Series<S> Series<S>::chopped(double tol) const {
    const double cut = tol * max_abs();
    std::size_t len = coeffs_.size();
    while (len > 1 && std::abs(coeffs_[len - 1]) <= cut) --len;
    return Series(std::vector<S>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(len)),
                  basis_);
}

std::vector<double> cheb_points(std::size_t n) {
    if (n < 2) throw std::invalid_argument("cheb_points: need n >= 2");
    std::vector<double> x(n);
    const double h = std::numbers::pi / static_cast<double>(n - 1);
    // sin form keeps the grid exactly antisymmetric about the midpoint.
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(n - 1) - 2.0 * static_cast<double>(k);
        x[k] = std::sin(h * t / 2.0);
    }
    return x;
}

template <Scalar S>
Series<S> vals_to_coeffs(std::span<const S> values) {
    if (values.size() < 2) throw std::invalid_argument("vals_to_coeffs: need at least 2 values");
    return Series<S>(split_apply<S>(values, &values_to_coeffs_real), 0);
}

template <Scalar S>
std::vector<S> coeffs_to_vals(const Series<S>& s) {
    return coeffs_to_vals(s, std::max<std::size_t>(s.size(), 2));
}

template <Scalar S>
std::vector<S> coeffs_to_vals(const Series<S>& s, std::size_t n) {
    if (s.basis() != 0) throw std::invalid_argument("coeffs_to_vals: series must be in the T basis");
    if (n < s.size() || n < 2)
        throw std::invalid_argument("coeffs_to_vals: grid smaller than the series");
    std::vector<S> padded(n, S(0));
    std::copy(s.coeffs().begin(), s.coeffs().end(), padded.begin());
    return split_apply<S>(padded, &coeffs_to_values_real);
}

template <Scalar S>
bool tail_resolved(std::span<const S> c, double tol) {
    double mx = 0.0;
    for (const auto& v : c) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) return true;
    const std::size_t n = c.size();
    const std::size_t tail = std::max<std::size_t>(2, (n + 99) / 100);
    if (tail >= n) return false;
    for (std::size_t k = n - tail; k < n; ++k)
        if (std::abs(c[k]) >= tol * mx) return false;
    return true;
}

std::size_t plateau_cutoff(std::span<const double> b, double tol) {
    const std::size_t n = b.size();
    if (tol >= 1.0) return 1;
    if (n < 17) return n;
    std::vector<double> env(n);
    env[n - 1] = b[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) env[j] = std::max(b[j], env[j + 1]);
    if (env[0] == 0.0) return 1;
    for (auto& e : env) e /= env[0];

    // Indices below are 1-based as in the published algorithm.
    std::size_t plateau = 0, j2 = 0;
    for (std::size_t j = 2; j <= n; ++j) {
        j2 = static_cast<std::size_t>(std::lround(1.25 * static_cast<double>(j) + 5.0));
        if (j2 > n) return n;
        const double e1 = env[j - 1], e2 = env[j2 - 1];
        const double r = 3.0 * (1.0 - std::log(e1) / std::log(tol));
        if (e1 == 0.0 || e2 / e1 > r) {
            plateau = j - 1;
            break;
        }
    }
    if (plateau == 0) return n;
    if (env[plateau - 1] == 0.0) return plateau;
    const double floor76 = std::pow(tol, 7.0 / 6.0);
    const auto j3 = static_cast<std::size_t>(std::count_if(env.begin(), env.end(), [&](double e) { return e >= floor76; }));
    if (j3 < j2) {
        j2 = j3 + 1;
        env[j2 - 1] = floor76;
    }
    std::size_t d = 1;
    double best = std::numeric_limits<double>::infinity();
    const double slope = j2 > 1 ? (-std::log10(tol) / 3.0) / static_cast<double>(j2 - 1) : 0.0;
    for (std::size_t i = 0; i < j2; ++i) {
        const double cc = std::log10(env[i]) + slope * static_cast<double>(i);
        if (cc < best) {
            best = cc;
            d = i + 1;
        }
    }
    return std::max<std::size_t>(d - 1, 1);
}

template <Scalar S>
Series<S> adaptive_interp(const std::function<S(double)>& f, const InterpOptions& opts) {
    std::vector<double> last_tail;
    for (int k = 3;; ++k) {
        const std::size_t n = (std::size_t{1} << k) + 1;
        if (n > opts.max_n) break;
        const auto x = cheb_points(n);
        std::vector<S> v(n);
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = f(x[i]);
            finite = finite && is_finite(v[i]);
        }
        if (!finite)
            throw ResolutionFailure("adaptive_interp: function is not finite at a sample point", {});
        auto c = split_apply<S>(std::span<const S>(v), &values_to_coeffs_real);
        if (tail_resolved<S>(c, opts.tol)) return Series<S>(std::move(c)).chopped(opts.tol);
        if (opts.accept_plateau) {
            std::vector<double> mags(n);
            for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(c[i]);
            const std::size_t cut = plateau_cutoff(mags, std::numeric_limits<double>::epsilon());
            if (cut < n) {
                c.resize(cut);
                return Series<S>(std::move(c));
            }
        }
        const std::size_t tail = std::max<std::size_t>(2, (n + 99) / 100);
        last_tail.clear();
        for (std::size_t i = n - tail; i < n; ++i) last_tail.push_back(std::abs(c[i]));
    }
    throw ResolutionFailure("adaptive_interp: not resolved with " + std::to_string(opts.max_n) +
                                " points",
                            std::move(last_tail));
}

template <Scalar S>
S clenshaw_eval(const Series<S>& s, double x) {
    const auto c = s.coeffs();
    const std::size_t n = c.size();
    const int lambda = s.basis();
    if (lambda == 0) {
        S b1 = 0, b2 = 0;
        for (std::size_t k = n - 1; k >= 1; --k) {
            const S b0 = c[k] + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return c[0] + x * b1 - b2;
    }
    // C^(l)_{k+1} = alpha_k C^(l)_k + beta_k C^(l)_{k-1} with
    // alpha_k = 2(k+l)x/(k+1), beta_k = -(k+2l-1)/(k+1).
    const double l = lambda;
    auto alpha = [&](std::size_t k) { return 2.0 * (static_cast<double>(k) + l) * x / (static_cast<double>(k) + 1.0); };
    auto beta = [&](std::size_t k) { return -(static_cast<double>(k) + 2.0 * l - 1.0) / (static_cast<double>(k) + 1.0); };
    S b1 = 0, b2 = 0;
    for (std::size_t k = n - 1; k >= 1; --k) {
        const S b0 = c[k] + alpha(k) * b1 + beta(k + 1) * b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + alpha(0) * b1 + beta(1) * b2;
}

template <Scalar S>
S definite_integral(const Series<S>& s) {
    if (s.basis() != 0) throw std::invalid_argument("definite_integral: series must be in the T basis");
    S sum = 0;
    const auto c = s.coeffs();
    for (std::size_t k = 0; k < c.size(); k += 2) {
        const double kk = static_cast<double>(k);
        sum += c[k] * (2.0 / (1.0 - kk * kk));
    }
    return sum;
}

template <Scalar S>
double ell2_lambda_norm(std::span<const S> v, int lambda) {
    // Accumulate scaled by the largest term to stay finite for large lambda.
    std::vector<double> logs(v.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double a = std::abs(v[k]);
        logs[k] = a == 0.0 ? -std::numeric_limits<double>::infinity()
                           : std::log(a) + lambda * std::log(static_cast<double>(k) + 1.0);
        top = std::max(top, logs[k]);
    }
    if (!std::isfinite(top)) return 0.0;
    double sum = 0.0;
    for (double lg : logs)
        if (std::isfinite(lg)) sum += std::exp(2.0 * (lg - top));
    return std::exp(top) * std::sqrt(sum);
}

std::size_t count_crossings(const Series<double>& s, double level, std::size_t oversample) {
    if (oversample < 4) throw std::invalid_argument("count_crossings: oversample must be >= 4");
    const std::size_t m = std::max<std::size_t>(oversample * s.size(), 2);
    const auto v = coeffs_to_vals(s, m);
    std::size_t count = 0;
    int prev = 0;
    for (double val : v) {
        const double d = val - level;
        const int sg = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (sg == 0) continue;
        if (prev != 0 && sg != prev) ++count;
        prev = sg;
    }
    return count;
}

#define ULTRASPEC_INSTANTIATE(S)                                                          \
    template class Series<S>;                                                             \
    template Series<S> vals_to_coeffs<S>(std::span<const S>);                             \
    template std::vector<S> coeffs_to_vals<S>(const Series<S>&);                          \
    template std::vector<S> coeffs_to_vals<S>(const Series<S>&, std::size_t);             \
    template Series<S> adaptive_interp<S>(const std::function<S(double)>&, const InterpOptions&); \
    template bool tail_resolved<S>(std::span<const S>, double);                           \
    template S clenshaw_eval<S>(const Series<S>&, double);                                \
    template S definite_integral<S>(const Series<S>&);                                    \
    template double ell2_lambda_norm<S>(std::span<const S>, int);

ULTRASPEC_INSTANTIATE(double)
ULTRASPEC_INSTANTIATE(cdouble)
#undef ULTRASPEC_INSTANTIATE

}  // namespace ultraspec
