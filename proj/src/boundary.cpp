#include "ultraspec/boundary.hpp"

#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ultraspec {

namespace {
constexpr std::size_t kBlock = 256;
}

template <Scalar S>
struct BoundaryFunctional<S>::Impl {
    Kind kind;
    std::string name;
    // Yields entry 0, 1, 2, ... on successive calls; only called under mtx.
    std::function<S()> next;
    std::mutex mtx;
    std::vector<S> cache;

    void ensure(std::size_t k) {
        while (cache.size() <= k)
            for (std::size_t i = 0; i < kBlock; ++i) cache.push_back(next());
    }
};

template <Scalar S>
typename BoundaryFunctional<S>::Kind BoundaryFunctional<S>::kind() const {
    return impl_->kind;
}

template <Scalar S>
S BoundaryFunctional<S>::value() const {
    return value_;
}

template <Scalar S>
S BoundaryFunctional<S>::entry(std::size_t k) const {
    std::lock_guard lock(impl_->mtx);
    impl_->ensure(k);
    return impl_->cache[k];
}

template <Scalar S>
void BoundaryFunctional<S>::entries(std::size_t first, std::span<S> out) const {
    if (out.empty()) return;
    std::lock_guard lock(impl_->mtx);
    impl_->ensure(first + out.size() - 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = impl_->cache[first + i];
}

template <Scalar S>
S BoundaryFunctional<S>::apply(std::span<const S> coeffs) const {
    std::vector<S> row(coeffs.size());
    entries(0, row);
    S sum = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) sum += row[k] * coeffs[k];
    return sum;
}

template <Scalar S>
std::string BoundaryFunctional<S>::describe() const {
    std::ostringstream os;
    os << impl_->name << " = " << value_;
    return os.str();
}

template <Scalar S>
BoundaryFunctional<S> BoundaryFunctional<S>::with_value(S v) const {
    return BoundaryFunctional(impl_, v);
}

namespace {

template <Scalar S>
BoundaryFunctional<S> make(typename BoundaryFunctional<S>::Kind kind, std::string name,
                           std::function<S()> next, S value) {
    auto impl = std::make_shared<typename BoundaryFunctional<S>::Impl>();
    impl->kind = kind;
    impl->name = std::move(name);
    impl->next = std::move(next);
    return BoundaryFunctional<S>(std::move(impl), value);
}

void check_endpoint(double e, const char* who) {
    if (e != 1.0 && e != -1.0) throw std::invalid_argument(std::string(who) + ": endpoint must be +1 or -1");
}

std::string point_name(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

template <Scalar S>
BoundaryFunctional<S> dirichlet(double endpoint, S value) {
    check_endpoint(endpoint, "dirichlet");
    using B = BoundaryFunctional<S>;
    double sign = 1.0;
    auto next = [sign, endpoint]() mutable {
        const double v = sign;
        sign *= endpoint;
        return S(v);
    };
    return make<S>(B::Kind::Dirichlet, "u(" + point_name(endpoint) + ")", next, value);
}

template <Scalar S>
BoundaryFunctional<S> neumann(double endpoint, S value) {
    check_endpoint(endpoint, "neumann");
    using B = BoundaryFunctional<S>;
    std::size_t k = 0;
    auto next = [k, endpoint]() mutable {
        const double kk = static_cast<double>(k);
        const double sign = (endpoint > 0 || k % 2 == 1) ? 1.0 : -1.0;
        ++k;
        return S(sign * kk * kk);
    };
    return make<S>(B::Kind::Neumann, "u'(" + point_name(endpoint) + ")", next, value);
}

template <Scalar S>
BoundaryFunctional<S> deriv_at(int p, double x0, S value) {
    if (p < 0) throw std::invalid_argument("deriv_at: derivative order must be >= 0");
    if (!(std::abs(x0) <= 1.0)) throw std::invalid_argument("deriv_at: point must lie in [-1,1]");
    using B = BoundaryFunctional<S>;
    std::string name = "u^(" + std::to_string(p) + ")(" + point_name(x0) + ")";
    if (p == 0) {
        // T_k(x0) by the three-term recurrence.
        double t0 = 1.0, t1 = x0;
        std::size_t k = 0;
        auto next = [t0, t1, k, x0]() mutable {
            double v;
            if (k == 0) {
                v = t0;
            } else if (k == 1) {
                v = t1;
            } else {
                v = 2.0 * x0 * t1 - t0;
                t0 = t1;
                t1 = v;
            }
            ++k;
            return S(v);
        };
        return make<S>(B::Kind::Derivative, name, next, value);
    }
    // T_k^(p)(x0) = 2^(p-1) (p-1)! k C^(p)_{k-p}(x0).
    double scale = std::ldexp(1.0, p - 1);
    for (int i = 2; i < p; ++i) scale *= i;
    const double l = p;
    double cm1 = 0.0, c0 = 1.0;
    std::size_t k = 0;
    auto next = [=]() mutable {
        if (k < static_cast<std::size_t>(p)) {
            ++k;
            return S(0);
        }
        const std::size_t n = k - static_cast<std::size_t>(p);
        if (n > 0) {
            const double nn = static_cast<double>(n - 1);
            const double c1 = (2.0 * (nn + l) * x0 * c0 - (nn + 2.0 * l - 1.0) * cm1) / (nn + 1.0);
            cm1 = c0;
            c0 = c1;
        }
        const double v = scale * static_cast<double>(k) * c0;
        ++k;
        return S(v);
    };
    return make<S>(B::Kind::Derivative, name, next, value);
}

template <Scalar S>
BoundaryFunctional<S> integral_condition(S value) {
    using B = BoundaryFunctional<S>;
    std::size_t k = 0;
    auto next = [k]() mutable {
        const double kk = static_cast<double>(k);
        const double v = k % 2 == 0 ? 2.0 / (1.0 - kk * kk) : 0.0;
        ++k;
        return S(v);
    };
    return make<S>(B::Kind::Integral, "integral", next, value);
}

template <Scalar S>
BoundaryFunctional<S> custom_functional(std::function<S(std::size_t)> row, S value, std::string name) {
    if (!row) throw std::invalid_argument("custom_functional: empty row oracle");
    using B = BoundaryFunctional<S>;
    std::size_t k = 0;
    auto next = [row = std::move(row), k]() mutable { return row(k++); };
    return make<S>(B::Kind::Custom, std::move(name), next, value);
}

#define ULTRASPEC_INSTANTIATE(S)                                                      \
    template class BoundaryFunctional<S>;                                             \
    template BoundaryFunctional<S> dirichlet<S>(double, S);                           \
    template BoundaryFunctional<S> neumann<S>(double, S);                             \
    template BoundaryFunctional<S> deriv_at<S>(int, double, S);                       \
    template BoundaryFunctional<S> integral_condition<S>(S);                          \
    template BoundaryFunctional<S> custom_functional<S>(std::function<S(std::size_t)>, S, std::string);

ULTRASPEC_INSTANTIATE(double)
ULTRASPEC_INSTANTIATE(cdouble)
#undef ULTRASPEC_INSTANTIATE

}  // namespace ultraspec
