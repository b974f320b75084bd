#pragma once

// Linear functionals on T coefficient vectors, used as the dense rows that
// border the banded operator.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include "ultraspec/scalar.hpp"

namespace ultraspec {

template <Scalar S>
class BoundaryFunctional {
public:
    enum class Kind { Dirichlet, Neumann, Derivative, Integral, Custom };

    struct Impl;

    Kind kind() const;
    /// Target value c_i.
    S value() const;
    /// B_{i,k}. Computed on demand and cached; safe to call concurrently.
    S entry(std::size_t k) const;
    /// out[i] = entry(first + i).
    void entries(std::size_t first, std::span<S> out) const;
    /// sum_k entry(k) c_k.
    S apply(std::span<const S> coeffs) const;
    std::string describe() const;

    /// Same row, different target.
    BoundaryFunctional with_value(S v) const;

    explicit BoundaryFunctional(std::shared_ptr<Impl> impl, S value)
        : impl_(std::move(impl)), value_(value) {}

private:
    std::shared_ptr<Impl> impl_;
    S value_;
};

/// u(endpoint) = value, endpoint = +1 or -1.
template <Scalar S>
BoundaryFunctional<S> dirichlet(double endpoint, S value);

/// u'(endpoint) = value.
template <Scalar S>
BoundaryFunctional<S> neumann(double endpoint, S value);

/// u^(p)(x0) = value for p >= 0 and |x0| <= 1.
template <Scalar S>
BoundaryFunctional<S> deriv_at(int p, double x0, S value);

/// Integral of u over [-1,1] equals value.
template <Scalar S>
BoundaryFunctional<S> integral_condition(S value);

/// Arbitrary row given by an entry oracle k -> B_k.
template <Scalar S>
BoundaryFunctional<S> custom_functional(std::function<S(std::size_t)> row, S value,
                                        std::string name = "custom");

}  // namespace ultraspec
