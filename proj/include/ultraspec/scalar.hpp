#pragma once

#include <cmath>
#include <complex>
#include <concepts>

namespace ultraspec {

using cdouble = std::complex<double>;

/// Coefficient field: real or complex double precision.
template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, cdouble>;

inline double abs2(double x) { return x * x; }
inline double abs2(cdouble z) { return std::norm(z); }

inline double conj(double x) { return x; }
inline cdouble conj(cdouble z) { return std::conj(z); }

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace ultraspec
