#include <doctest.h>

#include <cmath>
#include <thread>

#include "oracles.hpp"
#include "ultraspec/boundary.hpp"

using namespace ultraspec;

namespace {

using Bc = BoundaryFunctional<double>;

std::vector<double> first(const Bc& b, std::size_t n) {
    std::vector<double> v(n);
    b.entries(0, v);
    return v;
}

/// Integral of T_k over [-1,1] in exact rationals from the power form.
mpq_class integral_t_exact(long k) {
    if (k == 0) return 2;
    mpq_class s = 0;
    for (long m = 0; 2 * m <= k; ++m) {
        const long e = k - 2 * m;
        if (e % 2) continue;
        mpq_class term = mpq_class(oracle::factorial(k - m - 1)) /
                         mpq_class(oracle::factorial(m) * oracle::factorial(k - 2 * m));
        mpz_class p2 = 1;
        for (long t = 0; t < e; ++t) p2 *= 2;
        term *= mpq_class(p2) * mpq_class(2, e + 1);
        s += (m % 2 ? -term : term);
    }
    return s * k / 2;
}

}  // namespace

TEST_CASE("dirichlet rows") {
    const auto l = dirichlet<double>(-1.0, 3.0);
    const auto r = dirichlet<double>(1.0, 0.0);
    CHECK(first(l, 6) == std::vector<double>{1, -1, 1, -1, 1, -1});
    CHECK(first(r, 4) == std::vector<double>{1, 1, 1, 1});
    CHECK(l.value() == 3.0);
    CHECK(l.kind() == Bc::Kind::Dirichlet);
    const std::vector<double> x2{0.5, 0.0, 0.5};
    CHECK(l.apply(x2) == 1.0);
    CHECK(r.apply(x2) == 1.0);
    CHECK_THROWS_AS(dirichlet<double>(0.5, 0.0), std::invalid_argument);
    for (std::size_t k : {0u, 7u, 1000u, 100001u}) CHECK(std::abs(l.entry(k)) == 1.0);
}

TEST_CASE("neumann rows") {
    CHECK(first(neumann<double>(1.0, 0.0), 4) == std::vector<double>{0, 1, 4, 9});
    CHECK(first(neumann<double>(-1.0, 0.0), 4) == std::vector<double>{0, 1, -4, 9});
    const std::vector<double> t2{0, 0, 1};
    CHECK(neumann<double>(1.0, 0.0).apply(t2) == 4.0);
    for (std::size_t k : {5u, 300u, 5000u}) CHECK(std::abs(neumann<double>(-1.0, 0.0).entry(k)) == double(k * k));
}

TEST_CASE("derivative rows at interior and end points") {
    CHECK(first(deriv_at<double>(0, 0.0, 0.0), 5) == std::vector<double>{1, 0, -1, 0, 1});
    const auto n1 = neumann<double>(1.0, 0.0);
    const auto d1 = deriv_at<double>(1, 1.0, 0.0);
    for (std::size_t k = 0; k < 60; ++k) CHECK(d1.entry(k) == doctest::Approx(n1.entry(k)).epsilon(1e-15));
    // T_3'' = 24 x.
    CHECK(deriv_at<double>(2, -1.0, 0.0).entry(3) == doctest::Approx(-24.0).epsilon(1e-15));
    CHECK_THROWS_AS(deriv_at<double>(1, 1.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(deriv_at<double>(-1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("integral row") {
    const auto I = integral_condition<double>(1.0);
    CHECK(I.entry(0) == 2.0);
    CHECK(I.entry(1) == 0.0);
    CHECK(I.entry(2) == doctest::Approx(-2.0 / 3).epsilon(1e-15));
    for (long k = 0; k <= 30; ++k) CHECK(I.entry(std::size_t(k)) == doctest::Approx(integral_t_exact(k).get_d()).epsilon(1e-14));
}

TEST_CASE("functionals agree with exact evaluation on polynomials") {
    const std::vector<std::pair<int, double>> cases{{0, -1.0}, {0, 1.0},  {0, 0.3},  {1, -1.0}, {1, 0.7},
                                                    {2, 1.0},  {2, -0.25}, {3, 0.5}, {4, -1.0}, {5, 0.9}};
    for (const auto& [p, x0] : cases) {
        const auto B = deriv_at<double>(p, x0, 0.0);
        const mpq_class xq(x0);
        for (int t = 0; t < 5; ++t) {
            const auto c = oracle::random_vector(31);
            const double want = oracle::eval_t_deriv_exact(c, p, xq);
            double scale = 0;
            for (std::size_t k = 0; k < c.size(); ++k)
                scale += std::abs(c[k] * oracle::cheb_t_deriv_exact(long(k), p, mpq_class(1)).get_d());
            CHECK(std::abs(B.apply(c) - want) <= 1e-11 * scale);
        }
    }
    const auto I = integral_condition<double>(0.0);
    const auto c = oracle::random_vector(31);
    mpq_class want = 0;
    for (std::size_t k = 0; k < c.size(); ++k) want += mpq_class(c[k]) * integral_t_exact(long(k));
    CHECK(I.apply(c) == doctest::Approx(want.get_d()).epsilon(1e-13));
}

TEST_CASE("derivative rows grow polynomially") {
    for (int p : {1, 2, 3})
        for (double x0 : {-1.0, 0.2, 1.0}) {
            const auto B = deriv_at<double>(p, x0, 0.0);
            // |T_k^(p)(x)| <= T_k^(p)(1) = prod_{i<p} (k^2 - i^2)/(2i+1) <= k^(2p).
            for (std::size_t k : {10u, 100u, 1000u, 3000u})
                CHECK(std::abs(B.entry(k)) <= std::pow(1.0 + double(k), 2 * p) * (1 + 1e-12));
        }
}

TEST_CASE("custom rows, values and descriptions") {
    const auto c = custom_functional<double>([](std::size_t k) { return 1.0 / (k + 1); }, 2.5, "harmonic");
    CHECK(c.kind() == Bc::Kind::Custom);
    CHECK(c.entry(3) == 0.25);
    CHECK(c.value() == 2.5);
    CHECK(c.describe().find("harmonic") != std::string::npos);
    const auto d = c.with_value(-1.0);
    CHECK(d.value() == -1.0);
    CHECK(d.entry(3) == 0.25);
    CHECK_THROWS_AS(custom_functional<double>({}, 0.0), std::invalid_argument);
    std::vector<double> tail(4);
    c.entries(1000, tail);
    CHECK(tail[2] == 1.0 / 1003);
}

TEST_CASE("entry cache is safe under concurrent reads") {
    const auto B = deriv_at<double>(2, 0.3, 0.0);
    const auto ref = deriv_at<double>(2, 0.3, 0.0);
    std::vector<double> want(5000);
    ref.entries(0, want);
    std::vector<std::thread> ts;
    std::vector<int> bad(4, 0);
    for (int t = 0; t < 4; ++t)
        ts.emplace_back([&, t] {
            for (std::size_t k = 0; k < 5000; ++k) {
                const std::size_t j = (k * (2 * t + 1) * 7919) % 5000;
                if (B.entry(j) != want[j]) ++bad[t];
            }
        });
    for (auto& th : ts) th.join();
    for (int b : bad) CHECK(b == 0);
}

TEST_CASE("complex values") {
    using C = cdouble;
    const auto b = dirichlet<C>(-1.0, C(1, 2));
    CHECK(b.value() == C(1, 2));
    CHECK(b.entry(3) == C(-1, 0));
    const std::vector<C> u{C(1, 1), C(0, 2)};
    CHECK(b.apply(u) == C(1, -1));
}
