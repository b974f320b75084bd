#include <doctest.h>

#include <cmath>
#include <string>

#include "ultraspec/problem_file.hpp"

using namespace ultraspec;

namespace {

std::string problem_path(const std::string& name) { return std::string(ULTRASPEC_PROBLEMS_DIR) + "/" + name; }

std::size_t error_line(const std::string& text) {
    try {
        (void)parse_problem(text);
    } catch (const ProblemFileError& e) {
        return e.line();
    }
    FAIL("no error for: " << text);
    return 0;
}

std::string error_text(const std::string& text) {
    try {
        (void)parse_problem(text);
    } catch (const ProblemFileError& e) {
        return e.what();
    }
    return "";
}

const char* const good = "order = 1\ncoeff[1] = \"1\"\ncoeff[0] = \"4*x\"\nbc = value(-1) = 1\n";

}  // namespace

TEST_CASE("first-order file") {
    const auto spec = load_problem(problem_path("firstorder.prob"));
    const auto& p = spec.problem;
    CHECK(p.order == 1);
    REQUIRE(p.coeffs.size() == 2);
    CHECK(p.coeffs[1].chopped(0.0).size() == 1);
    CHECK(p.coeffs[1][0] == 1.0);
    CHECK(p.coeffs[0][0] == 0.0);
    CHECK(p.coeffs[0][1] == 4.0);
    CHECK(p.rhs.is_zero());
    REQUIRE(p.bcs.size() == 1);
    CHECK(p.bcs[0].kind() == BoundaryFunctional<double>::Kind::Dirichlet);
    CHECK(p.bcs[0].value() == 1.0);
    CHECK(p.bcs[0].entry(1) == -1.0);
    CHECK(spec.sources.at("coeff[0]") == "4*x");
    CHECK(!spec.tol);
}

TEST_CASE("Airy file") {
    const auto spec = load_problem(problem_path("airy.prob"));
    const auto& p = spec.problem;
    CHECK(p.order == 2);
    CHECK(p.coeffs[2][0] == 1e-9);
    CHECK(p.coeffs[1].is_zero());
    CHECK(p.coeffs[0][1] == -1.0);
    REQUIRE(p.bcs.size() == 2);
    CHECK(p.bcs[0].value() == doctest::Approx(0.05597189577301992).epsilon(1e-15));
    CHECK(p.bcs[0].entry(1) == -1.0);
    CHECK(p.bcs[1].entry(1) == 1.0);
    CHECK(p.bcs[1].value() == 0.0);
}

TEST_CASE("all bundled problem files load") {
    for (const char* name : {"airy.prob", "airy_unit.prob", "atan.prob", "boundarylayer.prob", "firstorder.prob",
                             "oscillatory.prob", "tenth.prob"}) {
        INFO(name);
        const auto spec = load_problem(problem_path(name));
        CHECK_NOTHROW(spec.problem.validate());
    }
    const auto t = load_problem(problem_path("tenth.prob")).problem;
    CHECK(t.order == 10);
    CHECK(t.bcs.size() == 10);
    CHECK(t.bcs[2].kind() == BoundaryFunctional<double>::Kind::Neumann);
    CHECK(t.bcs[4].kind() == BoundaryFunctional<double>::Kind::Derivative);
    // x^4 is expanded exactly: (3 + 4 T_2 + T_4) / 8.
    CHECK(t.coeffs[4][0] == 0.375);
    CHECK(t.coeffs[4][2] == 0.5);
    CHECK(t.coeffs[4][4] == 0.125);
    // cosh is interpolated.
    CHECK(std::abs(clenshaw_eval(t.coeffs[8], 0.3) - std::cosh(0.3)) < 1e-15);
    const auto o = load_problem(problem_path("oscillatory.prob")).problem;
    CHECK(std::abs(clenshaw_eval(o.rhs, 0.01) - 100 * std::sin(2.0)) < 1e-11);
}

TEST_CASE("boundary condition forms and options") {
    const auto spec = parse_problem(
        "order = 2\n"
        "coeff[2] = \"1\"   # leading\n"
        "rhs = \"x^2 - 1/3\"\n"
        "bc = value(0.5) = 2\n"
        "bc = deriv(1, 1) = 0\n"
        "bc = deriv(2, 0.25) = -1\n"
        "bc = integral = 3\n"
        "bc = deriv(0, -1) = 4\n"
        "tol = 1e-12\n"
        "max_n = 5000\n");
    const auto& p = spec.problem;
    CHECK(p.coeffs[0].is_zero());
    CHECK(p.rhs[0] == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(p.rhs[2] == 0.5);
    REQUIRE(p.bcs.size() == 5);
    CHECK(p.bcs[0].kind() == BoundaryFunctional<double>::Kind::Derivative);
    CHECK(p.bcs[0].entry(2) == doctest::Approx(-0.5));
    CHECK(p.bcs[1].kind() == BoundaryFunctional<double>::Kind::Neumann);
    CHECK(p.bcs[2].value() == -1.0);
    CHECK(p.bcs[3].kind() == BoundaryFunctional<double>::Kind::Integral);
    CHECK(p.bcs[3].value() == 3.0);
    CHECK(p.bcs[4].kind() == BoundaryFunctional<double>::Kind::Dirichlet);
    CHECK(*spec.tol == 1e-12);
    CHECK(*spec.max_n == 5000);
}

TEST_CASE("polynomial expansion") {
    const auto a = polynomial_coeffs("4*x^3 - 3*x");
    REQUIRE(a);
    CHECK(*a == std::vector<double>{0, 0, 0, 1});
    const auto b = polynomial_coeffs("(x + 1)^2/2");
    REQUIRE(b);
    CHECK(*b == std::vector<double>{0.75, 1.0, 0.25});
    CHECK(!polynomial_coeffs("cos(x)"));
    CHECK(!polynomial_coeffs("1/x"));
    CHECK(!polynomial_coeffs("x^0.5"));
    const auto c = polynomial_coeffs("-x^2");
    REQUIRE(c);
    CHECK(*c == std::vector<double>{-0.5, 0.0, -0.5});
}

TEST_CASE("errors carry line numbers") {
    CHECK(error_line("order = 1\ncoeff[0] = \"x\"\nbc = value(-1) = 1\n") == 0);
    CHECK(error_text("order = 1\ncoeff[0] = \"x\"\nbc = value(-1) = 1\n").find("coeff[1]") != std::string::npos);
    CHECK(error_line("coeff[1] = \"1\"\nbc = value(-1) = 1\n") == 0);
    CHECK(error_text("coeff[1] = \"1\"\nbc = value(-1) = 1\n").find("order") != std::string::npos);
    CHECK(error_line("order = 1\norder = 2\ncoeff[1] = \"1\"\nbc = value(-1) = 1\n") == 2);
    CHECK(error_line("order = 1\ncoeff[1] = \"2x\"\nbc = value(-1) = 1\n") == 2);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\n\n# c\nbc = value(3) = 1\n") == 5);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\nbc = slope(1) = 1\n") == 3);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\nbc = value(1) = abc\n") == 3);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\n") == 0);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\nfrobnicate = 2\nbc = value(1) = 1\n") == 3);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\ncoeff[1] = \"2\"\nbc = value(1) = 1\n") == 3);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\ncoeff[3] = \"2\"\nbc = value(1) = 1\n") == 3);
    CHECK(error_line("order = 0\n") == 1);
    CHECK(error_line("order = 1.5\n") == 1);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\nbc = value(1) = 1\n") == 2);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\nbc = value(1) = 1\ntol = -1\n") == 4);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\nbc = value(1) = 1\njust text\n") == 4);
    CHECK(error_line("order = 1\ncoeff[1] = \"1\"\nrhs = \"log(x)\"\nbc = value(1) = 1\n") == 3);
    CHECK_NOTHROW(parse_problem(good));
    CHECK_THROWS_AS(load_problem(problem_path("does_not_exist.prob")), ProblemFileError);
}
