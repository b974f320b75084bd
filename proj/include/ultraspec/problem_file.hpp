#pragma once

// Line-oriented problem files:
//
//   # comment
//   order = 2
//   coeff[2] = "1e-9"
//   coeff[0] = "-x"
//   rhs = "0"
//   bc = value(-1) = 0.0559718957730199
//   bc = deriv(1, 0.5) = 0
//   bc = integral = 1
//   tol = 1e-14
//   max_n = 100000
//
// Missing coeff[k] (k < order) and rhs mean zero. Polynomial expressions
// are expanded exactly; other expressions are interpolated adaptively.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "ultraspec/solver.hpp"

namespace ultraspec {

class ProblemFileError : public std::runtime_error {
public:
    /// line is 1-based; 0 when the error concerns the file as a whole.
    ProblemFileError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct ProblemSpec {
    Problem<double> problem;
    std::optional<double> tol;
    std::optional<std::size_t> max_n;
    /// Source text of each coefficient, key "coeff[k]" or "rhs".
    std::map<std::string, std::string> sources;
};

ProblemSpec parse_problem(const std::string& text);
ProblemSpec load_problem(const std::string& path);

/// T coefficients of a polynomial expression (numbers, x, + - * /, and
/// integer powers), computed exactly; nullopt if the expression is not such
/// a polynomial.
std::optional<std::vector<double>> polynomial_coeffs(const std::string& expression);

}  // namespace ultraspec
