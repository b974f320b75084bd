#include "ultraspec/problem_file.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "ultraspec/errors.hpp"
#include "ultraspec/expr.hpp"

namespace ultraspec {

namespace {

using Poly = std::vector<double>;

void trim_zeros(Poly& p) {
    while (p.size() > 1 && p.back() == 0.0) p.pop_back();
}

Poly cheb_mul(const Poly& a, const Poly& b) {
    Poly c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double h = 0.5 * a[i] * b[j];
            c[i + j] += h;
            c[i > j ? i - j : j - i] += h;
        }
    trim_zeros(c);
    return c;
}

constexpr std::size_t kMaxPolyLength = 257;

std::optional<Poly> poly_of(const expr::Node& n) {
    using expr::Op;
    switch (n.op) {
        case Op::Number:
        case Op::Constant: return Poly{n.value};
        case Op::Var: return Poly{0.0, 1.0};
        case Op::Neg: {
            auto a = poly_of(*n.args[0]);
            if (!a) return std::nullopt;
            for (auto& v : *a) v = -v;
            return a;
        }
        case Op::Add:
        case Op::Sub: {
            auto a = poly_of(*n.args[0]);
            auto b = poly_of(*n.args[1]);
            if (!a || !b) return std::nullopt;
            const double sg = n.op == Op::Add ? 1.0 : -1.0;
            a->resize(std::max(a->size(), b->size()), 0.0);
            for (std::size_t k = 0; k < b->size(); ++k) (*a)[k] += sg * (*b)[k];
            trim_zeros(*a);
            return a;
        }
        case Op::Mul: {
            auto a = poly_of(*n.args[0]);
            auto b = poly_of(*n.args[1]);
            if (!a || !b || a->size() + b->size() - 1 > kMaxPolyLength) return std::nullopt;
            return cheb_mul(*a, *b);
        }
        case Op::Div: {
            auto a = poly_of(*n.args[0]);
            auto b = poly_of(*n.args[1]);
            if (!a || !b || b->size() != 1 || (*b)[0] == 0.0) return std::nullopt;
            for (auto& v : *a) v /= (*b)[0];
            return a;
        }
        case Op::Pow: {
            auto a = poly_of(*n.args[0]);
            auto e = poly_of(*n.args[1]);
            if (!a || !e || e->size() != 1) return std::nullopt;
            const double p = (*e)[0];
            if (a->size() == 1) return Poly{std::pow((*a)[0], p)};
            if (p < 0 || p != std::floor(p) || (a->size() - 1) * p + 1 > kMaxPolyLength) return std::nullopt;
            Poly r{1.0};
            for (int k = 0; k < static_cast<int>(p); ++k) r = cheb_mul(r, *a);
            return r;
        }
        case Op::Call: {
            auto a = poly_of(*n.args[0]);
            if (!a || a->size() != 1) return std::nullopt;
            // Constant argument: fold through the evaluator.
            return Poly{expr::Expr(std::make_shared<expr::Node>(n))(0.0)};
        }
    }
    return std::nullopt;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, std::size_t line, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty()) throw ProblemFileError("line " + std::to_string(line) + ": missing " + what, line);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || (errno == ERANGE && std::abs(v) > 1.0) || !std::isfinite(v))
        throw ProblemFileError("line " + std::to_string(line) + ": invalid " + what + " '" + t + "'", line);
    return v;
}

std::string unquote(const std::string& s, std::size_t line) {
    const std::string t = trim(s);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
    if (!t.empty() && (t.front() == '"' || t.back() == '"'))
        throw ProblemFileError("line " + std::to_string(line) + ": unbalanced quotes", line);
    return t;
}

std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

BoundaryFunctional<double> parse_bc(const std::string& spec, std::size_t line) {
    const auto eq = spec.rfind('=');
    const auto err = [&](const std::string& m) {
        return ProblemFileError("line " + std::to_string(line) + ": " + m, line);
    };
    if (eq == std::string::npos) throw err("boundary condition needs '= value'");
    const std::string lhs = trim(spec.substr(0, eq));
    const double v = parse_number(spec.substr(eq + 1), line, "boundary value");
    static const std::regex value_re(R"(value\s*\(\s*([^)]+?)\s*\))");
    static const std::regex deriv_re(R"(deriv\s*\(\s*([0-9]+)\s*,\s*([^)]+?)\s*\))");
    std::smatch m;
    if (lhs == "integral") return integral_condition<double>(v);
    if (std::regex_match(lhs, m, value_re)) {
        const double x0 = parse_number(m[1], line, "point");
        if (std::abs(x0) > 1.0) throw err("point must lie in [-1,1]");
        if (x0 == 1.0 || x0 == -1.0) return dirichlet<double>(x0, v);
        return deriv_at<double>(0, x0, v);
    }
    if (std::regex_match(lhs, m, deriv_re)) {
        const int p = std::stoi(m[1]);
        const double x0 = parse_number(m[2], line, "point");
        if (std::abs(x0) > 1.0) throw err("point must lie in [-1,1]");
        if (p == 0 && (x0 == 1.0 || x0 == -1.0)) return dirichlet<double>(x0, v);
        if (p == 1 && (x0 == 1.0 || x0 == -1.0)) return neumann<double>(x0, v);
        return deriv_at<double>(p, x0, v);
    }
    throw err("unknown boundary condition '" + lhs + "' (expected value(x0), deriv(p, x0) or integral)");
}

Series<double> to_series(const std::string& src, std::size_t line, const std::string& key) {
    std::optional<expr::Expr> e;
    try {
        e.emplace(expr::parse(src));
    } catch (const expr::ParseError& ex) {
        throw ProblemFileError("line " + std::to_string(line) + ": " + key + ": " + ex.what(), line);
    }
    if (auto p = poly_of(e->root())) {
        for (double c : *p)
            if (!std::isfinite(c))
                throw ProblemFileError("line " + std::to_string(line) + ": " + key + " is not finite", line);
        return Series<double>(std::move(*p));
    }
    try {
        const expr::Expr f = *e;
        return approximate<double>([&f](double x) { return f(x); });
    } catch (const ResolutionFailure& ex) {
        throw ProblemFileError("line " + std::to_string(line) + ": " + key + ": " + ex.what(), line);
    }
}

}  // namespace

std::optional<std::vector<double>> polynomial_coeffs(const std::string& expression) {
    return poly_of(expr::parse(expression).root());
}

ProblemSpec parse_problem(const std::string& text) {
    ProblemSpec spec;
    std::optional<int> order;
    std::size_t order_line = 0;
    std::map<int, std::pair<std::string, std::size_t>> coeff_src;
    std::optional<std::pair<std::string, std::size_t>> rhs_src;
    std::vector<BoundaryFunctional<double>> bcs;
    static const std::regex coeff_re(R"(coeff\s*\[\s*([0-9]+)\s*\])");

    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ProblemFileError("line " + std::to_string(line) + ": expected 'key = value'", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string val = s.substr(eq + 1);
        std::smatch m;
        if (key == "order") {
            if (order)
                throw ProblemFileError("line " + std::to_string(line) + ": duplicate order (first given on line " +
                                           std::to_string(order_line) + ")",
                                       line);
            const double v = parse_number(val, line, "order");
            if (v < 1 || v != std::floor(v) || v > 64)
                throw ProblemFileError("line " + std::to_string(line) + ": order must be an integer >= 1", line);
            order = static_cast<int>(v);
            order_line = line;
        } else if (std::regex_match(key, m, coeff_re)) {
            const int k = std::stoi(m[1]);
            if (coeff_src.count(k))
                throw ProblemFileError("line " + std::to_string(line) + ": duplicate " + key, line);
            coeff_src[k] = {unquote(val, line), line};
        } else if (key == "rhs") {
            if (rhs_src) throw ProblemFileError("line " + std::to_string(line) + ": duplicate rhs", line);
            rhs_src = std::make_pair(unquote(val, line), line);
        } else if (key == "bc") {
            bcs.push_back(parse_bc(val, line));
        } else if (key == "tol") {
            const double t = parse_number(val, line, "tol");
            if (!(t > 0)) throw ProblemFileError("line " + std::to_string(line) + ": tol must be positive", line);
            spec.tol = t;
        } else if (key == "max_n") {
            const double v = parse_number(val, line, "max_n");
            if (v < 1 || v != std::floor(v))
                throw ProblemFileError("line " + std::to_string(line) + ": max_n must be a positive integer", line);
            spec.max_n = static_cast<std::size_t>(v);
        } else {
            throw ProblemFileError("line " + std::to_string(line) + ": unknown key '" + key + "'", line);
        }
    }

    if (!order) throw ProblemFileError("missing key 'order'", 0);
    const int N = *order;
    if (!coeff_src.count(N))
        throw ProblemFileError("missing key 'coeff[" + std::to_string(N) + "]' (leading coefficient)", 0);
    for (const auto& [k, src] : coeff_src)
        if (k > N)
            throw ProblemFileError("line " + std::to_string(src.second) + ": coeff[" + std::to_string(k) +
                                       "] exceeds order " + std::to_string(N),
                                   src.second);
    if (bcs.empty()) throw ProblemFileError("missing key 'bc' (at least one boundary condition)", 0);

    auto& p = spec.problem;
    p.order = N;
    p.coeffs.assign(static_cast<std::size_t>(N) + 1, Series<double>());
    for (const auto& [k, src] : coeff_src) {
        const std::string key = "coeff[" + std::to_string(k) + "]";
        p.coeffs[static_cast<std::size_t>(k)] = to_series(src.first, src.second, key);
        spec.sources[key] = src.first;
    }
    if (rhs_src) {
        p.rhs = to_series(rhs_src->first, rhs_src->second, "rhs");
        spec.sources["rhs"] = rhs_src->first;
    }
    p.bcs = std::move(bcs);
    return spec;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProblemFileError("cannot open problem file '" + path + "'", 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

}  // namespace ultraspec
