// ultraspec solve <problem file> [options]

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ultraspec/errors.hpp"
#include "ultraspec/expr.hpp"
#include "ultraspec/problem_file.hpp"
#include "ultraspec/solver.hpp"

namespace fs = std::filesystem;
using namespace ultraspec;

namespace {

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

struct Flags {
    std::string file;
    double tol = 0.0;
    std::size_t max_n = 0;
    std::size_t fixed_n = 0;
    std::size_t samples = 1000;
    int deriv = 0;
    bool precondition = false;
    bool diagnose = false;
    bool dump_matrix = false;
    std::string output = ".";
};

const char* kFormatHelp = R"(Problem file format, one "key = value" per line, '#' starts a comment:
  order = N
  coeff[k] = "<expr>"      coefficient of u^(k), k = 0..N; missing means 0
  rhs = "<expr>"           right-hand side; missing means 0
  bc = value(x0) = v       u(x0) = v, x0 in [-1,1]
  bc = deriv(p, x0) = v    u^(p)(x0) = v
  bc = integral = v        integral of u over [-1,1] equals v
  tol = v                  optional, overridden by --tol
  max_n = v                optional, overridden by --max-n
Expressions use x, numbers, pi, e, + - * / ^ (right associative), unary minus,
and sin cos tan exp log sqrt abs sinh cosh tanh atan sign. Write 2*x, not 2x.

Outputs in the output directory:
  coeffs.txt    "k value" per line, T coefficients of the solution
  samples.csv   x,u[,d1u,...] at equispaced points
Exit codes: 0 success, 1 solver failure, 2 input error.)";

std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, int count) {
    std::vector<std::size_t> g;
    if (hi <= lo) return {lo};
    const double r = std::pow(static_cast<double>(hi) / static_cast<double>(lo), 1.0 / (count - 1));
    double v = static_cast<double>(lo);
    for (int i = 0; i < count; ++i, v *= r) {
        const auto n = static_cast<std::size_t>(std::llround(v));
        if (g.empty() || n > g.back()) g.push_back(n);
    }
    return g;
}

void print_history(const std::vector<double>& h) {
    const std::size_t show = std::min<std::size_t>(h.size(), 20);
    std::cout << "residual_history (last " << show << " of " << h.size() << " columns)\n";
    for (std::size_t i = h.size() - show; i < h.size(); ++i) std::cout << (i + 1) << "," << num(h[i]) << "\n";
}

int run_solve(const Flags& fl) {
    ProblemSpec spec;
    try {
        spec = load_problem(fl.file);
    } catch (const ProblemFileError& e) {
        std::cerr << fl.file << ": " << e.what() << "\n";
        return 2;
    }
    const auto& p = spec.problem;
    SolveOptions opts;
    opts.tol = fl.tol > 0 ? fl.tol : spec.tol.value_or(opts.tol);
    opts.max_n = fl.max_n > 0 ? fl.max_n : spec.max_n.value_or(opts.max_n);
    opts.precondition = fl.precondition;

    Series<double> u;
    std::size_t n = 0;
    try {
        if (fl.fixed_n > 0) {
            const auto t0 = std::chrono::steady_clock::now();
            u = solve_fixed(p, fl.fixed_n, fl.precondition);
            n = fl.fixed_n;
            const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cout << "mode=fixed\nn=" << n << "\ntime=" << num(el) << "\n";
        } else {
            const auto sol = solve(p, opts);
            u = sol.u;
            n = sol.n_opt;
            std::cout << "mode=adaptive\nn_opt=" << sol.n_opt << "\nresidual=" << num(sol.residual)
                      << "\ntime=" << num(sol.elapsed) << "\n";
        }
    } catch (const NoConvergence& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        print_history(e.history());
        return 1;
    } catch (const SingularEquation& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 1;
    } catch (const SingularSystem& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }

    std::error_code ec;
    fs::create_directories(fl.output, ec);
    if (ec) {
        std::cerr << "cannot create output directory '" << fl.output << "': " << ec.message() << "\n";
        return 2;
    }
    {
        std::ofstream out(fs::path(fl.output) / "coeffs.txt");
        for (std::size_t k = 0; k < u.size(); ++k) out << k << " " << num(u[k]) << "\n";
    }
    if (fl.samples > 0) {
        std::vector<Series<double>> cols{u};
        for (int d = 1; d <= fl.deriv; ++d) cols.push_back(differentiate_solution(cols.back(), 1));
        std::ofstream out(fs::path(fl.output) / "samples.csv");
        out << "x,u";
        for (int d = 1; d <= fl.deriv; ++d) out << ",d" << d << "u";
        out << "\n";
        for (std::size_t i = 0; i < fl.samples; ++i) {
            const double x = fl.samples == 1 ? 0.0
                                             : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(fl.samples - 1);
            out << num(x);
            for (const auto& c : cols) out << "," << num(clenshaw_eval(c, x));
            out << "\n";
        }
    }
    std::cout << "length=" << u.size() << "\n";

    if (fl.dump_matrix) {
        if (n > 2000) {
            std::cerr << "--dump-matrix: n = " << n << " is too large (limit 2000)\n";
            return 2;
        }
        const auto A = assemble_dense<double>(problem_operator(p), p.bcs, n);
        std::cout << "# matrix n=" << n << "\n";
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            for (Eigen::Index j = 0; j < A.cols(); ++j) std::cout << (j ? " " : "") << num(A(i, j));
            std::cout << "\n";
        }
    }

    if (fl.diagnose) {
        try {
            const std::size_t lo = std::max<std::size_t>(p.bcs.size() + 4, 8);
            std::cout << "# cauchy_error\nn,cauchy_error\n";
            for (auto m : geometric_grid(lo, std::max(lo, n + n / 2), 16))
                std::cout << m << "," << num(cauchy_error(p, m)) << "\n";
            std::cout << "# condition_number\nn,kappa,kappa_preconditioned\n";
            const auto L = problem_operator(p);
            const auto R = precondition_scale(p.order);
            for (auto m : geometric_grid(lo, std::min<std::size_t>(std::max(lo, n + n / 2), 500), 6)) {
                DenseMatrix<double> A = assemble_dense<double>(L, p.bcs, m);
                const double k1 = condition_number(A);
                for (Eigen::Index j = 0; j < A.cols(); ++j) A.col(j) *= R(static_cast<std::size_t>(j));
                std::cout << m << "," << num(k1) << "," << num(condition_number(A)) << "\n";
            }
        } catch (const std::runtime_error& e) {
            std::cerr << "diagnostics failed: " << e.what() << "\n";
            return 1;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ultraspherical spectral solver for linear ODE boundary value problems on [-1,1]"};
    app.require_subcommand(1);
    Flags fl;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the problem in a problem file");
    solve_cmd->footer(kFormatHelp);
    solve_cmd->add_option("file", fl.file, "Problem file")->required();
    solve_cmd->add_option("--tol", fl.tol, "Relative tolerance on the exact residual (default 1e-14)");
    solve_cmd->add_option("--max-n", fl.max_n, "Largest truncation tried (default 2097152)");
    solve_cmd->add_option("--fixed-n", fl.fixed_n, "Solve the n x n truncation instead of adapting");
    solve_cmd->add_option("--samples", fl.samples, "Equispaced sample points written to samples.csv (0 disables)")
        ->capture_default_str();
    solve_cmd->add_option("--deriv", fl.deriv, "Derivative columns added to samples.csv")
        ->check(CLI::Range(0, 64))
        ->capture_default_str();
    solve_cmd->add_flag("--precondition", fl.precondition, "Scale columns by the diagonal preconditioner");
    solve_cmd->add_flag("--diagnose", fl.diagnose, "Print Cauchy-error and condition-number tables");
    solve_cmd->add_flag("--dump-matrix", fl.dump_matrix, "Print the square truncation of the system");
    solve_cmd->add_option("-o,--output", fl.output, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return run_solve(fl);
}
