#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ultraspec/errors.hpp"
#include "ultraspec/expr.hpp"
#include "ultraspec/problem_file.hpp"
#include "ultraspec/solver.hpp"

namespace py = pybind11;
using namespace ultraspec;

namespace {

using Vec = std::vector<double>;
using Op = BandedOp<double>;
using Bc = BoundaryFunctional<double>;

Series<double> series(const Vec& c, int basis = 0) {
    return c.empty() ? Series<double>() : Series<double>(c, basis);
}

Vec vec(const Series<double>& s) {
    return Vec(s.coeffs().begin(), s.coeffs().end());
}

Problem<double> make_problem(int order, const std::vector<Vec>& coeffs, const Vec& rhs, std::vector<Bc> bcs) {
    Problem<double> p;
    p.order = order;
    for (const auto& c : coeffs) p.coeffs.push_back(series(c));
    p.rhs = series(rhs);
    p.bcs = std::move(bcs);
    p.validate();
    return p;
}

py::dict solution_dict(const Solution<double>& s) {
    py::dict d;
    d["u"] = vec(s.u);
    d["n_opt"] = s.n_opt;
    d["residual"] = s.residual;
    d["elapsed"] = s.elapsed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_ultraspec, m) {
    m.doc() = "Ultraspherical spectral method for linear ODE boundary value problems on [-1,1]";

    py::register_exception<ResolutionFailure>(m, "ResolutionFailure", PyExc_RuntimeError);
    py::register_exception<SingularEquation>(m, "SingularEquation", PyExc_RuntimeError);
    py::register_exception<SingularSystem>(m, "SingularSystem", PyExc_RuntimeError);
    py::register_exception<NoConvergence>(m, "NoConvergence", PyExc_RuntimeError);
    py::register_exception<expr::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ProblemFileError>(m, "ProblemFileError", PyExc_ValueError);

    m.def("cheb_points", &cheb_points, py::arg("n"));
    m.def("vals_to_coeffs", [](const Vec& v) { return vec(vals_to_coeffs<double>(v)); }, py::arg("values"));
    m.def("coeffs_to_vals", [](const Vec& c) { return coeffs_to_vals(series(c)); }, py::arg("coeffs"));
    m.def("evaluate", [](const Vec& c, double x, int basis) { return clenshaw_eval(series(c, basis), x); },
          py::arg("coeffs"), py::arg("x"), py::arg("basis") = 0);
    m.def("definite_integral", [](const Vec& c) { return definite_integral(series(c)); }, py::arg("coeffs"));
    m.def(
        "interpolate",
        [](const std::function<double(double)>& f, double tol) {
            InterpOptions o;
            o.tol = tol;
            return vec(adaptive_interp<double>(f, o));
        },
        py::arg("f"), py::arg("tol") = InterpOptions{}.tol);
    m.def("to_ultra", [](const Vec& c, int lambda) { return vec(to_ultra(series(c), lambda)); }, py::arg("coeffs"),
          py::arg("lam"));
    m.def("carlitz_c", &carlitz_c, py::arg("lam"), py::arg("s"), py::arg("j"), py::arg("k"));

    py::class_<Op>(m, "BandedOp")
        .def_property_readonly("lower", &Op::lower)
        .def_property_readonly("upper", &Op::upper)
        .def("entry", &Op::entry, py::arg("j"), py::arg("k"))
        .def("row",
             [](const Op& op, std::size_t j) {
                 auto r = op.row(j);
                 return py::make_tuple(r.offset, r.values);
             },
             py::arg("j"))
        .def("dense", [](const Op& op, std::size_t rows, std::size_t cols) { return exact_truncate(op, rows, cols); },
             py::arg("rows"), py::arg("cols"))
        .def("__mul__", &Op::operator*)
        .def("__add__", &Op::operator+)
        .def("__repr__", &Op::describe);

    m.def("diff_op", &diff_op<double>, py::arg("lam"));
    m.def("conv_op", &conv_op<double>, py::arg("lam"));
    m.def("mult_op_cheb", [](const Vec& a) { return mult_op_cheb(series(a)); }, py::arg("a"));
    m.def("mult_op_ultra", [](const Vec& a, int lambda) { return mult_op_ultra(series(a, lambda)); },
          py::arg("a"), py::arg("lam"));
    m.def(
        "assemble_L",
        [](const std::vector<Vec>& coeffs, int order) {
            std::vector<Series<double>> s;
            for (const auto& c : coeffs) s.push_back(series(c));
            return assemble_L<double>(s, order);
        },
        py::arg("coeffs"), py::arg("order"));

    py::class_<Bc>(m, "BoundaryFunctional")
        .def_property_readonly("value", &Bc::value)
        .def("entry", &Bc::entry, py::arg("k"))
        .def("apply", [](const Bc& b, const Vec& c) { return b.apply(c); }, py::arg("coeffs"))
        .def("__repr__", &Bc::describe);
    m.def("dirichlet", &dirichlet<double>, py::arg("endpoint"), py::arg("value"));
    m.def("neumann", &neumann<double>, py::arg("endpoint"), py::arg("value"));
    m.def("deriv_at", &deriv_at<double>, py::arg("p"), py::arg("x0"), py::arg("value"));
    m.def("integral_condition", &integral_condition<double>, py::arg("value"));

    m.def(
        "assemble_dense",
        [](const Op& L, const std::vector<Bc>& bcs, std::size_t n) { return assemble_dense<double>(L, bcs, n); },
        py::arg("L"), py::arg("bcs"), py::arg("n"));
    m.def("precondition_diag", &precondition_diag, py::arg("order"), py::arg("n"));
    m.def("condition_number", [](const DenseMatrix<double>& A) { return condition_number<double>(A); },
          py::arg("A"));

    m.def(
        "solve",
        [](int order, const std::vector<Vec>& coeffs, const Vec& rhs, std::vector<Bc> bcs, double tol,
           std::size_t max_n, bool precondition) {
            const auto p = make_problem(order, coeffs, rhs, std::move(bcs));
            SolveOptions o;
            o.tol = tol;
            o.max_n = max_n;
            o.precondition = precondition;
            Solution<double> s;
            {
                py::gil_scoped_release nogil;
                s = solve(p, o);
            }
            return solution_dict(s);
        },
        py::arg("order"), py::arg("coeffs"), py::arg("rhs"), py::arg("bcs"), py::arg("tol") = 1e-14,
        py::arg("max_n") = SolveOptions{}.max_n, py::arg("precondition") = false,
        "Adaptive solve; coeffs are T coefficient lists for a^0..a^order.");
    m.def(
        "solve_fixed",
        [](int order, const std::vector<Vec>& coeffs, const Vec& rhs, std::vector<Bc> bcs, std::size_t n) {
            return vec(solve_fixed(make_problem(order, coeffs, rhs, std::move(bcs)), n));
        },
        py::arg("order"), py::arg("coeffs"), py::arg("rhs"), py::arg("bcs"), py::arg("n"));
    m.def(
        "cauchy_error",
        [](int order, const std::vector<Vec>& coeffs, const Vec& rhs, std::vector<Bc> bcs, std::size_t n,
           int lambda) { return cauchy_error(make_problem(order, coeffs, rhs, std::move(bcs)), n, lambda); },
        py::arg("order"), py::arg("coeffs"), py::arg("rhs"), py::arg("bcs"), py::arg("n"), py::arg("lam") = 0);
    m.def("differentiate", [](const Vec& u, int p) { return vec(differentiate_solution(series(u), p)); },
          py::arg("coeffs"), py::arg("p") = 1);

    m.def(
        "solve_file",
        [](const std::string& path, double tol) {
            auto spec = load_problem(path);
            SolveOptions o;
            o.tol = tol > 0 ? tol : spec.tol.value_or(o.tol);
            o.max_n = spec.max_n.value_or(o.max_n);
            return solution_dict(solve(spec.problem, o));
        },
        py::arg("path"), py::arg("tol") = 0.0);

    py::class_<expr::Expr>(m, "Expr")
        .def("__call__", &expr::Expr::operator(), py::arg("x"))
        .def("__str__", &expr::Expr::str);
    m.def("parse_expr", [](const std::string& s) { return expr::parse(s); }, py::arg("text"));
}
