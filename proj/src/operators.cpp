#include "ultraspec/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <variant>

#include "ultraspec/errors.hpp"

namespace ultraspec {

template <Scalar S>
struct BandedOp<S>::Node {
    struct Identity {};
    struct Diff {
        int lambda;
        double scale;  // 2^(lambda-1) (lambda-1)!
    };
    struct Conv {
        int lambda;
    };
    struct MultCheb {
        std::vector<S> a;
    };
    struct MultUltra {
        std::vector<S> a;
        int lambda;
    };
    struct Scaled {
        S alpha;
        BandedOp<S> op;
    };
    struct Sum {
        std::vector<BandedOp<S>> terms;
    };
    struct Product {
        std::vector<BandedOp<S>> factors;  // leftmost applied last
    };

    using Kind = std::variant<Identity, Diff, Conv, MultCheb, MultUltra, Scaled, Sum, Product>;

    Kind kind;
    int lower;
    int upper;
};

namespace {

template <Scalar S>
void add_at(SparseRow<S>& acc, std::size_t col, S v) {
    if (col >= acc.offset && col < acc.end()) acc.values[col - acc.offset] += v;
}

template <Scalar S>
SparseRow<S> band_row(std::size_t j, int lower, int upper) {
    const long first = std::max<long>(0, static_cast<long>(j) - lower);
    const long last = static_cast<long>(j) + upper;
    SparseRow<S> r;
    r.offset = static_cast<std::size_t>(first);
    if (last >= first) r.values.assign(static_cast<std::size_t>(last - first + 1), S(0));
    return r;
}

template <Scalar S>
S mult_ultra_entry(const std::vector<S>& a, int lambda, std::size_t j, std::size_t k) {
    const std::size_t m = a.size();
    std::size_t s = k > j ? k - j : 0;
    std::size_t i = j > k ? j - k : k - j;  // 2s + j - k
    if (i >= m) return S(0);
    double c = carlitz_c_short(lambda, s, k, i);
    S sum = a[i] * c;
    while (s < k && i + 2 < m) {
        c = carlitz_step(c, lambda, s, k, i);
        ++s;
        i += 2;
        sum += a[i] * c;
    }
    return sum;
}

}  // namespace

template <Scalar S>
int BandedOp<S>::lower() const {
    return node_->lower;
}

template <Scalar S>
int BandedOp<S>::upper() const {
    return node_->upper;
}

template <Scalar S>
void BandedOp<S>::add_row_to(std::size_t j, S alpha, SparseRow<S>& acc) const {
    using N = Node;
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, typename N::Identity>) {
                add_at(acc, j, alpha);
            } else if constexpr (std::is_same_v<T, typename N::Diff>) {
                const std::size_t col = j + static_cast<std::size_t>(op.lambda);
                add_at(acc, col, alpha * (op.scale * static_cast<double>(col)));
            } else if constexpr (std::is_same_v<T, typename N::Conv>) {
                if (op.lambda == 0) {
                    add_at(acc, j, alpha * (j == 0 ? 1.0 : 0.5));
                    add_at(acc, j + 2, alpha * -0.5);
                } else {
                    const double l = op.lambda;
                    const double jj = static_cast<double>(j);
                    add_at(acc, j, alpha * (j == 0 ? 1.0 : l / (l + jj)));
                    add_at(acc, j + 2, alpha * (-l / (l + jj + 2.0)));
                }
            } else if constexpr (std::is_same_v<T, typename N::MultCheb>) {
                const auto& a = op.a;
                const std::size_t m = a.size();
                const std::size_t first = j + 1 >= m ? j + 1 - m : 0;
                for (std::size_t k = first; k < j + m; ++k) {
                    S v = 0;
                    if (j == 0) {
                        v = k == 0 ? a[0] : 0.5 * a[k];
                    } else {
                        const std::size_t d = j > k ? j - k : k - j;
                        v = d == 0 ? a[0] : 0.5 * a[d];
                        if (j + k < m) v += 0.5 * a[j + k];
                    }
                    add_at(acc, k, alpha * v);
                }
            } else if constexpr (std::is_same_v<T, typename N::MultUltra>) {
                const std::size_t m = op.a.size();
                const std::size_t first = j + 1 >= m ? j + 1 - m : 0;
                const std::size_t lo = std::max(first, acc.offset);
                const std::size_t hi = std::min(j + m, acc.end());
                for (std::size_t k = lo; k < hi; ++k)
                    acc.values[k - acc.offset] += alpha * mult_ultra_entry(op.a, op.lambda, j, k);
            } else if constexpr (std::is_same_v<T, typename N::Scaled>) {
                op.op.add_row_to(j, alpha * op.alpha, acc);
            } else if constexpr (std::is_same_v<T, typename N::Sum>) {
                for (const auto& t : op.terms) t.add_row_to(j, alpha, acc);
            } else if constexpr (std::is_same_v<T, typename N::Product>) {
                SparseRow<S> v = op.factors.front().row(j);
                for (std::size_t f = 1; f < op.factors.size(); ++f) {
                    const auto& F = op.factors[f];
                    const long first = std::max<long>(0, static_cast<long>(v.offset) - F.lower());
                    const long last = static_cast<long>(v.end()) - 1 + F.upper();
                    SparseRow<S> w;
                    w.offset = static_cast<std::size_t>(first);
                    if (last >= first) w.values.assign(static_cast<std::size_t>(last - first + 1), S(0));
                    for (std::size_t i = 0; i < v.values.size(); ++i)
                        if (v.values[i] != S(0)) F.add_row_to(v.offset + i, v.values[i], w);
                    v = std::move(w);
                }
                for (std::size_t i = 0; i < v.values.size(); ++i)
                    add_at(acc, v.offset + i, alpha * v.values[i]);
            }
        },
        node_->kind);
}

template <Scalar S>
SparseRow<S> BandedOp<S>::row(std::size_t j) const {
    auto r = band_row<S>(j, lower(), upper());
    add_row_to(j, S(1), r);
    return r;
}

template <Scalar S>
S BandedOp<S>::entry(std::size_t j, std::size_t k) const {
    const long d = static_cast<long>(k) - static_cast<long>(j);
    if (d < -lower() || d > upper()) return S(0);
    return row(j).at(k);
}

template <Scalar S>
std::string BandedOp<S>::describe() const {
    using N = Node;
    std::ostringstream os;
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, typename N::Identity>) {
                os << "I";
            } else if constexpr (std::is_same_v<T, typename N::Diff>) {
                os << "D" << op.lambda;
            } else if constexpr (std::is_same_v<T, typename N::Conv>) {
                os << "S" << op.lambda;
            } else if constexpr (std::is_same_v<T, typename N::MultCheb>) {
                os << "M0[" << op.a.size() << "]";
            } else if constexpr (std::is_same_v<T, typename N::MultUltra>) {
                os << "M" << op.lambda << "[" << op.a.size() << "]";
            } else if constexpr (std::is_same_v<T, typename N::Scaled>) {
                os << op.alpha << "*" << op.op.describe();
            } else if constexpr (std::is_same_v<T, typename N::Sum>) {
                os << "(";
                for (std::size_t i = 0; i < op.terms.size(); ++i)
                    os << (i ? " + " : "") << op.terms[i].describe();
                os << ")";
            } else if constexpr (std::is_same_v<T, typename N::Product>) {
                for (std::size_t i = 0; i < op.factors.size(); ++i)
                    os << (i ? "*" : "") << op.factors[i].describe();
            }
        },
        node_->kind);
    return os.str();
}

template <Scalar S>
BandedOp<S> BandedOp<S>::operator*(const BandedOp& rhs) const {
    typename Node::Product p;
    auto append = [&](const BandedOp& op) {
        if (auto* q = std::get_if<typename Node::Product>(&op.node_->kind))
            p.factors.insert(p.factors.end(), q->factors.begin(), q->factors.end());
        else
            p.factors.push_back(op);
    };
    append(*this);
    append(rhs);
    return BandedOp(std::make_shared<const Node>(
        Node{std::move(p), lower() + rhs.lower(), upper() + rhs.upper()}));
}

template <Scalar S>
BandedOp<S> BandedOp<S>::operator+(const BandedOp& rhs) const {
    typename Node::Sum s;
    auto append = [&](const BandedOp& op) {
        if (auto* q = std::get_if<typename Node::Sum>(&op.node_->kind))
            s.terms.insert(s.terms.end(), q->terms.begin(), q->terms.end());
        else
            s.terms.push_back(op);
    };
    append(*this);
    append(rhs);
    return BandedOp(std::make_shared<const Node>(
        Node{std::move(s), std::max(lower(), rhs.lower()), std::max(upper(), rhs.upper())}));
}

template <Scalar S>
BandedOp<S> BandedOp<S>::scaled(S alpha) const {
    return BandedOp(std::make_shared<const Node>(
        Node{typename Node::Scaled{alpha, *this}, lower(), upper()}));
}

template <Scalar S>
BandedOp<S> identity_op() {
    using N = typename BandedOp<S>::Node;
    return BandedOp<S>(std::make_shared<const N>(N{typename N::Identity{}, 0, 0}));
}

template <Scalar S>
BandedOp<S> diff_op(int lambda) {
    if (lambda < 1) throw std::invalid_argument("diff_op: order must be >= 1");
    using N = typename BandedOp<S>::Node;
    double scale = std::ldexp(1.0, lambda - 1);
    for (int i = 2; i < lambda; ++i) scale *= i;
    return BandedOp<S>(std::make_shared<const N>(N{typename N::Diff{lambda, scale}, -lambda, lambda}));
}

template <Scalar S>
BandedOp<S> conv_op(int lambda) {
    if (lambda < 0) throw std::invalid_argument("conv_op: level must be >= 0");
    using N = typename BandedOp<S>::Node;
    return BandedOp<S>(std::make_shared<const N>(N{typename N::Conv{lambda}, 0, 2}));
}

template <Scalar S>
BandedOp<S> mult_op_cheb(const Series<S>& a) {
    if (a.basis() != 0) throw std::invalid_argument("mult_op_cheb: series must be in the T basis");
    using N = typename BandedOp<S>::Node;
    const int bw = static_cast<int>(a.size()) - 1;
    std::vector<S> c(a.coeffs().begin(), a.coeffs().end());
    return BandedOp<S>(std::make_shared<const N>(N{typename N::MultCheb{std::move(c)}, bw, bw}));
}

template <Scalar S>
BandedOp<S> mult_op_ultra(const Series<S>& a) {
    if (a.basis() < 1) throw std::invalid_argument("mult_op_ultra: series must be in a C^(lambda) basis, lambda >= 1");
    using N = typename BandedOp<S>::Node;
    const int bw = static_cast<int>(a.size()) - 1;
    std::vector<S> c(a.coeffs().begin(), a.coeffs().end());
    return BandedOp<S>(
        std::make_shared<const N>(N{typename N::MultUltra{std::move(c), a.basis()}, bw, bw}));
}

double carlitz_c(int lambda, std::size_t s, std::size_t j, std::size_t k) {
    if (lambda < 1) throw std::invalid_argument("carlitz_c: lambda must be >= 1");
    if (s > std::min(j, k)) throw std::invalid_argument("carlitz_c: need s <= min(j, k)");
    const double l = lambda;
    const double J = static_cast<double>(j + k - 2 * s);
    const double ks = static_cast<double>(k - s);
    double c = (J + l) / (J + l + static_cast<double>(s));
    for (std::size_t t = 0; t < s; ++t) {
        const double tt = static_cast<double>(t);
        c *= (l + tt) / (1.0 + tt);
        c *= (2.0 * l + J + tt) / (l + J + tt);
    }
    for (std::size_t t = 0; t < j - s; ++t) {
        const double tt = static_cast<double>(t);
        c *= (l + tt) / (1.0 + tt);
        c *= (ks + 1.0 + tt) / (ks + l + tt);
    }
    return c;
}

double carlitz_c_short(int lambda, std::size_t s, std::size_t j, std::size_t k) {
    if (lambda < 1) throw std::invalid_argument("carlitz_c_short: lambda must be >= 1");
    if (s > std::min(j, k)) throw std::invalid_argument("carlitz_c_short: need s <= min(j, k)");
    // (l)_s/s!, (l)_{j-s}/(j-s)!, (k-s+1)_{j-s}/(k-s+l)_{j-s} and
    // (2l+J)_s/(l+J)_s each reduce to a ratio of products of l-1 or l terms.
    const double l = lambda;
    const double ss = static_cast<double>(s);
    const double js = static_cast<double>(j - s);
    const double ks = static_cast<double>(k - s);
    const double J = static_cast<double>(j + k - 2 * s);
    double c = (J + l) / (J + l + ss);
    for (int i = 1; i < lambda; ++i) {
        const double ii = i;
        c *= (ss + ii) / ii;
        c *= (js + ii) / ii;
        c *= (ks + ii) / (J + ii);
    }
    for (int i = 0; i < lambda; ++i) c *= (l + J + ss + i) / (l + J + i);
    return c;
}

double carlitz_step(double c, int lambda, std::size_t s, std::size_t j, std::size_t k) {
    const double l = lambda;
    const double ss = static_cast<double>(s);
    const double jj = static_cast<double>(j);
    const double kk = static_cast<double>(k);
    c *= (jj + kk + l - ss) / (jj + kk + l - ss + 1.0);
    c *= (l + ss) / (ss + 1.0);
    c *= (jj - ss) / (l + jj - ss - 1.0);
    c *= (2.0 * l + jj + kk - ss) / (l + jj + kk - ss);
    c *= (kk - ss + l) / (kk - ss + 1.0);
    return c;
}

template <Scalar S>
Series<S> to_ultra(const Series<S>& a, int lambda) {
    if (lambda < a.basis()) throw std::invalid_argument("to_ultra: cannot convert to a lower basis");
    std::vector<S> v(a.coeffs().begin(), a.coeffs().end());
    const std::size_t n = v.size();
    for (int l = a.basis(); l < lambda; ++l) {
        for (std::size_t k = 0; k < n; ++k) {
            double diag, super;
            const double kk = static_cast<double>(k);
            if (l == 0) {
                diag = k == 0 ? 1.0 : 0.5;
                super = -0.5;
            } else {
                diag = k == 0 ? 1.0 : l / (l + kk);
                super = -l / (l + kk + 2.0);
            }
            v[k] = diag * v[k] + (k + 2 < n ? super * v[k + 2] : S(0));
        }
    }
    return Series<S>(std::move(v), lambda);
}

template <Scalar S>
BandedOp<S> assemble_L(std::span<const Series<S>> coeffs, int order) {
    if (order < 1) throw std::invalid_argument("assemble_L: order must be >= 1");
    if (coeffs.size() != static_cast<std::size_t>(order) + 1)
        throw std::invalid_argument("assemble_L: need order + 1 coefficient series");
    for (const auto& a : coeffs)
        if (a.basis() != 0) throw std::invalid_argument("assemble_L: coefficients must be T series");

    const auto& lead = coeffs[static_cast<std::size_t>(order)];
    {
        const auto x = cheb_points(100);
        double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
        bool sign_change = false;
        S prev{};
        for (std::size_t i = 0; i < x.size(); ++i) {
            const S v = clenshaw_eval(lead, x[i]);
            mn = std::min(mn, std::abs(v));
            mx = std::max(mx, std::abs(v));
            // A real coefficient that changes sign between samples has a root
            // the grid missed.
            if constexpr (std::is_same_v<S, double>)
                if (i > 0 && (v < 0) != (prev < 0)) sign_change = true;
            prev = v;
        }
        if (mx == 0.0 || mn <= 1e-12 * mx || sign_change)
            throw SingularEquation("assemble_L: leading coefficient vanishes on [-1,1]");
    }

    // S_{N-1} ... S_from
    auto chain = [&](int from) -> std::optional<BandedOp<S>> {
        std::optional<BandedOp<S>> c;
        for (int l = order - 1; l >= from; --l) c = c ? *c * conv_op<S>(l) : conv_op<S>(l);
        return c;
    };

    std::optional<BandedOp<S>> L;
    auto add = [&](BandedOp<S> term) { L = L ? *L + term : term; };

    for (int l = order; l >= 0; --l) {
        const auto& a = coeffs[static_cast<std::size_t>(l)];
        if (a.is_zero()) continue;
        std::optional<BandedOp<S>> inner;
        if (l == 0) {
            inner = a.size() == 1 ? identity_op<S>().scaled(a[0]) : mult_op_cheb(a);
        } else if (a.size() == 1) {
            inner = diff_op<S>(l).scaled(a[0]);
        } else {
            inner = mult_op_ultra(to_ultra(a, l)) * diff_op<S>(l);
        }
        auto c = chain(l);
        add(c ? *c * *inner : *inner);
    }
    return *L;
}

template <Scalar S>
DenseMatrix<S> exact_truncate(const BandedOp<S>& op, std::size_t rows, std::size_t cols) {
    DenseMatrix<S> A = DenseMatrix<S>::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t j = 0; j < rows; ++j) {
        const auto r = op.row(j);
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            const std::size_t col = r.offset + i;
            if (col < cols) A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(col)) = r.values[i];
        }
    }
    return A;
}

template <Scalar S>
std::vector<S> apply(const BandedOp<S>& op, std::span<const S> x, std::size_t n) {
    std::vector<S> y(n, S(0));
    for (std::size_t j = 0; j < n; ++j) {
        const auto r = op.row(j);
        S acc = 0;
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            const std::size_t col = r.offset + i;
            if (col < x.size()) acc += r.values[i] * x[col];
        }
        y[j] = acc;
    }
    return y;
}

#define ULTRASPEC_INSTANTIATE(S)                                                        \
    template class BandedOp<S>;                                                         \
    template BandedOp<S> identity_op<S>();                                              \
    template BandedOp<S> diff_op<S>(int);                                               \
    template BandedOp<S> conv_op<S>(int);                                               \
    template BandedOp<S> mult_op_cheb<S>(const Series<S>&);                             \
    template BandedOp<S> mult_op_ultra<S>(const Series<S>&);                            \
    template Series<S> to_ultra<S>(const Series<S>&, int);                              \
    template BandedOp<S> assemble_L<S>(std::span<const Series<S>>, int);                \
    template DenseMatrix<S> exact_truncate<S>(const BandedOp<S>&, std::size_t, std::size_t); \
    template std::vector<S> apply<S>(const BandedOp<S>&, std::span<const S>, std::size_t);

ULTRASPEC_INSTANTIATE(double)
ULTRASPEC_INSTANTIATE(cdouble)
#undef ULTRASPEC_INSTANTIATE

}  // namespace ultraspec
