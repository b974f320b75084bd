#include "ultraspec/almost_banded.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>

#include "ultraspec/errors.hpp"

namespace ultraspec {

template <Scalar S>
Givens<S> givens(S a, S b) {
    if (b == S(0)) {
        if constexpr (std::is_same_v<S, double>) {
            if (a < 0) return {-1.0, 0.0, -a};
        }
        return {1.0, S(0), a};
    }
    if constexpr (std::is_same_v<S, double>) {
        const double r = std::hypot(a, b);
        return {a / r, b / r, r};
    } else {
        const double aa = std::abs(a);
        const double rho = std::hypot(aa, std::abs(b));
        if (aa == 0.0) return {0.0, std::conj(b) / rho, S(rho)};
        const S sg = a / aa;
        return {aa / rho, sg * std::conj(b) / rho, sg * rho};
    }
}

template <Scalar S>
BoundaryColumns<S>::BoundaryColumns(std::vector<BoundaryFunctional<S>> rows, ColumnScale col_scale,
                                    std::size_t col_limit)
    : rows_(std::move(rows)), scale_(std::move(col_scale)), limit_(col_limit), zeros_(rows_.size(), S(0)) {}

template <Scalar S>
const S* BoundaryColumns<S>::col(std::size_t k) {
    const std::size_t K = rows_.size();
    if (k >= limit_ || K == 0) return zeros_.data();
    std::size_t have = data_.size() / K;
    if (k >= have) {
        std::size_t want = std::max(k + 1, have + 256);
        want = std::min(want, limit_);
        const std::size_t count = want - have;
        data_.resize(want * K);
        std::vector<S> tmp(count);
        for (std::size_t i = 0; i < K; ++i) {
            rows_[i].entries(have, tmp);
            for (std::size_t t = 0; t < count; ++t) data_[(have + t) * K + i] = tmp[t];
        }
        if (scale_)
            for (std::size_t t = 0; t < count; ++t) {
                const double d = scale_(have + t);
                for (std::size_t i = 0; i < K; ++i) data_[(have + t) * K + i] *= d;
            }
    }
    return data_.data() + k * K;
}

template <Scalar S>
S FilledInMatrix<S>::entry(std::size_t j, std::size_t k) const {
    if (j >= processed) throw std::out_of_range("FilledInMatrix::entry: row not reduced");
    if (k < j) return S(0);
    if (k < j + w) return windows[j * w + (k - j)];
    const S* b = boundary->col(k);
    S v = 0;
    for (std::size_t i = 0; i < K; ++i) v += fills[j * K + i] * b[i];
    return v;
}

template <Scalar S>
AlmostBandedQR<S>::AlmostBandedQR(BandedOp<S> L, std::vector<BoundaryFunctional<S>> bcs,
                                  std::span<const S> f, QrConfig cfg)
    : L_(std::move(L)), f_(f.begin(), f.end()), cfg_(std::move(cfg)) {
    const long K = static_cast<long>(bcs.size());
    const long mL = std::max({K + L_.lower(), K - 1, 0L});
    const long mR = std::max(static_cast<long>(L_.upper()) - K, -mL);
    M_.K = bcs.size();
    M_.mL = static_cast<std::size_t>(mL);
    M_.w = static_cast<std::size_t>(mL + mR + 1);
    M_.mR = M_.w - 1 - M_.mL;  // negative upper widths are stored via w

    double sq = 0.0;
    last_nz_ = 0;
    for (std::size_t i = 0; i < bcs.size(); ++i) {
        sq += abs2(bcs[i].value());
        if (bcs[i].value() != S(0)) last_nz_ = i;
    }
    for (std::size_t i = 0; i < f_.size(); ++i) {
        sq += abs2(f_[i]);
        if (f_[i] != S(0)) last_nz_ = M_.K + i;
    }
    rhs_norm_ = std::sqrt(sq);
    tail_sq_.assign(f_.size() + 1, 0.0);
    for (std::size_t i = f_.size(); i-- > 0;) tail_sq_[i] = tail_sq_[i + 1] + abs2(f_[i]);

    M_.boundary = std::make_shared<BoundaryColumns<S>>(bcs, cfg_.col_scale, cfg_.col_limit);
    bcs_values_.reserve(bcs.size());
    for (const auto& b : bcs) bcs_values_.push_back(b.value());

    nact_ = M_.mL + 1;
    active_.assign(nact_ * M_.w, S(0));
    active_fill_.assign(nact_ * M_.K, S(0));
    active_rhs_.assign(nact_, S(0));
    for (std::size_t q = 0; q <= M_.mL && q < cfg_.row_limit; ++q) load_row(q);
}

template <Scalar S>
void AlmostBandedQR<S>::load_row(std::size_t q) {
    const std::size_t start = M_.processed;
    const std::size_t w = M_.w, K = M_.K;
    S* fill = active_fill_.data() + (q % nact_) * K;
    std::fill(fill, fill + K, S(0));
    for (std::size_t c = start; c < start + w; ++c) slot(q, c) = S(0);
    if (q < K) {
        for (std::size_t c = start; c < start + w; ++c) slot(q, c) = M_.boundary->col(c)[q];
        fill[q] = S(1);
        active_rhs_[q % nact_] = bcs_values_[q];
        return;
    }
    const auto row = L_.row(q - K);
    for (std::size_t i = 0; i < row.values.size(); ++i) {
        const std::size_t c = row.offset + i;
        if (c < start || c >= start + w || c >= cfg_.col_limit || row.values[i] == S(0)) continue;
        slot(q, c) = cfg_.col_scale ? row.values[i] * cfg_.col_scale(c) : row.values[i];
    }
    const std::size_t fi = q - K;
    active_rhs_[q % nact_] = fi < f_.size() ? f_[fi] : S(0);
}

template <Scalar S>
void AlmostBandedQR<S>::qr_reduce_column() {
    const std::size_t j = M_.processed;
    if (j >= cfg_.col_limit || j >= cfg_.row_limit)
        throw std::logic_error("qr_reduce_column: no columns left");
    const std::size_t w = M_.w, K = M_.K;
    const std::size_t last = std::min(j + M_.mL, cfg_.row_limit - 1);

    S* fj = active_fill_.data() + (j % nact_) * K;
    S& rj = active_rhs_[j % nact_];
    for (std::size_t q = j + 1; q <= last; ++q) {
        const S b = slot(q, j);
        if (b == S(0)) continue;
        const auto G = givens(slot(j, j), b);
        const S sc = conj(G.s);
        for (std::size_t c = j; c < j + w; ++c) {
            S& x = slot(j, c);
            S& y = slot(q, c);
            const S nx = G.c * x + G.s * y;
            y = -sc * x + G.c * y;
            x = nx;
        }
        slot(q, j) = S(0);
        S* fq = active_fill_.data() + (q % nact_) * K;
        for (std::size_t i = 0; i < K; ++i) {
            const S nx = G.c * fj[i] + G.s * fq[i];
            fq[i] = -sc * fj[i] + G.c * fq[i];
            fj[i] = nx;
        }
        S& rq = active_rhs_[q % nact_];
        const S nr = G.c * rj + G.s * rq;
        rq = -sc * rj + G.c * rq;
        rj = nr;
        if (cfg_.record_rotations) rotations_.push_back({j, q, G.c, G.s});
    }

    for (std::size_t c = j; c < j + w; ++c) M_.windows.push_back(slot(j, c));
    M_.fills.insert(M_.fills.end(), fj, fj + K);
    applied_.push_back(rj);
    applied_sq_ += abs2(rj);
    ++M_.processed;

    // Column j leaves the window of the remaining active rows and column
    // j + w enters it, made explicit from the fill coefficients.
    if (K > 0) {
        const S* bc = M_.boundary->col(j + w);
        for (std::size_t q = j + 1; q <= last; ++q) {
            const S* fq = active_fill_.data() + (q % nact_) * K;
            S v = 0;
            for (std::size_t i = 0; i < K; ++i) v += fq[i] * bc[i];
            slot(q, j + w) = v;
        }
    } else {
        for (std::size_t q = j + 1; q <= last; ++q) slot(q, j + w) = S(0);
    }
    const std::size_t incoming = j + 1 + M_.mL;
    if (incoming < cfg_.row_limit) load_row(incoming);
}

template <Scalar S>
double AlmostBandedQR<S>::lookahead_norm() const {
    double sq = 0.0;
    const std::size_t j = M_.processed;
    for (std::size_t q = j; q < j + M_.mL && q < cfg_.row_limit; ++q) sq += abs2(active_rhs_[q % nact_]);
    return std::sqrt(sq);
}

template <Scalar S>
double AlmostBandedQR<S>::untouched_rhs_norm() const {
    const std::size_t first = M_.processed + M_.mL;
    if (first >= cfg_.row_limit) return 0.0;
    double sq = 0.0;
    for (std::size_t q = first; q < M_.K; ++q) sq += abs2(bcs_values_[q]);
    const std::size_t fi = first > M_.K ? first - M_.K : 0;
    if (fi < f_.size()) sq += tail_sq_[fi];
    return std::sqrt(sq);
}

template <Scalar S>
double AlmostBandedQR<S>::residual_norm() const {
    return std::hypot(lookahead_norm(), untouched_rhs_norm());
}

template <Scalar S>
RotatedRhs<S> AlmostBandedQR<S>::rhs() const {
    RotatedRhs<S> r;
    r.applied = applied_;
    const std::size_t j = M_.processed;
    for (std::size_t q = j; q < j + M_.mL && q < cfg_.row_limit; ++q) r.lookahead.push_back(active_rhs_[q % nact_]);
    return r;
}

template <Scalar S>
AdaptiveResult<S> adaptive_qr(const BandedOp<S>& L, const std::vector<BoundaryFunctional<S>>& bcs,
                              std::span<const S> f, const AdaptiveOptions& opts) {
    QrConfig cfg;
    cfg.col_scale = opts.col_scale;
    AlmostBandedQR<S> qr(L, bcs, f, cfg);
    AdaptiveResult<S> res;
    const auto reduce = [&] {
        if (qr.processed() >= opts.max_n)
            throw NoConvergence("adaptive_qr: no convergence within " + std::to_string(opts.max_n) + " columns",
                                std::move(res.history));
        qr.qr_reduce_column();
        res.history.push_back(qr.residual_norm());
    };
    const std::size_t min_n = qr.last_rhs_nonzero() + qr.matrix().w + 1;
    int streak = 0;
    for (;;) {
        reduce();
        const double scale = std::max(qr.rhs_norm(), qr.applied_norm());
        if (qr.residual_norm() <= opts.tol * scale)
            ++streak;
        else
            streak = 0;
        if (streak >= opts.consecutive && qr.processed() >= min_n) break;
    }
    std::size_t n_opt = qr.processed();

    // Small residual does not yet mean small trailing coefficients when the
    // operator is badly conditioned. Keep reducing while the tail of the
    // solution still decays above coeff_tol relative to its largest entry.
    if (opts.coeff_tol > 0) {
        const auto magnitudes = [&](std::size_t n) {
            const auto r = qr.rhs();
            const auto u = back_substitute(qr.matrix(), std::span<const S>(r.applied), n);
            std::vector<double> m(n);
            for (std::size_t k = 0; k < n; ++k)
                m[k] = std::abs(u[k]) * (opts.col_scale ? opts.col_scale(k) : 1.0);
            return m;
        };
        double prev_tail = std::numeric_limits<double>::infinity();
        for (;;) {
            const std::size_t n = qr.processed();
            const auto m = magnitudes(n);
            const double top = *std::max_element(m.begin(), m.end());
            const std::size_t t = std::max<std::size_t>(2, (n + 99) / 100);
            const double tail = t >= n ? top : *std::max_element(m.end() - static_cast<std::ptrdiff_t>(t), m.end());
            if (tail <= opts.coeff_tol * top) {
                std::size_t c = n;
                while (c > 0 && m[c - 1] <= opts.coeff_tol * top) --c;
                n_opt = std::max(n_opt, c);
                break;
            }
            // Stagnating tail: a noise plateau, not missing resolution.
            if (!(tail < 0.5 * prev_tail)) break;
            prev_tail = tail;
            const std::size_t target = n + std::max(t, (n + 9) / 10);
            while (qr.processed() < target) reduce();
        }
    }
    res.n_opt = n_opt;
    res.residual = res.history[n_opt - 1];
    res.rhs = qr.rhs();
    res.R = qr.take_matrix();
    return res;
}

template <Scalar S>
std::vector<S> back_substitute(const FilledInMatrix<S>& R, std::span<const S> r, std::size_t n) {
    if (n > R.processed) throw std::invalid_argument("back_substitute: more unknowns than reduced rows");
    if (r.size() < n) throw std::invalid_argument("back_substitute: right-hand side too short");
    const std::size_t w = R.w, K = R.K;
    std::vector<S> u(n, S(0));
    std::vector<S> p(K, S(0));
    for (std::size_t k = n; k-- > 0;) {
        if (K > 0 && k + w < n) {
            const S* b = R.boundary->col(k + w);
            for (std::size_t i = 0; i < K; ++i) p[i] += b[i] * u[k + w];
        }
        const S* win = R.windows.data() + k * w;
        const S* fk = R.fills.data() + k * K;
        S sum = r[k];
        double nrm = abs2(win[0]);
        for (std::size_t s = 1; s < w; ++s) {
            nrm += abs2(win[s]);
            if (k + s < n) sum -= win[s] * u[k + s];
        }
        for (std::size_t i = 0; i < K; ++i) sum -= fk[i] * p[i];
        if (win[0] == S(0) || std::abs(win[0]) < 1e-14 * std::sqrt(nrm))
            throw SingularSystem("back_substitute: singular pivot in row " + std::to_string(k), k);
        u[k] = sum / win[0];
    }
    return u;
}

template <Scalar S>
DenseMatrix<S> assemble_dense(const BandedOp<S>& L, const std::vector<BoundaryFunctional<S>>& bcs,
                              std::size_t n) {
    const std::size_t K = bcs.size();
    if (n < K) throw std::invalid_argument("assemble_dense: fewer rows than boundary conditions");
    const auto N = static_cast<Eigen::Index>(n);
    DenseMatrix<S> A = DenseMatrix<S>::Zero(N, N);
    std::vector<S> row(n);
    for (std::size_t i = 0; i < K; ++i) {
        bcs[i].entries(0, row);
        for (std::size_t k = 0; k < n; ++k) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
    if (n > K) A.bottomRows(N - static_cast<Eigen::Index>(K)) = exact_truncate(L, n - K, n);
    return A;
}

template <Scalar S>
std::vector<S> solve_fixed_n(const BandedOp<S>& L, const std::vector<BoundaryFunctional<S>>& bcs,
                             std::span<const S> f, std::size_t n, ColumnScale col_scale) {
    if (n < bcs.size() || n == 0) throw std::invalid_argument("solve_fixed_n: n must be at least K and positive");
    QrConfig cfg;
    cfg.row_limit = n;
    cfg.col_limit = n;
    cfg.col_scale = col_scale;
    AlmostBandedQR<S> qr(L, bcs, f, cfg);
    for (std::size_t j = 0; j < n; ++j) qr.qr_reduce_column();
    const auto r = qr.rhs();
    auto u = back_substitute(qr.matrix(), std::span<const S>(r.applied), n);
    if (col_scale)
        for (std::size_t k = 0; k < n; ++k) u[k] *= col_scale(k);
    return u;
}

std::vector<double> precondition_diag(int N, std::size_t n) {
    const auto d = precondition_scale(N);
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = d(k);
    return v;
}

ColumnScale precondition_scale(int N) {
    if (N < 1) throw std::invalid_argument("precondition_diag: order must be >= 1");
    double base = std::ldexp(1.0, N - 1);
    for (int i = 2; i < N; ++i) base *= i;
    base = 1.0 / base;
    const auto NN = static_cast<std::size_t>(N);
    return [base, NN](std::size_t k) { return k < NN ? base : base / static_cast<double>(k); };
}

template <Scalar S>
double condition_number(const DenseMatrix<S>& A) {
    if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("condition_number: empty matrix");
    Eigen::BDCSVD<DenseMatrix<S>> svd(A);
    const auto& sv = svd.singularValues();
    const double mx = sv.maxCoeff();
    const double mn = sv.minCoeff();
    if (mn == 0.0 || !std::isfinite(mx / mn)) return std::numeric_limits<double>::infinity();
    return mx / mn;
}

#define ULTRASPEC_INSTANTIATE(S)                                                                      \
    template Givens<S> givens<S>(S, S);                                                               \
    template class BoundaryColumns<S>;                                                                \
    template class FilledInMatrix<S>;                                                                 \
    template class AlmostBandedQR<S>;                                                                 \
    template AdaptiveResult<S> adaptive_qr<S>(const BandedOp<S>&, const std::vector<BoundaryFunctional<S>>&, \
                                              std::span<const S>, const AdaptiveOptions&);            \
    template std::vector<S> back_substitute<S>(const FilledInMatrix<S>&, std::span<const S>, std::size_t); \
    template DenseMatrix<S> assemble_dense<S>(const BandedOp<S>&, const std::vector<BoundaryFunctional<S>>&, \
                                              std::size_t);                                           \
    template std::vector<S> solve_fixed_n<S>(const BandedOp<S>&, const std::vector<BoundaryFunctional<S>>&, \
                                             std::span<const S>, std::size_t, ColumnScale);           \
    template double condition_number<S>(const DenseMatrix<S>&);

ULTRASPEC_INSTANTIATE(double)
ULTRASPEC_INSTANTIATE(cdouble)
#undef ULTRASPEC_INSTANTIATE

}  // namespace ultraspec
