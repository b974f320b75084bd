#pragma once

// QR factorization of almost banded systems
//
//     [ B ]       [ c ]
//     [ L ] u  =  [ f ]
//
// where B holds K dense functional rows and L is banded, by Givens rotations.
// Reduced rows are kept in filled-in form: a window of w = mL + mR + 1
// entries starting on the diagonal plus K coefficients b_k, so that
// R(k, l) = b_k . B(:, l) for every column l past the window.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "ultraspec/boundary.hpp"
#include "ultraspec/operators.hpp"
#include "ultraspec/scalar.hpp"

namespace ultraspec {

/// Column scaling k -> d_k; empty means none.
using ColumnScale = std::function<double(std::size_t)>;

template <Scalar S>
struct Givens {
    double c;
    S s;
    S r;
};

/// c a + s b = r and -conj(s) a + c b = 0 with c real, c^2 + |s|^2 = 1.
/// Real input gives r >= 0; complex input gives c >= 0 and r = sign(a) |(a, b)|.
/// (0, 0) gives the identity rotation.
template <Scalar S>
Givens<S> givens(S a, S b);

/// Columns of the boundary rows, generated in blocks and optionally scaled
/// column by column.
template <Scalar S>
class BoundaryColumns {
public:
    BoundaryColumns(std::vector<BoundaryFunctional<S>> rows, ColumnScale col_scale,
                    std::size_t col_limit);

    std::size_t K() const { return rows_.size(); }
    /// Pointer to K values B(0..K-1, k); zeros past the column limit.
    const S* col(std::size_t k);

private:
    std::vector<BoundaryFunctional<S>> rows_;
    ColumnScale scale_;
    std::size_t limit_;
    std::vector<S> data_;  // column-major, K per column
    std::vector<S> zeros_;
};

template <Scalar S>
class FilledInMatrix {
public:
    std::size_t K = 0, mL = 0, mR = 0, w = 1;
    /// Reduced rows; row k's window starts at column k.
    std::size_t processed = 0;
    std::vector<S> windows;  // processed * w
    std::vector<S> fills;    // processed * K
    std::shared_ptr<BoundaryColumns<S>> boundary;

    /// R(j, k) for j < processed, reconstructed from window, fill and the
    /// boundary columns.
    S entry(std::size_t j, std::size_t k) const;
    std::span<const S> window(std::size_t j) const { return {windows.data() + j * w, w}; }
    std::span<const S> fill(std::size_t j) const { return {fills.data() + j * K, K}; }
};

template <Scalar S>
struct RotatedRhs {
    std::vector<S> applied;    // r_0 .. r_{j-1}
    std::vector<S> lookahead;  // r_j .. r_{j+mL-1}, the pending entries
};

template <Scalar S>
struct Rotation {
    std::size_t row_a, row_b;
    double c;
    S s;
};

struct QrConfig {
    /// Rows and columns past these limits do not exist (square truncation).
    std::size_t row_limit = std::numeric_limits<std::size_t>::max();
    std::size_t col_limit = std::numeric_limits<std::size_t>::max();
    /// The factorization is of A diag(d).
    ColumnScale col_scale;
    bool record_rotations = false;
};

/// Column-by-column QR of the bordered system with lazily generated rows.
template <Scalar S>
class AlmostBandedQR {
public:
    AlmostBandedQR(BandedOp<S> L, std::vector<BoundaryFunctional<S>> bcs, std::span<const S> f,
                   QrConfig cfg = {});

    /// Eliminates the subdiagonal part of the next column, finalizes its row
    /// and brings in the next operator row.
    void qr_reduce_column();

    std::size_t processed() const { return M_.processed; }
    double lookahead_norm() const;
    /// Norm of the right-hand side entries of rows not yet touched by any
    /// rotation (rows processed() + mL onwards).
    double untouched_rhs_norm() const;
    /// Exact residual norm |A [u; 0] - b| of the solution truncated to
    /// processed() columns: lookahead and untouched entries together.
    double residual_norm() const;
    /// Index of the last nonzero entry of the system right-hand side [c; f].
    std::size_t last_rhs_nonzero() const { return last_nz_; }
    double rhs_norm() const { return rhs_norm_; }
    double applied_norm() const { return std::sqrt(applied_sq_); }

    const FilledInMatrix<S>& matrix() const { return M_; }
    RotatedRhs<S> rhs() const;
    /// Moves the reduced rows out; the object is spent afterwards.
    FilledInMatrix<S> take_matrix() { return std::move(M_); }
    const std::vector<Rotation<S>>& rotations() const { return rotations_; }

private:
    void load_row(std::size_t q);
    S& slot(std::size_t q, std::size_t col) { return active_[(q % nact_) * M_.w + col % M_.w]; }

    BandedOp<S> L_;
    std::vector<S> f_;
    std::vector<S> bcs_values_;
    QrConfig cfg_;
    FilledInMatrix<S> M_;
    std::vector<S> applied_;
    std::size_t nact_;           // mL + 1 ring slots
    std::vector<S> active_;      // nact_ * w, column-indexed modulo w
    std::vector<S> active_fill_; // nact_ * K
    std::vector<S> active_rhs_;  // nact_
    std::size_t last_nz_ = 0;
    std::vector<double> tail_sq_;  // tail_sq_[i] = sum_{i' >= i} |f_i'|^2
    double rhs_norm_ = 0.0;
    double applied_sq_ = 0.0;
    std::vector<Rotation<S>> rotations_;
};

struct AdaptiveOptions {
    double tol = 1e-14;
    std::size_t max_n = std::size_t{1} << 21;
    /// Consecutive columns that must satisfy the tolerance.
    int consecutive = 3;
    /// Relative size below which trailing solution coefficients count as
    /// resolved; 0 stops on the residual alone.
    double coeff_tol = 2.220446049250313e-16;
    ColumnScale col_scale;
};

template <Scalar S>
struct AdaptiveResult {
    FilledInMatrix<S> R;
    RotatedRhs<S> rhs;
    std::size_t n_opt = 0;
    /// Residual norm after each column.
    std::vector<double> history;
    /// Residual norm at n_opt; equals |lookahead| once the rhs is exhausted.
    double residual = 0.0;
};

/// Reduces columns until the exact residual of the truncated solution (the
/// lookahead together with any rhs entries not yet reached) is below
/// tol * max(|rhs|, |applied|) for opts.consecutive columns in a row, and at
/// least last_rhs_nonzero() + w + 1 columns are in. Then, if coeff_tol > 0,
/// keeps reducing in 10% steps until the trailing 1% of the solution
/// coefficients fall below coeff_tol times the largest one; n_opt is the
/// larger of the residual stop and the last coefficient above that level.
/// A tail that stops decaying ends the second phase early. Throws
/// NoConvergence past opts.max_n.
template <Scalar S>
AdaptiveResult<S> adaptive_qr(const BandedOp<S>& L, const std::vector<BoundaryFunctional<S>>& bcs,
                              std::span<const S> f, const AdaptiveOptions& opts = {});

/// Solves the leading n x n block of R against r_0..r_{n-1}. Throws
/// SingularSystem on a pivot below 1e-14 times its row norm.
template <Scalar S>
std::vector<S> back_substitute(const FilledInMatrix<S>& R, std::span<const S> r, std::size_t n);

/// Square truncation: K boundary rows on top of rows 0..n-K-1 of L, all
/// restricted to n columns.
template <Scalar S>
DenseMatrix<S> assemble_dense(const BandedOp<S>& L, const std::vector<BoundaryFunctional<S>>& bcs,
                              std::size_t n);

/// Solves the n x n square truncation. With col_scale the system is solved
/// as A diag(d) q = b and d q is returned.
template <Scalar S>
std::vector<S> solve_fixed_n(const BandedOp<S>& L, const std::vector<BoundaryFunctional<S>>& bcs,
                             std::span<const S> f, std::size_t n,
                             ColumnScale col_scale = {});

/// Diagonal preconditioner 1/(2^(N-1) (N-1)!) (1 [N times], 1/N, 1/(N+1), ...).
std::vector<double> precondition_diag(int N, std::size_t n);

/// The same diagonal as a column scaling of unbounded length.
ColumnScale precondition_scale(int N);

/// Ratio of extreme singular values; +inf when singular.
template <Scalar S>
double condition_number(const DenseMatrix<S>& A);

}  // namespace ultraspec
