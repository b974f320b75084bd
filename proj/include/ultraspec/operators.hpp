#pragma once

// Lazily evaluated banded operators on coefficient sequences: differentiation
// D_lambda (T -> C^(lambda)), conversion S_lambda (C^(lambda) -> C^(lambda+1)),
// multiplication in the T and C^(lambda) bases, and their sums, scalings and
// compositions. Every row of every operator is produced exactly, so any
// finite section of a composition equals the section of the infinite product.

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ultraspec/cheb.hpp"
#include "ultraspec/scalar.hpp"

namespace ultraspec {

/// Row segment: values[i] sits in column offset + i; everything else is 0.
template <Scalar S>
struct SparseRow {
    std::size_t offset = 0;
    std::vector<S> values;

    std::size_t end() const { return offset + values.size(); }
    S at(std::size_t col) const {
        return col >= offset && col < end() ? values[col - offset] : S(0);
    }
};

template <Scalar S>
class BandedOp {
public:
    struct Node;

    /// Entries (j,k) vanish unless -lower() <= k - j <= upper(). Either bound
    /// may be negative, e.g. D_2 has lower() == -2 and upper() == 2.
    int lower() const;
    int upper() const;

    S entry(std::size_t j, std::size_t k) const;

    /// Exact row j over columns [max(0, j - lower()), j + upper()].
    SparseRow<S> row(std::size_t j) const;

    /// acc += alpha * row(j). acc must already cover the band of row j
    /// (columns outside acc are dropped).
    void add_row_to(std::size_t j, S alpha, SparseRow<S>& acc) const;

    /// Human-readable structure, e.g. "(S1*S0*M0[2])".
    std::string describe() const;

    /// Composition: (A*B)u = A(Bu).
    BandedOp operator*(const BandedOp& rhs) const;
    BandedOp operator+(const BandedOp& rhs) const;
    BandedOp scaled(S alpha) const;

    explicit BandedOp(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

private:
    std::shared_ptr<const Node> node_;
};

/// D_lambda: maps T coefficients to C^(lambda) coefficients of the
/// lambda-th derivative. Entry (j, j+lambda) = 2^(lambda-1) (lambda-1)! (j+lambda).
template <Scalar S>
BandedOp<S> diff_op(int lambda);

/// S_lambda: C^(lambda) -> C^(lambda+1) for lambda >= 1, T -> C^(1) for 0.
template <Scalar S>
BandedOp<S> conv_op(int lambda);

/// Identity on any basis.
template <Scalar S>
BandedOp<S> identity_op();

/// Multiplication by a T series acting on T coefficients (Toeplitz plus
/// Hankel).
template <Scalar S>
BandedOp<S> mult_op_cheb(const Series<S>& a);

/// Multiplication by a C^(lambda) series acting on C^(lambda) coefficients,
/// lambda = a.basis() >= 1.
template <Scalar S>
BandedOp<S> mult_op_ultra(const Series<S>& a);

/// Linearization coefficient c_s^lambda(j,k) of C_j C_k = sum_s c_s C_{j+k-2s},
/// from the balanced product of O(1) fractions (no Pochhammer symbol is
/// formed). Cost O(min(j,k)).
double carlitz_c(int lambda, std::size_t s, std::size_t j, std::size_t k);

/// Same value as carlitz_c. For integer lambda each balanced product
/// telescopes to lambda - 1 or lambda factors, so the cost is O(lambda).
double carlitz_c_short(int lambda, std::size_t s, std::size_t j, std::size_t k);

/// c_{s+1}^lambda(j, k+2) from c = c_s^lambda(j, k).
double carlitz_step(double c, int lambda, std::size_t s, std::size_t j, std::size_t k);

/// Converts T coefficients to C^(lambda) by applying S_{lambda-1} ... S_0.
/// The output has the input's length (the conversions are upper triangular).
template <Scalar S>
Series<S> to_ultra(const Series<S>& a, int lambda);

/// The order-N operator
///   M_N[a^N] D_N + sum_{l=1}^{N-1} S_{N-1}..S_l M_l[a^l] D_l + S_{N-1}..S_0 M_0[a^0]
/// from T-basis coefficient series a^0..a^N. Length-1 coefficients become
/// scalar multiples; zero coefficients drop their term.
/// Throws SingularEquation if a^N vanishes at one of 100 Chebyshev points
/// (below 1e-12 of its largest sample) or, for real a^N, changes sign
/// between two of them.
template <Scalar S>
BandedOp<S> assemble_L(std::span<const Series<S>> coeffs, int order);

template <Scalar S>
using DenseMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

/// P_rows op P_cols^T with every entry equal to the infinite operator's entry.
template <Scalar S>
DenseMatrix<S> exact_truncate(const BandedOp<S>& op, std::size_t rows, std::size_t cols);

template <Scalar S>
SparseRow<S> op_row(const BandedOp<S>& op, std::size_t j) {
    return op.row(j);
}

/// y = op * x for a finite x, exact over the first n outputs.
template <Scalar S>
std::vector<S> apply(const BandedOp<S>& op, std::span<const S> x, std::size_t n);

}  // namespace ultraspec
