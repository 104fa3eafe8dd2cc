#ifndef SENSEI_CSR_HPP
#define SENSEI_CSR_HPP

#include "sensei/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace sensei {

using Offset = std::int64_t;
using ColIndex = std::int32_t;

/// Row-major dense matrix (node embeddings, weights).
template <typename Scalar = double>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar = double>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Sparsity structure of a CSR matrix. Shared between matrices that only differ in values,
/// so masked kernels (SDDMM, attention) can return a result with a bit-identical pattern.
struct CsrPattern {
    Offset n_rows = 0;
    Offset n_cols = 0;
    std::vector<Offset> row_ptr{0};
    std::vector<ColIndex> col_idx;

    [[nodiscard]] Offset nnz() const { return static_cast<Offset>(col_idx.size()); }
    [[nodiscard]] Offset row_nnz(Offset i) const { return row_ptr[i + 1] - row_ptr[i]; }

    /// Throws PreconditionError when the CSR invariants do not hold.
    void validate() const
    {
        if (n_rows < 0 || n_cols < 0)
            throw PreconditionError("csr: negative dimension");
        if (static_cast<Offset>(row_ptr.size()) != n_rows + 1)
            throw PreconditionError("csr: row_ptr length must be n_rows + 1");
        if (row_ptr.front() != 0 || row_ptr.back() != nnz())
            throw PreconditionError("csr: row_ptr must start at 0 and end at nnz");
        for (Offset i = 0; i < n_rows; ++i) {
            if (row_ptr[i + 1] < row_ptr[i])
                throw PreconditionError("csr: row_ptr must be non-decreasing");
            for (Offset p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
                if (col_idx[p] < 0 || col_idx[p] >= n_cols)
                    throw PreconditionError("csr: column index out of range in row " + std::to_string(i));
                if (p > row_ptr[i] && col_idx[p] <= col_idx[p - 1])
                    throw PreconditionError("csr: column indices must be strictly increasing in row " + std::to_string(i));
            }
        }
    }
};

template <typename Scalar = double>
class CsrMatrix {
public:
    using scalar_type = Scalar;

    struct Triplet {
        Offset row;
        Offset col;
        Scalar value;
    };

    CsrMatrix() : pattern_(std::make_shared<CsrPattern>()) {}

    CsrMatrix(CsrPattern pattern, std::vector<Scalar> values)
        : CsrMatrix(std::make_shared<const CsrPattern>(std::move(pattern)), std::move(values))
    {
    }

    CsrMatrix(std::shared_ptr<const CsrPattern> pattern, std::vector<Scalar> values)
        : pattern_(std::move(pattern)), values_(std::move(values))
    {
        pattern_->validate();
        if (static_cast<Offset>(values_.size()) != pattern_->nnz())
            throw PreconditionError("csr: values length must equal nnz");
    }

    /// Builds a matrix from unordered coordinates; duplicates are summed.
    static CsrMatrix from_triplets(Offset n_rows, Offset n_cols, std::vector<Triplet> entries)
    {
        for (const auto& t : entries)
            if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
                throw ShapeError("csr: triplet outside matrix bounds");
        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        CsrPattern p;
        p.n_rows = n_rows;
        p.n_cols = n_cols;
        p.row_ptr.assign(n_rows + 1, 0);
        std::vector<Scalar> vals;
        p.col_idx.reserve(entries.size());
        vals.reserve(entries.size());
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const auto& t = entries[k];
            if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
                vals.back() += t.value;
                continue;
            }
            p.col_idx.push_back(static_cast<ColIndex>(t.col));
            vals.push_back(t.value);
            ++p.row_ptr[t.row + 1];
        }
        std::partial_sum(p.row_ptr.begin(), p.row_ptr.end(), p.row_ptr.begin());
        return CsrMatrix(std::move(p), std::move(vals));
    }

    static CsrMatrix identity(Offset n)
    {
        CsrPattern p;
        p.n_rows = p.n_cols = n;
        p.row_ptr.resize(n + 1);
        p.col_idx.resize(n);
        for (Offset i = 0; i < n; ++i) {
            p.row_ptr[i + 1] = i + 1;
            p.col_idx[i] = static_cast<ColIndex>(i);
        }
        return CsrMatrix(std::move(p), std::vector<Scalar>(n, Scalar(1)));
    }

    static CsrMatrix from_dense(const DenseMatrix<Scalar>& d)
    {
        std::vector<Triplet> t;
        for (Eigen::Index i = 0; i < d.rows(); ++i)
            for (Eigen::Index j = 0; j < d.cols(); ++j)
                if (d(i, j) != Scalar(0))
                    t.push_back({i, j, d(i, j)});
        return from_triplets(d.rows(), d.cols(), std::move(t));
    }

    [[nodiscard]] Offset rows() const { return pattern_->n_rows; }
    [[nodiscard]] Offset cols() const { return pattern_->n_cols; }
    [[nodiscard]] Offset nnz() const { return pattern_->nnz(); }
    [[nodiscard]] bool is_square() const { return rows() == cols(); }

    [[nodiscard]] const CsrPattern& pattern() const { return *pattern_; }
    [[nodiscard]] const std::shared_ptr<const CsrPattern>& shared_pattern() const { return pattern_; }
    [[nodiscard]] std::span<const Offset> row_ptr() const { return pattern_->row_ptr; }
    [[nodiscard]] std::span<const ColIndex> col_idx() const { return pattern_->col_idx; }
    [[nodiscard]] std::span<const Scalar> values() const { return values_; }

    /// Same pattern, new values.
    [[nodiscard]] CsrMatrix with_values(std::vector<Scalar> values) const { return CsrMatrix(pattern_, std::move(values)); }

    /// Same pattern with every value set to `v`.
    [[nodiscard]] CsrMatrix filled(Scalar v) const { return with_values(std::vector<Scalar>(values_.size(), v)); }

    [[nodiscard]] DenseMatrix<Scalar> to_dense() const
    {
        DenseMatrix<Scalar> d = DenseMatrix<Scalar>::Zero(rows(), cols());
        const auto& p = *pattern_;
        for (Offset i = 0; i < p.n_rows; ++i)
            for (Offset k = p.row_ptr[i]; k < p.row_ptr[i + 1]; ++k)
                d(i, p.col_idx[k]) = values_[k];
        return d;
    }

    /// Structural equality plus exact value equality.
    friend bool operator==(const CsrMatrix& a, const CsrMatrix& b)
    {
        return a.rows() == b.rows() && a.cols() == b.cols() && a.pattern_->row_ptr == b.pattern_->row_ptr &&
               a.pattern_->col_idx == b.pattern_->col_idx && a.values_ == b.values_;
    }

private:
    std::shared_ptr<const CsrPattern> pattern_;
    std::vector<Scalar> values_;
};

/// Diagonal of D^(-1/2) for a self-loop augmented graph.
template <typename Scalar = double>
class DegreeVector {
public:
    DegreeVector() = default;

    explicit DegreeVector(DenseVector<Scalar> values) : values_(std::move(values))
    {
        for (Eigen::Index i = 0; i < values_.size(); ++i)
            if (!(values_[i] > Scalar(0)))
                throw DegenerateInputError("degree vector entries must be strictly positive");
    }

    [[nodiscard]] Eigen::Index size() const { return values_.size(); }
    [[nodiscard]] const DenseVector<Scalar>& values() const { return values_; }
    [[nodiscard]] Scalar operator[](Eigen::Index i) const { return values_[i]; }

private:
    DenseVector<Scalar> values_;
};

} // namespace sensei

#endif // SENSEI_CSR_HPP
