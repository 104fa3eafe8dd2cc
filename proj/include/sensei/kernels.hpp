#ifndef SENSEI_KERNELS_HPP
#define SENSEI_KERNELS_HPP

#include "sensei/csr.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace sensei {

enum class KernelKind { Spmm, SpmmUnweighted, Sddmm, Gemm, ScaleRows, TiledSpmm };

/// One recorded kernel launch: the sparse/dense output rows and the width of the dense operand.
struct KernelEvent {
    KernelKind kind;
    Eigen::Index rows;
    Eigen::Index width;
};

/// Optional launch log used by tests and the profiler to audit which kernels a composition ran.
/// Not thread-safe; pass one trace per invocation.
struct KernelTrace {
    std::vector<KernelEvent> events;

    void record(KernelKind kind, Eigen::Index rows, Eigen::Index width) { events.push_back({kind, rows, width}); }

    [[nodiscard]] std::size_t count(KernelKind kind) const
    {
        std::size_t n = 0;
        for (const auto& e : events)
            n += e.kind == kind ? 1 : 0;
        return n;
    }
};

inline const char* to_string(KernelKind k)
{
    switch (k) {
    case KernelKind::Spmm: return "spmm";
    case KernelKind::SpmmUnweighted: return "spmm_unweighted";
    case KernelKind::Sddmm: return "sddmm";
    case KernelKind::Gemm: return "gemm";
    case KernelKind::ScaleRows: return "scale_rows";
    case KernelKind::TiledSpmm: return "tiled_spmm";
    }
    return "?";
}

namespace detail {

inline void trace(KernelTrace* t, KernelKind kind, Eigen::Index rows, Eigen::Index width)
{
    if (t != nullptr)
        t->record(kind, rows, width);
}

inline std::string dims(Eigen::Index r, Eigen::Index c) { return std::to_string(r) + "x" + std::to_string(c); }

} // namespace detail

/// Pattern-only aggregation: C[i,:] = sum over stored j of B[j,:]. Never touches edge values.
template <typename Scalar>
DenseMatrix<Scalar> spmm_pattern(const CsrPattern& a, const DenseMatrix<Scalar>& b)
{
    if (a.n_cols != b.rows())
        throw ShapeError("spmm: sparse " + detail::dims(a.n_rows, a.n_cols) + " times dense " + detail::dims(b.rows(), b.cols()));
    DenseMatrix<Scalar> c = DenseMatrix<Scalar>::Zero(a.n_rows, b.cols());
    const Offset* rp = a.row_ptr.data();
    const ColIndex* ci = a.col_idx.data();
#pragma omp parallel for schedule(dynamic, 256)
    for (Offset i = 0; i < a.n_rows; ++i)
        for (Offset k = rp[i]; k < rp[i + 1]; ++k)
            c.row(i) += b.row(ci[k]);
    return c;
}

/// C = A * B for CSR A. Row-wise sums in ascending column order.
template <typename Scalar>
DenseMatrix<Scalar> spmm(const CsrMatrix<Scalar>& a, const DenseMatrix<Scalar>& b, KernelTrace* trace = nullptr)
{
    if (a.cols() != b.rows())
        throw ShapeError("spmm: sparse " + detail::dims(a.rows(), a.cols()) + " times dense " + detail::dims(b.rows(), b.cols()));
    detail::trace(trace, KernelKind::Spmm, a.rows(), b.cols());
    DenseMatrix<Scalar> c = DenseMatrix<Scalar>::Zero(a.rows(), b.cols());
    const Offset* rp = a.row_ptr().data();
    const ColIndex* ci = a.col_idx().data();
    const Scalar* v = a.values().data();
#pragma omp parallel for schedule(dynamic, 256)
    for (Offset i = 0; i < a.rows(); ++i)
        for (Offset k = rp[i]; k < rp[i + 1]; ++k)
            c.row(i) += v[k] * b.row(ci[k]);
    return c;
}

/// A * B assuming every stored value of A is 1. Only the pattern of `a` is passed on.
template <typename Scalar>
DenseMatrix<Scalar> spmm_unweighted(const CsrMatrix<Scalar>& a, const DenseMatrix<Scalar>& b, KernelTrace* trace = nullptr)
{
    detail::trace(trace, KernelKind::SpmmUnweighted, a.rows(), b.cols());
    return spmm_pattern<Scalar>(a.pattern(), b);
}

/// Sampled dense-dense product: D[i,j] = A[i,j] * dot(B[i,:], C[j,:]) on the stored entries of A.
/// The result shares A's pattern object.
template <typename Scalar>
CsrMatrix<Scalar> sddmm(const CsrMatrix<Scalar>& a, const DenseMatrix<Scalar>& b, const DenseMatrix<Scalar>& c,
                        KernelTrace* trace = nullptr)
{
    if (b.rows() != a.rows() || c.rows() != a.cols() || b.cols() != c.cols())
        throw ShapeError("sddmm: mask " + detail::dims(a.rows(), a.cols()) + " with " + detail::dims(b.rows(), b.cols()) +
                         " and " + detail::dims(c.rows(), c.cols()));
    detail::trace(trace, KernelKind::Sddmm, a.rows(), b.cols());
    std::vector<Scalar> out(static_cast<std::size_t>(a.nnz()));
    const Offset* rp = a.row_ptr().data();
    const ColIndex* ci = a.col_idx().data();
    const Scalar* v = a.values().data();
#pragma omp parallel for schedule(dynamic, 256)
    for (Offset i = 0; i < a.rows(); ++i)
        for (Offset k = rp[i]; k < rp[i + 1]; ++k)
            out[k] = v[k] * b.row(i).dot(c.row(ci[k]));
    return a.with_values(std::move(out));
}

template <typename Scalar>
DenseMatrix<Scalar> gemm(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& b, KernelTrace* trace = nullptr)
{
    if (a.cols() != b.rows())
        throw ShapeError("gemm: " + detail::dims(a.rows(), a.cols()) + " times " + detail::dims(b.rows(), b.cols()));
    detail::trace(trace, KernelKind::Gemm, a.rows(), b.cols());
    DenseMatrix<Scalar> c(a.rows(), b.cols());
    c.noalias() = a * b;
    return c;
}

/// diag(d) * B without materializing the diagonal.
template <typename Scalar>
DenseMatrix<Scalar> scale_rows(const DegreeVector<Scalar>& d, const DenseMatrix<Scalar>& b, KernelTrace* trace = nullptr)
{
    if (d.size() != b.rows())
        throw ShapeError("scale_rows: " + std::to_string(d.size()) + " scales for " + std::to_string(b.rows()) + " rows");
    detail::trace(trace, KernelKind::ScaleRows, b.rows(), b.cols());
    DenseMatrix<Scalar> c(b.rows(), b.cols());
    c.noalias() = d.values().asDiagonal() * b;
    return c;
}

/// Inserts unit diagonal entries where absent; existing diagonal entries are kept as is.
template <typename Scalar>
CsrMatrix<Scalar> add_self_loops(const CsrMatrix<Scalar>& a)
{
    if (!a.is_square())
        throw ShapeError("add_self_loops: matrix is " + detail::dims(a.rows(), a.cols()));
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto v = a.values();
    CsrPattern p;
    p.n_rows = p.n_cols = a.rows();
    p.row_ptr.assign(a.rows() + 1, 0);
    p.col_idx.reserve(a.nnz() + a.rows());
    std::vector<Scalar> vals;
    vals.reserve(p.col_idx.capacity());
    for (Offset i = 0; i < a.rows(); ++i) {
        bool placed = false;
        for (Offset k = rp[i]; k < rp[i + 1]; ++k) {
            if (!placed && ci[k] >= i) {
                if (ci[k] > i) {
                    p.col_idx.push_back(static_cast<ColIndex>(i));
                    vals.push_back(Scalar(1));
                }
                placed = true;
            }
            p.col_idx.push_back(ci[k]);
            vals.push_back(v[k]);
        }
        if (!placed) {
            p.col_idx.push_back(static_cast<ColIndex>(i));
            vals.push_back(Scalar(1));
        }
        p.row_ptr[i + 1] = static_cast<Offset>(p.col_idx.size());
    }
    return CsrMatrix<Scalar>(std::move(p), std::move(vals));
}

/// Structural degree of each row raised to -1/2.
template <typename Scalar>
DegreeVector<Scalar> inv_sqrt_degrees(const CsrMatrix<Scalar>& a)
{
    DenseVector<Scalar> d(a.rows());
    for (Offset i = 0; i < a.rows(); ++i) {
        const Offset deg = a.pattern().row_nnz(i);
        if (deg == 0)
            throw DegenerateInputError("inv_sqrt_degrees: row " + std::to_string(i) + " has no entries");
        d[i] = Scalar(1) / std::sqrt(static_cast<Scalar>(deg));
    }
    return DegreeVector<Scalar>(std::move(d));
}

} // namespace sensei

#endif // SENSEI_KERNELS_HPP
