#ifndef SENSEI_GAT_HPP
#define SENSEI_GAT_HPP

#include "sensei/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sensei {

enum class GatComposition { Reuse, Recompute };

inline const char* to_string(GatComposition c) { return c == GatComposition::Reuse ? "reuse" : "recompute"; }

/// Single-headed GAT layer. The attention vector is split into the halves applied to the
/// destination-row node (attn_src) and the neighbour (attn_dst).
template <typename Scalar = double>
struct GatLayerSpec {
    DenseMatrix<Scalar> weights;  // k1 x k2
    DenseMatrix<Scalar> attn_src; // k2 x 1
    DenseMatrix<Scalar> attn_dst; // k2 x 1
    Scalar leaky_slope = Scalar(0.2);
    GatComposition composition = GatComposition::Reuse;
    Activation activation = Activation::Relu;

    [[nodiscard]] Eigen::Index k1() const { return weights.rows(); }
    [[nodiscard]] Eigen::Index k2() const { return weights.cols(); }
};

/// Post-softmax edge scores; pattern identical to the adjacency it was computed on.
template <typename Scalar = double>
struct AttentionMatrix {
    CsrMatrix<Scalar> alpha;
};

namespace detail {

template <typename Scalar>
void check_gat_spec(const GatLayerSpec<Scalar>& spec)
{
    if (spec.k1() < 1 || spec.k2() < 1)
        throw ShapeError("gat: weights must be at least 1x1");
    if (spec.attn_src.rows() != spec.k2() || spec.attn_src.cols() != 1 || spec.attn_dst.rows() != spec.k2() ||
        spec.attn_dst.cols() != 1)
        throw ShapeError("gat: attention vectors must be k2 x 1");
    if (!(spec.leaky_slope > Scalar(0) && spec.leaky_slope < Scalar(1)))
        throw PreconditionError("gat: leaky slope must lie in (0,1)");
}

template <typename Scalar>
void check_gat_input(const CsrMatrix<Scalar>& a_tilde, const DenseMatrix<Scalar>& h, const GatLayerSpec<Scalar>& spec)
{
    check_gat_spec(spec);
    if (!a_tilde.is_square())
        throw ShapeError("gat: adjacency must be square");
    if (h.rows() != a_tilde.rows() || h.cols() != spec.k1())
        throw ShapeError("gat: embeddings " + dims(h.rows(), h.cols()) + " do not match graph of " +
                         std::to_string(a_tilde.rows()) + " nodes and k1=" + std::to_string(spec.k1()));
}

} // namespace detail

/// Masked attention: e[i,j] = LeakyReLU(s_i + t_j) on the stored entries of `a_tilde`, followed by a
/// max-shifted softmax over each row. The logits come from an SDDMM with operands [s 1] and [1 t].
template <typename Scalar>
AttentionMatrix<Scalar> atten_calc(const CsrMatrix<Scalar>& a_tilde, const DenseMatrix<Scalar>& hw,
                                   const GatLayerSpec<Scalar>& spec, KernelTrace* trace = nullptr)
{
    detail::check_gat_spec(spec);
    if (hw.rows() != a_tilde.rows() || hw.cols() != spec.k2() || !a_tilde.is_square())
        throw ShapeError("atten_calc: updated embeddings " + detail::dims(hw.rows(), hw.cols()) + " do not match");
    const Eigen::Index n = hw.rows();
    DenseMatrix<Scalar> left(n, 2), right(n, 2);
    left.col(0) = hw * spec.attn_src;
    left.col(1).setOnes();
    right.col(0).setOnes();
    right.col(1) = hw * spec.attn_dst;

    CsrMatrix<Scalar> logits = sddmm(a_tilde.filled(Scalar(1)), left, right, trace);
    std::vector<Scalar> e(logits.values().begin(), logits.values().end());
    const auto rp = logits.row_ptr();
    const Scalar slope = spec.leaky_slope;
#pragma omp parallel for schedule(dynamic, 256)
    for (Offset i = 0; i < logits.rows(); ++i) {
        const Offset lo = rp[i], hi = rp[i + 1];
        if (lo == hi)
            continue;
        Scalar row_max = -std::numeric_limits<Scalar>::infinity();
        for (Offset k = lo; k < hi; ++k) {
            e[k] = e[k] > Scalar(0) ? e[k] : slope * e[k];
            row_max = std::max(row_max, e[k]);
        }
        Scalar sum = 0;
        for (Offset k = lo; k < hi; ++k) {
            e[k] = std::exp(e[k] - row_max);
            sum += e[k];
        }
        for (Offset k = lo; k < hi; ++k)
            e[k] /= sum;
    }
    return {logits.with_values(std::move(e))};
}

/// sigma(alpha * (H W)): aggregation at width k2 on the embeddings already used for attention.
template <typename Scalar>
DenseMatrix<Scalar> gat_layer_reuse(const CsrMatrix<Scalar>& a_tilde, const DenseMatrix<Scalar>& h,
                                    const GatLayerSpec<Scalar>& spec, KernelTrace* trace = nullptr)
{
    detail::check_gat_input(a_tilde, h, spec);
    const DenseMatrix<Scalar> hw = gemm(h, spec.weights, trace);
    const auto att = atten_calc(a_tilde, hw, spec, trace);
    DenseMatrix<Scalar> out = spmm(att.alpha, hw, trace);
    apply_activation(out, spec.activation);
    return out;
}

/// sigma((alpha * H) W): aggregation at width k1, then a second update GEMM.
template <typename Scalar>
DenseMatrix<Scalar> gat_layer_recompute(const CsrMatrix<Scalar>& a_tilde, const DenseMatrix<Scalar>& h,
                                        const GatLayerSpec<Scalar>& spec, KernelTrace* trace = nullptr)
{
    detail::check_gat_input(a_tilde, h, spec);
    const auto att = atten_calc(a_tilde, gemm(h, spec.weights, trace), spec, trace);
    DenseMatrix<Scalar> out = gemm(spmm(att.alpha, h, trace), spec.weights, trace);
    apply_activation(out, spec.activation);
    return out;
}

template <typename Scalar>
DenseMatrix<Scalar> gat_layer(const CsrMatrix<Scalar>& a_tilde, const DenseMatrix<Scalar>& h, const GatLayerSpec<Scalar>& spec,
                              KernelTrace* trace = nullptr)
{
    return spec.composition == GatComposition::Reuse ? gat_layer_reuse(a_tilde, h, spec, trace)
                                                     : gat_layer_recompute(a_tilde, h, spec, trace);
}

} // namespace sensei

#endif // SENSEI_GAT_HPP
