#ifndef SENSEI_GCN_HPP
#define SENSEI_GCN_HPP

#include "sensei/kernels.hpp"

#include <optional>
#include <string>

namespace sensei {

enum class Activation { Relu, None };

enum class GcnComposition { Precompute, Dynamic };

/// Which phase of a layer runs first. The sparse aggregation is placed at the smaller width.
enum class Ordering { AggregateFirst, UpdateFirst };

inline const char* to_string(GcnComposition c) { return c == GcnComposition::Precompute ? "precompute" : "dynamic"; }
inline const char* to_string(Ordering o) { return o == Ordering::AggregateFirst ? "aggregate_first" : "update_first"; }
inline const char* to_string(Activation a) { return a == Activation::Relu ? "relu" : "none"; }

template <typename Scalar>
void apply_activation(DenseMatrix<Scalar>& m, Activation act)
{
    if (act == Activation::Relu)
        m = m.cwiseMax(Scalar(0));
}

/// Update-first iff the output is strictly narrower than the input; ties aggregate at k1.
inline Ordering ordering_heuristic(Eigen::Index k1, Eigen::Index k2)
{
    if (k1 < 1 || k2 < 1)
        throw PreconditionError("ordering_heuristic: embedding sizes must be >= 1");
    return k2 < k1 ? Ordering::UpdateFirst : Ordering::AggregateFirst;
}

template <typename Scalar = double>
struct GcnLayerSpec {
    DenseMatrix<Scalar> weights; // k1 x k2
    GcnComposition composition = GcnComposition::Dynamic;
    Activation activation = Activation::Relu;

    [[nodiscard]] Eigen::Index k1() const { return weights.rows(); }
    [[nodiscard]] Eigen::Index k2() const { return weights.cols(); }
};

/// Self-loop augmented adjacency plus its normalization state.
template <typename Scalar = double>
struct NormalizedGraph {
    CsrMatrix<Scalar> a_tilde;
    DegreeVector<Scalar> d_inv_sqrt;
    std::optional<CsrMatrix<Scalar>> n_tilde;
    bool unweighted = true;

    [[nodiscard]] Offset nodes() const { return a_tilde.rows(); }
};

/// N = D^(-1/2) A D^(-1/2) as an SDDMM over A with both dense operands equal to the degree column.
template <typename Scalar>
CsrMatrix<Scalar> precompute_normalized(const NormalizedGraph<Scalar>& g, KernelTrace* trace = nullptr)
{
    if (g.d_inv_sqrt.size() != g.a_tilde.rows() || !g.a_tilde.is_square())
        throw ShapeError("precompute_normalized: degree vector does not match the adjacency");
    const DenseMatrix<Scalar> d = g.d_inv_sqrt.values();
    return sddmm(g.a_tilde, d, d, trace);
}

/// Augments `adjacency` with self loops and computes the degree scaling. With `precompute`,
/// also folds the normalization into N (one-time cost, independent of any layer).
template <typename Scalar>
NormalizedGraph<Scalar> normalize_graph(const CsrMatrix<Scalar>& adjacency, bool unweighted, bool precompute)
{
    NormalizedGraph<Scalar> g;
    g.a_tilde = add_self_loops(adjacency);
    g.d_inv_sqrt = inv_sqrt_degrees(g.a_tilde);
    g.unweighted = unweighted;
    if (precompute)
        g.n_tilde = precompute_normalized(g);
    return g;
}

namespace detail {

template <typename Scalar>
void check_gcn_shapes(const NormalizedGraph<Scalar>& g, const DenseMatrix<Scalar>& h, const GcnLayerSpec<Scalar>& spec)
{
    if (spec.k1() < 1 || spec.k2() < 1)
        throw ShapeError("gcn: weights must be at least 1x1");
    if (h.rows() != g.nodes() || h.cols() != spec.k1())
        throw ShapeError("gcn: embeddings " + dims(h.rows(), h.cols()) + " do not match graph of " +
                         std::to_string(g.nodes()) + " nodes and k1=" + std::to_string(spec.k1()));
}

} // namespace detail

/// sigma(N * H * W) using the precomputed normalized adjacency.
template <typename Scalar>
DenseMatrix<Scalar> gcn_layer_precompute(const NormalizedGraph<Scalar>& g, const DenseMatrix<Scalar>& h,
                                         const GcnLayerSpec<Scalar>& spec, KernelTrace* trace = nullptr)
{
    if (!g.n_tilde)
        throw PreconditionError("gcn_layer_precompute: normalized adjacency has not been precomputed");
    detail::check_gcn_shapes(g, h, spec);
    DenseMatrix<Scalar> out;
    if (ordering_heuristic(spec.k1(), spec.k2()) == Ordering::UpdateFirst)
        out = spmm(*g.n_tilde, gemm(h, spec.weights, trace), trace);
    else
        out = gemm(spmm(*g.n_tilde, h, trace), spec.weights, trace);
    apply_activation(out, spec.activation);
    return out;
}

/// sigma(D^(-1/2) (A (D^(-1/2) H) W)). On unweighted graphs the aggregation never reads edge values.
template <typename Scalar>
DenseMatrix<Scalar> gcn_layer_dynamic(const NormalizedGraph<Scalar>& g, const DenseMatrix<Scalar>& h,
                                      const GcnLayerSpec<Scalar>& spec, KernelTrace* trace = nullptr)
{
    detail::check_gcn_shapes(g, h, spec);
    auto aggregate = [&](const DenseMatrix<Scalar>& x) {
        return g.unweighted ? spmm_unweighted(g.a_tilde, x, trace) : spmm(g.a_tilde, x, trace);
    };
    const DenseMatrix<Scalar> scaled = scale_rows(g.d_inv_sqrt, h, trace);
    DenseMatrix<Scalar> mixed;
    if (ordering_heuristic(spec.k1(), spec.k2()) == Ordering::UpdateFirst)
        mixed = aggregate(gemm(scaled, spec.weights, trace));
    else
        mixed = gemm(aggregate(scaled), spec.weights, trace);
    DenseMatrix<Scalar> out = scale_rows(g.d_inv_sqrt, mixed, trace);
    apply_activation(out, spec.activation);
    return out;
}

template <typename Scalar>
DenseMatrix<Scalar> gcn_layer(const NormalizedGraph<Scalar>& g, const DenseMatrix<Scalar>& h, const GcnLayerSpec<Scalar>& spec,
                              KernelTrace* trace = nullptr)
{
    return spec.composition == GcnComposition::Precompute ? gcn_layer_precompute(g, h, spec, trace)
                                                          : gcn_layer_dynamic(g, h, spec, trace);
}

} // namespace sensei

#endif // SENSEI_GCN_HPP
