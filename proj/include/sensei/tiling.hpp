#ifndef SENSEI_TILING_HPP
#define SENSEI_TILING_HPP

#include "sensei/gat.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace sensei {

struct TilingConfig {
    Offset col_segment_width = Offset(1) << 30;
    Offset row_tile_height = 4096;
    bool reorder = false;

    void validate() const
    {
        if (col_segment_width < 1 || row_tile_height < 1)
            throw PreconditionError("tiling config: segment width and tile height must be >= 1");
    }

    friend bool operator==(const TilingConfig&, const TilingConfig&) = default;
};

inline std::string to_string(const TilingConfig& c)
{
    return "w" + std::to_string(c.col_segment_width) + "_h" + std::to_string(c.row_tile_height) + (c.reorder ? "_r" : "");
}

/// Default search grid: widths 2^10..2^18, tile heights {64, 512, 4096}, reorder on/off.
inline std::vector<TilingConfig> default_tiling_grid()
{
    std::vector<TilingConfig> grid;
    for (int lw = 10; lw <= 18; ++lw)
        for (Offset h : {64, 512, 4096})
            for (bool r : {false, true})
                grid.push_back({Offset(1) << lw, h, r});
    return grid;
}

/// Column-segmented copy of a CSR matrix. Each segment spans all rows and holds the columns
/// [col_offset, col_offset + width) with indices rebased to the segment.
template <typename Scalar = double>
struct TiledCsr {
    struct Segment {
        Offset col_offset = 0;
        CsrMatrix<Scalar> block;
    };

    Offset n_rows = 0;
    Offset n_cols = 0;
    TilingConfig config;
    std::vector<Segment> segments;

    [[nodiscard]] Offset nnz() const
    {
        Offset n = 0;
        for (const auto& s : segments)
            n += s.block.nnz();
        return n;
    }
};

template <typename Scalar>
TiledCsr<Scalar> tile(const CsrMatrix<Scalar>& a, const TilingConfig& cfg)
{
    cfg.validate();
    TiledCsr<Scalar> t;
    t.n_rows = a.rows();
    t.n_cols = a.cols();
    t.config = cfg;
    const Offset width = std::max<Offset>(1, std::min(cfg.col_segment_width, std::max<Offset>(a.cols(), 1)));
    const Offset n_seg = a.cols() == 0 ? 1 : (a.cols() + width - 1) / width;
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto v = a.values();

    // Rows are sorted by column, so each row splits into contiguous runs, one per segment.
    std::vector<Offset> cursor(rp.begin(), rp.end() - 1);
    for (Offset s = 0; s < n_seg; ++s) {
        const Offset lo = s * width;
        const Offset hi = std::min(a.cols(), lo + width);
        CsrPattern p;
        p.n_rows = a.rows();
        p.n_cols = std::max<Offset>(hi - lo, 0);
        p.row_ptr.assign(a.rows() + 1, 0);
        std::vector<Scalar> vals;
        for (Offset i = 0; i < a.rows(); ++i) {
            Offset& k = cursor[i];
            while (k < rp[i + 1] && ci[k] < hi) {
                p.col_idx.push_back(static_cast<ColIndex>(ci[k] - lo));
                vals.push_back(v[k]);
                ++k;
            }
            p.row_ptr[i + 1] = static_cast<Offset>(p.col_idx.size());
        }
        t.segments.push_back({lo, CsrMatrix<Scalar>(std::move(p), std::move(vals))});
    }
    return t;
}

namespace detail {

template <typename Scalar, bool Weighted>
void tiled_spmm_impl(const TiledCsr<Scalar>& t, const DenseMatrix<Scalar>& b, DenseMatrix<Scalar>& c)
{
    if (t.n_cols != b.rows())
        throw ShapeError("tiled_spmm: sparse " + dims(t.n_rows, t.n_cols) + " times dense " + dims(b.rows(), b.cols()));
    c.resize(t.n_rows, b.cols());
    c.setZero();
    const Offset h = t.config.row_tile_height;
    const Offset n_tiles = (t.n_rows + h - 1) / h;
    for (const auto& seg : t.segments) {
        const Offset* rp = seg.block.row_ptr().data();
        const ColIndex* ci = seg.block.col_idx().data();
        const Scalar* v = seg.block.values().data();
        const auto panel = b.middleRows(seg.col_offset, seg.block.cols());
#pragma omp parallel for schedule(dynamic, 1)
        for (Offset tile_id = 0; tile_id < n_tiles; ++tile_id) {
            const Offset end = std::min(t.n_rows, (tile_id + 1) * h);
            for (Offset i = tile_id * h; i < end; ++i)
                for (Offset k = rp[i]; k < rp[i + 1]; ++k) {
                    if constexpr (Weighted)
                        c.row(i) += v[k] * panel.row(ci[k]);
                    else
                        c.row(i) += panel.row(ci[k]);
                }
        }
    }
}

} // namespace detail

/// Segment-major, row-tiled SpMM. Each output row is owned by one tile, so accumulation is race free
/// and ordered (segment, then column) independently of the thread count.
template <typename Scalar>
DenseMatrix<Scalar> tiled_spmm(const TiledCsr<Scalar>& t, const DenseMatrix<Scalar>& b, KernelTrace* trace = nullptr)
{
    detail::trace(trace, KernelKind::TiledSpmm, t.n_rows, b.cols());
    DenseMatrix<Scalar> c;
    detail::tiled_spmm_impl<Scalar, true>(t, b, c);
    return c;
}

/// As tiled_spmm, writing into c (resized if needed) so repeated calls reuse its storage.
template <typename Scalar>
void tiled_spmm_into(const TiledCsr<Scalar>& t, const DenseMatrix<Scalar>& b, DenseMatrix<Scalar>& c, KernelTrace* trace = nullptr)
{
    detail::trace(trace, KernelKind::TiledSpmm, t.n_rows, b.cols());
    detail::tiled_spmm_impl<Scalar, true>(t, b, c);
}

template <typename Scalar>
DenseMatrix<Scalar> tiled_spmm_unweighted(const TiledCsr<Scalar>& t, const DenseMatrix<Scalar>& b, KernelTrace* trace = nullptr)
{
    detail::trace(trace, KernelKind::TiledSpmm, t.n_rows, b.cols());
    DenseMatrix<Scalar> c;
    detail::tiled_spmm_impl<Scalar, false>(t, b, c);
    return c;
}

/// new_to_old[i] is the original index of the node placed at position i.
struct Permutation {
    std::vector<Offset> new_to_old;

    [[nodiscard]] Offset size() const { return static_cast<Offset>(new_to_old.size()); }

    [[nodiscard]] std::vector<Offset> old_to_new() const
    {
        std::vector<Offset> inv(new_to_old.size());
        for (std::size_t i = 0; i < new_to_old.size(); ++i)
            inv[new_to_old[i]] = static_cast<Offset>(i);
        return inv;
    }

    [[nodiscard]] bool is_identity() const
    {
        for (std::size_t i = 0; i < new_to_old.size(); ++i)
            if (new_to_old[i] != static_cast<Offset>(i))
                return false;
        return true;
    }
};

/// P A P^T.
template <typename Scalar>
CsrMatrix<Scalar> permute_symmetric(const CsrMatrix<Scalar>& a, const Permutation& perm)
{
    if (!a.is_square() || perm.size() != a.rows())
        throw ShapeError("permute_symmetric: permutation size does not match matrix");
    const auto inv = perm.old_to_new();
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto v = a.values();
    CsrPattern p;
    p.n_rows = p.n_cols = a.rows();
    p.row_ptr.assign(a.rows() + 1, 0);
    p.col_idx.resize(a.nnz());
    std::vector<Scalar> vals(a.nnz());
    std::vector<std::pair<ColIndex, Scalar>> row;
    for (Offset i = 0; i < a.rows(); ++i) {
        const Offset src = perm.new_to_old[i];
        row.clear();
        for (Offset k = rp[src]; k < rp[src + 1]; ++k)
            row.emplace_back(static_cast<ColIndex>(inv[ci[k]]), v[k]);
        std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        const Offset base = p.row_ptr[i];
        for (std::size_t k = 0; k < row.size(); ++k) {
            p.col_idx[base + k] = row[k].first;
            vals[base + k] = row[k].second;
        }
        p.row_ptr[i + 1] = base + static_cast<Offset>(row.size());
    }
    return CsrMatrix<Scalar>(std::move(p), std::move(vals));
}

template <typename Scalar>
DenseMatrix<Scalar> permute_rows(const DenseMatrix<Scalar>& h, const Permutation& perm)
{
    if (perm.size() != h.rows())
        throw ShapeError("permute_rows: permutation size does not match rows");
    DenseMatrix<Scalar> out(h.rows(), h.cols());
    for (Offset i = 0; i < perm.size(); ++i)
        out.row(i) = h.row(perm.new_to_old[i]);
    return out;
}

template <typename Scalar>
DenseMatrix<Scalar> unpermute_rows(const DenseMatrix<Scalar>& h, const Permutation& perm)
{
    if (perm.size() != h.rows())
        throw ShapeError("unpermute_rows: permutation size does not match rows");
    DenseMatrix<Scalar> out(h.rows(), h.cols());
    for (Offset i = 0; i < perm.size(); ++i)
        out.row(perm.new_to_old[i]) = h.row(i);
    return out;
}

template <typename Scalar = double>
struct Reordered {
    CsrMatrix<Scalar> matrix;
    Permutation perm;
};

/// Relabels nodes by descending degree (stable, so equal degrees keep their relative order).
template <typename Scalar>
Reordered<Scalar> reorder_degree(const CsrMatrix<Scalar>& a)
{
    if (!a.is_square())
        throw ShapeError("reorder_degree: matrix must be square");
    Permutation perm;
    perm.new_to_old.resize(a.rows());
    std::iota(perm.new_to_old.begin(), perm.new_to_old.end(), Offset(0));
    const auto& p = a.pattern();
    std::stable_sort(perm.new_to_old.begin(), perm.new_to_old.end(),
                     [&](Offset x, Offset y) { return p.row_nnz(x) > p.row_nnz(y); });
    return {permute_symmetric(a, perm), std::move(perm)};
}

/// Graph state for the optimized execution path: optionally reordered, normalized, and tiled.
template <typename Scalar = double>
struct OptimizedGraph {
    TilingConfig config;
    std::optional<Permutation> perm;
    NormalizedGraph<Scalar> normalized; // in reordered node space
    TiledCsr<Scalar> a_tilde_tiled;
    std::optional<TiledCsr<Scalar>> n_tilde_tiled;
};

template <typename Scalar>
OptimizedGraph<Scalar> prepare_optimized(const CsrMatrix<Scalar>& adjacency, bool unweighted, const TilingConfig& cfg,
                                         bool precompute)
{
    OptimizedGraph<Scalar> og;
    og.config = cfg;
    if (cfg.reorder) {
        auto r = reorder_degree(adjacency);
        og.normalized = normalize_graph(r.matrix, unweighted, precompute);
        og.perm = std::move(r.perm);
    } else {
        og.normalized = normalize_graph(adjacency, unweighted, precompute);
    }
    og.a_tilde_tiled = tile(og.normalized.a_tilde, cfg);
    if (og.normalized.n_tilde)
        og.n_tilde_tiled = tile(*og.normalized.n_tilde, cfg);
    return og;
}

namespace detail {

template <typename Scalar, typename Body>
DenseMatrix<Scalar> in_reordered_space(const std::optional<Permutation>& perm, const DenseMatrix<Scalar>& h, Body&& body)
{
    if (!perm)
        return body(h);
    return unpermute_rows(body(permute_rows(h, *perm)), *perm);
}

} // namespace detail

/// GCN layer on the optimized path. Same algebra and ordering as gcn_layer, tiled aggregation.
template <typename Scalar>
DenseMatrix<Scalar> opt_gcn_layer(const OptimizedGraph<Scalar>& og, const DenseMatrix<Scalar>& h,
                                  const GcnLayerSpec<Scalar>& spec, KernelTrace* trace = nullptr)
{
    const auto& g = og.normalized;
    detail::check_gcn_shapes(g, h, spec);
    const bool update_first = ordering_heuristic(spec.k1(), spec.k2()) == Ordering::UpdateFirst;
    return detail::in_reordered_space(og.perm, h, [&](const DenseMatrix<Scalar>& x) {
        DenseMatrix<Scalar> out;
        if (spec.composition == GcnComposition::Precompute) {
            if (!og.n_tilde_tiled)
                throw PreconditionError("opt_gcn_layer: normalized adjacency has not been precomputed");
            out = update_first ? tiled_spmm(*og.n_tilde_tiled, gemm(x, spec.weights, trace), trace)
                               : gemm(tiled_spmm(*og.n_tilde_tiled, x, trace), spec.weights, trace);
        } else {
            auto aggregate = [&](const DenseMatrix<Scalar>& y) {
                return g.unweighted ? tiled_spmm_unweighted(og.a_tilde_tiled, y, trace) : tiled_spmm(og.a_tilde_tiled, y, trace);
            };
            const DenseMatrix<Scalar> scaled = scale_rows(g.d_inv_sqrt, x, trace);
            const DenseMatrix<Scalar> mixed =
                update_first ? aggregate(gemm(scaled, spec.weights, trace)) : gemm(aggregate(scaled), spec.weights, trace);
            out = scale_rows(g.d_inv_sqrt, mixed, trace);
        }
        apply_activation(out, spec.activation);
        return out;
    });
}

/// GAT layer on the optimized path; attention is computed on the reordered pattern and tiled per call.
template <typename Scalar>
DenseMatrix<Scalar> opt_gat_layer(const OptimizedGraph<Scalar>& og, const DenseMatrix<Scalar>& h,
                                  const GatLayerSpec<Scalar>& spec, KernelTrace* trace = nullptr)
{
    const auto& a_tilde = og.normalized.a_tilde;
    detail::check_gat_input(a_tilde, h, spec);
    return detail::in_reordered_space(og.perm, h, [&](const DenseMatrix<Scalar>& x) {
        const DenseMatrix<Scalar> hw = gemm(x, spec.weights, trace);
        const auto att = atten_calc(a_tilde, hw, spec, trace);
        const auto alpha = tile(att.alpha, og.config);
        DenseMatrix<Scalar> out = spec.composition == GatComposition::Reuse
                                      ? tiled_spmm(alpha, hw, trace)
                                      : gemm(tiled_spmm(alpha, x, trace), spec.weights, trace);
        apply_activation(out, spec.activation);
        return out;
    });
}

} // namespace sensei

#endif // SENSEI_TILING_HPP
