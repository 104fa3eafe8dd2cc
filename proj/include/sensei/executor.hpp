#ifndef SENSEI_EXECUTOR_HPP
#define SENSEI_EXECUTOR_HPP

#include "sensei/graph.hpp"
#include "sensei/records.hpp"

#include <cstdint>
#include <optional>

namespace sensei {

/// Dense operands of one layer, drawn from a seeded uniform(-0.5, 0.5).
struct LayerInputs {
    DenseMatrix<double> h;
    DenseMatrix<double> weights;
    DenseMatrix<double> attn_src;
    DenseMatrix<double> attn_dst;
};

LayerInputs make_layer_inputs(std::int64_t n, std::int64_t k1, std::int64_t k2, std::uint64_t seed);

/// Bytes a single layer forward pass is expected to hold live (dense operands plus sparse copies).
std::uint64_t estimate_layer_bytes(std::int64_t n, std::int64_t nnz, std::int64_t k1, std::int64_t k2);

/// MemAvailable from /proc/meminfo, or 0 when unknown.
std::uint64_t available_memory_bytes();

/// Sets the kernel thread count (OpenMP and Eigen). Values < 1 are ignored.
void set_threads(int threads);
int current_threads();

/// Graph state prepared for one composition on either the plain or the optimized path.
/// Preparation (self loops, degrees, the normalized matrix, reordering, tiling) is the one-time cost.
class Executor {
public:
    static Executor prepare(const Graph& graph, Composition composition, std::optional<TilingConfig> opt = std::nullopt);

    DenseMatrix<double> forward(const LayerInputs& in, Activation act = Activation::Relu, KernelTrace* trace = nullptr) const;

    /// Recomputes the normalized adjacency (for runs that do not amortize it).
    void renormalize();

    [[nodiscard]] Composition composition() const { return composition_; }
    [[nodiscard]] double prepare_seconds() const { return prepare_s_; }
    [[nodiscard]] const NormalizedGraph<double>& normalized() const;

private:
    Composition composition_ = Composition::Dynamic;
    NormalizedGraph<double> plain_;
    std::optional<OptimizedGraph<double>> optimized_;
    double prepare_s_ = 0;
};

/// Sum of all entries; a cheap fingerprint of a layer output.
double checksum(const DenseMatrix<double>& m);

} // namespace sensei

#endif // SENSEI_EXECUTOR_HPP
