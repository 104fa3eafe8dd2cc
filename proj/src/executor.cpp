#include "sensei/executor.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sensei {

namespace {

DenseMatrix<double> uniform_matrix(std::int64_t rows, std::int64_t cols, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    DenseMatrix<double> m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = u(rng);
    return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

LayerInputs make_layer_inputs(std::int64_t n, std::int64_t k1, std::int64_t k2, std::uint64_t seed)
{
    if (n < 1 || k1 < 1 || k2 < 1)
        throw ShapeError("layer inputs: n, k1 and k2 must be >= 1");
    std::mt19937_64 rng(seed);
    LayerInputs in;
    in.weights = uniform_matrix(k1, k2, rng);
    in.attn_src = uniform_matrix(k2, 1, rng);
    in.attn_dst = uniform_matrix(k2, 1, rng);
    in.h = uniform_matrix(n, k1, rng);
    return in;
}

std::uint64_t estimate_layer_bytes(std::int64_t n, std::int64_t nnz, std::int64_t k1, std::int64_t k2)
{
    const auto un = static_cast<std::uint64_t>(n);
    const auto wide = static_cast<std::uint64_t>(std::max(k1, k2));
    const auto dense = un * (static_cast<std::uint64_t>(k1) + static_cast<std::uint64_t>(k2) + 3 * wide) * sizeof(double);
    const auto sparse = static_cast<std::uint64_t>(nnz + n) * (sizeof(double) + sizeof(ColIndex)) * 3;
    return dense + sparse;
}

std::uint64_t available_memory_bytes()
{
    std::ifstream in("/proc/meminfo");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("MemAvailable:", 0) == 0) {
            std::istringstream is(line.substr(13));
            std::uint64_t kb = 0;
            is >> kb;
            return kb * 1024;
        }
    }
    return 0;
}

void set_threads(int threads)
{
    if (threads < 1)
        return;
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    Eigen::setNbThreads(threads);
}

int current_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Executor Executor::prepare(const Graph& graph, Composition composition, std::optional<TilingConfig> opt)
{
    Executor ex;
    ex.composition_ = composition;
    const bool precompute = composition == Composition::Precompute;
    const auto t0 = std::chrono::steady_clock::now();
    if (opt)
        ex.optimized_ = prepare_optimized(graph.adjacency, graph.unweighted, *opt, precompute);
    else
        ex.plain_ = normalize_graph(graph.adjacency, graph.unweighted, precompute);
    ex.prepare_s_ = seconds_since(t0);
    return ex;
}

const NormalizedGraph<double>& Executor::normalized() const { return optimized_ ? optimized_->normalized : plain_; }

void Executor::renormalize()
{
    if (composition_ != Composition::Precompute)
        return;
    if (optimized_) {
        optimized_->normalized.n_tilde = precompute_normalized(optimized_->normalized);
        optimized_->n_tilde_tiled = tile(*optimized_->normalized.n_tilde, optimized_->config);
    } else {
        plain_.n_tilde = precompute_normalized(plain_);
    }
}

DenseMatrix<double> Executor::forward(const LayerInputs& in, Activation act, KernelTrace* trace) const
{
    if (model_of(composition_) == GnnModel::Gcn) {
        GcnLayerSpec<double> spec{in.weights, to_gcn(composition_), act};
        return optimized_ ? opt_gcn_layer(*optimized_, in.h, spec, trace) : gcn_layer(plain_, in.h, spec, trace);
    }
    GatLayerSpec<double> spec;
    spec.weights = in.weights;
    spec.attn_src = in.attn_src;
    spec.attn_dst = in.attn_dst;
    spec.composition = to_gat(composition_);
    spec.activation = act;
    return optimized_ ? opt_gat_layer(*optimized_, in.h, spec, trace) : gat_layer(plain_.a_tilde, in.h, spec, trace);
}

double checksum(const DenseMatrix<double>& m) { return m.sum(); }

} // namespace sensei
