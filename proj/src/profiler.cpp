#include "sensei/profiler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <new>
#include <numeric>

namespace sensei {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::int64_t k1, std::int64_t k2)
{
    // splitmix-style combination so each size pair gets its own stream
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k1 * 1000003 + k2);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

TimingSummary time_repeated(const std::function<void()>& body, int reps, int warmup)
{
    if (reps < 1)
        throw PreconditionError("timing: reps must be >= 1");
    for (int i = 0; i < warmup; ++i)
        body();
    TimingSummary t;
    t.samples.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        t.samples.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::vector<double> sorted = t.samples;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    t.median_s = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(m);
    double var = 0;
    for (double s : sorted)
        var += (s - mean) * (s - mean);
    var /= static_cast<double>(m);
    t.cv = mean > 0 ? std::sqrt(var) / mean : 0.0;
    // guard against clock granularity on trivially small layers
    t.median_s = std::max(t.median_s, 1e-9);
    return t;
}

std::vector<std::pair<std::int64_t, std::int64_t>> evaluation_sizes(GnnModel model)
{
    if (model == GnnModel::Gcn)
        return {{32, 32}, {32, 256}, {1024, 32}, {1024, 1024}, {1024, 2048}};
    return {{32, 256}, {32, 2048}, {1024, 2048}};
}

std::vector<ProfileRecord> profile(const std::vector<Graph>& graphs, const std::vector<std::pair<std::int64_t, std::int64_t>>& sizes,
                                   GnnModel model, const ProfileOptions& opts)
{
    if (opts.reps < 3)
        throw PreconditionError("profile: reps must be >= 3");
    set_threads(opts.threads);
    const std::uint64_t limit = opts.memory_limit_bytes > 0 ? opts.memory_limit_bytes : available_memory_bytes();

    std::vector<ProfileRecord> out;
    for (const auto& graph : graphs) {
        const GraphFeatures features = extract_features(graph.adjacency);
        for (const auto& [k1, k2] : sizes) {
            for (const auto& opt : opts.opt_configs) {
                for (Composition comp : candidates(model)) {
                    ProfileRecord r;
                    r.graph_id = graph.id;
                    r.features = features;
                    r.model = model;
                    r.k1 = k1;
                    r.k2 = k2;
                    r.composition = comp;
                    r.opt_config = opt;
                    r.hw_tag = opts.hw_tag;
                    r.hw_descriptor = opts.hw_descriptor;
                    r.warmup = opts.warmup;
                    r.threads = opts.threads;
                    r.seed = opts.seed;
                    r.amortized = opts.amortize_precompute;

                    const auto need = estimate_layer_bytes(graph.adjacency.rows(), graph.adjacency.nnz(), k1, k2);
                    if (limit > 0 && need > limit) {
                        r.status = "oom";
                        out.push_back(std::move(r));
                        continue;
                    }
                    try {
                        const LayerInputs in = make_layer_inputs(graph.adjacency.rows(), k1, k2, mix_seed(opts.seed, k1, k2));
                        Executor ex = Executor::prepare(graph, comp, opt);
                        r.one_time_s = ex.prepare_seconds();
                        DenseMatrix<double> result;
                        const bool refresh = comp == Composition::Precompute && !opts.amortize_precompute;
                        const auto t = time_repeated(
                            [&] {
                                if (refresh)
                                    ex.renormalize();
                                result = ex.forward(in, opts.activation);
                            },
                            opts.reps, opts.warmup);
                        r.median_time_s = t.median_s;
                        r.cv = t.cv;
                        r.unreliable = t.cv > opts.cv_threshold;
                        r.iterations = opts.reps;
                        r.checksum = checksum(result);
                    } catch (const std::bad_alloc&) {
                        r.status = "oom";
                        r.median_time_s = r.cv = r.one_time_s = r.checksum = 0;
                        r.iterations = 0;
                    }
                    out.push_back(std::move(r));
                }
            }
        }
    }
    return out;
}

} // namespace sensei
