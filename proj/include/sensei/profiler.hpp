#ifndef SENSEI_PROFILER_HPP
#define SENSEI_PROFILER_HPP

#include "sensei/executor.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace sensei {

struct ProfileOptions {
    int reps = 10;
    int warmup = 3;
    std::uint64_t seed = 42;
    int threads = 1;
    std::string hw_tag;
    std::vector<double> hw_descriptor;
    bool amortize_precompute = true;
    std::vector<std::optional<TilingConfig>> opt_configs{std::nullopt};
    double cv_threshold = 0.3;
    std::uint64_t memory_limit_bytes = 0; // 0: use MemAvailable
    Activation activation = Activation::Relu;
};

struct TimingSummary {
    double median_s = 0;
    double cv = 0;
    std::vector<double> samples;
};

/// Runs `body` `warmup` times untimed, then `reps` timed times.
TimingSummary time_repeated(const std::function<void()>& body, int reps, int warmup);

/// Times every (graph, size pair, composition of `model`, optimization config) combination.
/// Configurations whose estimated footprint exceeds the memory limit (or that throw bad_alloc)
/// produce a record with status "oom" and no timing.
std::vector<ProfileRecord> profile(const std::vector<Graph>& graphs, const std::vector<std::pair<std::int64_t, std::int64_t>>& sizes,
                                   GnnModel model, const ProfileOptions& opts);

/// The evaluation size pairs for each model (GCN: five, GAT: three with k1 < k2).
std::vector<std::pair<std::int64_t, std::int64_t>> evaluation_sizes(GnnModel model);

} // namespace sensei

#endif // SENSEI_PROFILER_HPP
