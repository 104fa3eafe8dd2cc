#ifndef SENSEI_AUTOTUNE_HPP
#define SENSEI_AUTOTUNE_HPP

#include "sensei/features.hpp"
#include "sensei/gbdt.hpp"
#include "sensei/tiling.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sensei {

/// One timed (graph, width, tiling config) observation used to train the tiling ranker.
struct TilingObservation {
    std::string graph_id;
    GraphFeatures features;
    std::int64_t k = 0;
    TilingConfig config;
    double median_time_s = 0;
};

/// Ranks tiling configurations for a graph with the same pairwise tree machinery as the selector.
class TilingRanker {
public:
    static TilingRanker train(const std::vector<TilingObservation>& obs, const RankerParams& params);

    /// Candidates sorted best first (stable on ties).
    [[nodiscard]] std::vector<TilingConfig> rank(const GraphFeatures& f, std::int64_t k, const std::vector<TilingConfig>& candidates) const;

    [[nodiscard]] nlohmann::json to_json() const;
    static TilingRanker from_json(const nlohmann::json& j);

    static std::vector<double> encode(const GraphFeatures& f, std::int64_t k, const TilingConfig& c);

private:
    PairwiseRanker ranker_;
};

/// Bytes of last-level cache, from sysconf when available (32 MiB otherwise).
std::uint64_t detect_llc_bytes();

/// Orders candidates by the cache rule: segments whose dense panel (width x k x 8 bytes) fits in
/// half the LLC first, widest first; the rest narrowest first.
std::vector<TilingConfig> heuristic_rank(const std::vector<TilingConfig>& candidates, std::int64_t k, std::uint64_t llc_bytes);

struct AutotuneOptions {
    int reps = 5;
    int warmup = 1;
    std::uint64_t seed = 7;
    std::uint64_t llc_bytes = 0; // 0: detect
    int finalists = 6;           // fastest screened candidates compared head to head
    int confirm_rounds = 15;     // paired rounds over the finalists
};

struct TunedCandidate {
    TilingConfig config;
    double time_s = 0;   // screening time (fastest of reps)
    double relative = 0; // paired score for finalists, 0 otherwise
};

struct TuneResult {
    TilingConfig best;
    bool used_ranker = false;
    std::vector<TunedCandidate> timed; // in ranked order
};

/// Fastest of `reps` timed runs of one tiled SpMM of `a` (reordered first when the config asks) against an n x k
/// dense operand. Interference only adds time, so the minimum is the steadier statistic here.
/// Reordering and tiling are not part of the timed region.
double time_tiling(const CsrMatrix<double>& a, std::int64_t k, const TilingConfig& cfg, const AutotuneOptions& opts);

/// Each round runs every config once, back to back; returns per config the median over rounds of its
/// time divided by the round's geometric mean. Slow drift in machine speed cancels within a round.
std::vector<double> paired_relative_times(const CsrMatrix<double>& a, std::int64_t k, const std::vector<TilingConfig>& configs, int rounds,
                                          const AutotuneOptions& opts);

/// Ranks the candidates (ranker if given, else heuristic_rank), screens the first min(budget, |candidates|)
/// with time_tiling, then compares the fastest `finalists` with paired_relative_times and returns the
/// lowest scoring one. Falls back to an untiled config when nothing can be timed.
TuneResult autotune(const CsrMatrix<double>& a, std::int64_t k, const std::vector<TilingConfig>& candidates, int budget,
                    const TilingRanker* ranker = nullptr, const AutotuneOptions& opts = {});

nlohmann::json to_json(const TuneResult& r);

} // namespace sensei

#endif // SENSEI_AUTOTUNE_HPP
