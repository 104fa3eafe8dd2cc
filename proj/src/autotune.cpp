#include "sensei/autotune.hpp"

#include "sensei/profiler.hpp"
#include "sensei/records.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include <unistd.h>

namespace sensei {

std::vector<double> TilingRanker::encode(const GraphFeatures& f, std::int64_t k, const TilingConfig& c)
{
    const auto base = f.as_array();
    std::vector<double> row(base.begin(), base.end());
    row.push_back(static_cast<double>(k));
    row.push_back(std::log2(static_cast<double>(c.col_segment_width)));
    row.push_back(static_cast<double>(c.row_tile_height));
    row.push_back(c.reorder ? 1.0 : 0.0);
    return row;
}

TilingRanker TilingRanker::train(const std::vector<TilingObservation>& obs, const RankerParams& params)
{
    if (obs.empty())
        throw InsufficientDataError("tiling ranker: no observations");
    RankingDataset data;
    const auto width = static_cast<Eigen::Index>(encode(obs.front().features, 0, obs.front().config).size());
    data.features.resize(static_cast<Eigen::Index>(obs.size()), width);
    std::map<std::string, std::int64_t> groups;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto row = encode(obs[i].features, obs[i].k, obs[i].config);
        for (Eigen::Index f = 0; f < width; ++f)
            data.features(static_cast<Eigen::Index>(i), f) = row[f];
        data.cost.push_back(obs[i].median_time_s);
        const auto key = obs[i].graph_id + "|" + std::to_string(obs[i].k);
        data.group.push_back(groups.emplace(key, static_cast<std::int64_t>(groups.size())).first->second);
    }
    TilingRanker r;
    r.ranker_ = PairwiseRanker::fit(data, params);
    return r;
}

std::vector<TilingConfig> TilingRanker::rank(const GraphFeatures& f, std::int64_t k, const std::vector<TilingConfig>& candidates) const
{
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < candidates.size(); ++i)
        scored.emplace_back(ranker_.score(encode(f, k, candidates[i])), i);
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<TilingConfig> out;
    for (const auto& [s, i] : scored)
        out.push_back(candidates[i]);
    return out;
}

nlohmann::json TilingRanker::to_json() const { return {{"format", "sensei-tiling-ranker"}, {"ranker", ranker_.to_json()}}; }

TilingRanker TilingRanker::from_json(const nlohmann::json& j)
{
    TilingRanker r;
    r.ranker_ = PairwiseRanker::from_json(j.at("ranker"));
    return r;
}

std::uint64_t detect_llc_bytes()
{
#ifdef _SC_LEVEL3_CACHE_SIZE
    const long l3 = sysconf(_SC_LEVEL3_CACHE_SIZE);
    if (l3 > 0)
        return static_cast<std::uint64_t>(l3);
#endif
#ifdef _SC_LEVEL2_CACHE_SIZE
    const long l2 = sysconf(_SC_LEVEL2_CACHE_SIZE);
    if (l2 > 0)
        return static_cast<std::uint64_t>(l2);
#endif
    return std::uint64_t{32} << 20;
}

std::vector<TilingConfig> heuristic_rank(const std::vector<TilingConfig>& candidates, std::int64_t k, std::uint64_t llc_bytes)
{
    const double budget = static_cast<double>(llc_bytes) / 2.0;
    auto fits = [&](const TilingConfig& c) {
        return static_cast<double>(c.col_segment_width) * static_cast<double>(k) * 8.0 <= budget;
    };
    auto height_penalty = [](const TilingConfig& c) { return std::abs(std::log2(static_cast<double>(c.row_tile_height)) - 9.0); };
    std::vector<TilingConfig> out = candidates;
    std::stable_sort(out.begin(), out.end(), [&](const TilingConfig& a, const TilingConfig& b) {
        const bool fa = fits(a), fb = fits(b);
        if (fa != fb)
            return fa;
        if (a.col_segment_width != b.col_segment_width)
            return fa ? a.col_segment_width > b.col_segment_width : a.col_segment_width < b.col_segment_width;
        if (height_penalty(a) != height_penalty(b))
            return height_penalty(a) < height_penalty(b);
        return !a.reorder && b.reorder;
    });
    return out;
}

namespace {

DenseMatrix<double> random_operand(std::int64_t rows, std::int64_t k, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    DenseMatrix<double> b(rows, k);
    for (Eigen::Index i = 0; i < b.size(); ++i)
        b.data()[i] = u(rng);
    return b;
}

TiledCsr<double> prepare_tiling(const CsrMatrix<double>& a, const TilingConfig& cfg)
{
    return tile(cfg.reorder ? reorder_degree(a).matrix : a, cfg);
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

} // namespace

double time_tiling(const CsrMatrix<double>& a, std::int64_t k, const TilingConfig& cfg, const AutotuneOptions& opts)
{
    const auto tiled = prepare_tiling(a, cfg);
    const DenseMatrix<double> b = random_operand(a.cols(), k, opts.seed);
    DenseMatrix<double> c;
    const auto t = time_repeated([&] { tiled_spmm_into(tiled, b, c); }, opts.reps, opts.warmup);
    return *std::min_element(t.samples.begin(), t.samples.end());
}

std::vector<double> paired_relative_times(const CsrMatrix<double>& a, std::int64_t k, const std::vector<TilingConfig>& configs, int rounds,
                                          const AutotuneOptions& opts)
{
    if (configs.empty() || rounds < 1)
        return std::vector<double>(configs.size(), 1.0);
    std::vector<TiledCsr<double>> tiled;
    tiled.reserve(configs.size());
    for (const auto& cfg : configs)
        tiled.push_back(prepare_tiling(a, cfg));
    const DenseMatrix<double> b = random_operand(a.cols(), k, opts.seed);
    DenseMatrix<double> c;
    for (int w = 0; w < std::max(opts.warmup, 1); ++w)
        for (std::size_t i = 0; i < configs.size(); ++i)
            tiled_spmm_into(tiled[i], b, c);
    std::vector<std::vector<double>> rel(configs.size());
    std::vector<double> t(configs.size());
    for (int r = 0; r < rounds; ++r) {
        for (std::size_t i = 0; i < configs.size(); ++i)
            t[i] = std::max(time_repeated([&] { tiled_spmm_into(tiled[i], b, c); }, 1, 0).samples.front(), 1e-12);
        double log_mean = 0;
        for (const double x : t)
            log_mean += std::log(x);
        const double g = std::exp(log_mean / static_cast<double>(t.size()));
        for (std::size_t i = 0; i < configs.size(); ++i)
            rel[i].push_back(t[i] / g);
    }
    std::vector<double> out;
    out.reserve(configs.size());
    for (const auto& r : rel)
        out.push_back(median(r));
    return out;
}

TuneResult autotune(const CsrMatrix<double>& a, std::int64_t k, const std::vector<TilingConfig>& candidates, int budget,
                    const TilingRanker* ranker, const AutotuneOptions& opts)
{
    TuneResult result;
    result.best = TilingConfig{};
    if (candidates.empty() || budget < 1)
        return result;
    if (candidates.size() == 1) {
        result.best = candidates.front();
        return result;
    }
    std::vector<TilingConfig> ranked;
    if (ranker != nullptr) {
        ranked = ranker->rank(extract_features(a), k, candidates);
        result.used_ranker = true;
    } else {
        ranked = heuristic_rank(candidates, k, opts.llc_bytes > 0 ? opts.llc_bytes : detect_llc_bytes());
    }
    const std::size_t count = std::min(ranked.size(), static_cast<std::size_t>(budget));
    for (std::size_t i = 0; i < count; ++i)
        result.timed.push_back({ranked[i], time_tiling(a, k, ranked[i], opts)});

    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return result.timed[x].time_s < result.timed[y].time_s; });
    order.resize(std::min(count, static_cast<std::size_t>(std::max(opts.finalists, 1))));
    result.best = result.timed[order.front()].config;
    if (order.size() < 2 || opts.confirm_rounds < 1)
        return result;

    std::vector<TilingConfig> finalists;
    for (const std::size_t i : order)
        finalists.push_back(result.timed[i].config);
    const auto rel = paired_relative_times(a, k, finalists, opts.confirm_rounds, opts);
    std::size_t win = 0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        result.timed[order[j]].relative = rel[j];
        if (rel[j] < rel[win])
            win = j;
    }
    result.best = finalists[win];
    return result;
}

nlohmann::json to_json(const TuneResult& r)
{
    nlohmann::json timed = nlohmann::json::array();
    for (const auto& c : r.timed)
    {
        nlohmann::json e{{"config", c.config}, {"time_s", c.time_s}};
        if (c.relative > 0)
            e["relative"] = c.relative;
        timed.push_back(std::move(e));
    }
    return {{"best", r.best}, {"used_ranker", r.used_ranker}, {"timed", std::move(timed)}};
}

} // namespace sensei
