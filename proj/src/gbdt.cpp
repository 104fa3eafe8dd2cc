#include "sensei/gbdt.hpp"

#include "sensei/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace sensei {

namespace {

constexpr double kMinGain = 1e-12;

struct Pair {
    std::size_t better;
    std::size_t worse;
};

std::map<std::int64_t, std::vector<std::size_t>> items_by_group(const RankingDataset& data)
{
    std::map<std::int64_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < data.size(); ++i)
        groups[data.group[i]].push_back(i);
    return groups;
}

/// Features that take more than one value inside some group. Only these can separate the two
/// sides of a preference pair; every other split keeps pairs together.
std::vector<bool> item_level_features(const RankingDataset& data, const std::map<std::int64_t, std::vector<std::size_t>>& groups)
{
    std::vector<bool> varies(static_cast<std::size_t>(data.features.cols()), false);
    for (const auto& [id, items] : groups)
        for (std::size_t k = 1; k < items.size(); ++k)
            for (Eigen::Index f = 0; f < data.features.cols(); ++f)
                if (data.features(items[k], f) != data.features(items[0], f))
                    varies[f] = true;
    return varies;
}

struct Split {
    double gain = -std::numeric_limits<double>::infinity();
    int feature = -1;
    double threshold = 0;

    [[nodiscard]] bool valid() const { return feature >= 0; }
};

struct GrowthNode {
    double g = 0;
    double h = 0;
    double abs_g = 0;
};

class TreeBuilder {
public:
    TreeBuilder(const DenseMatrix<double>& x, const std::vector<std::vector<std::size_t>>& sorted,
                const std::vector<bool>& item_level, const RankerParams& params)
        : x_(x), sorted_(sorted), item_level_(item_level), params_(params)
    {
    }

    RegressionTree build(const std::vector<double>& g, const std::vector<double>& h, const std::vector<bool>& active)
    {
        RegressionTree tree;
        auto& nodes = tree.nodes();
        std::vector<GrowthNode> stats(1);
        std::vector<int> item_node(g.size(), -1);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!active[i])
                continue;
            item_node[i] = 0;
            stats[0].g += g[i];
            stats[0].h += h[i];
            stats[0].abs_g += std::abs(g[i]);
        }
        nodes.emplace_back();

        std::vector<int> frontier{0};
        for (int depth = 0; depth < params_.max_depth && !frontier.empty(); ++depth) {
            std::vector<int> slot(nodes.size(), -1);
            for (std::size_t s = 0; s < frontier.size(); ++s)
                slot[frontier[s]] = static_cast<int>(s);
            std::vector<Split> best(frontier.size()), best_item(frontier.size());
            find_splits(g, h, item_node, slot, frontier, stats, best, best_item);

            std::vector<int> next;
            for (std::size_t s = 0; s < frontier.size(); ++s) {
                const int nd = frontier[s];
                Split pick;
                if (best[s].valid() && best[s].gain > kMinGain)
                    pick = best[s];
                else if (best_item[s].valid() && stats[nd].abs_g > 0)
                    pick = best_item[s]; // all gains tie at zero: open the pairs first
                if (!pick.valid())
                    continue;
                nodes[nd].feature = pick.feature;
                nodes[nd].threshold = pick.threshold;
                nodes[nd].gain = std::max(pick.gain, 0.0);
                nodes[nd].left = static_cast<int>(nodes.size());
                nodes[nd].right = static_cast<int>(nodes.size()) + 1;
                nodes.emplace_back();
                nodes.emplace_back();
                stats.emplace_back();
                stats.emplace_back();
                next.push_back(nodes[nd].left);
                next.push_back(nodes[nd].right);
            }
            for (std::size_t i = 0; i < g.size(); ++i) {
                const int nd = item_node[i];
                if (nd < 0 || nodes[nd].feature < 0)
                    continue;
                const int child = x_(i, nodes[nd].feature) < nodes[nd].threshold ? nodes[nd].left : nodes[nd].right;
                item_node[i] = child;
                stats[child].g += g[i];
                stats[child].h += h[i];
                stats[child].abs_g += std::abs(g[i]);
            }
            frontier = std::move(next);
        }
        for (std::size_t nd = 0; nd < nodes.size(); ++nd)
            if (nodes[nd].feature < 0)
                nodes[nd].value = -stats[nd].g / (stats[nd].h + params_.lambda) * params_.learning_rate;
        return tree;
    }

private:
    struct Accum {
        double gl = 0;
        double hl = 0;
        double last = 0;
        bool any = false;
    };

    void find_splits(const std::vector<double>& g, const std::vector<double>& h, const std::vector<int>& item_node,
                     const std::vector<int>& slot, const std::vector<int>& frontier, const std::vector<GrowthNode>& stats,
                     std::vector<Split>& best, std::vector<Split>& best_item) const
    {
        const double lambda = params_.lambda;
        std::vector<Accum> acc(frontier.size());
        for (Eigen::Index f = 0; f < x_.cols(); ++f) {
            std::fill(acc.begin(), acc.end(), Accum{});
            for (std::size_t i : sorted_[f]) {
                const int nd = item_node[i];
                if (nd < 0 || nd >= static_cast<int>(slot.size()) || slot[nd] < 0)
                    continue;
                const int s = slot[nd];
                Accum& a = acc[s];
                const double v = x_(i, f);
                if (a.any && v != a.last) {
                    const double gt = stats[nd].g, ht = stats[nd].h;
                    const double gr = gt - a.gl, hr = ht - a.hl;
                    if (a.hl >= params_.min_child_weight && hr >= params_.min_child_weight) {
                        const double gain = 0.5 * (a.gl * a.gl / (a.hl + lambda) + gr * gr / (hr + lambda) - gt * gt / (ht + lambda)) -
                                            params_.gamma;
                        double thr = 0.5 * (a.last + v);
                        if (!(a.last < thr))
                            thr = v;
                        if (gain > best[s].gain)
                            best[s] = {gain, static_cast<int>(f), thr};
                        if (item_level_[f] && gain > best_item[s].gain)
                            best_item[s] = {gain, static_cast<int>(f), thr};
                    }
                }
                a.gl += g[i];
                a.hl += h[i];
                a.last = v;
                a.any = true;
            }
        }
    }

    const DenseMatrix<double>& x_;
    const std::vector<std::vector<std::size_t>>& sorted_;
    const std::vector<bool>& item_level_;
    const RankerParams& params_;
};

} // namespace

void to_json(nlohmann::json& j, const RankerParams& p)
{
    j = nlohmann::json{{"n_estimators", p.n_estimators}, {"learning_rate", p.learning_rate},     {"max_depth", p.max_depth},
                       {"lambda", p.lambda},             {"min_child_weight", p.min_child_weight}, {"gamma", p.gamma},
                       {"subsample", p.subsample},       {"seed", p.seed}};
}

void from_json(const nlohmann::json& j, RankerParams& p)
{
    j.at("n_estimators").get_to(p.n_estimators);
    j.at("learning_rate").get_to(p.learning_rate);
    j.at("max_depth").get_to(p.max_depth);
    j.at("lambda").get_to(p.lambda);
    j.at("min_child_weight").get_to(p.min_child_weight);
    j.at("gamma").get_to(p.gamma);
    j.at("subsample").get_to(p.subsample);
    j.at("seed").get_to(p.seed);
}

double RegressionTree::predict(std::span<const double> x) const
{
    if (nodes_.empty())
        return 0.0;
    int nd = 0;
    while (nodes_[nd].feature >= 0)
        nd = x[nodes_[nd].feature] < nodes_[nd].threshold ? nodes_[nd].left : nodes_[nd].right;
    return nodes_[nd].value;
}

PairwiseRanker PairwiseRanker::fit(const RankingDataset& data, const RankerParams& params)
{
    const std::size_t n = data.size();
    if (static_cast<std::size_t>(data.features.rows()) != n || data.group.size() != n)
        throw ShapeError("ranker: features, costs and groups must have one entry per item");
    if (params.n_estimators < 0 || params.max_depth < 0 || !(params.learning_rate > 0) || !(params.subsample > 0) ||
        params.subsample > 1 || params.lambda < 0)
        throw PreconditionError("ranker: invalid hyperparameters");

    PairwiseRanker model;
    model.n_features_ = static_cast<std::size_t>(data.features.cols());
    model.params_ = params;

    const auto groups = items_by_group(data);
    std::vector<Pair> pairs;
    for (const auto& [id, items] : groups)
        for (std::size_t a = 0; a < items.size(); ++a)
            for (std::size_t b = a + 1; b < items.size(); ++b) {
                const double ca = data.cost[items[a]], cb = data.cost[items[b]];
                if (ca < cb)
                    pairs.push_back({items[a], items[b]});
                else if (cb < ca)
                    pairs.push_back({items[b], items[a]});
            }

    const auto item_level = item_level_features(data, groups);
    std::vector<std::vector<std::size_t>> sorted(model.n_features_);
    for (std::size_t f = 0; f < model.n_features_; ++f) {
        sorted[f].resize(n);
        std::iota(sorted[f].begin(), sorted[f].end(), std::size_t{0});
        std::stable_sort(sorted[f].begin(), sorted[f].end(),
                         [&](std::size_t a, std::size_t b) { return data.features(a, f) < data.features(b, f); });
    }

    std::mt19937_64 rng(params.seed);
    std::bernoulli_distribution keep(params.subsample);
    TreeBuilder builder(data.features, sorted, item_level, params);
    std::vector<double> scores(n, 0.0), g(n), h(n);
    std::vector<bool> active(n, true);
    for (int t = 0; t < params.n_estimators; ++t) {
        if (params.subsample < 1.0) {
            for (const auto& [id, items] : groups) {
                const bool k = keep(rng);
                for (std::size_t i : items)
                    active[i] = k;
            }
        }
        std::fill(g.begin(), g.end(), 0.0);
        std::fill(h.begin(), h.end(), 0.0);
        for (const Pair& p : pairs) {
            if (!active[p.better])
                continue;
            const double margin = scores[p.better] - scores[p.worse];
            const double rho = 1.0 / (1.0 + std::exp(margin)); // sigma(-margin)
            const double hess = rho * (1.0 - rho);
            g[p.better] -= rho;
            g[p.worse] += rho;
            h[p.better] += hess;
            h[p.worse] += hess;
        }
        model.trees_.push_back(builder.build(g, h, active));
        const auto& tree = model.trees_.back();
        for (std::size_t i = 0; i < n; ++i)
            scores[i] += tree.predict(std::span<const double>(data.features.row(i).data(), model.n_features_));
    }
    return model;
}

double PairwiseRanker::score(std::span<const double> x) const
{
    if (x.size() != n_features_)
        throw SchemaError("ranker: expected " + std::to_string(n_features_) + " features, got " + std::to_string(x.size()));
    double s = 0;
    for (const auto& t : trees_)
        s += t.predict(x);
    return s;
}

std::vector<double> PairwiseRanker::feature_gain() const
{
    std::vector<double> gain(n_features_, 0.0);
    for (const auto& t : trees_)
        for (const auto& nd : t.nodes())
            if (nd.feature >= 0)
                gain[nd.feature] += nd.gain;
    return gain;
}

nlohmann::json PairwiseRanker::to_json() const
{
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) {
        nlohmann::json jt{{"feature", nlohmann::json::array()}, {"threshold", nlohmann::json::array()},
                          {"left", nlohmann::json::array()},    {"right", nlohmann::json::array()},
                          {"value", nlohmann::json::array()},   {"gain", nlohmann::json::array()}};
        for (const auto& nd : t.nodes()) {
            jt["feature"].push_back(nd.feature);
            jt["threshold"].push_back(nd.threshold);
            jt["left"].push_back(nd.left);
            jt["right"].push_back(nd.right);
            jt["value"].push_back(nd.value);
            jt["gain"].push_back(nd.gain);
        }
        trees.push_back(std::move(jt));
    }
    return {{"n_features", n_features_}, {"params", params_}, {"trees", std::move(trees)}};
}

PairwiseRanker PairwiseRanker::from_json(const nlohmann::json& j)
{
    PairwiseRanker m;
    j.at("n_features").get_to(m.n_features_);
    j.at("params").get_to(m.params_);
    for (const auto& jt : j.at("trees")) {
        RegressionTree t;
        const auto& feat = jt.at("feature");
        for (std::size_t k = 0; k < feat.size(); ++k) {
            RegressionTree::Node nd;
            nd.feature = feat[k].get<int>();
            nd.threshold = jt.at("threshold")[k].get<double>();
            nd.left = jt.at("left")[k].get<int>();
            nd.right = jt.at("right")[k].get<int>();
            nd.value = jt.at("value")[k].get<double>();
            nd.gain = jt.at("gain")[k].get<double>();
            const int count = static_cast<int>(feat.size());
            if (nd.feature >= static_cast<int>(m.n_features_) ||
                (nd.feature >= 0 && (nd.left <= static_cast<int>(k) || nd.right <= static_cast<int>(k) || nd.left >= count ||
                                     nd.right >= count)))
                throw ParseError("ranker: malformed tree node");
            t.nodes().push_back(nd);
        }
        m.trees_.push_back(std::move(t));
    }
    return m;
}

} // namespace sensei
