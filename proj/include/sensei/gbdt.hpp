#ifndef SENSEI_GBDT_HPP
#define SENSEI_GBDT_HPP

#include "sensei/csr.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace sensei {

/// Items to rank, grouped into queries. Within a group, lower `cost` is better.
struct RankingDataset {
    DenseMatrix<double> features; // one row per item
    std::vector<double> cost;
    std::vector<std::int64_t> group;

    [[nodiscard]] std::size_t size() const { return cost.size(); }
};

struct RankerParams {
    int n_estimators = 300;
    double learning_rate = 0.001;
    int max_depth = 6;
    double lambda = 1.0;           // L2 penalty on leaf weights
    double min_child_weight = 1.0; // minimum hessian mass per child
    double gamma = 0.0;            // minimum gain to split
    double subsample = 1.0;        // fraction of groups drawn per tree
    std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const RankerParams& p);
void from_json(const nlohmann::json& j, RankerParams& p);

/// Binary regression tree stored as flat node arrays. A split sends x[feature] < threshold left.
class RegressionTree {
public:
    struct Node {
        int feature = -1; // -1 marks a leaf
        double threshold = 0;
        int left = -1;
        int right = -1;
        double value = 0; // leaf output (already scaled by the learning rate)
        double gain = 0;  // split gain, 0 for leaves
    };

    [[nodiscard]] double predict(std::span<const double> x) const;
    [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
    std::vector<Node>& nodes() { return nodes_; }

private:
    std::vector<Node> nodes_;
};

/// Gradient-boosted trees trained on the pairwise logistic ranking loss
/// sum over (better, worse) pairs of log(1 + exp(-(s_better - s_worse))).
class PairwiseRanker {
public:
    PairwiseRanker() = default;

    static PairwiseRanker fit(const RankingDataset& data, const RankerParams& params);

    [[nodiscard]] double score(std::span<const double> x) const;
    [[nodiscard]] std::size_t n_features() const { return n_features_; }
    [[nodiscard]] const std::vector<RegressionTree>& trees() const { return trees_; }
    [[nodiscard]] const RankerParams& params() const { return params_; }

    /// Total split gain accumulated per feature index.
    [[nodiscard]] std::vector<double> feature_gain() const;

    [[nodiscard]] nlohmann::json to_json() const;
    static PairwiseRanker from_json(const nlohmann::json& j);

private:
    std::size_t n_features_ = 0;
    RankerParams params_;
    std::vector<RegressionTree> trees_;
};

} // namespace sensei

#endif // SENSEI_GBDT_HPP
