#ifndef SENSEI_SELECTOR_HPP
#define SENSEI_SELECTOR_HPP

#include "sensei/gbdt.hpp"
#include "sensei/records.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sensei {

/// Everything the selector sees about one decision, minus the candidate composition itself.
struct SelectorInput {
    GraphFeatures features;
    std::int64_t k1 = 0;
    std::int64_t k2 = 0;
    std::optional<TilingConfig> opt_config;
    std::vector<double> hw_descriptor;
};

/// Column names of the encoded feature row for a hardware descriptor of `hw_len` entries.
std::vector<std::string> selector_schema(std::size_t hw_len);

/// Encodes (input, candidate) as one ranker row: graph features, k1, k2, the optimization
/// config (presence flag, log2 segment width, tile height, reorder), hardware, candidate index.
std::vector<double> encode(const SelectorInput& input, Composition candidate);

struct SelectorModel {
    static constexpr int format_version = 1;

    GnnModel model_tag = GnnModel::Gcn;
    std::vector<std::string> schema;
    PairwiseRanker ranker;

    [[nodiscard]] std::size_t hw_len() const;
};

/// Hyperparameters for selectors of the framework-level execution path.
RankerParams plain_system_params();
/// Hyperparameters for selectors of the tiled/reordered execution path.
RankerParams optimized_system_params();

struct TrainResult {
    SelectorModel model;
    std::size_t groups_used = 0;
    std::vector<std::string> warnings;
};

/// Groups records by (graph, k1, k2, opt config, hardware tag); within a group the faster
/// composition must rank higher. Groups with a single composition are dropped with a warning.
TrainResult train(const std::vector<ProfileRecord>& records, GnnModel model_tag, const RankerParams& params,
                  std::size_t min_groups = 20);

/// Scores both candidates and returns the better one; ties go to default_composition.
Composition select(const SelectorModel& model, const SelectorInput& input);

/// Per-candidate scores, in candidates() order.
std::array<double, 2> candidate_scores(const SelectorModel& model, const SelectorInput& input);

/// Split gain per schema column normalized to sum to 1 (all zero when no split has gain), descending.
std::vector<std::pair<std::string, double>> feature_importance(const SelectorModel& model);

nlohmann::json to_json(const SelectorModel& model);
SelectorModel selector_from_json(const nlohmann::json& j);
void save_model(const SelectorModel& model, const std::string& path);
SelectorModel load_model(const std::string& path);

/// Identity of the decision a record belongs to.
std::string group_key(const ProfileRecord& r);

SelectorInput input_of(const ProfileRecord& r);

} // namespace sensei

#endif // SENSEI_SELECTOR_HPP
