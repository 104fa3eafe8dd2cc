#include "sensei/selector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace sensei {

namespace {

constexpr std::size_t kConfigColumns = 4;

} // namespace

std::vector<std::string> selector_schema(std::size_t hw_len)
{
    std::vector<std::string> s(GraphFeatures::names.begin(), GraphFeatures::names.end());
    for (const char* n : {"k1", "k2", "opt_present", "opt_log2_segment_width", "opt_row_tile_height", "opt_reorder"})
        s.emplace_back(n);
    for (std::size_t i = 0; i < hw_len; ++i)
        s.push_back("hw_" + std::to_string(i));
    s.emplace_back("composition");
    return s;
}

std::vector<double> encode(const SelectorInput& input, Composition candidate)
{
    std::vector<double> row;
    row.reserve(GraphFeatures::count + 2 + kConfigColumns + input.hw_descriptor.size() + 1);
    for (double v : input.features.as_array())
        row.push_back(v);
    row.push_back(static_cast<double>(input.k1));
    row.push_back(static_cast<double>(input.k2));
    if (input.opt_config) {
        row.push_back(1.0);
        row.push_back(std::log2(static_cast<double>(input.opt_config->col_segment_width)));
        row.push_back(static_cast<double>(input.opt_config->row_tile_height));
        row.push_back(input.opt_config->reorder ? 1.0 : 0.0);
    } else {
        row.insert(row.end(), kConfigColumns, 0.0);
    }
    row.insert(row.end(), input.hw_descriptor.begin(), input.hw_descriptor.end());
    row.push_back(static_cast<double>(candidate_index(candidate)));
    return row;
}

std::size_t SelectorModel::hw_len() const { return schema.size() - (GraphFeatures::count + 2 + kConfigColumns + 1); }

RankerParams plain_system_params()
{
    RankerParams p;
    p.n_estimators = 300;
    p.learning_rate = 0.001;
    return p;
}

RankerParams optimized_system_params()
{
    RankerParams p;
    p.n_estimators = 410;
    p.learning_rate = 0.05;
    return p;
}

std::string group_key(const ProfileRecord& r)
{
    std::ostringstream k;
    k << r.graph_id << '|' << r.k1 << '|' << r.k2 << '|' << (r.opt_config ? to_string(*r.opt_config) : "none") << '|' << r.hw_tag;
    return k.str();
}

SelectorInput input_of(const ProfileRecord& r) { return {r.features, r.k1, r.k2, r.opt_config, r.hw_descriptor}; }

TrainResult train(const std::vector<ProfileRecord>& records, GnnModel model_tag, const RankerParams& params, std::size_t min_groups)
{
    TrainResult result;
    std::map<std::string, std::vector<const ProfileRecord*>> groups;
    std::size_t hw_len = 0;
    bool hw_seen = false;
    for (const auto& r : records) {
        if (r.model != model_tag || !r.ok())
            continue;
        if (!hw_seen) {
            hw_len = r.hw_descriptor.size();
            hw_seen = true;
        } else if (r.hw_descriptor.size() != hw_len) {
            throw SchemaError("train: records disagree on hardware descriptor length");
        }
        groups[group_key(r)].push_back(&r);
    }

    RankingDataset data;
    std::vector<std::vector<double>> rows;
    std::int64_t gid = 0;
    for (const auto& [key, members] : groups) {
        // keep the fastest measurement per candidate
        std::map<Composition, const ProfileRecord*> best;
        for (const auto* r : members) {
            auto it = best.find(r->composition);
            if (it == best.end() || r->median_time_s < it->second->median_time_s)
                best[r->composition] = r;
        }
        if (best.size() < 2) {
            result.warnings.push_back("group '" + key + "' has a single composition; excluded");
            continue;
        }
        for (const auto& [comp, r] : best) {
            rows.push_back(encode(input_of(*r), comp));
            data.cost.push_back(r->median_time_s);
            data.group.push_back(gid);
        }
        ++gid;
    }
    result.groups_used = static_cast<std::size_t>(gid);
    if (result.groups_used < min_groups)
        throw InsufficientDataError("train: " + std::to_string(result.groups_used) + " usable groups, need at least " +
                                    std::to_string(min_groups));

    const auto schema = selector_schema(hw_len);
    data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(schema.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t f = 0; f < schema.size(); ++f)
            data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f)) = rows[i][f];

    result.model.model_tag = model_tag;
    result.model.schema = schema;
    result.model.ranker = PairwiseRanker::fit(data, params);
    return result;
}

std::array<double, 2> candidate_scores(const SelectorModel& model, const SelectorInput& input)
{
    if (input.hw_descriptor.size() != model.hw_len())
        throw SchemaError("select: model expects " + std::to_string(model.hw_len()) + " hardware descriptor entries, got " +
                          std::to_string(input.hw_descriptor.size()));
    std::array<double, 2> s{};
    const auto cands = candidates(model.model_tag);
    for (std::size_t i = 0; i < cands.size(); ++i)
        s[i] = model.ranker.score(encode(input, cands[i]));
    return s;
}

Composition select(const SelectorModel& model, const SelectorInput& input)
{
    const auto scores = candidate_scores(model, input);
    const auto cands = candidates(model.model_tag);
    const Composition fallback = default_composition(model.model_tag);
    const int d = candidate_index(fallback);
    const int other = 1 - d;
    return scores[other] > scores[d] ? cands[other] : fallback;
}

std::vector<std::pair<std::string, double>> feature_importance(const SelectorModel& model)
{
    const auto gain = model.ranker.feature_gain();
    double total = 0;
    for (double g : gain)
        total += g;
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t f = 0; f < gain.size(); ++f)
        out.emplace_back(f < model.schema.size() ? model.schema[f] : "f" + std::to_string(f), total > 0 ? gain[f] / total : 0.0);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

nlohmann::json to_json(const SelectorModel& model)
{
    return {{"format", "sensei-selector"},
            {"version", SelectorModel::format_version},
            {"model", to_string(model.model_tag)},
            {"objective", "rank:pairwise"},
            {"schema", model.schema},
            {"ranker", model.ranker.to_json()}};
}

SelectorModel selector_from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != "sensei-selector")
            throw ParseError("model file: unexpected format tag");
        if (j.at("version").get<int>() != SelectorModel::format_version)
            throw ParseError("model file: unsupported version " + j.at("version").dump());
        SelectorModel m;
        m.model_tag = parse_model(j.at("model").get<std::string>());
        j.at("schema").get_to(m.schema);
        m.ranker = PairwiseRanker::from_json(j.at("ranker"));
        if (m.schema.size() != m.ranker.n_features() || m.schema.size() < GraphFeatures::count + 2 + kConfigColumns + 1)
            throw SchemaError("model file: schema does not match the ranker");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_model(const SelectorModel& model, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write '" + path + "'");
    out << to_json(model).dump(1) << '\n';
}

SelectorModel load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open model file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model file '" + path + "': " + e.what());
    }
    return selector_from_json(j);
}

} // namespace sensei
