#ifndef SENSEI_RECORDS_HPP
#define SENSEI_RECORDS_HPP

#include "sensei/features.hpp"
#include "sensei/tiling.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sensei {

enum class GnnModel { Gcn, Gat };

/// Every primitive composition known to the system, across GNN models.
enum class Composition { Precompute, Dynamic, Reuse, Recompute };

const char* to_string(GnnModel m);
const char* to_string(Composition c);
GnnModel parse_model(const std::string& s);
Composition parse_composition(const std::string& s);

/// The two candidates for a model, in a fixed order (their index is the encoded feature value).
std::array<Composition, 2> candidates(GnnModel m);
/// What the framework runs when nobody decides: dynamic normalization for GCN, reuse for GAT.
Composition default_composition(GnnModel m);
GnnModel model_of(Composition c);
int candidate_index(Composition c);

GcnComposition to_gcn(Composition c);
GatComposition to_gat(Composition c);

/// One timed (graph, sizes, composition, optimization config) observation.
struct ProfileRecord {
    std::string graph_id;
    GraphFeatures features;
    GnnModel model = GnnModel::Gcn;
    std::int64_t k1 = 0;
    std::int64_t k2 = 0;
    Composition composition = Composition::Dynamic;
    std::optional<TilingConfig> opt_config;
    std::string hw_tag;
    std::vector<double> hw_descriptor;
    double median_time_s = 0;
    double cv = 0;           // coefficient of variation of the timed iterations
    bool unreliable = false; // cv above the reliability threshold
    int iterations = 0;
    int warmup = 0;
    double one_time_s = 0; // precomputation cost kept out of the per-iteration time
    bool amortized = true;
    int threads = 1;
    std::uint64_t seed = 0;
    std::string status = "ok"; // "ok" or "oom"
    double checksum = 0;

    [[nodiscard]] bool ok() const { return status == "ok"; }
};

void to_json(nlohmann::json& j, const TilingConfig& c);
void from_json(const nlohmann::json& j, TilingConfig& c);
void to_json(nlohmann::json& j, const ProfileRecord& r);
void from_json(const nlohmann::json& j, ProfileRecord& r);

std::vector<ProfileRecord> read_ndjson(std::istream& in);
void write_ndjson(std::ostream& out, const std::vector<ProfileRecord>& records);

} // namespace sensei

#endif // SENSEI_RECORDS_HPP
