#include "sensei/records.hpp"

#include <istream>
#include <ostream>

namespace sensei {

const char* to_string(GnnModel m) { return m == GnnModel::Gcn ? "gcn" : "gat"; }

const char* to_string(Composition c)
{
    switch (c) {
    case Composition::Precompute: return "precompute";
    case Composition::Dynamic: return "dynamic";
    case Composition::Reuse: return "reuse";
    case Composition::Recompute: return "recompute";
    }
    return "?";
}

GnnModel parse_model(const std::string& s)
{
    if (s == "gcn" || s == "GCN")
        return GnnModel::Gcn;
    if (s == "gat" || s == "GAT")
        return GnnModel::Gat;
    throw ParseError("unknown GNN model '" + s + "'");
}

Composition parse_composition(const std::string& s)
{
    for (Composition c : {Composition::Precompute, Composition::Dynamic, Composition::Reuse, Composition::Recompute})
        if (s == to_string(c))
            return c;
    throw ParseError("unknown composition '" + s + "'");
}

std::array<Composition, 2> candidates(GnnModel m)
{
    if (m == GnnModel::Gcn)
        return {Composition::Precompute, Composition::Dynamic};
    return {Composition::Reuse, Composition::Recompute};
}

Composition default_composition(GnnModel m) { return m == GnnModel::Gcn ? Composition::Dynamic : Composition::Reuse; }

GnnModel model_of(Composition c)
{
    return c == Composition::Precompute || c == Composition::Dynamic ? GnnModel::Gcn : GnnModel::Gat;
}

int candidate_index(Composition c) { return c == Composition::Precompute || c == Composition::Reuse ? 0 : 1; }

GcnComposition to_gcn(Composition c)
{
    if (c == Composition::Precompute)
        return GcnComposition::Precompute;
    if (c == Composition::Dynamic)
        return GcnComposition::Dynamic;
    throw PreconditionError(std::string("composition '") + to_string(c) + "' is not a GCN composition");
}

GatComposition to_gat(Composition c)
{
    if (c == Composition::Reuse)
        return GatComposition::Reuse;
    if (c == Composition::Recompute)
        return GatComposition::Recompute;
    throw PreconditionError(std::string("composition '") + to_string(c) + "' is not a GAT composition");
}

void to_json(nlohmann::json& j, const TilingConfig& c)
{
    j = nlohmann::json{{"col_segment_width", c.col_segment_width}, {"row_tile_height", c.row_tile_height}, {"reorder", c.reorder}};
}

void from_json(const nlohmann::json& j, TilingConfig& c)
{
    j.at("col_segment_width").get_to(c.col_segment_width);
    j.at("row_tile_height").get_to(c.row_tile_height);
    j.at("reorder").get_to(c.reorder);
    c.validate();
}

void to_json(nlohmann::json& j, const ProfileRecord& r)
{
    j = nlohmann::json{{"graph_id", r.graph_id},
                       {"features", r.features},
                       {"model", to_string(r.model)},
                       {"k1", r.k1},
                       {"k2", r.k2},
                       {"composition", to_string(r.composition)},
                       {"opt_config", r.opt_config ? nlohmann::json(*r.opt_config) : nlohmann::json(nullptr)},
                       {"hw_tag", r.hw_tag},
                       {"hw_descriptor", r.hw_descriptor},
                       {"median_time_s", r.median_time_s},
                       {"cv", r.cv},
                       {"unreliable", r.unreliable},
                       {"iterations", r.iterations},
                       {"warmup", r.warmup},
                       {"one_time_s", r.one_time_s},
                       {"amortized", r.amortized},
                       {"threads", r.threads},
                       {"seed", r.seed},
                       {"status", r.status},
                       {"checksum", r.checksum}};
}

void from_json(const nlohmann::json& j, ProfileRecord& r)
{
    j.at("graph_id").get_to(r.graph_id);
    j.at("features").get_to(r.features);
    r.model = parse_model(j.at("model").get<std::string>());
    j.at("k1").get_to(r.k1);
    j.at("k2").get_to(r.k2);
    r.composition = parse_composition(j.at("composition").get<std::string>());
    if (model_of(r.composition) != r.model)
        throw ParseError("profile record: composition does not belong to model");
    if (j.contains("opt_config") && !j.at("opt_config").is_null())
        r.opt_config = j.at("opt_config").get<TilingConfig>();
    else
        r.opt_config.reset();
    r.hw_tag = j.value("hw_tag", std::string{});
    r.hw_descriptor = j.value("hw_descriptor", std::vector<double>{});
    j.at("median_time_s").get_to(r.median_time_s);
    r.cv = j.value("cv", 0.0);
    r.unreliable = j.value("unreliable", false);
    j.at("iterations").get_to(r.iterations);
    r.warmup = j.value("warmup", 0);
    r.one_time_s = j.value("one_time_s", 0.0);
    r.amortized = j.value("amortized", true);
    r.threads = j.value("threads", 1);
    r.seed = j.value("seed", std::uint64_t{0});
    r.status = j.value("status", std::string("ok"));
    r.checksum = j.value("checksum", 0.0);
}

std::vector<ProfileRecord> read_ndjson(std::istream& in)
{
    std::vector<ProfileRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            out.push_back(nlohmann::json::parse(line).get<ProfileRecord>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("profiles line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_ndjson(std::ostream& out, const std::vector<ProfileRecord>& records)
{
    for (const auto& r : records)
        out << nlohmann::json(r).dump() << '\n';
}

} // namespace sensei
