#ifndef SENSEI_FEATURES_HPP
#define SENSEI_FEATURES_HPP

#include "sensei/csr.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <string_view>

namespace sensei {

/// Handcrafted descriptor of an input graph used by the composition selector.
struct GraphFeatures {
    std::int64_t n_rows = 0;
    std::int64_t n_nnzs = 0;
    double nnz_den = 0;
    double nnz_mean = 0;
    std::int64_t d_min = 0;
    std::int64_t d_max = 0;
    double d_dentr = 0; // normalized entropy of the degree histogram
    double e_dentr = 0; // normalized entropy of per-node edge shares

    static constexpr std::size_t count = 8;
    static constexpr std::array<std::string_view, count> names{"n_rows", "n_nnzs", "nnz_den", "nnz_mean",
                                                               "d_min",  "d_max",  "d_dentr", "e_dentr"};

    [[nodiscard]] std::array<double, count> as_array() const
    {
        return {static_cast<double>(n_rows), static_cast<double>(n_nnzs), nnz_den, nnz_mean, static_cast<double>(d_min),
                static_cast<double>(d_max),  d_dentr,                      e_dentr};
    }

    friend bool operator==(const GraphFeatures&, const GraphFeatures&) = default;
};

/// One pass over the row pointers plus a degree histogram; never touches column data.
GraphFeatures extract_features(const CsrMatrix<double>& a);

void to_json(nlohmann::json& j, const GraphFeatures& f);
void from_json(const nlohmann::json& j, GraphFeatures& f);

} // namespace sensei

#endif // SENSEI_FEATURES_HPP
