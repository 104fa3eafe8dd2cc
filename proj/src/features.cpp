#include "sensei/features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sensei {

GraphFeatures extract_features(const CsrMatrix<double>& a)
{
    if (!a.is_square())
        throw ShapeError("extract_features: matrix must be square");
    if (a.rows() == 0)
        throw DegenerateInputError("extract_features: graph has no nodes");

    const auto rp = a.row_ptr();
    const std::int64_t n = a.rows();
    GraphFeatures f;
    f.n_rows = n;
    f.n_nnzs = a.nnz();
    f.nnz_den = static_cast<double>(f.n_nnzs) / (static_cast<double>(n) * static_cast<double>(n));
    f.nnz_mean = static_cast<double>(f.n_nnzs) / static_cast<double>(n);

    f.d_min = rp[1] - rp[0];
    f.d_max = f.d_min;
    double edge_entropy = 0;
    const double total = static_cast<double>(f.n_nnzs);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t d = rp[i + 1] - rp[i];
        f.d_min = std::min(f.d_min, d);
        f.d_max = std::max(f.d_max, d);
        if (d > 0) {
            const double share = static_cast<double>(d) / total;
            edge_entropy -= share * std::log(share);
        }
    }
    f.e_dentr = n > 1 ? edge_entropy / std::log(static_cast<double>(n)) : 0.0;

    std::vector<std::int64_t> histogram(static_cast<std::size_t>(f.d_max - f.d_min + 1), 0);
    for (std::int64_t i = 0; i < n; ++i)
        ++histogram[rp[i + 1] - rp[i] - f.d_min];
    double degree_entropy = 0;
    std::int64_t distinct = 0;
    for (std::int64_t c : histogram) {
        if (c == 0)
            continue;
        ++distinct;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        degree_entropy -= p * std::log(p);
    }
    f.d_dentr = distinct > 1 ? degree_entropy / std::log(static_cast<double>(distinct)) : 0.0;
    return f;
}

void to_json(nlohmann::json& j, const GraphFeatures& f)
{
    j = nlohmann::json{{"n_rows", f.n_rows}, {"n_nnzs", f.n_nnzs}, {"nnz_den", f.nnz_den}, {"nnz_mean", f.nnz_mean},
                       {"d_min", f.d_min},   {"d_max", f.d_max},   {"d_dentr", f.d_dentr}, {"e_dentr", f.e_dentr}};
}

void from_json(const nlohmann::json& j, GraphFeatures& f)
{
    j.at("n_rows").get_to(f.n_rows);
    j.at("n_nnzs").get_to(f.n_nnzs);
    j.at("nnz_den").get_to(f.nnz_den);
    j.at("nnz_mean").get_to(f.nnz_mean);
    j.at("d_min").get_to(f.d_min);
    j.at("d_max").get_to(f.d_max);
    j.at("d_dentr").get_to(f.d_dentr);
    j.at("e_dentr").get_to(f.e_dentr);
}

} // namespace sensei
