#include "sensei/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace sensei {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep))
        out.push_back(cur);
    return out;
}

using Triplet = CsrMatrix<double>::Triplet;

CsrMatrix<double> symmetric_unit(std::int64_t n, const std::vector<std::pair<std::int64_t, std::int64_t>>& edges)
{
    std::vector<Triplet> t;
    t.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
        if (u == v)
            continue;
        t.push_back({u, v, 1.0});
        t.push_back({v, u, 1.0});
    }
    // duplicates collapse to a single unit edge
    return CsrMatrix<double>::from_triplets(n, n, std::move(t)).filled(1.0);
}

} // namespace

CsrMatrix<double> read_matrix_market(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("matrix market: empty input");
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (lower(banner) != "%%matrixmarket" || lower(object) != "matrix")
        throw ParseError("matrix market: missing %%MatrixMarket matrix banner");
    if (lower(format) != "coordinate")
        throw ParseError("matrix market: only coordinate format is supported");
    field = lower(field);
    symmetry = lower(symmetry);
    const bool pattern = field == "pattern";
    if (!pattern && field != "real" && field != "integer" && field != "double")
        throw ParseError("matrix market: unsupported field '" + field + "'");
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general")
        throw ParseError("matrix market: unsupported symmetry '" + symmetry + "'");

    while (std::getline(in, line))
        if (!line.empty() && line[0] != '%')
            break;
    std::int64_t rows = 0, cols = 0, entries = 0;
    {
        std::istringstream size_line(line);
        if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
            throw ParseError("matrix market: bad size line '" + line + "'");
    }
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
    std::int64_t seen = 0;
    while (seen < entries && std::getline(in, line)) {
        if (line.empty() || line[0] == '%')
            continue;
        std::istringstream es(line);
        std::int64_t i = 0, j = 0;
        double v = 1.0;
        if (!(es >> i >> j) || (!pattern && !(es >> v)))
            throw ParseError("matrix market: bad entry '" + line + "'");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw ParseError("matrix market: entry out of range '" + line + "'");
        t.push_back({i - 1, j - 1, v});
        if (symmetric && i != j)
            t.push_back({j - 1, i - 1, v});
        ++seen;
    }
    if (seen != entries)
        throw ParseError("matrix market: expected " + std::to_string(entries) + " entries, got " + std::to_string(seen));
    return CsrMatrix<double>::from_triplets(rows, cols, std::move(t));
}

CsrMatrix<double> read_matrix_market_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const CsrMatrix<double>& a)
{
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto v = a.values();
    out << std::setprecision(17);
    for (Offset i = 0; i < a.rows(); ++i)
        for (Offset k = rp[i]; k < rp[i + 1]; ++k)
            out << i + 1 << ' ' << ci[k] + 1 << ' ' << v[k] << '\n';
}

bool all_unit_values(const CsrMatrix<double>& a)
{
    const auto v = a.values();
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 1.0; });
}

namespace gen {

CsrMatrix<double> path(std::int64_t n)
{
    std::vector<std::pair<std::int64_t, std::int64_t>> e;
    for (std::int64_t i = 0; i + 1 < n; ++i)
        e.emplace_back(i, i + 1);
    return symmetric_unit(n, e);
}

CsrMatrix<double> star(std::int64_t n)
{
    std::vector<std::pair<std::int64_t, std::int64_t>> e;
    for (std::int64_t i = 1; i < n; ++i)
        e.emplace_back(0, i);
    return symmetric_unit(n, e);
}

CsrMatrix<double> grid(std::int64_t rows, std::int64_t cols)
{
    std::vector<std::pair<std::int64_t, std::int64_t>> e;
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c) {
            const std::int64_t id = r * cols + c;
            if (c + 1 < cols)
                e.emplace_back(id, id + 1);
            if (r + 1 < rows)
                e.emplace_back(id, id + cols);
        }
    return symmetric_unit(rows * cols, e);
}

CsrMatrix<double> uniform(std::int64_t n, double avg_degree, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> node(0, std::max<std::int64_t>(n - 1, 0));
    const auto m = static_cast<std::int64_t>(std::llround(static_cast<double>(n) * avg_degree / 2.0));
    std::vector<std::pair<std::int64_t, std::int64_t>> e;
    e.reserve(static_cast<std::size_t>(m));
    if (n > 1)
        for (std::int64_t k = 0; k < m; ++k)
            e.emplace_back(node(rng), node(rng));
    return symmetric_unit(n, e);
}

CsrMatrix<double> power_law(std::int64_t n, double avg_degree, double exponent, std::uint64_t seed)
{
    // Chung-Lu: weight_i ~ (i + 1)^(-1/(exponent-1)), endpoints sampled proportionally to weight.
    std::mt19937_64 rng(seed);
    std::vector<double> w(static_cast<std::size_t>(n));
    const double beta = 1.0 / (exponent - 1.0);
    for (std::int64_t i = 0; i < n; ++i)
        w[i] = std::pow(static_cast<double>(i + 1), -beta);
    std::discrete_distribution<std::int64_t> pick(w.begin(), w.end());
    const auto m = static_cast<std::int64_t>(std::llround(static_cast<double>(n) * avg_degree / 2.0));
    std::vector<std::pair<std::int64_t, std::int64_t>> e;
    e.reserve(static_cast<std::size_t>(m));
    if (n > 1)
        for (std::int64_t k = 0; k < m; ++k)
            e.emplace_back(pick(rng), pick(rng));
    return symmetric_unit(n, e);
}

} // namespace gen

Graph make_generated(const std::string& spec)
{
    const auto parts = split(spec, ':');
    if (parts.size() < 3 || parts[0] != "gen")
        throw ParseError("graph spec '" + spec + "' is not of the form gen:<kind>:<params>");
    const std::string& kind = parts[1];
    auto num = [&](std::size_t idx, double fallback) {
        if (idx >= parts.size())
            return fallback;
        try {
            return std::stod(parts[idx]);
        } catch (const std::exception&) {
            throw ParseError("graph spec '" + spec + "': bad number '" + parts[idx] + "'");
        }
    };
    Graph g;
    g.id = spec;
    if (kind == "path") {
        g.adjacency = gen::path(static_cast<std::int64_t>(num(2, 0)));
    } else if (kind == "star") {
        g.adjacency = gen::star(static_cast<std::int64_t>(num(2, 0)));
    } else if (kind == "grid") {
        const auto dims = split(parts[2], 'x');
        if (dims.size() != 2)
            throw ParseError("graph spec '" + spec + "': grid needs RxC");
        g.adjacency = gen::grid(std::stoll(dims[0]), std::stoll(dims[1]));
    } else if (kind == "uniform") {
        g.adjacency = gen::uniform(static_cast<std::int64_t>(num(2, 0)), num(3, 4.0), static_cast<std::uint64_t>(num(4, 1)));
    } else if (kind == "powerlaw") {
        g.adjacency = gen::power_law(static_cast<std::int64_t>(num(2, 0)), num(3, 4.0), num(4, 2.5),
                                     static_cast<std::uint64_t>(num(5, 1)));
    } else {
        throw ParseError("graph spec '" + spec + "': unknown generator '" + kind + "'");
    }
    if (g.adjacency.rows() <= 0)
        throw DegenerateInputError("graph spec '" + spec + "' produced an empty graph");
    g.unweighted = true;
    return g;
}

Graph load_graph(const std::string& source)
{
    if (source.rfind("gen:", 0) == 0)
        return make_generated(source);
    Graph g;
    g.id = source;
    g.adjacency = read_matrix_market_file(source);
    g.unweighted = all_unit_values(g.adjacency);
    return g;
}

std::vector<std::string> bundled_graph_specs()
{
    return {"gen:path:4000", "gen:star:4000", "gen:grid:64x64", "gen:powerlaw:4000:8:2.3:7"};
}

} // namespace sensei
