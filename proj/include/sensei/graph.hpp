#ifndef SENSEI_GRAPH_HPP
#define SENSEI_GRAPH_HPP

#include "sensei/csr.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sensei {

/// An ingested input graph. `unweighted` is set when every stored value is exactly 1,
/// which lets the dynamic GCN composition skip edge values entirely.
struct Graph {
    std::string id;
    CsrMatrix<double> adjacency;
    bool unweighted = true;
};

/// Reads a Matrix Market coordinate file. Indices are 1-based; `pattern` entries get value 1;
/// duplicates are summed; `symmetric` input is mirrored.
CsrMatrix<double> read_matrix_market(std::istream& in);
CsrMatrix<double> read_matrix_market_file(const std::string& path);

/// Writes a general real coordinate file.
void write_matrix_market(std::ostream& out, const CsrMatrix<double>& a);

/// True when every stored value equals 1.
bool all_unit_values(const CsrMatrix<double>& a);

/// Loads a graph from a `.mtx` path or from a generator spec (`gen:<kind>:...`, see make_generated).
Graph load_graph(const std::string& source);

namespace gen {

CsrMatrix<double> path(std::int64_t n);
CsrMatrix<double> star(std::int64_t n);
CsrMatrix<double> grid(std::int64_t rows, std::int64_t cols);
/// Uniform random undirected graph with roughly `avg_degree` neighbours per node.
CsrMatrix<double> uniform(std::int64_t n, double avg_degree, std::uint64_t seed);
/// Chung-Lu graph with power-law expected degrees (exponent > 2) and the given mean degree.
CsrMatrix<double> power_law(std::int64_t n, double avg_degree, double exponent, std::uint64_t seed);

} // namespace gen

/// Parses `gen:path:N`, `gen:star:N`, `gen:grid:RxC`, `gen:uniform:N:DEG[:SEED]`,
/// `gen:powerlaw:N:DEG[:EXP[:SEED]]`.
Graph make_generated(const std::string& spec);

/// The small built-in graphs used by `bench` and the overhead checks.
std::vector<std::string> bundled_graph_specs();

} // namespace sensei

#endif // SENSEI_GRAPH_HPP
