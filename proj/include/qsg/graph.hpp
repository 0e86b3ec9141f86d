#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qsg {

// Undirected edge stored with tail < head. Incidence entries are +1 at the
// tail and -1 at the head.
struct Edge {
    std::size_t tail;
    std::size_t head;
    double weight;
};

class WeightedGraph {
public:
    // Validates and orients every edge from the lower to the higher vertex
    // index. Rejects self-loops, parallel edges, non-positive weights and
    // out-of-range vertices. Edge order is preserved.
    WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges);

    std::size_t vertex_count() const { return vertex_count_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t i) const { return edges_.at(i); }
    std::vector<double> weights() const;

    // W = sum of squared weights.
    double weight_norm_squared() const;

    // Edge indices touching vertex r.
    const std::vector<std::size_t>& incident_edges(std::size_t r) const { return incident_.at(r); }

    bool shares_vertex(std::size_t i, std::size_t j) const;

    static WeightedGraph path(std::size_t vertices);
    static WeightedGraph cycle(std::size_t vertices);
    static WeightedGraph star(std::size_t vertices);
    // Connected when edges >= vertices - 1 (a random spanning tree is laid
    // down first). Weights uniform in [0.5, 2.0).
    static WeightedGraph random(std::size_t vertices, std::size_t edges, std::uint64_t seed);

private:
    std::size_t vertex_count_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> incident_;
};

// Text format: first record `M N`, then N records `r s b`. `#` starts a
// comment; blank lines are ignored. Errors carry the 1-based line number.
WeightedGraph read_graph(std::istream& in);
WeightedGraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const WeightedGraph& graph);

// `path:M`, `cycle:M`, `star:M` or `rand:M,N,seed`.
WeightedGraph generate_graph(std::string_view spec);

// Bit vector d over edges; d_i = 1 marks edge i as removed.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::vector<std::uint8_t> removed);

    static Configuration none_removed(std::size_t edges);
    // Bit i of `index` is d_i.
    static Configuration from_index(std::size_t edges, std::uint64_t index);
    // Parses "d_0 d_1 ... d_{N-1}" written without separators.
    static Configuration from_string(std::string_view bits);

    std::size_t size() const { return removed_.size(); }
    std::size_t popcount() const;
    bool removed(std::size_t i) const { return removed_.at(i) != 0; }
    bool active(std::size_t i) const { return !removed(i); }
    std::vector<std::size_t> removed_edges() const;
    const std::vector<std::uint8_t>& bits() const { return removed_; }

    std::uint64_t to_index() const;
    std::string to_string() const;        // d_0 d_1 ...
    std::string to_tilde_string() const;  // 1 - d, same order

    auto operator<=>(const Configuration&) const = default;

private:
    std::vector<std::uint8_t> removed_;
};

std::uint64_t binomial(std::size_t n, std::size_t k);

// Weight-x configurations of length N in lexicographic order of the bit
// string d_0 d_1 ... d_{N-1}. Each range owns its cursor.
class ConfigurationRange {
public:
    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = Configuration;
        using difference_type = std::ptrdiff_t;
        using pointer = const Configuration*;
        using reference = const Configuration&;

        iterator() = default;
        iterator(std::vector<std::uint8_t> bits, bool done);

        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        iterator& operator++();
        iterator operator++(int);
        bool operator==(const iterator& other) const;

    private:
        std::vector<std::uint8_t> bits_;
        Configuration current_;
        bool done_ = true;
    };

    ConfigurationRange(std::size_t edges, std::size_t removed);

    iterator begin() const;
    iterator end() const { return {}; }
    std::uint64_t size() const { return binomial(edges_, removed_); }

private:
    std::size_t edges_;
    std::size_t removed_;
};

ConfigurationRange enumerate_configurations(std::size_t edges, std::size_t removed);
std::vector<Configuration> all_configurations(std::size_t edges, std::size_t removed);

class IncidenceMatrix {
public:
    struct Entry {
        std::size_t row;
        int value;
    };

    explicit IncidenceMatrix(const WeightedGraph& graph);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }
    // The two nonzeros of column i: (+1 at tail, -1 at head).
    const std::array<Entry, 2>& column(std::size_t i) const { return columns_.at(i); }
    int operator()(std::size_t row, std::size_t col) const;
    // v_i^T v_j
    int column_dot(std::size_t i, std::size_t j) const;
    Eigen::MatrixXd dense() const;

private:
    std::size_t rows_;
    std::vector<std::array<Entry, 2>> columns_;
};

IncidenceMatrix build_incidence(const WeightedGraph& graph);

// Graphs with at most this many vertices get dense Laplacians.
inline constexpr std::size_t kDenseVertexLimit = 64;

class Laplacian {
public:
    Laplacian(const WeightedGraph& graph, const Configuration& config);

    std::size_t size() const { return size_; }
    bool is_sparse() const { return sparse_; }
    double operator()(std::size_t r, std::size_t s) const;
    Eigen::MatrixXd dense() const;
    const Eigen::SparseMatrix<double>& sparse() const { return sparse_matrix_; }

    // ||this - other||_F^2, elementwise.
    double frobenius_distance_squared(const Laplacian& other) const;

private:
    std::size_t size_;
    bool sparse_;
    Eigen::MatrixXd dense_matrix_;
    Eigen::SparseMatrix<double> sparse_matrix_;
};

Laplacian build_laplacian(const WeightedGraph& graph);
Laplacian build_laplacian(const WeightedGraph& graph, const Configuration& config);

// Q_ij = b_i b_j (v_i^T v_j)^2
class QMatrix {
public:
    explicit QMatrix(const WeightedGraph& graph);

    const Eigen::MatrixXd& matrix() const { return q_; }
    double operator()(std::size_t i, std::size_t j) const {
        return q_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    // d^T Q d
    double quadratic(const Configuration& config) const;

private:
    Eigen::MatrixXd q_;
};

QMatrix build_q_matrix(const WeightedGraph& graph);

// ||B - B^d~||_F^2 through explicit Laplacians.
double frobenius_distance_dense(const WeightedGraph& graph, const Configuration& config);
double frobenius_distance_dense(const WeightedGraph& graph, const Configuration& config,
                                std::size_t removed);
// Same quantity from the removed edges alone, O(x) work.
double frobenius_distance_sparse(const WeightedGraph& graph, const Configuration& config);
double frobenius_distance_sparse(const WeightedGraph& graph, const Configuration& config,
                                 std::size_t removed);

struct ArgminResult {
    Configuration config;
    double distance;
};

// Exhaustive search; ties go to the lexicographically smallest d.
ArgminResult argmin_bruteforce(const WeightedGraph& graph, std::size_t removed);

// a^T B^d~ a = sum_i b_i d~_i (a^T v_i)^2
double quadratic_form_classical(const WeightedGraph& graph, const Configuration& config,
                                std::span<const double> a);

}  // namespace qsg
