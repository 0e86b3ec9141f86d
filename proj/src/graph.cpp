#include "qsg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>
#include <utility>

#include "qsg/error.hpp"

namespace qsg {

WeightedGraph::WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)), incident_(vertex_count) {
    if (vertex_count_ == 0) {
        throw InvalidArgument("graph needs at least one vertex");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        Edge& e = edges_[i];
        if (e.tail >= vertex_count_ || e.head >= vertex_count_) {
            throw InvalidArgument("edge " + std::to_string(i) + " references a vertex outside [0, " +
                                  std::to_string(vertex_count_) + ")");
        }
        if (e.tail == e.head) {
            throw InvalidArgument("edge " + std::to_string(i) + " is a self-loop");
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw InvalidArgument("edge " + std::to_string(i) + " has a non-positive weight");
        }
        if (e.tail > e.head) {
            std::swap(e.tail, e.head);
        }
        if (!seen.emplace(e.tail, e.head).second) {
            throw InvalidArgument("edge " + std::to_string(i) + " is parallel to an earlier edge");
        }
        incident_[e.tail].push_back(i);
        incident_[e.head].push_back(i);
    }
}

std::vector<double> WeightedGraph::weights() const {
    std::vector<double> out;
    out.reserve(edges_.size());
    for (const Edge& e : edges_) {
        out.push_back(e.weight);
    }
    return out;
}

double WeightedGraph::weight_norm_squared() const {
    double w = 0.0;
    for (const Edge& e : edges_) {
        w += e.weight * e.weight;
    }
    return w;
}

bool WeightedGraph::shares_vertex(std::size_t i, std::size_t j) const {
    const Edge& a = edge(i);
    const Edge& b = edge(j);
    return a.tail == b.tail || a.tail == b.head || a.head == b.tail || a.head == b.head;
}

WeightedGraph WeightedGraph::path(std::size_t vertices) {
    if (vertices < 2) {
        throw InvalidArgument("path graph needs at least 2 vertices");
    }
    std::vector<Edge> edges;
    for (std::size_t r = 0; r + 1 < vertices; ++r) {
        edges.push_back({r, r + 1, 1.0});
    }
    return WeightedGraph(vertices, std::move(edges));
}

WeightedGraph WeightedGraph::cycle(std::size_t vertices) {
    if (vertices < 3) {
        throw InvalidArgument("cycle graph needs at least 3 vertices");
    }
    std::vector<Edge> edges;
    for (std::size_t r = 0; r + 1 < vertices; ++r) {
        edges.push_back({r, r + 1, 1.0});
    }
    edges.push_back({0, vertices - 1, 1.0});
    return WeightedGraph(vertices, std::move(edges));
}

WeightedGraph WeightedGraph::star(std::size_t vertices) {
    if (vertices < 2) {
        throw InvalidArgument("star graph needs at least 2 vertices");
    }
    std::vector<Edge> edges;
    for (std::size_t r = 1; r < vertices; ++r) {
        edges.push_back({0, r, 1.0});
    }
    return WeightedGraph(vertices, std::move(edges));
}

WeightedGraph WeightedGraph::random(std::size_t vertices, std::size_t edges, std::uint64_t seed) {
    if (vertices < 2) {
        throw InvalidArgument("random graph needs at least 2 vertices");
    }
    const std::size_t max_edges = vertices * (vertices - 1) / 2;
    if (edges > max_edges) {
        throw InvalidArgument("random graph: " + std::to_string(edges) + " edges exceed the " +
                              std::to_string(max_edges) + " vertex pairs");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> weight(0.5, 2.0);
    std::set<std::pair<std::size_t, std::size_t>> used;
    std::vector<Edge> out;

    std::vector<std::size_t> order(vertices);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 1; k < vertices && out.size() < edges; ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, k - 1);
        std::size_t a = order[k];
        std::size_t b = order[pick(rng)];
        used.emplace(std::min(a, b), std::max(a, b));
        out.push_back({a, b, weight(rng)});
    }
    std::uniform_int_distribution<std::size_t> vertex(0, vertices - 1);
    while (out.size() < edges) {
        std::size_t a = vertex(rng);
        std::size_t b = vertex(rng);
        if (a == b || !used.emplace(std::min(a, b), std::max(a, b)).second) {
            continue;
        }
        out.push_back({a, b, weight(rng)});
    }
    return WeightedGraph(vertices, std::move(out));
}

// ---------------------------------------------------------------------------

Configuration::Configuration(std::vector<std::uint8_t> removed) : removed_(std::move(removed)) {
    for (auto& b : removed_) {
        b = b != 0 ? 1 : 0;
    }
}

Configuration Configuration::none_removed(std::size_t edges) {
    return Configuration(std::vector<std::uint8_t>(edges, 0));
}

Configuration Configuration::from_index(std::size_t edges, std::uint64_t index) {
    if (edges < 64 && (index >> edges) != 0) {
        throw InvalidArgument("configuration index has bits beyond the edge count");
    }
    std::vector<std::uint8_t> bits(edges, 0);
    for (std::size_t i = 0; i < edges && i < 64; ++i) {
        bits[i] = static_cast<std::uint8_t>((index >> i) & 1U);
    }
    return Configuration(std::move(bits));
}

Configuration Configuration::from_string(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw InvalidArgument("configuration string may only contain 0 and 1");
        }
        bits.push_back(c == '1' ? 1 : 0);
    }
    return Configuration(std::move(bits));
}

std::size_t Configuration::popcount() const {
    return static_cast<std::size_t>(std::count(removed_.begin(), removed_.end(), 1));
}

std::vector<std::size_t> Configuration::removed_edges() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < removed_.size(); ++i) {
        if (removed_[i] != 0) {
            out.push_back(i);
        }
    }
    return out;
}

std::uint64_t Configuration::to_index() const {
    if (removed_.size() > 63) {
        throw InvalidArgument("configuration too long for a basis index");
    }
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < removed_.size(); ++i) {
        index |= static_cast<std::uint64_t>(removed_[i]) << i;
    }
    return index;
}

std::string Configuration::to_string() const {
    std::string s;
    s.reserve(removed_.size());
    for (auto b : removed_) {
        s.push_back(b != 0 ? '1' : '0');
    }
    return s;
}

std::string Configuration::to_tilde_string() const {
    std::string s;
    s.reserve(removed_.size());
    for (auto b : removed_) {
        s.push_back(b != 0 ? '0' : '1');
    }
    return s;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned __int128 result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        if (result > std::numeric_limits<std::uint64_t>::max()) {
            throw InvalidArgument("binomial coefficient overflows 64 bits");
        }
    }
    return static_cast<std::uint64_t>(result);
}

ConfigurationRange::iterator::iterator(std::vector<std::uint8_t> bits, bool done)
    : bits_(std::move(bits)), current_(bits_), done_(done) {}

ConfigurationRange::iterator& ConfigurationRange::iterator::operator++() {
    if (!std::next_permutation(bits_.begin(), bits_.end())) {
        done_ = true;
        bits_.clear();
        current_ = Configuration();
    } else {
        current_ = Configuration(bits_);
    }
    return *this;
}

ConfigurationRange::iterator ConfigurationRange::iterator::operator++(int) {
    iterator copy = *this;
    ++*this;
    return copy;
}

bool ConfigurationRange::iterator::operator==(const iterator& other) const {
    if (done_ || other.done_) {
        return done_ == other.done_;
    }
    return bits_ == other.bits_;
}

ConfigurationRange::ConfigurationRange(std::size_t edges, std::size_t removed)
    : edges_(edges), removed_(removed) {
    if (removed > edges) {
        throw CardinalityError("x = " + std::to_string(removed) + " exceeds N = " +
                               std::to_string(edges));
    }
}

ConfigurationRange::iterator ConfigurationRange::begin() const {
    std::vector<std::uint8_t> bits(edges_, 0);
    std::fill(bits.end() - static_cast<std::ptrdiff_t>(removed_), bits.end(), 1);
    return iterator(std::move(bits), false);
}

ConfigurationRange enumerate_configurations(std::size_t edges, std::size_t removed) {
    return ConfigurationRange(edges, removed);
}

std::vector<Configuration> all_configurations(std::size_t edges, std::size_t removed) {
    std::vector<Configuration> out;
    for (const Configuration& c : enumerate_configurations(edges, removed)) {
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------

IncidenceMatrix::IncidenceMatrix(const WeightedGraph& graph) : rows_(graph.vertex_count()) {
    columns_.reserve(graph.edge_count());
    for (const Edge& e : graph.edges()) {
        columns_.push_back({Entry{e.tail, +1}, Entry{e.head, -1}});
    }
}

int IncidenceMatrix::operator()(std::size_t row, std::size_t col) const {
    for (const Entry& entry : column(col)) {
        if (entry.row == row) {
            return entry.value;
        }
    }
    return 0;
}

int IncidenceMatrix::column_dot(std::size_t i, std::size_t j) const {
    int dot = 0;
    for (const Entry& a : column(i)) {
        for (const Entry& b : column(j)) {
            if (a.row == b.row) {
                dot += a.value * b.value;
            }
        }
    }
    return dot;
}

Eigen::MatrixXd IncidenceMatrix::dense() const {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                              static_cast<Eigen::Index>(cols()));
    for (std::size_t c = 0; c < cols(); ++c) {
        for (const Entry& entry : columns_[c]) {
            e(static_cast<Eigen::Index>(entry.row), static_cast<Eigen::Index>(c)) = entry.value;
        }
    }
    return e;
}

IncidenceMatrix build_incidence(const WeightedGraph& graph) { return IncidenceMatrix(graph); }

// ---------------------------------------------------------------------------

Laplacian::Laplacian(const WeightedGraph& graph, const Configuration& config)
    : size_(graph.vertex_count()), sparse_(graph.vertex_count() > kDenseVertexLimit) {
    if (config.size() != graph.edge_count()) {
        throw InvalidArgument("configuration length differs from the edge count");
    }
    const auto n = static_cast<Eigen::Index>(size_);
    if (!sparse_) {
        dense_matrix_ = Eigen::MatrixXd::Zero(n, n);
    }
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t i = 0; i < graph.edge_count(); ++i) {
        if (config.removed(i)) {
            continue;
        }
        const Edge& e = graph.edge(i);
        const auto r = static_cast<Eigen::Index>(e.tail);
        const auto s = static_cast<Eigen::Index>(e.head);
        if (sparse_) {
            triplets.emplace_back(r, r, e.weight);
            triplets.emplace_back(s, s, e.weight);
            triplets.emplace_back(r, s, -e.weight);
            triplets.emplace_back(s, r, -e.weight);
        } else {
            dense_matrix_(r, r) += e.weight;
            dense_matrix_(s, s) += e.weight;
            dense_matrix_(r, s) -= e.weight;
            dense_matrix_(s, r) -= e.weight;
        }
    }
    if (sparse_) {
        sparse_matrix_.resize(n, n);
        sparse_matrix_.setFromTriplets(triplets.begin(), triplets.end());
    }
}

double Laplacian::operator()(std::size_t r, std::size_t s) const {
    if (sparse_) {
        return sparse_matrix_.coeff(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
    }
    return dense_matrix_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
}

Eigen::MatrixXd Laplacian::dense() const {
    if (sparse_) {
        return Eigen::MatrixXd(sparse_matrix_);
    }
    return dense_matrix_;
}

double Laplacian::frobenius_distance_squared(const Laplacian& other) const {
    if (other.size_ != size_) {
        throw InvalidArgument("Laplacians of different sizes");
    }
    if (sparse_ && other.sparse_) {
        Eigen::SparseMatrix<double> diff = sparse_matrix_ - other.sparse_matrix_;
        return diff.squaredNorm();
    }
    return (dense() - other.dense()).squaredNorm();
}

Laplacian build_laplacian(const WeightedGraph& graph) {
    return Laplacian(graph, Configuration::none_removed(graph.edge_count()));
}

Laplacian build_laplacian(const WeightedGraph& graph, const Configuration& config) {
    return Laplacian(graph, config);
}

QMatrix::QMatrix(const WeightedGraph& graph) {
    const IncidenceMatrix incidence(graph);
    const auto n = static_cast<Eigen::Index>(graph.edge_count());
    q_ = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < graph.edge_count(); ++i) {
        for (std::size_t j = 0; j < graph.edge_count(); ++j) {
            const int dot = incidence.column_dot(i, j);
            q_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                graph.edge(i).weight * graph.edge(j).weight * dot * dot;
        }
    }
}

double QMatrix::quadratic(const Configuration& config) const {
    if (static_cast<Eigen::Index>(config.size()) != q_.rows()) {
        throw InvalidArgument("configuration length differs from the edge count");
    }
    const auto removed = config.removed_edges();
    double total = 0.0;
    for (std::size_t i : removed) {
        for (std::size_t j : removed) {
            total += q_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return total;
}

QMatrix build_q_matrix(const WeightedGraph& graph) { return QMatrix(graph); }

namespace {

void check_cardinality(const WeightedGraph& graph, const Configuration& config,
                       std::size_t removed) {
    if (config.size() != graph.edge_count()) {
        throw InvalidArgument("configuration length differs from the edge count");
    }
    if (config.popcount() != removed) {
        throw CardinalityError("configuration removes " + std::to_string(config.popcount()) +
                               " edges, expected " + std::to_string(removed));
    }
}

}  // namespace

double frobenius_distance_dense(const WeightedGraph& graph, const Configuration& config) {
    return build_laplacian(graph).frobenius_distance_squared(build_laplacian(graph, config));
}

double frobenius_distance_dense(const WeightedGraph& graph, const Configuration& config,
                                std::size_t removed) {
    check_cardinality(graph, config, removed);
    return frobenius_distance_dense(graph, config);
}

double frobenius_distance_sparse(const WeightedGraph& graph, const Configuration& config) {
    if (config.size() != graph.edge_count()) {
        throw InvalidArgument("configuration length differs from the edge count");
    }
    // Removed-edge weight accumulated per touched vertex.
    std::unordered_map<std::size_t, double> degree;
    double off_diagonal = 0.0;
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (!config.removed(i)) {
            continue;
        }
        const Edge& e = graph.edge(i);
        degree[e.tail] += e.weight;
        degree[e.head] += e.weight;
        off_diagonal += 2.0 * e.weight * e.weight;
    }
    double diagonal = 0.0;
    for (const auto& [vertex, sum] : degree) {
        diagonal += sum * sum;
    }
    return diagonal + off_diagonal;
}

double frobenius_distance_sparse(const WeightedGraph& graph, const Configuration& config,
                                 std::size_t removed) {
    check_cardinality(graph, config, removed);
    return frobenius_distance_sparse(graph, config);
}

ArgminResult argmin_bruteforce(const WeightedGraph& graph, std::size_t removed) {
    ArgminResult best{Configuration(), std::numeric_limits<double>::infinity()};
    for (const Configuration& c : enumerate_configurations(graph.edge_count(), removed)) {
        const double distance = frobenius_distance_sparse(graph, c);
        // Strict comparison keeps the lexicographically first minimizer.
        if (distance < best.distance) {
            best = {c, distance};
        }
    }
    return best;
}

double quadratic_form_classical(const WeightedGraph& graph, const Configuration& config,
                                std::span<const double> a) {
    if (a.size() != graph.vertex_count()) {
        throw InvalidArgument("vector length " + std::to_string(a.size()) +
                              " differs from the vertex count " +
                              std::to_string(graph.vertex_count()));
    }
    if (config.size() != graph.edge_count()) {
        throw InvalidArgument("configuration length differs from the edge count");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < graph.edge_count(); ++i) {
        if (config.removed(i)) {
            continue;
        }
        const Edge& e = graph.edge(i);
        const double projection = a[e.tail] - a[e.head];
        total += e.weight * projection * projection;
    }
    return total;
}

}  // namespace qsg
