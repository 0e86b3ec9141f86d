#include "qsg/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qsg/error.hpp"

namespace qsg {

std::size_t ceil_log2(std::size_t v) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < v) {
        ++bits;
    }
    return bits;
}

RegisterDims register_dims(std::size_t edges, std::size_t vertices) {
    if (edges == 0 || vertices < 2) {
        throw InvalidArgument("instance needs at least one edge and two vertices");
    }
    RegisterDims d;
    d.edges = edges;
    d.vertices = vertices;
    d.n = ceil_log2(edges);
    d.m = ceil_log2(vertices);
    d.k = std::max(d.n, d.m);
    d.reg = 2 * d.k + 1;
    d.a_E = d.reg - d.n;
    d.a_V = d.reg - d.m;
    return d;
}

RegisterDims register_dims(const WeightedGraph& graph) {
    return register_dims(graph.edge_count(), graph.vertex_count());
}

RegisterLayout psi_layout(const RegisterDims& dims, std::size_t phase_bits) {
    RegisterLayout layout;
    layout.add("dicke", dims.edges).add("edge1", dims.reg).add("edge2", dims.reg).add("flag", 1);
    if (phase_bits > 0) {
        layout.add("phase", phase_bits);
    }
    return layout;
}

// ---------------------------------------------------------------------------

Circuit dicke_prepare(std::size_t N, std::size_t x) {
    if (x > N) {
        throw CardinalityError("Hamming weight " + std::to_string(x) + " exceeds " +
                               std::to_string(N) + " qubits");
    }
    Circuit c(N);
    for (std::size_t q = N - x; q < N; ++q) {
        c.x(q);
    }
    if (x == 0 || x == N) {
        return c;
    }
    // SCS_{l,kk} on qubits [0, l), from l = N down to 2.
    for (std::size_t l = N; l >= 2; --l) {
        const std::size_t kk = std::min(x, l - 1);
        const double ln = static_cast<double>(l);
        {
            const std::size_t a = l - 2;
            const std::size_t b = l - 1;
            c.cx(a, b);
            c.cry(b, a, 2.0 * std::acos(std::sqrt(1.0 / ln)));
            c.cx(a, b);
        }
        for (std::size_t ell = 2; ell <= kk; ++ell) {
            const std::size_t a = l - 1 - ell;
            const std::size_t mid = l - ell;
            const std::size_t b = l - 1;
            c.cx(a, b);
            c.mcry({{b, true}, {mid, true}}, a, 2.0 * std::acos(std::sqrt(ell / ln)));
            c.cx(a, b);
        }
    }
    return c;
}

Circuit hadamard_topology(std::size_t n) {
    Circuit c(n);
    for (std::size_t q = 0; q < n; ++q) {
        c.h(q);
    }
    return c;
}

Circuit uniformly_controlled_ry(std::span<const double> angles,
                                const std::vector<std::size_t>& controls, std::size_t target,
                                std::size_t num_qubits, double tol) {
    const std::size_t q = controls.size();
    const std::size_t count = std::size_t{1} << q;
    if (angles.size() != count) {
        throw InvalidArgument("multiplexor needs 2^" + std::to_string(q) + " angles");
    }
    Circuit c(num_qubits);
    if (q == 0) {
        if (std::abs(angles[0]) > tol) {
            c.ry(target, angles[0]);
        }
        return c;
    }

    // phi_l = 2^-q sum_c (-1)^{popcount(c & gray(l))} theta_c, via a
    // Walsh-Hadamard transform indexed by mask followed by a Gray reorder.
    std::vector<double> w(angles.begin(), angles.end());
    for (std::size_t len = 1; len < count; len <<= 1) {
        for (std::size_t i = 0; i < count; i += 2 * len) {
            for (std::size_t j = i; j < i + len; ++j) {
                const double u = w[j];
                const double v = w[j + len];
                w[j] = u + v;
                w[j + len] = u - v;
            }
        }
    }
    std::size_t pending = 0;  // parity toggles not yet emitted
    for (std::size_t l = 0; l < count; ++l) {
        const std::size_t gray = l ^ (l >> 1);
        const double phi = w[gray] / static_cast<double>(count);
        if (std::abs(phi) > tol) {
            for (std::size_t t = 0; t < q; ++t) {
                if ((pending >> t) & 1U) {
                    c.cx(controls[t], target);
                }
            }
            pending = 0;
            c.ry(target, phi);
        }
        const std::size_t next = (l + 1) % count;
        const std::size_t flip = gray ^ (next ^ (next >> 1));
        pending ^= flip;
    }
    for (std::size_t t = 0; t < q; ++t) {
        if ((pending >> t) & 1U) {
            c.cx(controls[t], target);
        }
    }
    return c;
}

Circuit amplitude_encode(std::span<const double> values, std::size_t n) {
    const std::size_t dim = std::size_t{1} << n;
    if (values.empty()) {
        throw InvalidArgument("cannot encode an empty vector");
    }
    if (values.size() > dim) {
        throw InvalidArgument("vector of length " + std::to_string(values.size()) +
                              " does not fit " + std::to_string(n) + " qubits");
    }
    std::vector<double> v(dim, 0.0);
    std::copy(values.begin(), values.end(), v.begin());
    double norm = 0.0;
    for (double e : v) {
        norm += e * e;
    }
    if (!(norm > 0.0)) {
        throw InvalidArgument("cannot encode a zero vector");
    }

    Circuit c(n);
    // Qubit n-1-t is set conditioned on the t higher bits.
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t qubit = n - 1 - t;
        const std::size_t prefixes = std::size_t{1} << t;
        const std::size_t block = dim >> t;  // entries sharing one prefix
        const std::size_t half = block / 2;
        std::vector<double> angles(prefixes);
        for (std::size_t p = 0; p < prefixes; ++p) {
            const std::size_t base = p * block;
            if (t + 1 == n) {
                angles[p] = 2.0 * std::atan2(v[base + 1], v[base]);
            } else {
                double m0 = 0.0;
                double m1 = 0.0;
                for (std::size_t j = 0; j < half; ++j) {
                    m0 += v[base + j] * v[base + j];
                    m1 += v[base + half + j] * v[base + half + j];
                }
                angles[p] = 2.0 * std::atan2(std::sqrt(m1), std::sqrt(m0));
            }
        }
        // Prefix p counts from the top bit down: bit t-1-s of p is qubit n-1-s.
        // Reindex so bit s of the multiplexor index is controls[s].
        std::vector<std::size_t> controls(t);
        std::vector<double> reindexed(prefixes);
        for (std::size_t s = 0; s < t; ++s) {
            controls[s] = n - t + s;
        }
        for (std::size_t p = 0; p < prefixes; ++p) {
            reindexed[p] = angles[p];
        }
        c.append(uniformly_controlled_ry(reindexed, controls, qubit, n));
    }
    return c;
}

Circuit amplitude_encode_weights(std::span<const double> weights, const RegisterDims& dims) {
    if (weights.empty()) {
        throw InvalidArgument("empty weight vector");
    }
    for (double b : weights) {
        if (!(b > 0.0)) {
            throw InvalidArgument("weights must be positive");
        }
    }
    const RegisterLayout layout = psi_layout(dims);
    Circuit c(layout.total_qubits());
    if (dims.n == 0) {
        return c;
    }
    std::vector<std::size_t> map(dims.n);
    for (std::size_t t = 0; t < dims.n; ++t) {
        map[t] = layout.qubit("edge1", t);
    }
    c.append_mapped(amplitude_encode(weights, dims.n), map);
    for (std::size_t t = 0; t < dims.n; ++t) {
        c.cx(layout.qubit("edge1", t), layout.qubit("edge2", t));
    }
    return c;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd BlockEncoding::extract_block() const {
    const std::size_t K = std::size_t{1} << k;
    RegisterLayout layout;
    layout.add("q", num_qubits());
    Eigen::MatrixXcd out(K, K);
    for (std::size_t j = 0; j < K; ++j) {
        Statevector s = Statevector::basis(layout, j, num_qubits());
        circuit.apply(s);
        for (std::size_t i = 0; i < K; ++i) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s[i];
        }
    }
    return out;
}

BlockEncoding block_encode_matrix(const Eigen::MatrixXd& a, std::size_t cap) {
    const auto K = static_cast<std::size_t>(a.rows());
    if (K == 0 || static_cast<std::size_t>(a.cols()) != K || (K & (K - 1)) != 0) {
        throw InvalidArgument("block encoding needs a nonempty 2^k-square matrix");
    }
    const std::size_t k = ceil_log2(K);
    if (2 * k + 1 > cap) {
        throw ResourceCapError(2 * k + 1, cap, "block encoding");
    }
    if (a.cwiseAbs().maxCoeff() > 1.0 + 1e-12) {
        throw InvalidArgument("block-encoded entries must lie in [-1, 1]");
    }

    BlockEncoding be;
    be.k = k;
    be.alpha = static_cast<double>(K);
    be.target = a;
    be.circuit = Circuit(2 * k + 1);

    std::vector<std::size_t> data(k);
    std::vector<std::size_t> scratch(k);
    for (std::size_t t = 0; t < k; ++t) {
        data[t] = t;
        scratch[t] = k + t;
    }
    const std::size_t anc = 2 * k;

    for (std::size_t q : scratch) {
        be.circuit.h(q);
    }
    // Control index c = column + K * row (data holds the column, scratch the row).
    std::vector<std::size_t> controls = data;
    controls.insert(controls.end(), scratch.begin(), scratch.end());
    std::vector<double> angles(K * K);
    for (std::size_t row = 0; row < K; ++row) {
        for (std::size_t col = 0; col < K; ++col) {
            const double v = std::clamp(a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)), -1.0, 1.0);
            angles[col + K * row] = 2.0 * std::acos(v);
        }
    }
    be.circuit.append(uniformly_controlled_ry(angles, controls, anc, 2 * k + 1));
    for (std::size_t t = 0; t < k; ++t) {
        be.circuit.swap(data[t], scratch[t]);
    }
    for (std::size_t q : scratch) {
        be.circuit.h(q);
    }

    const Eigen::MatrixXcd block = be.extract_block();
    be.error = (block - a.cast<amplitude>() / be.alpha).cwiseAbs().maxCoeff();
    return be;
}

BlockEncoding block_encode_incidence(const IncidenceMatrix& incidence, std::size_t cap) {
    const RegisterDims dims = register_dims(incidence.cols(), incidence.rows());
    const std::size_t K = std::size_t{1} << dims.k;
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    padded.topLeftCorner(static_cast<Eigen::Index>(incidence.rows()), static_cast<Eigen::Index>(incidence.cols())) =
        incidence.dense();
    return block_encode_matrix(padded, cap);
}

// ---------------------------------------------------------------------------

namespace {

// Controls matching the low `bits` bits of `value` on the given qubits.
void push_pattern(std::vector<Control>& controls, const std::vector<std::size_t>& qubits,
                  std::size_t bits, std::size_t value) {
    for (std::size_t t = 0; t < bits; ++t) {
        controls.push_back({qubits[t], ((value >> t) & 1U) != 0});
    }
}

}  // namespace

RegisterLayout rse_layout(const RegisterDims& dims) {
    RegisterLayout layout;
    layout.add("topo", dims.n).add("edge1", dims.reg).add("flag", 1);
    return layout;
}

Circuit remove_single_edge(const RegisterDims& dims) {
    const RegisterLayout layout = rse_layout(dims);
    Circuit c(layout.total_qubits());
    const auto topo = layout.qubits("topo");
    const auto edge = layout.qubits("edge1");
    const std::size_t flag = layout.qubit("flag", 0);
    for (std::size_t i = 0; i < dims.edges; ++i) {
        std::vector<Control> controls;
        push_pattern(controls, topo, dims.n, i);
        push_pattern(controls, edge, dims.n, i);
        c.mcx(std::move(controls), flag);
    }
    return c;
}

Circuit remove_multiple_edges(const RegisterDims& dims) {
    const RegisterLayout layout = psi_layout(dims);
    Circuit c(layout.total_qubits());
    const auto edge = layout.qubits("edge1");
    const std::size_t flag = layout.qubit("flag", 0);
    for (std::size_t i = 0; i < dims.edges; ++i) {
        std::vector<Control> controls{{layout.qubit("dicke", i), true}};
        push_pattern(controls, edge, dims.n, i);
        c.mcx(std::move(controls), flag);
    }
    return c;
}

Circuit build_cuf(const WeightedGraph& graph, const RegisterDims& dims, const BlockEncoding& be) {
    if (be.num_qubits() != dims.reg) {
        throw InvalidArgument("block encoding width does not match the edge registers");
    }
    const RegisterLayout layout = psi_layout(dims);
    Circuit c(layout.total_qubits());
    const std::vector<double> w = graph.weights();
    c.append(amplitude_encode_weights(w, dims));
    c.append(remove_multiple_edges(dims));
    c.append_mapped(be.circuit, layout.qubits("edge1"));
    c.append_mapped(be.circuit, layout.qubits("edge2"));
    return c;
}

// ---------------------------------------------------------------------------

const Statevector& PreparedState::state() const {
    if (!state_) {
        throw InvalidArgument("prepared state is held blockwise; no dense statevector");
    }
    return *state_;
}

std::vector<amplitude> PreparedState::branch(const Configuration& d) const {
    if (d.size() != dims_.edges) {
        throw InvalidArgument("configuration length does not match the instance");
    }
    const std::size_t R = std::size_t{1} << dims_.reg;
    std::vector<amplitude> out(2 * R * R, amplitude(0.0, 0.0));
    if (state_) {
        const std::uint64_t d_index = d.to_index();
        const std::size_t shift = dims_.edges;
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] = (*state_)[d_index | (static_cast<std::uint64_t>(j) << shift)];
        }
        return out;
    }
    bool member = std::binary_search(configs_.begin(), configs_.end(), d);
    if (!member) {
        return out;
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(configs_.size()));
    for (std::size_t i = 0; i < dims_.edges; ++i) {
        const std::size_t f = d.removed(i) ? 1 : 0;
        const auto& col = columns_[i];
        const double beta = betas_[i] * scale;
        for (std::size_t e2 = 0; e2 < R; ++e2) {
            if (col[e2] == 0.0) {
                continue;
            }
            const amplitude a2 = beta * col[e2];
            amplitude* dst = out.data() + f * R * R + e2 * R;
            for (std::size_t e1 = 0; e1 < R; ++e1) {
                dst[e1] += a2 * col[e1];
            }
        }
    }
    return out;
}

double PreparedState::success_probability(const Configuration& d) const {
    const std::size_t R = std::size_t{1} << dims_.reg;
    const std::size_t Mdim = std::size_t{1} << dims_.m;
    if (state_) {
        const std::uint64_t base = d.to_index() | (std::uint64_t{1} << (dims_.edges + 2 * dims_.reg));
        double p = 0.0;
        for (std::size_t e2 = 0; e2 < Mdim; ++e2) {
            for (std::size_t e1 = 0; e1 < Mdim; ++e1) {
                const std::uint64_t idx = base | (static_cast<std::uint64_t>(e1 + e2 * R) << dims_.edges);
                p += std::norm((*state_)[idx]);
            }
        }
        return p;
    }
    if (!std::binary_search(configs_.begin(), configs_.end(), d)) {
        return 0.0;
    }
    double p = 0.0;
    for (std::size_t e2 = 0; e2 < Mdim; ++e2) {
        for (std::size_t e1 = 0; e1 < Mdim; ++e1) {
            amplitude a = 0.0;
            for (std::size_t i = 0; i < dims_.edges; ++i) {
                if (d.removed(i)) {
                    a += betas_[i] * columns_[i][e1] * columns_[i][e2];
                }
            }
            p += std::norm(a);
        }
    }
    return p / static_cast<double>(configs_.size());
}

SampleHistogram PreparedState::sample(std::uint64_t shots, std::uint64_t seed) const {
    if (shots == 0) {
        throw InvalidArgument("shots must be positive");
    }
    if (state_) {
        return measure_all(*state_, shots, seed);
    }
    std::mt19937_64 rng(seed);
    std::vector<double> branch_mass(configs_.size(), 1.0);
    const auto per_branch = sample_counts(std::span<const double>(branch_mass), shots, rng);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
    const std::size_t shift = dims_.edges;
    for (const auto& [b, n] : per_branch) {
        const Configuration& d = configs_[b];
        const std::vector<amplitude> amps = branch(d);
        std::vector<double> probs(amps.size());
        std::transform(amps.begin(), amps.end(), probs.begin(), [](const amplitude& a) { return std::norm(a); });
        const std::uint64_t d_index = d.to_index();
        for (const auto& [j, c] : sample_counts(std::span<const double>(probs), n, rng)) {
            counts.emplace_back(d_index | (j << shift), c);
        }
    }
    return SampleHistogram(std::move(counts));
}

PreparedState prepare_psi_f(const WeightedGraph& graph, std::size_t x, const PrepareOptions& options) {
    const RegisterDims dims = register_dims(graph);
    if (x > dims.edges) {
        throw CardinalityError("x = " + std::to_string(x) + " exceeds N = " + std::to_string(dims.edges));
    }
    const std::size_t total = dims.total_qubits();
    if (total > options.cap) {
        throw ResourceCapError(total, options.cap, "psi_f over layout " + psi_layout(dims).describe());
    }
    if (options.basis && (options.basis->size() != dims.edges || options.basis->popcount() != x)) {
        throw CardinalityError("basis configuration must have length N and weight x");
    }

    PreparedState ps;
    ps.dims_ = dims;
    ps.layout_ = psi_layout(dims);
    ps.x_ = x;
    ps.W_ = graph.weight_norm_squared();
    if (options.basis) {
        ps.configs_ = {*options.basis};
    } else {
        ps.configs_ = all_configurations(dims.edges, x);
        std::sort(ps.configs_.begin(), ps.configs_.end());
    }

    const BlockEncoding be = block_encode_incidence(build_incidence(graph), options.cap);
    ps.alpha_ = be.alpha;

    const bool blockwise = options.blockwise.value_or(total > kDenseStateLimit);
    if (!blockwise) {
        Statevector s(ps.layout_, options.cap);
        const auto dicke = ps.layout_.qubits("dicke");
        if (options.basis) {
            for (std::size_t i = 0; i < dims.edges; ++i) {
                if (options.basis->removed(i)) {
                    s.apply_single_qubit(dicke[i], gates::x());
                }
            }
        } else if (x > 0) {
            Circuit prep(ps.layout_.total_qubits());
            prep.append_mapped(dicke_prepare(dims.edges, x), dicke);
            prep.apply(s);
        }
        build_cuf(graph, dims, be).apply(s);
        ps.state_ = std::move(s);
        return ps;
    }

    const double sqrtW = std::sqrt(ps.W_);
    RegisterLayout reg;
    reg.add("q", dims.reg);
    for (std::size_t i = 0; i < dims.edges; ++i) {
        ps.betas_.push_back(graph.edge(i).weight / sqrtW);
        Statevector col = Statevector::basis(reg, i, options.cap);
        be.circuit.apply(col);
        ps.columns_.emplace_back(col.amplitudes().begin(), col.amplitudes().end());
    }
    return ps;
}

double expected_success_probability(const WeightedGraph& graph, const Configuration& d, double alpha,
                                    std::uint64_t S) {
    const double D = frobenius_distance_sparse(graph, d);
    return D / (std::pow(alpha, 4) * static_cast<double>(S) * graph.weight_norm_squared());
}

}  // namespace qsg
