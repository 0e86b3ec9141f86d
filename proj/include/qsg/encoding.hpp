#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qsg/circuit.hpp"
#include "qsg/graph.hpp"
#include "qsg/statevector.hpp"

namespace qsg {

// Register sizes for an instance with N edges and M vertices.
struct RegisterDims {
    std::size_t edges = 0;     // N
    std::size_t vertices = 0;  // M
    std::size_t n = 0;         // ceil(log2 N)
    std::size_t m = 0;         // ceil(log2 M)
    std::size_t k = 0;         // max(n, m)
    std::size_t reg = 0;       // 2k + 1 = a_E + n = a_V + m
    std::size_t a_E = 0;
    std::size_t a_V = 0;

    // dicke + 2 reg + flag (+ phase bits)
    std::size_t total_qubits(std::size_t phase_bits = 0) const { return edges + 2 * reg + 1 + phase_bits; }
};

std::size_t ceil_log2(std::size_t v);
RegisterDims register_dims(std::size_t edges, std::size_t vertices);
RegisterDims register_dims(const WeightedGraph& graph);

// dicke:N, edge1:reg, edge2:reg, flag:1 and, when phase_bits > 0, phase.
RegisterLayout psi_layout(const RegisterDims& dims, std::size_t phase_bits = 0);

// |0^N> -> |D_x^N>, split-and-cyclic-shift network. Qubit i carries d_i.
Circuit dicke_prepare(std::size_t N, std::size_t x);

// H on each of n qubits.
Circuit hadamard_topology(std::size_t n);

// Multiplexed RY: for each value c of the control qubits (bit t of c read
// from controls[t]), applies RY(angles[c]) to the target. Gray-code CNOT
// network with zero rotations dropped and their CNOTs merged.
Circuit uniformly_controlled_ry(std::span<const double> angles,
                                const std::vector<std::size_t>& controls, std::size_t target,
                                std::size_t num_qubits, double tol = 1e-14);

// |0^n> -> sum_j v_j |j> / ||v|| for real v of length <= 2^n (zero padded).
Circuit amplitude_encode(std::span<const double> values, std::size_t n);

// U_enc on the psi layout: weights b / sqrt(W) on edge1's low n bits, then
// copied into edge2 with CNOTs.
Circuit amplitude_encode_weights(std::span<const double> weights, const RegisterDims& dims);

struct BlockEncoding {
    Circuit circuit;           // 2k + 1 qubits: data [0,k), scratch [k,2k), rotation ancilla 2k
    double alpha = 1.0;        // subnormalization
    std::size_t k = 0;         // data qubits
    Eigen::MatrixXd target;    // 2^k-square matrix being encoded
    double error = 0.0;        // max-norm extraction error

    std::size_t num_qubits() const { return 2 * k + 1; }
    // (<0|_anc <0|_scratch (x) I) U (|0>_anc |0>_scratch (x) I), by column simulation.
    Eigen::MatrixXcd extract_block() const;
};

// Structured encoding of a 2^k-square matrix with entries in [-1, 1];
// alpha = 2^k.
BlockEncoding block_encode_matrix(const Eigen::MatrixXd& a, std::size_t cap = kDefaultQubitCap);

// Zero-padded incidence matrix E_s (2^k square) encoded with
// block_encode_matrix.
BlockEncoding block_encode_incidence(const IncidenceMatrix& incidence,
                                     std::size_t cap = kDefaultQubitCap);

// x = 1 variant: layout topo:n, edge1:reg, flag:1. Flips the flag on
// |e>|i> with e = i < N.
RegisterLayout rse_layout(const RegisterDims& dims);
Circuit remove_single_edge(const RegisterDims& dims);

// U_rme on the psi layout: for each i < N a multi-controlled X on the flag,
// controlled by d_i and the bit pattern of i on edge1's low n bits.
Circuit remove_multiple_edges(const RegisterDims& dims);

// U_E (x) U_E . U_rme . U_enc on the psi layout (Dicke register untouched).
Circuit build_cuf(const WeightedGraph& graph, const RegisterDims& dims, const BlockEncoding& be);

// Dense statevectors are used up to this many qubits; above it the
// blockwise representation is built instead.
inline constexpr std::size_t kDenseStateLimit = 22;

struct PrepareOptions {
    std::size_t cap = kDefaultQubitCap;
    // Replace |D_x^N> by the basis state of this configuration.
    std::optional<Configuration> basis;
    // Force one representation; by default dense up to kDenseStateLimit.
    std::optional<bool> blockwise;
};

// psi_f together with its normalization record. Either a dense statevector
// over psi_layout, or the blockwise form
//   psi_f = S^{-1/2} sum_d |d> (x) sum_i beta_i (c_i (x) c_i) |d_i>_f
// with c_i = U_E |0, i> and beta_i = b_i / sqrt(W).
class PreparedState {
public:
    const RegisterDims& dims() const { return dims_; }
    const RegisterLayout& layout() const { return layout_; }
    std::size_t removed() const { return x_; }
    double alpha() const { return alpha_; }
    std::uint64_t S() const { return configs_.size(); }
    double W() const { return W_; }
    const std::vector<Configuration>& configs() const { return configs_; }

    bool blockwise() const { return !state_.has_value(); }
    const Statevector& state() const;

    // Amplitudes of the d-branch over (edge1, edge2, flag), indexed
    // e1 + 2^reg e2 + 2^(2 reg) f, including the 1/sqrt(S) factor.
    std::vector<amplitude> branch(const Configuration& d) const;

    // p(d, 0^{2 a_V}, flag = 1)
    double success_probability(const Configuration& d) const;

    // Full-layout measurement; keys are psi_layout basis indices.
    SampleHistogram sample(std::uint64_t shots, std::uint64_t seed) const;

private:
    friend PreparedState prepare_psi_f(const WeightedGraph&, std::size_t, const PrepareOptions&);

    RegisterDims dims_;
    RegisterLayout layout_;
    std::size_t x_ = 0;
    double alpha_ = 1.0;
    double W_ = 0.0;
    std::vector<Configuration> configs_;
    std::optional<Statevector> state_;
    std::vector<double> betas_;
    std::vector<std::vector<amplitude>> columns_;
};

PreparedState prepare_psi_f(const WeightedGraph& graph, std::size_t x,
                            const PrepareOptions& options = {});

// D(d~) / (alpha^4 S W)
double expected_success_probability(const WeightedGraph& graph, const Configuration& d,
                                     double alpha, std::uint64_t S);

}  // namespace qsg
