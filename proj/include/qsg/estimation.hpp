#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qsg/circuit.hpp"
#include "qsg/encoding.hpp"
#include "qsg/graph.hpp"
#include "qsg/statevector.hpp"

namespace qsg {

// 2 arcsin sqrt(p)
double phase_from_probability(double p);

// Per-configuration success probability seen by the reflection operator:
// D(d~) / (alpha^4 W).
double block_success_probability(const WeightedGraph& graph, const Configuration& d, double alpha);

// psi layout followed by label(a_eps - 1) and sign(1). Read together,
// label and sign form the a_eps-bit phase register (sign is the MSB).
RegisterLayout labeled_layout(const RegisterDims& dims, std::size_t a_eps);

// Phase -1 on flag = 1 with all 2 a_V ancillas zero.
Circuit build_success_reflection(const RegisterDims& dims);
// Phase -1 on the all-zero work register (edge1, edge2, flag).
Circuit build_zero_reflection(const RegisterDims& dims);
// -cU_f P_0 cU_f^dagger P_s on the psi layout.
Circuit build_cQ(const Circuit& cuf, const RegisterDims& dims);

// |j> -> 2^{-a/2} sum_k e^{2 pi i j k / 2^a} |k> on a little-endian register.
Circuit qft(std::size_t a);

// On an a-qubit register (MSB last): MSB-controlled decrement of the low
// a-1 bits, then MSB-controlled X on each of them. Two's complement -k
// becomes sign 1 with magnitude k; the most negative value maps to sign 1,
// magnitude 0.
Circuit twos_complement_to_sign_magnitude(std::size_t a);

// Classical images of the register maps above.
std::uint64_t sign_magnitude_of(std::uint64_t twos, std::size_t a);

struct EstimationOptions {
    std::size_t cap = kDefaultQubitCap;
    // Label one basis configuration instead of the Dicke superposition.
    std::optional<Configuration> basis;
    // Controlled powers of cQ gate by gate and an explicit inverse QFT.
    // Otherwise the phase register is filled from the sequence cQ^p psi_f,
    // which produces the same state.
    bool gate_level = false;
    // Skip the sign-magnitude conversion (keeps the raw QPE output).
    bool convert = true;
};

// psi_label over labeled_layout.
class LabeledState {
public:
    const Statevector& state() const { return state_; }
    const RegisterDims& dims() const { return dims_; }
    std::size_t a_eps() const { return a_eps_; }
    std::size_t label_bits() const { return a_eps_ - 1; }
    std::size_t label_count() const { return std::size_t{1} << (a_eps_ - 1); }
    double alpha() const { return alpha_; }
    const std::vector<Configuration>& configs() const { return configs_; }
    bool converted() const { return converted_; }

    // Probability of (d, magnitude label) summed over the work register and
    // the sign bit. Row r belongs to configs()[r].
    const std::vector<std::vector<double>>& label_table() const { return table_; }
    std::vector<double> label_distribution(const Configuration& d) const;
    // Same, over raw phase-register values label | sign << (a_eps - 1).
    const std::vector<std::vector<double>>& register_table() const { return register_table_; }

    // Label value in units of 2 pi / 2^a_eps.
    double label_unit() const;

private:
    friend LabeledState phase_estimate(const WeightedGraph&, std::size_t, std::size_t,
                                       const EstimationOptions&);

    Statevector state_{RegisterLayout{}};
    RegisterDims dims_;
    std::size_t a_eps_ = 0;
    double alpha_ = 1.0;
    std::vector<Configuration> configs_;
    bool converted_ = true;
    std::vector<std::vector<double>> table_;
    std::vector<std::vector<double>> register_table_;
};

// Amplitude estimation of every Dicke branch: psi_f, then QPE of cQ into
// an a_eps-bit register, then sign-magnitude conversion.
LabeledState phase_estimate(const WeightedGraph& graph, std::size_t x, std::size_t a_eps,
                            const EstimationOptions& options = {});

// psi_label^y: the same pipeline on the basis state |y>.
LabeledState label_single_config(const Configuration& y, const WeightedGraph& graph,
                                 std::size_t a_eps, std::size_t cap = kDefaultQubitCap);

}  // namespace qsg
