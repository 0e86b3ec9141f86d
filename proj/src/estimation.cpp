#include "qsg/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "qsg/error.hpp"

namespace qsg {

double phase_from_probability(double p) {
    return 2.0 * std::asin(std::sqrt(std::clamp(p, 0.0, 1.0)));
}

double block_success_probability(const WeightedGraph& graph, const Configuration& d, double alpha) {
    return frobenius_distance_sparse(graph, d) / (std::pow(alpha, 4) * graph.weight_norm_squared());
}

RegisterLayout labeled_layout(const RegisterDims& dims, std::size_t a_eps) {
    if (a_eps < 2) {
        throw InvalidArgument("phase register needs at least 2 qubits");
    }
    RegisterLayout layout = psi_layout(dims);
    layout.add("label", a_eps - 1).add("sign", 1);
    return layout;
}

namespace {

std::vector<std::size_t> ancilla_qubits(const RegisterLayout& layout, const RegisterDims& dims) {
    std::vector<std::size_t> out;
    for (const char* seg : {"edge1", "edge2"}) {
        for (std::size_t t = dims.m; t < dims.reg; ++t) {
            out.push_back(layout.qubit(seg, t));
        }
    }
    return out;
}

std::vector<std::size_t> work_qubits(const RegisterLayout& layout) {
    std::vector<std::size_t> out = layout.qubits("edge1");
    for (std::size_t q : layout.qubits("edge2")) {
        out.push_back(q);
    }
    out.push_back(layout.qubit("flag", 0));
    return out;
}

}  // namespace

Circuit build_success_reflection(const RegisterDims& dims) {
    const RegisterLayout layout = psi_layout(dims);
    Circuit c(layout.total_qubits());
    std::vector<Control> controls;
    for (std::size_t q : ancilla_qubits(layout, dims)) {
        controls.push_back({q, false});
    }
    c.mcz(std::move(controls), layout.qubit("flag", 0));
    return c;
}

Circuit build_zero_reflection(const RegisterDims& dims) {
    const RegisterLayout layout = psi_layout(dims);
    Circuit c(layout.total_qubits());
    const std::vector<std::size_t> work = work_qubits(layout);
    for (std::size_t q : work) {
        c.x(q);
    }
    std::vector<Control> controls;
    for (std::size_t i = 0; i + 1 < work.size(); ++i) {
        controls.push_back({work[i], true});
    }
    c.mcz(std::move(controls), work.back());
    for (std::size_t q : work) {
        c.x(q);
    }
    return c;
}

Circuit build_cQ(const Circuit& cuf, const RegisterDims& dims) {
    const std::size_t width = psi_layout(dims).total_qubits();
    if (cuf.num_qubits() != width) {
        throw InvalidArgument("cU_f width does not match the psi layout");
    }
    Circuit c(width);
    c.append(build_success_reflection(dims));
    c.append(cuf.inverse());
    c.append(build_zero_reflection(dims));
    c.append(cuf);
    c.phase({}, std::numbers::pi);
    return c;
}

Circuit qft(std::size_t a) {
    Circuit c(a);
    for (std::size_t j = a; j-- > 0;) {
        c.h(j);
        for (std::size_t l = j; l-- > 0;) {
            c.phase({{l, true}, {j, true}}, std::numbers::pi / static_cast<double>(std::size_t{1} << (j - l)));
        }
    }
    for (std::size_t i = 0; i < a / 2; ++i) {
        c.swap(i, a - 1 - i);
    }
    return c;
}

Circuit twos_complement_to_sign_magnitude(std::size_t a) {
    if (a < 2) {
        throw InvalidArgument("sign-magnitude conversion needs at least 2 qubits");
    }
    Circuit c(a);
    const std::size_t msb = a - 1;
    // Decrement: bit t flips when every lower bit is 0; high bits first.
    for (std::size_t t = msb; t-- > 0;) {
        std::vector<Control> controls{{msb, true}};
        for (std::size_t l = 0; l < t; ++l) {
            controls.push_back({l, false});
        }
        c.mcx(std::move(controls), t);
    }
    for (std::size_t t = 0; t < msb; ++t) {
        c.cx(msb, t);
    }
    return c;
}

std::uint64_t sign_magnitude_of(std::uint64_t twos, std::size_t a) {
    const std::uint64_t mask = (std::uint64_t{1} << (a - 1)) - 1;
    const std::uint64_t msb = (twos >> (a - 1)) & 1U;
    std::uint64_t low = twos & mask;
    if (msb) {
        low = ((low - 1) & mask) ^ mask;
    }
    return low | (msb << (a - 1));
}

std::vector<double> LabeledState::label_distribution(const Configuration& d) const {
    const auto it = std::lower_bound(configs_.begin(), configs_.end(), d);
    if (it == configs_.end() || !(*it == d)) {
        return std::vector<double>(label_count(), 0.0);
    }
    return table_[static_cast<std::size_t>(it - configs_.begin())];
}

double LabeledState::label_unit() const {
    return 2.0 * std::numbers::pi / static_cast<double>(std::uint64_t{1} << a_eps_);
}

LabeledState phase_estimate(const WeightedGraph& graph, std::size_t x, std::size_t a_eps,
                            const EstimationOptions& options) {
    const RegisterDims dims = register_dims(graph);
    const RegisterLayout layout = labeled_layout(dims, a_eps);
    if (layout.total_qubits() > options.cap) {
        throw ResourceCapError(layout.total_qubits(), options.cap,
                               "labeled state over layout " + layout.describe());
    }

    PrepareOptions prep;
    prep.cap = options.cap;
    prep.basis = options.basis;
    prep.blockwise = false;
    const PreparedState ps = prepare_psi_f(graph, x, prep);
    const BlockEncoding be = block_encode_incidence(build_incidence(graph), options.cap);
    const Circuit cQ = build_cQ(build_cuf(graph, dims, be), dims);

    const std::size_t sys_qubits = ps.layout().total_qubits();
    const std::uint64_t sys_dim = std::uint64_t{1} << sys_qubits;
    const std::uint64_t K = std::uint64_t{1} << a_eps;

    std::vector<std::size_t> phase_qubits = layout.qubits("label");
    phase_qubits.push_back(layout.qubit("sign", 0));

    LabeledState out;
    out.dims_ = dims;
    out.a_eps_ = a_eps;
    out.alpha_ = ps.alpha();
    out.configs_ = ps.configs();
    out.converted_ = options.convert;

    if (options.gate_level) {
        std::vector<amplitude> amps(sys_dim * K, amplitude(0.0, 0.0));
        std::copy(ps.state().amplitudes().begin(), ps.state().amplitudes().end(), amps.begin());
        Statevector s = Statevector::from_amplitudes(layout, std::move(amps), options.cap);
        Circuit circ(layout.total_qubits());
        for (std::size_t q : phase_qubits) {
            circ.h(q);
        }
        for (std::size_t j = 0; j < a_eps; ++j) {
            const Circuit ccQ = cQ.controlled({phase_qubits[j], true});
            for (std::uint64_t r = 0; r < (std::uint64_t{1} << j); ++r) {
                circ.append(ccQ);
            }
        }
        circ.append_mapped(qft(a_eps).inverse(), phase_qubits);
        circ.apply(s);
        out.state_ = std::move(s);
    } else {
        // cQ^p psi_f for p = 0 .. 2^a - 1, folded through the inverse QFT.
        std::vector<amplitude> amps(sys_dim * K, amplitude(0.0, 0.0));
        Statevector phi = ps.state();
        const double scale = 1.0 / static_cast<double>(K);
        for (std::uint64_t p = 0; p < K; ++p) {
            if (p > 0) {
                cQ.apply(phi);
            }
            const auto src = phi.amplitudes();
            for (std::uint64_t k = 0; k < K; ++k) {
                const amplitude w = std::polar(scale, -2.0 * std::numbers::pi *
                                                          static_cast<double>((p * k) % K) /
                                                          static_cast<double>(K));
                amplitude* dst = amps.data() + k * sys_dim;
                for (std::uint64_t i = 0; i < sys_dim; ++i) {
                    dst[i] += w * src[i];
                }
            }
        }
        out.state_ = Statevector::from_amplitudes(layout, std::move(amps), options.cap);
    }

    if (options.convert) {
        Circuit conv(layout.total_qubits());
        conv.append_mapped(twos_complement_to_sign_magnitude(a_eps), phase_qubits);
        conv.apply(out.state_);
    }

    std::unordered_map<std::uint64_t, std::size_t> row_of;
    for (std::size_t r = 0; r < out.configs_.size(); ++r) {
        row_of[out.configs_[r].to_index()] = r;
    }
    out.table_.assign(out.configs_.size(), std::vector<double>(out.label_count(), 0.0));
    out.register_table_.assign(out.configs_.size(), std::vector<double>(K, 0.0));
    const std::uint64_t dicke_mask = (std::uint64_t{1} << dims.edges) - 1;
    const std::uint64_t label_mask = (std::uint64_t{1} << (a_eps - 1)) - 1;
    const auto amps = out.state_.amplitudes();
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        if (p == 0.0) {
            continue;
        }
        const auto row = row_of.find(i & dicke_mask);
        if (row == row_of.end()) {
            continue;  // numerical dust outside the Dicke support
        }
        const std::uint64_t reg = i >> sys_qubits;
        const std::uint64_t sm = options.convert ? reg : sign_magnitude_of(reg, a_eps);
        out.table_[row->second][sm & label_mask] += p;
        out.register_table_[row->second][reg] += p;
    }
    return out;
}

LabeledState label_single_config(const Configuration& y, const WeightedGraph& graph,
                                 std::size_t a_eps, std::size_t cap) {
    EstimationOptions opt;
    opt.cap = cap;
    opt.basis = y;
    return phase_estimate(graph, y.popcount(), a_eps, opt);
}

}  // namespace qsg
