#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qsg/statevector.hpp"

namespace qsg {

struct Gate {
    enum class Kind {
        Matrix,  // 2x2 `matrix` on targets[0]
        Swap,    // targets[0] <-> targets[1]
        Phase,   // e^{i angle} on every basis state matching the controls
    };

    Kind kind = Kind::Matrix;
    std::string name;  // "h", "x", "ry(0.5)", ...
    std::vector<std::size_t> targets;
    std::vector<Control> controls;
    Mat2 matrix{};
    double angle = 0.0;

    // "x", "cx", "ccx", "mcx", ... with parameters stripped.
    std::string count_key() const;
};

class Circuit {
public:
    explicit Circuit(std::size_t num_qubits = 0) : num_qubits_(num_qubits) {}

    std::size_t num_qubits() const { return num_qubits_; }
    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    Circuit& h(std::size_t q);
    Circuit& x(std::size_t q);
    Circuit& z(std::size_t q);
    Circuit& ry(std::size_t q, double theta);
    Circuit& cx(std::size_t control, std::size_t target);
    Circuit& cz(std::size_t control, std::size_t target);
    Circuit& cry(std::size_t control, std::size_t target, double theta);
    Circuit& swap(std::size_t a, std::size_t b);
    Circuit& mcx(std::vector<Control> controls, std::size_t target);
    Circuit& mcz(std::vector<Control> controls, std::size_t target);
    Circuit& mcry(std::vector<Control> controls, std::size_t target, double theta);
    Circuit& unitary(std::string name, std::vector<Control> controls, std::size_t target,
                     const Mat2& u);
    // Empty controls means a global phase.
    Circuit& phase(std::vector<Control> controls, double phi);
    Circuit& add(Gate gate);

    Circuit& append(const Circuit& other);
    // Qubit q of `other` lands on map[q].
    Circuit& append_mapped(const Circuit& other, const std::vector<std::size_t>& map);

    Circuit inverse() const;
    // Every gate gains `control`; a global phase becomes a controlled phase.
    // The result widens to include the control qubit.
    Circuit controlled(Control control) const;

    void apply(Statevector& state) const;

    // One gate per line: `name; t0 t1; c0+ c1-`.
    std::string to_text() const;
    static Circuit from_text(std::string_view text, std::size_t num_qubits);

    std::map<std::string, std::size_t> gate_counts() const;

private:
    void check(const Gate& gate) const;

    std::size_t num_qubits_;
    std::vector<Gate> gates_;
};

// Principal square root of a 2x2 unitary.
Mat2 unitary_sqrt(const Mat2& u);

// Rewrites every gate with more than two controls (and every controlled
// non-X gate with more than one control) into single-qubit, CNOT-class and
// Toffoli gates. Up to 8 controls use the ancilla-free square-root recursion;
// above that, X targets use a borrowed-ancilla Toffoli ladder over idle
// qubits when enough are available. Open controls are conjugated by X.
Circuit decompose_multi_controlled(const Circuit& circuit);

}  // namespace qsg
