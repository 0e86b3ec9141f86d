#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsg {

using amplitude = std::complex<double>;

// Row-major 2x2 matrix {m00, m01, m10, m11}.
using Mat2 = std::array<amplitude, 4>;

inline constexpr std::size_t kDefaultQubitCap = 30;

struct Segment {
    std::string name;
    std::size_t width;
    std::size_t offset;
};

// Named qubit segments, concatenated in insertion order starting at qubit 0.
// Within a segment qubit 0 is the least significant bit of the segment value.
class RegisterLayout {
public:
    RegisterLayout() = default;

    RegisterLayout& add(std::string name, std::size_t width);

    std::size_t total_qubits() const { return total_; }
    const std::vector<Segment>& segments() const { return segments_; }
    bool has(std::string_view name) const;
    const Segment& segment(std::string_view name) const;
    std::size_t qubit(std::string_view name, std::size_t i) const;
    std::vector<std::size_t> qubits(std::string_view name) const;

    std::uint64_t field(std::uint64_t index, std::string_view name) const;
    std::uint64_t with_field(std::uint64_t index, std::string_view name, std::uint64_t value) const;

    // "dicke:4,edge1:5,..."
    std::string describe() const;

    bool operator==(const RegisterLayout& other) const;

private:
    std::vector<Segment> segments_;
    std::size_t total_ = 0;
};

struct Control {
    std::size_t qubit;
    bool polarity = true;
};

class Statevector {
public:
    // |0...0> over the layout; throws ResourceCapError above `cap` qubits.
    explicit Statevector(RegisterLayout layout, std::size_t cap = kDefaultQubitCap);

    static Statevector basis(RegisterLayout layout, std::uint64_t index,
                             std::size_t cap = kDefaultQubitCap);
    static Statevector from_amplitudes(RegisterLayout layout, std::vector<amplitude> amplitudes,
                                       std::size_t cap = kDefaultQubitCap);

    std::size_t num_qubits() const { return layout_.total_qubits(); }
    std::size_t size() const { return amps_.size(); }
    const RegisterLayout& layout() const { return layout_; }

    std::span<const amplitude> amplitudes() const { return amps_; }
    std::span<amplitude> amplitudes() { return amps_; }
    const amplitude& operator[](std::uint64_t i) const { return amps_[i]; }
    amplitude& operator[](std::uint64_t i) { return amps_[i]; }

    double norm_squared() const;
    double probability(std::uint64_t index) const { return std::norm(amps_.at(index)); }
    std::vector<double> probabilities() const;

    // Rejects matrices further than 1e-12 from unitary.
    void apply_single_qubit(std::size_t qubit, const Mat2& u);
    void apply_controlled(std::span<const Control> controls, std::size_t target, const Mat2& u);
    void apply_swap(std::span<const Control> controls, std::size_t a, std::size_t b);
    // Multiplies every amplitude whose control bits match by e^{i phi}.
    void apply_phase(std::span<const Control> controls, double phi);

private:
    void check_qubit(std::size_t q) const;

    RegisterLayout layout_;
    std::vector<amplitude> amps_;
};

namespace gates {
Mat2 identity();
Mat2 x();
Mat2 y();
Mat2 z();
Mat2 h();
Mat2 ry(double theta);
Mat2 rz(double theta);
Mat2 phase(double phi);
Mat2 dagger(const Mat2& u);
Mat2 multiply(const Mat2& a, const Mat2& b);
bool is_unitary(const Mat2& u, double tol = 1e-12);
}  // namespace gates

// <a|b>; layouts must match.
amplitude overlap(const Statevector& a, const Statevector& b);

// Outcome counts keyed by basis index, sorted by key.
class SampleHistogram {
public:
    SampleHistogram() = default;
    explicit SampleHistogram(std::vector<std::pair<std::uint64_t, std::uint64_t>> counts);

    std::uint64_t total() const { return total_; }
    std::uint64_t count(std::uint64_t key) const;
    const std::vector<std::pair<std::uint64_t, std::uint64_t>>& counts() const { return counts_; }

private:
    std::vector<std::pair<std::uint64_t, std::uint64_t>> counts_;
    std::uint64_t total_ = 0;
};

// Multinomial draw of `shots` outcomes over `probs` (need not sum to one
// exactly; it is renormalized). Per-shot inverse-CDF draws when shots do not
// exceed the support, sequential conditional binomials otherwise.
template <class Rng>
std::vector<std::pair<std::uint64_t, std::uint64_t>> sample_counts(std::span<const double> probs,
                                                                   std::uint64_t shots, Rng& rng);

// i.i.d. samples from |amplitude|^2 with a std::mt19937_64 seeded by `seed`.
SampleHistogram measure_all(const Statevector& state, std::uint64_t shots, std::uint64_t seed);

struct PostselectResult {
    Statevector state;
    double probability;
};

// Conditions on whole segments taking the given values. The returned state
// lives on the remaining segments (in layout order) and is renormalized.
PostselectResult postselect(const Statevector& state,
                            const std::vector<std::pair<std::string, std::uint64_t>>& pattern);

// Binary fixture format: 8-byte magic "QSGSV001", uint32 qubit count, then
// 2^n little-endian (re, im) double pairs.
void write_statevector(std::ostream& out, const Statevector& state);
Statevector read_statevector(std::istream& in);

}  // namespace qsg

#include "qsg/detail/sampling.hpp"
