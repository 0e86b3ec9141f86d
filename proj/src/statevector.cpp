#include "qsg/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

#include "qsg/error.hpp"

namespace qsg {

RegisterLayout& RegisterLayout::add(std::string name, std::size_t width) {
    if (has(name)) {
        throw InvalidArgument("duplicate segment '" + name + "'");
    }
    segments_.push_back({std::move(name), width, total_});
    total_ += width;
    return *this;
}

bool RegisterLayout::has(std::string_view name) const {
    return std::any_of(segments_.begin(), segments_.end(),
                       [&](const Segment& s) { return s.name == name; });
}

const Segment& RegisterLayout::segment(std::string_view name) const {
    for (const Segment& s : segments_) {
        if (s.name == name) {
            return s;
        }
    }
    throw InvalidArgument("layout has no segment '" + std::string(name) + "'");
}

std::size_t RegisterLayout::qubit(std::string_view name, std::size_t i) const {
    const Segment& s = segment(name);
    if (i >= s.width) {
        throw InvalidArgument("qubit " + std::to_string(i) + " outside segment '" + s.name + "'");
    }
    return s.offset + i;
}

std::vector<std::size_t> RegisterLayout::qubits(std::string_view name) const {
    const Segment& s = segment(name);
    std::vector<std::size_t> out(s.width);
    for (std::size_t i = 0; i < s.width; ++i) {
        out[i] = s.offset + i;
    }
    return out;
}

std::uint64_t RegisterLayout::field(std::uint64_t index, std::string_view name) const {
    const Segment& s = segment(name);
    const std::uint64_t mask = s.width >= 64 ? ~0ULL : ((1ULL << s.width) - 1);
    return (index >> s.offset) & mask;
}

std::uint64_t RegisterLayout::with_field(std::uint64_t index, std::string_view name,
                                         std::uint64_t value) const {
    const Segment& s = segment(name);
    const std::uint64_t mask = s.width >= 64 ? ~0ULL : ((1ULL << s.width) - 1);
    if ((value & ~mask) != 0) {
        throw InvalidArgument("value does not fit segment '" + s.name + "'");
    }
    return (index & ~(mask << s.offset)) | (value << s.offset);
}

std::string RegisterLayout::describe() const {
    std::string out;
    for (const Segment& s : segments_) {
        if (!out.empty()) {
            out += ',';
        }
        out += s.name + ':' + std::to_string(s.width);
    }
    return out;
}

bool RegisterLayout::operator==(const RegisterLayout& other) const {
    if (segments_.size() != other.segments_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        if (segments_[i].name != other.segments_[i].name ||
            segments_[i].width != other.segments_[i].width) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

namespace gates {

Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
Mat2 x() { return {0.0, 1.0, 1.0, 0.0}; }
Mat2 y() { return {0.0, amplitude(0, -1), amplitude(0, 1), 0.0}; }
Mat2 z() { return {1.0, 0.0, 0.0, -1.0}; }

Mat2 h() {
    const double s = 1.0 / std::sqrt(2.0);
    return {s, s, s, -s};
}

Mat2 ry(double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return {c, -s, s, c};
}

Mat2 rz(double theta) {
    return {std::polar(1.0, -theta / 2), 0.0, 0.0, std::polar(1.0, theta / 2)};
}

Mat2 phase(double phi) { return {1.0, 0.0, 0.0, std::polar(1.0, phi)}; }

Mat2 dagger(const Mat2& u) {
    return {std::conj(u[0]), std::conj(u[2]), std::conj(u[1]), std::conj(u[3])};
}

Mat2 multiply(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

bool is_unitary(const Mat2& u, double tol) {
    const Mat2 p = multiply(dagger(u), u);
    return std::abs(p[0] - 1.0) <= tol && std::abs(p[1]) <= tol && std::abs(p[2]) <= tol &&
           std::abs(p[3] - 1.0) <= tol;
}

}  // namespace gates

// ---------------------------------------------------------------------------

namespace {

// Enumerates basis indices whose bits at `fixed` positions (ascending) are
// zero, by inserting zero bits into a dense counter.
struct ZeroInserter {
    std::vector<std::size_t> positions;

    std::uint64_t operator()(std::uint64_t t) const {
        for (std::size_t p : positions) {
            const std::uint64_t low = t & ((1ULL << p) - 1);
            t = ((t >> p) << (p + 1)) | low;
        }
        return t;
    }
};

struct FixedBits {
    ZeroInserter insert;
    std::uint64_t value = 0;
    std::uint64_t count = 0;
};

FixedBits fix_bits(std::size_t num_qubits, std::span<const Control> controls,
                   std::initializer_list<std::size_t> extra) {
    FixedBits fb;
    std::vector<std::size_t> pos;
    for (const Control& c : controls) {
        pos.push_back(c.qubit);
        if (c.polarity) {
            fb.value |= 1ULL << c.qubit;
        }
    }
    for (std::size_t q : extra) {
        pos.push_back(q);
    }
    std::sort(pos.begin(), pos.end());
    if (std::adjacent_find(pos.begin(), pos.end()) != pos.end()) {
        throw InvalidArgument("gate qubits collide");
    }
    fb.insert.positions = pos;
    fb.count = 1ULL << (num_qubits - pos.size());
    return fb;
}

}  // namespace

Statevector::Statevector(RegisterLayout layout, std::size_t cap) : layout_(std::move(layout)) {
    const std::size_t n = layout_.total_qubits();
    if (n > cap) {
        throw ResourceCapError(n, cap, "statevector over layout " + layout_.describe());
    }
    if (n >= 63) {
        throw ResourceCapError(n, 62, "statevector index width");
    }
    amps_.assign(1ULL << n, amplitude(0.0, 0.0));
    amps_[0] = 1.0;
}

Statevector Statevector::basis(RegisterLayout layout, std::uint64_t index, std::size_t cap) {
    Statevector s(std::move(layout), cap);
    if (index >= s.size()) {
        throw InvalidArgument("basis index out of range");
    }
    s.amps_[0] = 0.0;
    s.amps_[index] = 1.0;
    return s;
}

Statevector Statevector::from_amplitudes(RegisterLayout layout, std::vector<amplitude> amplitudes,
                                         std::size_t cap) {
    Statevector s(std::move(layout), cap);
    if (amplitudes.size() != s.size()) {
        throw InvalidArgument("amplitude count " + std::to_string(amplitudes.size()) +
                              " does not match 2^" + std::to_string(s.num_qubits()));
    }
    s.amps_ = std::move(amplitudes);
    return s;
}

double Statevector::norm_squared() const {
    double total = 0.0;
    for (const amplitude& a : amps_) {
        total += std::norm(a);
    }
    return total;
}

std::vector<double> Statevector::probabilities() const {
    std::vector<double> p(amps_.size());
    std::transform(amps_.begin(), amps_.end(), p.begin(),
                   [](const amplitude& a) { return std::norm(a); });
    return p;
}

void Statevector::check_qubit(std::size_t q) const {
    if (q >= num_qubits()) {
        throw InvalidArgument("qubit " + std::to_string(q) + " out of range for " +
                              std::to_string(num_qubits()) + " qubits");
    }
}

void Statevector::apply_single_qubit(std::size_t qubit, const Mat2& u) {
    apply_controlled({}, qubit, u);
}

void Statevector::apply_controlled(std::span<const Control> controls, std::size_t target,
                                   const Mat2& u) {
    check_qubit(target);
    for (const Control& c : controls) {
        check_qubit(c.qubit);
    }
    if (!gates::is_unitary(u)) {
        throw InvalidArgument("gate matrix is not unitary");
    }
    const FixedBits fb = fix_bits(num_qubits(), controls, {target});
    const std::uint64_t tbit = 1ULL << target;
    amplitude* a = amps_.data();

    const bool is_x = u[0] == 0.0 && u[1] == 1.0 && u[2] == 1.0 && u[3] == 0.0;
    const bool is_diag = u[1] == 0.0 && u[2] == 0.0;
    if (is_x) {
        for (std::uint64_t t = 0; t < fb.count; ++t) {
            const std::uint64_t i0 = fb.insert(t) | fb.value;
            std::swap(a[i0], a[i0 | tbit]);
        }
    } else if (is_diag) {
        const amplitude d0 = u[0];
        const amplitude d1 = u[3];
        const bool skip0 = d0 == 1.0;
        for (std::uint64_t t = 0; t < fb.count; ++t) {
            const std::uint64_t i0 = fb.insert(t) | fb.value;
            if (!skip0) {
                a[i0] *= d0;
            }
            a[i0 | tbit] *= d1;
        }
    } else if (u[0].imag() == 0.0 && u[1].imag() == 0.0 && u[2].imag() == 0.0 && u[3].imag() == 0.0) {
        const double m00 = u[0].real();
        const double m01 = u[1].real();
        const double m10 = u[2].real();
        const double m11 = u[3].real();
        for (std::uint64_t t = 0; t < fb.count; ++t) {
            const std::uint64_t i0 = fb.insert(t) | fb.value;
            const std::uint64_t i1 = i0 | tbit;
            const amplitude v0 = a[i0];
            const amplitude v1 = a[i1];
            a[i0] = {m00 * v0.real() + m01 * v1.real(), m00 * v0.imag() + m01 * v1.imag()};
            a[i1] = {m10 * v0.real() + m11 * v1.real(), m10 * v0.imag() + m11 * v1.imag()};
        }
    } else {
        for (std::uint64_t t = 0; t < fb.count; ++t) {
            const std::uint64_t i0 = fb.insert(t) | fb.value;
            const std::uint64_t i1 = i0 | tbit;
            const amplitude v0 = a[i0];
            const amplitude v1 = a[i1];
            a[i0] = u[0] * v0 + u[1] * v1;
            a[i1] = u[2] * v0 + u[3] * v1;
        }
    }
}

void Statevector::apply_swap(std::span<const Control> controls, std::size_t qa, std::size_t qb) {
    check_qubit(qa);
    check_qubit(qb);
    for (const Control& c : controls) {
        check_qubit(c.qubit);
    }
    const FixedBits fb = fix_bits(num_qubits(), controls, {qa, qb});
    const std::uint64_t abit = 1ULL << qa;
    const std::uint64_t bbit = 1ULL << qb;
    for (std::uint64_t t = 0; t < fb.count; ++t) {
        const std::uint64_t base = fb.insert(t) | fb.value;
        std::swap(amps_[base | abit], amps_[base | bbit]);
    }
}

void Statevector::apply_phase(std::span<const Control> controls, double phi) {
    for (const Control& c : controls) {
        check_qubit(c.qubit);
    }
    const amplitude factor = std::polar(1.0, phi);
    const FixedBits fb = fix_bits(num_qubits(), controls, {});
    for (std::uint64_t t = 0; t < fb.count; ++t) {
        amps_[fb.insert(t) | fb.value] *= factor;
    }
}

amplitude overlap(const Statevector& a, const Statevector& b) {
    if (!(a.layout() == b.layout())) {
        throw InvalidArgument("overlap of states with different layouts");
    }
    amplitude total = 0.0;
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += std::conj(x[i]) * y[i];
    }
    return total;
}

// ---------------------------------------------------------------------------

SampleHistogram::SampleHistogram(std::vector<std::pair<std::uint64_t, std::uint64_t>> counts)
    : counts_(std::move(counts)) {
    std::sort(counts_.begin(), counts_.end());
    std::vector<std::pair<std::uint64_t, std::uint64_t>> merged;
    merged.reserve(counts_.size());
    for (const auto& [key, n] : counts_) {
        if (n == 0) {
            continue;
        }
        if (!merged.empty() && merged.back().first == key) {
            merged.back().second += n;
        } else {
            merged.emplace_back(key, n);
        }
        total_ += n;
    }
    counts_ = std::move(merged);
}

std::uint64_t SampleHistogram::count(std::uint64_t key) const {
    auto it = std::lower_bound(counts_.begin(), counts_.end(), std::make_pair(key, std::uint64_t{0}));
    return it != counts_.end() && it->first == key ? it->second : 0;
}

SampleHistogram measure_all(const Statevector& state, std::uint64_t shots, std::uint64_t seed) {
    const double norm = state.norm_squared();
    if (!(norm > 0.0)) {
        throw InvalidArgument("cannot measure a zero-norm state");
    }
    std::mt19937_64 rng(seed);
    const auto probs = state.probabilities();
    return SampleHistogram(sample_counts(std::span<const double>(probs), shots, rng));
}

PostselectResult postselect(const Statevector& state,
                            const std::vector<std::pair<std::string, std::uint64_t>>& pattern) {
    const RegisterLayout& layout = state.layout();
    std::uint64_t mask = 0;
    std::uint64_t want = 0;
    for (const auto& [name, value] : pattern) {
        const Segment& s = layout.segment(name);
        const std::uint64_t seg_mask = ((1ULL << s.width) - 1) << s.offset;
        if ((mask & seg_mask) != 0) {
            throw InvalidArgument("segment '" + name + "' selected twice");
        }
        mask |= seg_mask;
        want = layout.with_field(want, name, value);
    }

    RegisterLayout rest;
    std::vector<std::size_t> kept;  // original qubit positions, in order
    for (const Segment& s : layout.segments()) {
        bool selected = false;
        for (const auto& p : pattern) {
            selected = selected || p.first == s.name;
        }
        if (!selected) {
            rest.add(s.name, s.width);
            for (std::size_t q = 0; q < s.width; ++q) {
                kept.push_back(s.offset + q);
            }
        }
    }

    std::vector<amplitude> sub(1ULL << rest.total_qubits(), amplitude(0.0, 0.0));
    double probability = 0.0;
    const auto amps = state.amplitudes();
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        if ((i & mask) != want) {
            continue;
        }
        std::uint64_t j = 0;
        for (std::size_t k = 0; k < kept.size(); ++k) {
            j |= ((i >> kept[k]) & 1ULL) << k;
        }
        sub[j] = amps[i];
        probability += std::norm(amps[i]);
    }
    if (!(probability > 1e-300)) {
        throw EmptyBranch("postselection pattern has zero probability");
    }
    const double scale = 1.0 / std::sqrt(probability);
    for (amplitude& a : sub) {
        a *= scale;
    }
    return {Statevector::from_amplitudes(std::move(rest), std::move(sub), 62), probability};
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'G', 'S', 'V', '0', '0', '1'};

template <class T>
void write_le(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little, "little-endian host expected");
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_le(std::istream& in) {
    static_assert(std::endian::native == std::endian::little, "little-endian host expected");
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) {
        throw MalformedInput("truncated statevector dump");
    }
    return value;
}

}  // namespace

void write_statevector(std::ostream& out, const Statevector& state) {
    out.write(kMagic, sizeof(kMagic));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(state.num_qubits()));
    for (const amplitude& a : state.amplitudes()) {
        write_le<double>(out, a.real());
        write_le<double>(out, a.imag());
    }
}

Statevector read_statevector(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw MalformedInput("not a statevector dump");
    }
    const auto n = read_le<std::uint32_t>(in);
    if (n > 40) {
        throw MalformedInput("statevector dump declares " + std::to_string(n) + " qubits");
    }
    RegisterLayout layout;
    layout.add("q", n);
    std::vector<amplitude> amps(1ULL << n);
    for (amplitude& a : amps) {
        const double re = read_le<double>(in);
        const double im = read_le<double>(in);
        a = {re, im};
    }
    return Statevector::from_amplitudes(std::move(layout), std::move(amps), 62);
}

}  // namespace qsg
