#include "qsg/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qsg/error.hpp"

namespace qsg {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string with_args(const std::string& base, const std::vector<double>& args) {
    std::string out = base + '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        out += (i ? "," : "") + fmt(args[i]);
    }
    return out + ')';
}

std::string base_name(const std::string& name) {
    return name.substr(0, name.find('('));
}

std::vector<double> parse_args(std::string_view name) {
    std::vector<double> out;
    const auto open = name.find('(');
    if (open == std::string_view::npos) {
        return out;
    }
    const auto close = name.rfind(')');
    if (close == std::string_view::npos || close < open) {
        throw MalformedInput("unbalanced parameter list in '" + std::string(name) + "'");
    }
    std::stringstream ss{std::string(name.substr(open + 1, close - open - 1))};
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw MalformedInput("bad gate parameter '" + item + "'");
        }
    }
    return out;
}

bool is_x(const Mat2& u) { return u == gates::x(); }

// Resolves a serialized gate name to its matrix; false if unknown.
bool matrix_from_name(std::string_view name, Mat2& out) {
    const std::string base = base_name(std::string(name));
    const std::vector<double> args = parse_args(name);
    auto need = [&](std::size_t n) {
        if (args.size() != n) {
            throw MalformedInput("gate '" + std::string(name) + "' expects " + std::to_string(n) +
                                 " parameters");
        }
    };
    if (base == "h") {
        out = gates::h();
    } else if (base == "x") {
        out = gates::x();
    } else if (base == "y") {
        out = gates::y();
    } else if (base == "z") {
        out = gates::z();
    } else if (base == "ry") {
        need(1);
        out = gates::ry(args[0]);
    } else if (base == "rz") {
        need(1);
        out = gates::rz(args[0]);
    } else if (base == "p") {
        need(1);
        out = gates::phase(args[0]);
    } else if (base == "u") {
        need(8);
        for (std::size_t i = 0; i < 4; ++i) {
            out[i] = {args[2 * i], args[2 * i + 1]};
        }
    } else {
        return false;
    }
    return true;
}

std::string serializable_name(const Gate& g) {
    Mat2 probe;
    if (matrix_from_name(g.name, probe) && probe == g.matrix) {
        return g.name;
    }
    std::vector<double> args;
    for (const amplitude& a : g.matrix) {
        args.push_back(a.real());
        args.push_back(a.imag());
    }
    return with_args("u", args);
}

Gate matrix_gate(std::string name, std::vector<Control> controls, std::size_t target,
                 const Mat2& u) {
    Gate g;
    g.kind = Gate::Kind::Matrix;
    g.name = std::move(name);
    g.targets = {target};
    g.controls = std::move(controls);
    g.matrix = u;
    return g;
}

}  // namespace

std::string Gate::count_key() const {
    std::string base = kind == Kind::Swap ? "swap" : base_name(name);
    if (controls.size() <= 2) {
        return std::string(controls.size(), 'c') + base;
    }
    return "mc" + base;
}

void Circuit::check(const Gate& gate) const {
    std::vector<std::size_t> qs = gate.targets;
    for (const Control& c : gate.controls) {
        qs.push_back(c.qubit);
    }
    for (std::size_t q : qs) {
        if (q >= num_qubits_) {
            throw InvalidArgument("gate '" + gate.name + "' touches qubit " + std::to_string(q) +
                                  " of a " + std::to_string(num_qubits_) + "-qubit circuit");
        }
    }
    std::sort(qs.begin(), qs.end());
    if (std::adjacent_find(qs.begin(), qs.end()) != qs.end()) {
        throw InvalidArgument("gate '" + gate.name + "' has colliding qubits");
    }
    const std::size_t want = gate.kind == Gate::Kind::Matrix ? 1 : gate.kind == Gate::Kind::Swap ? 2 : 0;
    if (gate.targets.size() != want) {
        throw InvalidArgument("gate '" + gate.name + "' has wrong target count");
    }
    if (gate.kind == Gate::Kind::Matrix && !gates::is_unitary(gate.matrix)) {
        throw InvalidArgument("gate '" + gate.name + "' is not unitary");
    }
}

Circuit& Circuit::add(Gate gate) {
    check(gate);
    gates_.push_back(std::move(gate));
    return *this;
}

Circuit& Circuit::h(std::size_t q) { return add(matrix_gate("h", {}, q, gates::h())); }
Circuit& Circuit::x(std::size_t q) { return add(matrix_gate("x", {}, q, gates::x())); }
Circuit& Circuit::z(std::size_t q) { return add(matrix_gate("z", {}, q, gates::z())); }

Circuit& Circuit::ry(std::size_t q, double theta) {
    return add(matrix_gate(with_args("ry", {theta}), {}, q, gates::ry(theta)));
}

Circuit& Circuit::cx(std::size_t control, std::size_t target) {
    return add(matrix_gate("x", {{control, true}}, target, gates::x()));
}

Circuit& Circuit::cz(std::size_t control, std::size_t target) {
    return add(matrix_gate("z", {{control, true}}, target, gates::z()));
}

Circuit& Circuit::cry(std::size_t control, std::size_t target, double theta) {
    return add(matrix_gate(with_args("ry", {theta}), {{control, true}}, target, gates::ry(theta)));
}

Circuit& Circuit::swap(std::size_t a, std::size_t b) {
    Gate g;
    g.kind = Gate::Kind::Swap;
    g.name = "swap";
    g.targets = {a, b};
    return add(std::move(g));
}

Circuit& Circuit::mcx(std::vector<Control> controls, std::size_t target) {
    return add(matrix_gate("x", std::move(controls), target, gates::x()));
}

Circuit& Circuit::mcz(std::vector<Control> controls, std::size_t target) {
    return add(matrix_gate("z", std::move(controls), target, gates::z()));
}

Circuit& Circuit::mcry(std::vector<Control> controls, std::size_t target, double theta) {
    return add(matrix_gate(with_args("ry", {theta}), std::move(controls), target, gates::ry(theta)));
}

Circuit& Circuit::unitary(std::string name, std::vector<Control> controls, std::size_t target,
                          const Mat2& u) {
    return add(matrix_gate(std::move(name), std::move(controls), target, u));
}

Circuit& Circuit::phase(std::vector<Control> controls, double phi) {
    Gate g;
    g.kind = Gate::Kind::Phase;
    g.name = with_args("phase", {phi});
    g.controls = std::move(controls);
    g.angle = phi;
    return add(std::move(g));
}

Circuit& Circuit::append(const Circuit& other) {
    if (other.num_qubits_ > num_qubits_) {
        throw InvalidArgument("appended circuit is wider than the host");
    }
    for (const Gate& g : other.gates_) {
        gates_.push_back(g);
    }
    return *this;
}

Circuit& Circuit::append_mapped(const Circuit& other, const std::vector<std::size_t>& map) {
    if (map.size() != other.num_qubits_) {
        throw InvalidArgument("qubit map size does not match circuit width");
    }
    for (Gate g : other.gates_) {
        for (std::size_t& t : g.targets) {
            t = map[t];
        }
        for (Control& c : g.controls) {
            c.qubit = map[c.qubit];
        }
        add(std::move(g));
    }
    return *this;
}

Circuit Circuit::inverse() const {
    Circuit out(num_qubits_);
    out.gates_.reserve(gates_.size());
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
        Gate g = *it;
        if (g.kind == Gate::Kind::Matrix) {
            g.matrix = gates::dagger(g.matrix);
            const std::string base = base_name(g.name);
            if (base == "ry" || base == "rz" || base == "p") {
                g.name = with_args(base, {-parse_args(g.name).at(0)});
            } else if (base != "h" && base != "x" && base != "y" && base != "z") {
                g.name = g.name + "_dg";
            }
        } else if (g.kind == Gate::Kind::Phase) {
            g.angle = -g.angle;
            g.name = with_args("phase", {g.angle});
        }
        out.gates_.push_back(std::move(g));
    }
    return out;
}

Circuit Circuit::controlled(Control control) const {
    Circuit out(std::max(num_qubits_, control.qubit + 1));
    for (Gate g : gates_) {
        g.controls.insert(g.controls.begin(), control);
        out.add(std::move(g));
    }
    return out;
}

void Circuit::apply(Statevector& state) const {
    if (state.num_qubits() < num_qubits_) {
        throw InvalidArgument("circuit is wider than the state");
    }
    for (const Gate& g : gates_) {
        switch (g.kind) {
            case Gate::Kind::Matrix:
                state.apply_controlled(g.controls, g.targets[0], g.matrix);
                break;
            case Gate::Kind::Swap:
                state.apply_swap(g.controls, g.targets[0], g.targets[1]);
                break;
            case Gate::Kind::Phase:
                state.apply_phase(g.controls, g.angle);
                break;
        }
    }
}

std::string Circuit::to_text() const {
    std::string out;
    for (const Gate& g : gates_) {
        out += g.kind == Gate::Kind::Matrix ? serializable_name(g) : g.name;
        out += ';';
        for (std::size_t t : g.targets) {
            out += ' ' + std::to_string(t);
        }
        out += ';';
        for (const Control& c : g.controls) {
            out += ' ' + std::to_string(c.qubit) + (c.polarity ? '+' : '-');
        }
        out += '\n';
    }
    return out;
}

Circuit Circuit::from_text(std::string_view text, std::size_t num_qubits) {
    Circuit out(num_qubits);
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto s1 = line.find(';');
        const auto s2 = s1 == std::string::npos ? s1 : line.find(';', s1 + 1);
        if (s2 == std::string::npos) {
            throw MalformedInput("expected `name; targets; controls`", line_no);
        }
        std::string name = line.substr(0, s1);
        name.erase(0, name.find_first_not_of(' '));
        name.erase(name.find_last_not_of(' ') + 1);

        std::vector<std::size_t> targets;
        std::istringstream ts(line.substr(s1 + 1, s2 - s1 - 1));
        for (std::string tok; ts >> tok;) {
            std::size_t q = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), q);
            if (ec != std::errc() || p != tok.data() + tok.size()) {
                throw MalformedInput("bad target '" + tok + "'", line_no);
            }
            targets.push_back(q);
        }
        std::vector<Control> controls;
        std::istringstream cs(line.substr(s2 + 1));
        for (std::string tok; cs >> tok;) {
            const char pol = tok.back();
            std::size_t q = 0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size() - 1, q);
            if ((pol != '+' && pol != '-') || ec != std::errc() || p != tok.data() + tok.size() - 1) {
                throw MalformedInput("bad control '" + tok + "'", line_no);
            }
            controls.push_back({q, pol == '+'});
        }

        Gate g;
        g.name = name;
        g.targets = std::move(targets);
        g.controls = std::move(controls);
        try {
            if (name == "swap") {
                g.kind = Gate::Kind::Swap;
            } else if (base_name(name) == "phase") {
                g.kind = Gate::Kind::Phase;
                const auto args = parse_args(name);
                if (args.size() != 1) {
                    throw MalformedInput("phase expects one parameter");
                }
                g.angle = args[0];
            } else if (!matrix_from_name(name, g.matrix)) {
                throw MalformedInput("unknown gate '" + name + "'");
            }
            out.add(std::move(g));
        } catch (const MalformedInput& e) {
            throw MalformedInput(e.what(), line_no);
        } catch (const InvalidArgument& e) {
            throw MalformedInput(e.what(), line_no);
        }
    }
    return out;
}

std::map<std::string, std::size_t> Circuit::gate_counts() const {
    std::map<std::string, std::size_t> out;
    for (const Gate& g : gates_) {
        ++out[g.count_key()];
    }
    return out;
}

// ---------------------------------------------------------------------------

Mat2 unitary_sqrt(const Mat2& u) {
    const amplitude det = u[0] * u[3] - u[1] * u[2];
    const amplitude tr = u[0] + u[3];
    amplitude s = std::sqrt(det);
    if (std::abs(tr - 2.0 * s) > std::abs(tr + 2.0 * s)) {
        s = -s;
    }
    const amplitude t = std::sqrt(tr + 2.0 * s);
    return {(u[0] + s) / t, u[1] / t, u[2] / t, (u[3] + s) / t};
}

namespace {

constexpr std::size_t kRecursiveControlLimit = 8;

class Decomposer {
public:
    explicit Decomposer(Circuit& out) : out_(out) {}

    void emit(const Gate& g) {
        bool open = false;
        for (const Control& c : g.controls) {
            open = open || !c.polarity;
        }
        if (open) {
            for (const Control& c : g.controls) {
                if (!c.polarity) {
                    out_.x(c.qubit);
                }
            }
            Gate closed = g;
            for (Control& c : closed.controls) {
                c.polarity = true;
            }
            emit(closed);
            for (const Control& c : g.controls) {
                if (!c.polarity) {
                    out_.x(c.qubit);
                }
            }
            return;
        }

        switch (g.kind) {
            case Gate::Kind::Phase:
                if (g.controls.size() <= 1) {
                    out_.add(g);
                } else {
                    Gate m;
                    m.name = with_args("p", {g.angle});
                    m.matrix = gates::phase(g.angle);
                    m.targets = {g.controls.back().qubit};
                    m.controls.assign(g.controls.begin(), g.controls.end() - 1);
                    emit(m);
                }
                return;
            case Gate::Kind::Swap: {
                if (g.controls.empty()) {
                    out_.add(g);
                    return;
                }
                const std::size_t a = g.targets[0];
                const std::size_t b = g.targets[1];
                out_.cx(b, a);
                Gate mid;
                mid.name = "x";
                mid.matrix = gates::x();
                mid.targets = {b};
                mid.controls = g.controls;
                mid.controls.push_back({a, true});
                emit(mid);
                out_.cx(b, a);
                return;
            }
            case Gate::Kind::Matrix:
                emit_matrix(g.controls, g.targets[0], g.matrix, g.name);
                return;
        }
    }

private:
    void emit_matrix(const std::vector<Control>& controls, std::size_t target, const Mat2& u,
                     const std::string& name) {
        const std::size_t k = controls.size();
        if (k <= 1 || (k == 2 && is_x(u))) {
            out_.unitary(name, controls, target, u);
            return;
        }
        if (k > kRecursiveControlLimit && is_x(u) && try_ladder(controls, target)) {
            return;
        }
        const Mat2 v = unitary_sqrt(u);
        const Mat2 vd = gates::dagger(v);
        const std::size_t last = controls.back().qubit;
        const std::vector<Control> rest(controls.begin(), controls.end() - 1);
        out_.unitary("v", {{last, true}}, target, v);
        emit_matrix(rest, last, gates::x(), "x");
        out_.unitary("v", {{last, true}}, target, vd);
        emit_matrix(rest, last, gates::x(), "x");
        emit_matrix(rest, target, v, "v");
    }

    // Toffoli ladder for C^n X with n - 2 borrowed qubits, 4(n - 2) Toffolis.
    bool try_ladder(const std::vector<Control>& controls, std::size_t target) {
        const std::size_t n = controls.size();
        std::vector<bool> busy(out_.num_qubits(), false);
        busy[target] = true;
        for (const Control& c : controls) {
            busy[c.qubit] = true;
        }
        std::vector<std::size_t> anc;
        for (std::size_t q = 0; q < busy.size() && anc.size() < n - 2; ++q) {
            if (!busy[q]) {
                anc.push_back(q);
            }
        }
        if (anc.size() < n - 2) {
            return false;
        }
        auto c = [&](std::size_t i) { return controls[i].qubit; };
        auto tof = [&](std::size_t a, std::size_t b, std::size_t t) {
            out_.mcx({{a, true}, {b, true}}, t);
        };
        auto top = [&] { tof(c(n - 1), anc[n - 3], target); };
        auto sweep = [&] {
            for (std::size_t i = n - 3; i >= 1; --i) {
                tof(c(i + 1), anc[i - 1], anc[i]);
            }
            tof(c(0), c(1), anc[0]);
            for (std::size_t i = 1; i <= n - 3; ++i) {
                tof(c(i + 1), anc[i - 1], anc[i]);
            }
        };
        top();
        sweep();
        top();
        sweep();
        return true;
    }

    Circuit& out_;
};

}  // namespace

Circuit decompose_multi_controlled(const Circuit& circuit) {
    Circuit out(circuit.num_qubits());
    Decomposer d(out);
    for (const Gate& g : circuit.gates()) {
        d.emit(g);
    }
    return out;
}

}  // namespace qsg
