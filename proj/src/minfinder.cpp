#include "qsg/minfinder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "qsg/encoding.hpp"
#include "qsg/error.hpp"

namespace qsg {

double minfinder_budget(std::uint64_t S) {
    if (S == 0) {
        throw InvalidArgument("empty search space");
    }
    const double s = static_cast<double>(S);
    const double lg = std::log2(s);
    return 22.5 * std::sqrt(s) + 1.4 * lg * lg;
}

namespace {

// +c mod 2^w on qubits [0, w): per set bit j of c, increment bits [j, w).
void add_constant(Circuit& c, std::size_t w, std::uint64_t value) {
    for (std::size_t j = 0; j < w; ++j) {
        if (((value >> j) & 1U) == 0) {
            continue;
        }
        for (std::size_t t = w; t-- > j;) {
            std::vector<Control> controls;
            for (std::size_t q = j; q < t; ++q) {
                controls.push_back({q, true});
            }
            if (controls.empty()) {
                c.x(t);
            } else {
                c.mcx(std::move(controls), t);
            }
        }
    }
}

}  // namespace

Circuit comparator_circuit(std::size_t bits, std::uint64_t threshold) {
    if (bits == 0) {
        throw InvalidArgument("comparator needs at least one label bit");
    }
    if (threshold > (std::uint64_t{1} << bits)) {
        throw InvalidArgument("comparator threshold exceeds the label range");
    }
    const std::size_t w = bits + 1;
    const std::uint64_t modulus = std::uint64_t{1} << w;
    Circuit c(w + 1);
    add_constant(c, w, (modulus - threshold) % modulus);
    c.cx(bits, w);
    add_constant(c, w, threshold);
    return c;
}

std::vector<std::uint8_t> compile_comparator(std::size_t bits, std::uint64_t threshold) {
    const Circuit c = comparator_circuit(bits, threshold);
    RegisterLayout layout;
    layout.add("label", bits).add("cmp", 1).add("marker", 1);
    const std::uint64_t count = std::uint64_t{1} << bits;
    std::vector<std::uint8_t> marked(count, 0);
    for (std::uint64_t l = 0; l < count; ++l) {
        Statevector s = Statevector::basis(layout, l);
        c.apply(s);
        std::uint64_t out = 0;
        for (std::uint64_t i = 0; i < s.size(); ++i) {
            if (std::norm(s[i]) > 0.5) {
                out = i;
            }
        }
        if (layout.field(out, "label") != l || layout.field(out, "cmp") != 0) {
            throw Error("comparator did not restore its inputs");
        }
        marked[l] = static_cast<std::uint8_t>(layout.field(out, "marker"));
    }
    return marked;
}

void mark_below_threshold(Statevector& state, std::uint64_t threshold, const std::string& label,
                          const std::string& cmp, const std::string& marker) {
    const RegisterLayout& layout = state.layout();
    const std::size_t bits = layout.segment(label).width;
    if (layout.segment(cmp).width != 1 || layout.segment(marker).width != 1) {
        throw InvalidArgument("comparator scratch and marker must be single qubits");
    }
    std::vector<std::size_t> map = layout.qubits(label);
    map.push_back(layout.qubit(cmp, 0));
    map.push_back(layout.qubit(marker, 0));
    Circuit wide(state.num_qubits());
    wide.append_mapped(comparator_circuit(bits, threshold), map);
    wide.apply(state);
}

void grover_iterate(Statevector& phi, const Statevector& reference,
                    std::span<const std::uint8_t> marked) {
    if (phi.size() != reference.size() || marked.size() != phi.size()) {
        throw InvalidArgument("grover_iterate: size mismatch");
    }
    auto a = phi.amplitudes();
    const auto r = reference.amplitudes();
    amplitude ip{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (marked[i] != 0) {
            a[i] = -a[i];
        }
        ip += std::conj(r[i]) * a[i];
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = 2.0 * ip * r[i] - a[i];
    }
}

BoyerSchedule::BoyerSchedule(std::uint64_t S, double lambda)
    : lambda_(lambda), cap_(std::sqrt(static_cast<double>(S))) {
    if (lambda <= 1.0 || lambda >= 4.0 / 3.0) {
        throw InvalidArgument("schedule factor must lie in (1, 4/3)");
    }
}

void BoyerSchedule::on_failure() { m_ = std::min(lambda_ * m_, std::max(cap_, 1.0)); }

MinFinder::MinFinder(const WeightedGraph& graph, std::size_t x, const MinFinderOptions& options)
    : graph_(graph), x_(x), options_(options), configs_(all_configurations(graph.edge_count(), x)) {
    if (configs_.empty()) {
        throw CardinalityError("no configuration removes " + std::to_string(x) + " of " +
                               std::to_string(graph.edge_count()) + " edges");
    }
    const RegisterDims dims = register_dims(graph);
    const double alpha = std::ldexp(1.0, static_cast<int>(dims.k));
    for (const auto& d : configs_) {
        distances_.push_back(frobenius_distance_sparse(graph, d));
        phases_.push_back(phase_from_probability(block_success_probability(graph, d, alpha)));
    }
    const auto standard = static_cast<std::uint64_t>(std::floor(minfinder_budget(S())));
    budget_ = options.budget.value_or(standard);

    if (options.mode == MinFinderMode::Full) {
        EstimationOptions eo;
        eo.cap = options.cap;
        labeled_ = phase_estimate(graph, x, options.a_eps, eo);
        label_shift_ = labeled_->state().layout().segment("label").offset;
        row_of_dicke_.assign(std::size_t{1} << graph.edge_count(), -1);
        for (std::size_t r = 0; r < configs_.size(); ++r) {
            row_of_dicke_[configs_[r].to_index()] = static_cast<std::int64_t>(r);
        }
    } else {
        if (graph.edge_count() > options.cap) {
            throw ResourceCapError(graph.edge_count(), options.cap, "Dicke register");
        }
        RegisterLayout layout;
        layout.add("dicke", graph.edge_count());
        dicke_ = dicke_prepare(graph.edge_count(), x);
        dicke_inverse_ = dicke_.inverse();
        Statevector s(layout, options.cap);
        dicke_.apply(s);
        dicke_state_ = std::move(s);
    }
    dicke_mask_ = (std::uint64_t{1} << graph.edge_count()) - 1;
}

std::uint64_t MinFinder::sample_threshold_label(std::size_t row, std::mt19937_64& rng) const {
    auto it = threshold_cache_.find(row);
    if (it == threshold_cache_.end()) {
        const LabeledState single = label_single_config(configs_[row], graph_, options_.a_eps, options_.cap);
        it = threshold_cache_.emplace(row, single.label_table().front()).first;
    }
    std::discrete_distribution<std::uint64_t> pick(it->second.begin(), it->second.end());
    return pick(rng);
}

const std::vector<std::uint8_t>& MinFinder::full_mask(std::uint64_t threshold_label) const {
    auto it = mask_cache_.find(threshold_label);
    if (it != mask_cache_.end()) {
        return it->second;
    }
    const std::size_t bits = labeled_->label_bits();
    const std::vector<std::uint8_t> table = compile_comparator(bits, threshold_label);
    const std::uint64_t label_mask = (std::uint64_t{1} << bits) - 1;
    std::vector<std::uint8_t> mask(labeled_->state().size());
    for (std::uint64_t i = 0; i < mask.size(); ++i) {
        mask[i] = table[(i >> label_shift_) & label_mask];
    }
    return mask_cache_.emplace(threshold_label, std::move(mask)).first->second;
}

const std::vector<double>& MinFinder::outcome_distribution(std::uint64_t threshold_label,
                                                          std::uint64_t j) const {
    auto& table = outcome_cache_[threshold_label];
    if (j < table.size()) {
        return table[j];
    }
    const std::uint64_t upto =
        std::max<std::uint64_t>(j, static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(S())))));
    const auto& mask = full_mask(threshold_label);
    const std::size_t labels = labeled_->label_count();
    const std::uint64_t label_mask = labels - 1;
    table.clear();
    Statevector phi = labeled_->state();
    for (std::uint64_t it = 0; it <= upto; ++it) {
        if (it > 0) {
            grover_iterate(phi, labeled_->state(), mask);
        }
        std::vector<double> dist(configs_.size() * labels, 0.0);
        for (std::uint64_t i = 0; i < phi.size(); ++i) {
            const double p = std::norm(phi[i]);
            if (p == 0.0) {
                continue;
            }
            const std::int64_t row = row_of_dicke_[i & dicke_mask_];
            if (row >= 0) {
                dist[static_cast<std::size_t>(row) * labels + ((i >> label_shift_) & label_mask)] += p;
            }
        }
        table.push_back(std::move(dist));
    }
    return table[j];
}

std::vector<std::uint8_t> MinFinder::hybrid_mask(std::size_t row) const {
    std::vector<std::uint8_t> mask(dicke_state_->size(), 0);
    for (std::size_t r = 0; r < configs_.size(); ++r) {
        if (phases_[r] < phases_[row]) {
            mask[configs_[r].to_index()] = 1;
        }
    }
    return mask;
}

// Oracle, then -A P_0 A^dagger with A the Dicke preparation.
void MinFinder::hybrid_iterate(Statevector& phi, std::span<const std::uint8_t> marked) const {
    auto a = phi.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (marked[i] != 0) {
            a[i] = -a[i];
        }
    }
    dicke_inverse_.apply(phi);
    std::vector<Control> zeros;
    for (std::size_t q = 0; q < phi.num_qubits(); ++q) {
        zeros.push_back({q, false});
    }
    phi.apply_phase(zeros, std::numbers::pi);
    dicke_.apply(phi);
    for (auto& v : a) {
        v = -v;
    }
}

std::vector<double> MinFinder::marked_trajectory(std::size_t threshold_row, std::uint64_t iterations,
                                                 std::int64_t threshold_label) const {
    std::vector<double> out;
    auto marked_probability = [](const Statevector& s, std::span<const std::uint8_t> mask) {
        double p = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (mask[i] != 0) {
                p += std::norm(s[i]);
            }
        }
        return p;
    };
    if (labeled_) {
        if (threshold_label < 0) {
            throw InvalidArgument("full mode needs a threshold label");
        }
        const auto& mask = full_mask(static_cast<std::uint64_t>(threshold_label));
        Statevector phi = labeled_->state();
        out.push_back(marked_probability(phi, mask));
        for (std::uint64_t j = 0; j < iterations; ++j) {
            grover_iterate(phi, labeled_->state(), mask);
            out.push_back(marked_probability(phi, mask));
        }
    } else {
        const auto mask = hybrid_mask(threshold_row);
        Statevector phi = *dicke_state_;
        out.push_back(marked_probability(phi, mask));
        for (std::uint64_t j = 0; j < iterations; ++j) {
            hybrid_iterate(phi, mask);
            out.push_back(marked_probability(phi, mask));
        }
    }
    return out;
}

namespace {

std::uint64_t draw_index(const Statevector& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double target = u(rng) * s.norm_squared();
    double acc = 0.0;
    std::uint64_t last = 0;
    for (std::uint64_t i = 0; i < s.size(); ++i) {
        const double p = std::norm(s[i]);
        if (p <= 0.0) {
            continue;
        }
        acc += p;
        last = i;
        if (acc > target) {
            return i;
        }
    }
    return last;
}

}  // namespace

MinFinderResult MinFinder::run(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    MinFinderRun log;
    log.seed = seed;
    log.mode = options_.mode;
    log.S = S();
    log.budget = budget_;
    log.reduced_budget = budget_ < static_cast<std::uint64_t>(std::floor(minfinder_budget(S())));

    std::uniform_int_distribution<std::size_t> first(0, configs_.size() - 1);
    std::size_t y = first(rng);
    std::int64_t y_label = -1;
    if (labeled_) {
        y_label = static_cast<std::int64_t>(sample_threshold_label(y, rng));
    }
    MinFinderStep init;
    init.action = "init";
    init.measured = configs_[y].to_string();
    init.threshold_label = y_label;
    init.measured_distance = distances_[y];
    init.threshold_distance = distances_[y];
    init.accepted = true;
    log.log.push_back(init);
    log.accepted_distances.push_back(distances_[y]);

    std::map<std::uint64_t, std::size_t> row_of;
    for (std::size_t r = 0; r < configs_.size(); ++r) {
        row_of[configs_[r].to_index()] = r;
    }

    BoyerSchedule schedule(S());
    std::uint64_t used = 0;
    std::vector<std::uint8_t> hybrid_marked;
    if (!labeled_) {
        hybrid_marked = hybrid_mask(y);
    }
    while (S() > 1 && used < budget_) {
        std::uint64_t j = schedule.next(rng);
        j = std::min(j, budget_ - used);

        MinFinderStep step;
        step.step = used;
        step.action = "search";
        step.iterations = j;
        step.threshold_label = y_label;
        step.threshold_distance = distances_[y];

        std::uint64_t outcome = 0;
        if (labeled_) {
            const auto& dist = outcome_distribution(static_cast<std::uint64_t>(y_label), j);
            std::discrete_distribution<std::size_t> pick(dist.begin(), dist.end());
            const std::size_t cell = pick(rng);
            const std::size_t labels = labeled_->label_count();
            outcome = configs_[cell / labels].to_index();
            step.measured_label = static_cast<std::int64_t>(cell % labels);
        } else {
            Statevector phi = *dicke_state_;
            for (std::uint64_t it = 0; it < j; ++it) {
                hybrid_iterate(phi, hybrid_marked);
            }
            outcome = draw_index(phi, rng);
        }
        used += j;

        const std::size_t r = row_of.at(outcome);
        step.measured = configs_[r].to_string();
        step.measured_distance = distances_[r];
        step.accepted = distances_[r] < distances_[y];
        log.log.push_back(step);

        if (step.accepted) {
            y = r;
            schedule.on_success();
            if (labeled_) {
                y_label = static_cast<std::int64_t>(sample_threshold_label(y, rng));
            } else {
                hybrid_marked = hybrid_mask(y);
            }
            MinFinderStep update;
            update.step = used;
            update.action = "update";
            update.measured = configs_[y].to_string();
            update.threshold_label = y_label;
            update.measured_distance = distances_[y];
            update.threshold_distance = distances_[y];
            update.accepted = true;
            log.log.push_back(update);
            log.accepted_distances.push_back(distances_[y]);
        } else {
            schedule.on_failure();
        }
    }
    log.steps_used = used;
    return {configs_[y], distances_[y], std::move(log)};
}

MinFinderResult find_minimum(const WeightedGraph& graph, std::size_t x, std::uint64_t seed,
                             const MinFinderOptions& options) {
    return MinFinder(graph, x, options).run(seed);
}

std::string run_log_json_lines(const MinFinderRun& run) {
    std::ostringstream out;
    for (const auto& s : run.log) {
        nlohmann::json j;
        j["seed"] = run.seed;
        j["step"] = s.step;
        j["action"] = s.action;
        j["iterations"] = s.iterations;
        j["measured"] = s.measured;
        if (s.measured_label >= 0) {
            j["measured_label"] = s.measured_label;
        }
        if (s.threshold_label >= 0) {
            j["threshold_label"] = s.threshold_label;
        }
        j["measured_distance"] = s.measured_distance;
        j["threshold_distance"] = s.threshold_distance;
        j["accepted"] = s.accepted;
        out << j.dump() << '\n';
    }
    return out.str();
}

const char* to_string(MinFinderMode mode) {
    return mode == MinFinderMode::Full ? "full" : "hybrid";
}

MinFinderMode parse_mode(const std::string& text) {
    if (text == "full") {
        return MinFinderMode::Full;
    }
    if (text == "hybrid") {
        return MinFinderMode::Hybrid;
    }
    throw InvalidArgument("unknown search mode '" + text + "'");
}

}  // namespace qsg
