#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qsg/circuit.hpp"
#include "qsg/estimation.hpp"
#include "qsg/graph.hpp"
#include "qsg/statevector.hpp"

namespace qsg {

// 22.5 sqrt(S) + 1.4 log2(S)^2
double minfinder_budget(std::uint64_t S);

// Reversible strict less-than against a constant on a `bits`-qubit label:
// qubits [0, bits) label, `bits` sign extension, `bits + 1` marker. Adds
// 2^(bits+1) - threshold, copies the sign onto the marker, adds threshold
// back.
Circuit comparator_circuit(std::size_t bits, std::uint64_t threshold);

// marked[l] = 1 iff the comparator flips the marker on label l. Throws if
// the sign extension is not restored.
std::vector<std::uint8_t> compile_comparator(std::size_t bits, std::uint64_t threshold);

// Flips `marker` on basis states whose `label` segment is below threshold,
// using the `cmp` segment (one qubit, |0>) as sign extension.
void mark_below_threshold(Statevector& state, std::uint64_t threshold,
                          const std::string& label = "label", const std::string& cmp = "cmp",
                          const std::string& marker = "marker");

// Phase -1 on marked indices, then reflection about `reference`
// (phi <- 2 <ref|phi> ref - phi).
void grover_iterate(Statevector& phi, const Statevector& reference,
                    std::span<const std::uint8_t> marked);

// Randomized iteration counts for an unknown number of marked items:
// j uniform in [0, m), m <- min(lambda m, sqrt(S)) on failure, m <- 1 on
// success.
class BoyerSchedule {
public:
    explicit BoyerSchedule(std::uint64_t S, double lambda = 6.0 / 5.0);

    template <class Rng>
    std::uint64_t next(Rng& rng) const {
        const auto upper = static_cast<std::uint64_t>(std::ceil(m_ - 1e-12));
        std::uniform_int_distribution<std::uint64_t> pick(0, std::max<std::uint64_t>(upper, 1) - 1);
        return pick(rng);
    }
    void on_failure();
    void on_success() { m_ = 1.0; }
    double m() const { return m_; }
    double cap() const { return cap_; }

private:
    double m_ = 1.0;
    double lambda_;
    double cap_;
};

enum class MinFinderMode { Full, Hybrid };

struct MinFinderOptions {
    MinFinderMode mode = MinFinderMode::Full;
    std::size_t a_eps = 6;
    std::size_t cap = kDefaultQubitCap;
    // Overrides the standard step budget.
    std::optional<std::uint64_t> budget;
};

struct MinFinderStep {
    std::uint64_t step = 0;            // steps used before this round
    std::string action;                // "init", "search", "update"
    std::uint64_t iterations = 0;      // Grover iterations in the round
    std::string measured;              // d_0 ... d_{N-1}
    std::int64_t measured_label = -1;  // full mode only
    std::int64_t threshold_label = -1; // full mode only
    double measured_distance = 0.0;
    double threshold_distance = 0.0;
    bool accepted = false;
};

struct MinFinderRun {
    std::uint64_t seed = 0;
    MinFinderMode mode = MinFinderMode::Full;
    std::uint64_t S = 0;
    std::uint64_t budget = 0;
    std::uint64_t steps_used = 0;
    bool reduced_budget = false;  // budget below the standard bound
    std::vector<MinFinderStep> log;
    std::vector<double> accepted_distances;  // threshold distance after each update
};

struct MinFinderResult {
    Configuration config;
    double distance = 0.0;
    MinFinderRun run;
};

// Shared, seed-independent state for repeated runs on one instance. Full
// mode holds psi_label; hybrid mode works on the Dicke register alone.
class MinFinder {
public:
    MinFinder(const WeightedGraph& graph, std::size_t x, const MinFinderOptions& options = {});

    MinFinderResult run(std::uint64_t seed) const;

    std::uint64_t S() const { return configs_.size(); }
    std::uint64_t budget() const { return budget_; }
    const std::vector<Configuration>& configs() const { return configs_; }
    const std::optional<LabeledState>& labeled() const { return labeled_; }

    // Grover iterations on the search state for a fixed threshold; exposed
    // for the amplitude-law tests. Returns the probability of marked items
    // after each of 0..iterations steps.
    std::vector<double> marked_trajectory(std::size_t threshold_row, std::uint64_t iterations,
                                          std::int64_t threshold_label = -1) const;

private:
    std::uint64_t sample_threshold_label(std::size_t row, std::mt19937_64& rng) const;
    const std::vector<std::uint8_t>& full_mask(std::uint64_t threshold_label) const;
    // Distribution of (config row, label) after j Grover iterations.
    const std::vector<double>& outcome_distribution(std::uint64_t threshold_label,
                                                    std::uint64_t j) const;
    std::vector<std::uint8_t> hybrid_mask(std::size_t row) const;
    void hybrid_iterate(Statevector& phi, std::span<const std::uint8_t> marked) const;

    WeightedGraph graph_;
    std::size_t x_;
    MinFinderOptions options_;
    std::vector<Configuration> configs_;
    std::vector<double> distances_;
    std::vector<double> phases_;
    std::uint64_t budget_ = 0;

    std::optional<LabeledState> labeled_;
    std::size_t label_shift_ = 0;
    std::uint64_t dicke_mask_ = 0;
    mutable std::map<std::size_t, std::vector<double>> threshold_cache_;
    mutable std::map<std::uint64_t, std::vector<std::uint8_t>> mask_cache_;
    // Per threshold label, one distribution per iteration count. Runs with
    // different seeds share them.
    mutable std::map<std::uint64_t, std::vector<std::vector<double>>> outcome_cache_;
    std::vector<std::int64_t> row_of_dicke_;

    Circuit dicke_;
    Circuit dicke_inverse_;
    std::optional<Statevector> dicke_state_;
};

MinFinderResult find_minimum(const WeightedGraph& graph, std::size_t x, std::uint64_t seed,
                             const MinFinderOptions& options = {});

// One JSON object per line: step, action, iterations, measured, accepted, ...
std::string run_log_json_lines(const MinFinderRun& run);

const char* to_string(MinFinderMode mode);
MinFinderMode parse_mode(const std::string& text);

}  // namespace qsg
