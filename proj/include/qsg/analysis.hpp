#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qsg/encoding.hpp"
#include "qsg/graph.hpp"
#include "qsg/statevector.hpp"

namespace qsg {

// Rescaling between success probability and distance: D = alpha^4 S W p.
struct Normalization {
    double alpha = 1.0;
    std::uint64_t S = 1;
    double W = 1.0;

    double factor() const;
};

Normalization normalization_of(const PreparedState& prepared);

struct DistanceEntry {
    Configuration config;
    double quantum = 0.0;    // reconstructed D
    double classical = 0.0;  // D^0
    double abs_err = 0.0;
    std::uint64_t successes = 0;
};

struct DistanceReport {
    std::vector<DistanceEntry> entries;  // lexicographic config order
    std::uint64_t shots = 0;             // 0 for exact probabilities
    std::uint64_t seed = 0;
    Normalization norm;
    double delta = 0.0;  // sum |D - D^0|
};

// True when a psi_layout index has flag = 1 and both ancilla blocks zero.
bool is_success_outcome(std::uint64_t index, const RegisterDims& dims);

// D(d~) = alpha^4 S W * successes(d) / total. Configs never seen get 0.
DistanceReport reconstruct_distances(const SampleHistogram& histogram, const WeightedGraph& graph,
                                     std::size_t x, const Normalization& norm,
                                     std::uint64_t seed = 0);

// Same from exact branch probabilities (infinite-shot limit).
DistanceReport reconstruct_distances_exact(const PreparedState& prepared, const WeightedGraph& graph);

// Sample psi_f with `shots` and reconstruct.
DistanceReport sample_distances(const PreparedState& prepared, const WeightedGraph& graph,
                                std::uint64_t shots, std::uint64_t seed);

struct ConvergenceRow {
    std::uint64_t shots = 0;
    std::vector<double> deltas;  // one per seed, in seed order
    double mean = 0.0;
    double p25 = 0.0;
    double p50 = 0.0;
    double p75 = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    std::vector<std::uint64_t> seeds;
    double slope = 0.0;      // OLS of ln(mean delta) on ln(shots)
    double intercept = 0.0;
};

// Needs at least 3 shot counts spanning at least two decades.
ConvergenceStudy convergence_study(const PreparedState& prepared, const WeightedGraph& graph,
                                   std::span<const std::uint64_t> shots,
                                   std::span<const std::uint64_t> seeds);
ConvergenceStudy convergence_study(const WeightedGraph& graph, std::size_t x,
                                   std::span<const std::uint64_t> shots,
                                   std::span<const std::uint64_t> seeds,
                                   std::size_t cap = kDefaultQubitCap);

// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

// Least squares y = slope x + intercept.
std::pair<double, double> fit_line(std::span<const double> xs, std::span<const double> ys);

// a^T B^d~ a from the overlap of the d-branch of psi_f (flag 0, ancillas 0)
// with |0, a>|0, a> / ||a||^2, times alpha^2 sqrt(S W) ||a||^2.
double quadratic_form_quantum(const PreparedState& prepared, const Configuration& d,
                              std::span<const double> a);
// Prepares psi_f on the basis state |d> and evaluates the overlap there.
double quadratic_form_quantum(const WeightedGraph& graph, const Configuration& d,
                              std::span<const double> a, std::size_t cap = kDefaultQubitCap);

// Asymptotic cost with every O-constant set to one.
struct CostModel {
    std::size_t N = 0;
    std::size_t M = 0;
    std::size_t x = 0;
    double eps = 1.0;

    double S = 0.0;  // N^x / x!
    double t_min = 0.0;  // sqrt(S) N log log N / eps
    double t_cla = 0.0;  // S N
    std::uint64_t n_min = 0;

    double t_DS = 0.0;   // N
    double t_enc = 0.0;  // N
    double t_E = 0.0;    // N
    double t_toffoli_reflection = 0.0;  // log(2 a_V + 1)
    double t_toffoli_rme = 0.0;         // N log log N
    double t_cQ = 0.0;
    double t_AE = 0.0;  // t_DS + t_cQ / eps
    double t_AA = 0.0;  // S_2 t_AE with S_2 = sqrt(S)
    std::string notes;
};

CostModel cost_model_eval(std::size_t N, std::size_t M, std::size_t x, double eps);

struct CostSweep {
    std::vector<CostModel> rows;  // grouped by x, N ascending
    // Per x: smallest grid N from which t_min < t_cla holds to the end of
    // the grid (0 when it never does).
    std::vector<std::pair<std::size_t, std::size_t>> thresholds;
};

// M = N for every grid point.
CostSweep cost_model_sweep(std::span<const std::size_t> xs, std::span<const std::size_t> Ns,
                           double eps);
// Roughly `per_decade` log-spaced integers in [lo, hi].
std::vector<std::size_t> log_grid(std::size_t lo, std::size_t hi, std::size_t per_decade);

}  // namespace qsg
