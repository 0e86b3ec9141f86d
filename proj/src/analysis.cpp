#include "qsg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "qsg/error.hpp"

namespace qsg {

double Normalization::factor() const { return std::pow(alpha, 4) * static_cast<double>(S) * W; }

Normalization normalization_of(const PreparedState& prepared) {
    return {prepared.alpha(), prepared.S(), prepared.W()};
}

bool is_success_outcome(std::uint64_t index, const RegisterDims& dims) {
    const std::uint64_t work = index >> dims.edges;
    const std::uint64_t reg_mask = (std::uint64_t{1} << dims.reg) - 1;
    const std::uint64_t e1 = work & reg_mask;
    const std::uint64_t e2 = (work >> dims.reg) & reg_mask;
    const std::uint64_t flag = (work >> (2 * dims.reg)) & 1U;
    return flag == 1 && (e1 >> dims.m) == 0 && (e2 >> dims.m) == 0;
}

namespace {

DistanceReport make_report(const WeightedGraph& graph, std::size_t x, const Normalization& norm) {
    DistanceReport report;
    report.norm = norm;
    for (const auto& d : all_configurations(graph.edge_count(), x)) {
        DistanceEntry e;
        e.config = d;
        e.classical = frobenius_distance_sparse(graph, d);
        report.entries.push_back(std::move(e));
    }
    return report;
}

void finish(DistanceReport& report) {
    report.delta = 0.0;
    for (auto& e : report.entries) {
        e.abs_err = std::abs(e.quantum - e.classical);
        report.delta += e.abs_err;
    }
}

}  // namespace

DistanceReport reconstruct_distances(const SampleHistogram& histogram, const WeightedGraph& graph,
                                     std::size_t x, const Normalization& norm, std::uint64_t seed) {
    if (histogram.total() == 0) {
        throw InvalidArgument("histogram holds no shots");
    }
    const RegisterDims dims = register_dims(graph);
    DistanceReport report = make_report(graph, x, norm);
    report.shots = histogram.total();
    report.seed = seed;
    std::map<std::uint64_t, std::size_t> row_of;
    for (std::size_t r = 0; r < report.entries.size(); ++r) {
        row_of[report.entries[r].config.to_index()] = r;
    }
    const std::uint64_t dicke_mask = (std::uint64_t{1} << dims.edges) - 1;
    for (const auto& [key, count] : histogram.counts()) {
        if (!is_success_outcome(key, dims)) {
            continue;
        }
        const auto it = row_of.find(key & dicke_mask);
        if (it != row_of.end()) {
            report.entries[it->second].successes += count;
        }
    }
    const double total = static_cast<double>(histogram.total());
    for (auto& e : report.entries) {
        e.quantum = norm.factor() * static_cast<double>(e.successes) / total;
    }
    finish(report);
    return report;
}

DistanceReport reconstruct_distances_exact(const PreparedState& prepared, const WeightedGraph& graph) {
    const Normalization norm = normalization_of(prepared);
    DistanceReport report;
    report.norm = norm;
    for (const auto& d : prepared.configs()) {
        DistanceEntry e;
        e.config = d;
        e.classical = frobenius_distance_sparse(graph, d);
        e.quantum = norm.factor() * prepared.success_probability(d);
        report.entries.push_back(std::move(e));
    }
    finish(report);
    return report;
}

DistanceReport sample_distances(const PreparedState& prepared, const WeightedGraph& graph,
                                std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw InvalidArgument("shots must be positive");
    }
    const SampleHistogram h = prepared.sample(shots, seed);
    return reconstruct_distances(h, graph, prepared.removed(), normalization_of(prepared), seed);
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw InvalidArgument("percentile of an empty set");
    }
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::pair<double, double> fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw InvalidArgument("line fit needs two or more points");
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) {
        throw InvalidArgument("line fit needs distinct abscissae");
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

ConvergenceStudy convergence_study(const PreparedState& prepared, const WeightedGraph& graph,
                                   std::span<const std::uint64_t> shots,
                                   std::span<const std::uint64_t> seeds) {
    if (shots.size() < 3) {
        throw InvalidArgument("convergence study needs at least 3 shot counts");
    }
    if (seeds.empty()) {
        throw InvalidArgument("convergence study needs at least one seed");
    }
    const auto [lo, hi] = std::minmax_element(shots.begin(), shots.end());
    if (*lo == 0 || static_cast<double>(*hi) < 100.0 * static_cast<double>(*lo)) {
        throw InvalidArgument("shot grid must span at least two decades");
    }
    ConvergenceStudy study;
    study.seeds.assign(seeds.begin(), seeds.end());
    std::vector<double> lx;
    std::vector<double> ly;
    for (const std::uint64_t s : shots) {
        ConvergenceRow row;
        row.shots = s;
        for (const std::uint64_t seed : seeds) {
            row.deltas.push_back(sample_distances(prepared, graph, s, seed).delta);
        }
        row.mean = std::accumulate(row.deltas.begin(), row.deltas.end(), 0.0) /
                   static_cast<double>(row.deltas.size());
        row.p25 = percentile(row.deltas, 25.0);
        row.p50 = percentile(row.deltas, 50.0);
        row.p75 = percentile(row.deltas, 75.0);
        if (row.mean > 0.0) {
            lx.push_back(std::log(static_cast<double>(s)));
            ly.push_back(std::log(row.mean));
        }
        study.rows.push_back(std::move(row));
    }
    if (lx.size() >= 2) {
        std::tie(study.slope, study.intercept) = fit_line(lx, ly);
    }
    return study;
}

ConvergenceStudy convergence_study(const WeightedGraph& graph, std::size_t x,
                                   std::span<const std::uint64_t> shots,
                                   std::span<const std::uint64_t> seeds, std::size_t cap) {
    PrepareOptions opt;
    opt.cap = cap;
    const PreparedState prepared = prepare_psi_f(graph, x, opt);
    return convergence_study(prepared, graph, shots, seeds);
}

double quadratic_form_quantum(const PreparedState& prepared, const Configuration& d,
                              std::span<const double> a) {
    const RegisterDims& dims = prepared.dims();
    if (a.size() != dims.vertices) {
        throw InvalidArgument("vector length " + std::to_string(a.size()) + " does not match " +
                              std::to_string(dims.vertices) + " vertices");
    }
    double norm2 = 0.0;
    for (const double v : a) {
        norm2 += v * v;
    }
    if (norm2 == 0.0) {
        throw InvalidArgument("quadratic form needs a nonzero vector");
    }
    if (d.size() != dims.edges || d.popcount() != prepared.removed()) {
        throw CardinalityError("configuration " + d.to_string() + " is not a weight-" +
                               std::to_string(prepared.removed()) + " pattern");
    }
    const std::vector<amplitude> branch = prepared.branch(d);
    const std::size_t R = std::size_t{1} << dims.reg;
    amplitude ov = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) {
        for (std::size_t r = 0; r < a.size(); ++r) {
            ov += a[r] * a[s] * branch[r + R * s];
        }
    }
    ov /= norm2;
    const double scale = prepared.alpha() * prepared.alpha() *
                         std::sqrt(static_cast<double>(prepared.S()) * prepared.W());
    return ov.real() * scale * norm2;
}

double quadratic_form_quantum(const WeightedGraph& graph, const Configuration& d,
                              std::span<const double> a, std::size_t cap) {
    PrepareOptions opt;
    opt.cap = cap;
    opt.basis = d;
    const PreparedState prepared = prepare_psi_f(graph, d.popcount(), opt);
    return quadratic_form_quantum(prepared, d, a);
}

CostModel cost_model_eval(std::size_t N, std::size_t M, std::size_t x, double eps) {
    if (N < 2) {
        throw InvalidArgument("cost model needs N >= 2");
    }
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw InvalidArgument("precision must lie in (0, 1]");
    }
    CostModel c;
    c.N = N;
    c.M = M;
    c.x = x;
    c.eps = eps;
    const double n = static_cast<double>(N);
    c.S = std::exp(static_cast<double>(x) * std::log(n) - std::lgamma(static_cast<double>(x) + 1.0));
    const double loglog = std::log2(std::log2(n));
    c.t_min = std::sqrt(c.S) * n * loglog / eps;
    c.t_cla = c.S * n;

    const std::size_t lgN = ceil_log2(N);
    const std::size_t lgNM = ceil_log2(std::max(N, M));
    const auto lg_eps = static_cast<std::size_t>(std::ceil(std::log2(1.0 / eps) - 1e-12));
    c.n_min = std::min(N, x * lgN) + 4 * lgNM + 3 + lg_eps;

    const RegisterDims dims = register_dims(N, std::max<std::size_t>(M, 2));
    c.t_DS = n;
    c.t_enc = n;
    c.t_E = n;
    c.t_toffoli_reflection = std::log2(2.0 * static_cast<double>(dims.a_V) + 1.0);
    c.t_toffoli_rme = n * loglog;
    c.t_cQ = c.t_toffoli_reflection + c.t_enc + c.t_toffoli_rme + c.t_E;
    c.t_AE = c.t_DS + c.t_cQ / eps;
    c.t_AA = std::sqrt(c.S) * c.t_AE;
    c.notes =
        "unit O-constants; S1 (search rounds) and S2 (amplification iterations) split the budget "
        "with S1*S2 = O(sqrt(S)); n_min omits reusable ancillas";
    return c;
}

CostSweep cost_model_sweep(std::span<const std::size_t> xs, std::span<const std::size_t> Ns,
                           double eps) {
    CostSweep sweep;
    for (const std::size_t x : xs) {
        std::vector<std::size_t> grid(Ns.begin(), Ns.end());
        std::sort(grid.begin(), grid.end());
        std::size_t threshold = 0;
        for (const std::size_t N : grid) {
            const CostModel c = cost_model_eval(N, N, x, eps);
            if (c.t_min < c.t_cla) {
                if (threshold == 0) {
                    threshold = N;
                }
            } else {
                threshold = 0;
            }
            sweep.rows.push_back(c);
        }
        sweep.thresholds.emplace_back(x, threshold);
    }
    return sweep;
}

std::vector<std::size_t> log_grid(std::size_t lo, std::size_t hi, std::size_t per_decade) {
    if (lo < 1 || hi < lo || per_decade == 0) {
        throw InvalidArgument("bad grid bounds");
    }
    std::vector<std::size_t> out;
    const double step = 1.0 / static_cast<double>(per_decade);
    for (double e = std::log10(static_cast<double>(lo)); e <= std::log10(static_cast<double>(hi)) + 1e-9;
         e += step) {
        const auto v = static_cast<std::size_t>(std::llround(std::pow(10.0, e)));
        if (out.empty() || out.back() != v) {
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace qsg
