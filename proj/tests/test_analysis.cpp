#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qsg/analysis.hpp"
#include "qsg/error.hpp"

using namespace qsg;

namespace {

WeightedGraph p3() { return WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 3.0}}); }
WeightedGraph ring4() { return read_graph_file(QSG_DATA_DIR "/ring4.txt"); }

}  // namespace

TEST_CASE("exact reconstruction reproduces the classical distances") {
    for (const auto& g : oracle::builtin_graphs()) {
        const RegisterDims dims = register_dims(g);
        if (dims.total_qubits() > 20) {
            continue;
        }
        for (std::size_t x = 0; x <= g.edge_count(); ++x) {
            const PreparedState prepared = prepare_psi_f(g, x);
            const DistanceReport r = reconstruct_distances_exact(prepared, g);
            REQUIRE(r.entries.size() == static_cast<std::size_t>(oracle::binom(g.edge_count(), x)));
            for (const auto& e : r.entries) {
                CHECK(std::abs(e.quantum - oracle::distance(g, e.config)) < 1e-9);
            }
            CHECK(r.delta <= 1e-9 * static_cast<double>(r.entries.size()));
            CHECK(r.delta >= 0.0);
        }
    }
}

TEST_CASE("x = 0 puts no mass on the success pattern") {
    const auto g = ring4();
    const PreparedState prepared = prepare_psi_f(g, 0);
    const DistanceReport r = sample_distances(prepared, g, 10000, 1);
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].successes == 0);
    CHECK(r.entries[0].quantum == 0.0);
    CHECK(r.delta == 0.0);
}

TEST_CASE("histogram reconstruction formula") {
    const auto g = p3();
    const RegisterDims dims = register_dims(g);
    const RegisterLayout layout = psi_layout(dims);
    const std::uint64_t success0 = layout.with_field(layout.with_field(0, "dicke", 1), "flag", 1);
    const std::uint64_t success1 =
        layout.with_field(layout.with_field(layout.with_field(0, "dicke", 2), "flag", 1), "edge1", 3);
    const std::uint64_t ancilla = layout.with_field(success0, "edge2", std::uint64_t{1} << dims.m);
    const std::uint64_t noflag = layout.with_field(0, "dicke", 1);
    CHECK(is_success_outcome(success0, dims));
    CHECK(is_success_outcome(success1, dims));
    CHECK_FALSE(is_success_outcome(ancilla, dims));
    CHECK_FALSE(is_success_outcome(noflag, dims));

    const SampleHistogram h({{success0, 30}, {success1, 10}, {ancilla, 20}, {noflag, 40}});
    const Normalization norm{4.0, 2, 10.0};
    const DistanceReport r = reconstruct_distances(h, g, 1, norm, 5);
    CHECK(r.shots == 100);
    CHECK(r.seed == 5);
    REQUIRE(r.entries.size() == 2);
    // Lexicographic order: "01" (edge 1 removed) then "10".
    CHECK(r.entries[0].config.to_string() == "01");
    CHECK(r.entries[0].quantum == doctest::Approx(256.0 * 2 * 10 * 0.10));
    CHECK(r.entries[1].quantum == doctest::Approx(256.0 * 2 * 10 * 0.30));
    CHECK(r.delta == doctest::Approx(std::abs(r.entries[0].quantum - 36.0) + std::abs(r.entries[1].quantum - 4.0)));
    CHECK_THROWS_AS(reconstruct_distances(SampleHistogram{}, g, 1, norm), InvalidArgument);
}

TEST_CASE("sampling is deterministic per seed") {
    const auto g = ring4();
    const PreparedState prepared = prepare_psi_f(g, 2);
    const auto a = sample_distances(prepared, g, 100000, 3);
    const auto b = sample_distances(prepared, g, 100000, 3);
    CHECK(a.delta == b.delta);
    const auto c = sample_distances(prepared, g, 100000, 4);
    CHECK(a.delta != c.delta);
}

TEST_CASE("percentiles and line fit") {
    CHECK(percentile({1, 2, 3, 4}, 50) == doctest::Approx(2.5));
    CHECK(percentile({4, 1, 3, 2}, 25) == doctest::Approx(1.75));
    CHECK(percentile({7}, 75) == doctest::Approx(7));
    const std::vector<double> xs{0, 1, 2, 3};
    const std::vector<double> ys{1, 3, 5, 7};
    const auto [slope, intercept] = fit_line(xs, ys);
    CHECK(slope == doctest::Approx(2.0));
    CHECK(intercept == doctest::Approx(1.0));
}

TEST_CASE("convergence grid validation") {
    const auto g = ring4();
    const PreparedState prepared = prepare_psi_f(g, 2);
    const std::vector<std::uint64_t> seeds{1};
    const std::vector<std::uint64_t> two{1000, 100000};
    const std::vector<std::uint64_t> narrow{1000, 2000, 5000};
    CHECK_THROWS_AS(convergence_study(prepared, g, two, seeds), InvalidArgument);
    CHECK_THROWS_AS(convergence_study(prepared, g, narrow, seeds), InvalidArgument);
}

TEST_CASE("ring4 x=2 convergence: slope near -1/2, quadrupling shots halves the error") {
    const auto g = ring4();
    const PreparedState prepared = prepare_psi_f(g, 2);
    std::vector<std::uint64_t> seeds(40);
    std::iota(seeds.begin(), seeds.end(), 100);
    const std::vector<std::uint64_t> shots{10000, 40000, 160000, 1000000};
    const ConvergenceStudy study = convergence_study(prepared, g, shots, seeds);
    CHECK(study.slope >= -0.6);
    CHECK(study.slope <= -0.4);
    const double ratio = study.rows[1].mean / study.rows[0].mean;
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.2));
    for (const auto& row : study.rows) {
        CHECK(row.p25 <= row.p50);
        CHECK(row.p50 <= row.p75);
    }
}

TEST_CASE("9-bus topology, x=2, 1e8 shots: every config within 3 sigma") {
    const auto g = read_graph_file(QSG_DATA_DIR "/grid9.txt");
    const PreparedState prepared = prepare_psi_f(g, 2);
    CHECK(prepared.blockwise());
    CHECK(prepared.S() == 36);
    const std::uint64_t shots = 100000000;
    const DistanceReport r = sample_distances(prepared, g, shots, 2024);
    const double f = r.norm.factor();
    for (const auto& e : r.entries) {
        const double p = e.classical / f;
        const double sigma = f * std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
        CHECK(e.abs_err <= 3.0 * sigma);
    }
}

TEST_CASE("quadratic forms from the overlap") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    for (const auto& g : oracle::builtin_graphs()) {
        const std::size_t M = g.vertex_count();
        const std::size_t x = std::min<std::size_t>(1, g.edge_count());
        const auto configs = all_configurations(g.edge_count(), x);
        // Two configurations per graph, ten random vectors each.
        for (std::size_t c = 0; c < 2; ++c) {
            const Configuration& d = configs[(c * 3) % configs.size()];
            PrepareOptions opt;
            opt.basis = d;
            const PreparedState prepared = prepare_psi_f(g, x, opt);
            for (int trial = 0; trial < 10; ++trial) {
                std::vector<double> a(M);
                for (auto& v : a) {
                    v = normal(rng);
                }
                CHECK(std::abs(quadratic_form_quantum(prepared, d, a) - oracle::quadratic(g, d, a)) < 1e-8);
            }
        }
        const std::vector<double> ones(M, 1.0);
        CHECK(std::abs(quadratic_form_quantum(g, Configuration::none_removed(g.edge_count()), ones)) < 1e-10);
        CHECK(std::abs(quadratic_form_quantum(g, configs.front(), ones)) < 1e-10);
    }
}

TEST_CASE("quadratic form: P3, a = (1,0,0) and the superposition state") {
    const auto g = p3();
    const std::vector<double> e0{1.0, 0.0, 0.0};
    CHECK(quadratic_form_quantum(g, Configuration::none_removed(2), e0) == doctest::Approx(1.0).epsilon(1e-12));

    const auto r4 = ring4();
    const PreparedState prepared = prepare_psi_f(r4, 1);
    const std::vector<double> a{0.3, -1.2, 2.0, 0.7};
    for (const auto& d : prepared.configs()) {
        CHECK(std::abs(quadratic_form_quantum(prepared, d, a) - oracle::quadratic(r4, d, a)) < 1e-8);
    }
    const std::vector<double> zero(4, 0.0);
    CHECK_THROWS_AS(quadratic_form_quantum(prepared, prepared.configs()[0], zero), InvalidArgument);
    const std::vector<double> short_a{1.0, 2.0};
    CHECK_THROWS_AS(quadratic_form_quantum(prepared, prepared.configs()[0], short_a), InvalidArgument);
}

TEST_CASE("cost model evaluation") {
    const CostModel c = cost_model_eval(100, 100, 2, 1.0);
    CHECK(c.S == doctest::Approx(5000.0));
    CHECK(c.t_cla == doctest::Approx(5e5));
    CHECK(c.t_min == doctest::Approx(std::sqrt(5000.0) * 100 * std::log2(std::log2(100.0))));
    CHECK(c.t_AE == doctest::Approx(c.t_DS + c.t_cQ));

    const CostModel m = cost_model_eval(9, 9, 2, 1.0 / 64);
    CHECK(m.n_min == 8 + 16 + 3 + 6);
    CHECK_THROWS_AS(cost_model_eval(1, 1, 1, 1.0), InvalidArgument);

    for (std::size_t N = 4; N <= 100000; N = N * 3 / 2 + 1) {
        const CostModel one = cost_model_eval(N, N, 1, 1.0);
        CHECK(one.t_min < one.t_cla);
    }
}

TEST_CASE("cost sweep: monotone curves and a crossover per x") {
    const auto Ns = log_grid(10, 100000, 10);
    CHECK(Ns.front() == 10);
    CHECK(Ns.back() == 100000);
    const std::vector<std::size_t> xs{1, 2, 3};
    const CostSweep sweep = cost_model_sweep(xs, Ns, 1.0);
    REQUIRE(sweep.rows.size() == 3 * Ns.size());
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
        if (sweep.rows[i].x == sweep.rows[i - 1].x) {
            CHECK(sweep.rows[i].t_min > sweep.rows[i - 1].t_min);
            CHECK(sweep.rows[i].t_cla > sweep.rows[i - 1].t_cla);
        }
    }
    for (const auto& [x, threshold] : sweep.thresholds) {
        CHECK(threshold > 0);
        for (const auto& row : sweep.rows) {
            if (row.x == x && row.N >= threshold) {
                CHECK(row.t_min < row.t_cla);
            }
        }
    }
}
