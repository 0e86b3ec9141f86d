#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "qsg/error.hpp"
#include "qsg/minfinder.hpp"

using namespace qsg;

namespace {

WeightedGraph p3() { return WeightedGraph(3, {{0, 1, 1.0}, {1, 2, 3.0}}); }
WeightedGraph ring4() { return WeightedGraph(4, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 0.5}, {0, 3, 1.5}}); }

Statevector uniform(std::size_t qubits, std::size_t count) {
    RegisterLayout layout;
    layout.add("q", qubits);
    std::vector<amplitude> a(std::size_t{1} << qubits, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        a[i] = 1.0 / std::sqrt(static_cast<double>(count));
    }
    return Statevector::from_amplitudes(layout, a);
}

double grover_law(double p0, std::size_t j) {
    return std::pow(std::sin((2.0 * static_cast<double>(j) + 1.0) * std::asin(std::sqrt(p0))), 2);
}

void check_run(const MinFinderResult& r, std::uint64_t budget) {
    CHECK(r.run.steps_used <= budget);
    const auto& acc = r.run.accepted_distances;
    for (std::size_t i = 1; i < acc.size(); ++i) {
        CHECK(acc[i] < acc[i - 1]);
    }
    CHECK(r.distance == acc.back());
}

}  // namespace

TEST_CASE("step budget") {
    CHECK(minfinder_budget(1) == doctest::Approx(22.5));
    CHECK(minfinder_budget(16) == doctest::Approx(22.5 * 4 + 1.4 * 16));
    CHECK(minfinder_budget(36) == doctest::Approx(22.5 * 6 + 1.4 * std::pow(std::log2(36.0), 2)));
    CHECK_THROWS_AS(minfinder_budget(0), InvalidArgument);
}

TEST_CASE("comparator marks strictly smaller labels") {
    for (std::size_t bits = 1; bits <= 5; ++bits) {
        for (std::uint64_t t = 0; t <= (std::uint64_t{1} << bits); ++t) {
            const auto marked = compile_comparator(bits, t);
            for (std::uint64_t l = 0; l < marked.size(); ++l) {
                CHECK(marked[l] == (l < t ? 1 : 0));
            }
        }
    }
    const auto five = compile_comparator(5, 5);
    CHECK(five[3] == 1);
    CHECK(five[5] == 0);
}

TEST_CASE("gate-level marking flips the marker on a superposition") {
    RegisterLayout layout;
    layout.add("other", 2).add("label", 3).add("cmp", 1).add("marker", 1);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    std::vector<amplitude> a(std::size_t{1} << layout.total_qubits(), 0.0);
    for (std::uint64_t i = 0; i < a.size(); ++i) {
        if (layout.field(i, "cmp") == 0 && layout.field(i, "marker") == 0) {
            a[i] = {g(rng), g(rng)};
        }
    }
    double norm = 0.0;
    for (auto v : a) {
        norm += std::norm(v);
    }
    for (auto& v : a) {
        v /= std::sqrt(norm);
    }
    const Statevector before = Statevector::from_amplitudes(layout, a);
    Statevector after = before;
    const std::uint64_t threshold = 5;
    mark_below_threshold(after, threshold);
    for (std::uint64_t i = 0; i < before.size(); ++i) {
        if (layout.field(i, "marker") != 0 || layout.field(i, "cmp") != 0) {
            continue;
        }
        const bool below = layout.field(i, "label") < threshold;
        const std::uint64_t j = below ? layout.with_field(i, "marker", 1) : i;
        CHECK(std::abs(after[j] - before[i]) < 1e-12);
    }
}

TEST_CASE("grover_iterate closed forms") {
    SUBCASE("one marked of four is found after one step") {
        const Statevector ref = uniform(2, 4);
        Statevector phi = ref;
        std::vector<std::uint8_t> marked{0, 0, 1, 0};
        grover_iterate(phi, ref, marked);
        CHECK(std::norm(phi[2]) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("no marked items leaves the state unchanged") {
        const Statevector ref = uniform(3, 6);
        Statevector phi = ref;
        std::vector<std::uint8_t> marked(8, 0);
        for (int j = 0; j < 5; ++j) {
            grover_iterate(phi, ref, marked);
        }
        CHECK(std::abs(std::abs(overlap(ref, phi)) - 1.0) < 1e-12);
    }
}

TEST_CASE("hybrid search: two marked of six follows the sin^2 law") {
    const auto g = ring4();
    MinFinderOptions opt;
    opt.mode = MinFinderMode::Hybrid;
    const MinFinder finder(g, 2, opt);
    REQUIRE(finder.S() == 6);
    std::vector<double> dist;
    for (const auto& d : finder.configs()) {
        dist.push_back(oracle::distance(g, d));
    }
    std::vector<double> sorted = dist;
    std::sort(sorted.begin(), sorted.end());
    const auto row = static_cast<std::size_t>(
        std::find(dist.begin(), dist.end(), sorted[2]) - dist.begin());
    REQUIRE(std::count_if(dist.begin(), dist.end(), [&](double v) { return v < dist[row]; }) == 2);
    const auto traj = finder.marked_trajectory(row, 8);
    for (std::size_t j = 0; j < traj.size(); ++j) {
        CHECK(traj[j] == doctest::Approx(grover_law(2.0 / 6.0, j)).epsilon(1e-9));
    }
}

TEST_CASE("full search on psi_label follows the sin^2 law") {
    const MinFinder finder(p3(), 1);
    const auto& labeled = *finder.labeled();
    REQUIRE(labeled.label_table().size() == 2);
    for (std::int64_t t = 1; t < 32; t += 6) {
        const auto traj = finder.marked_trajectory(0, 6, t);
        for (std::size_t j = 0; j < traj.size(); ++j) {
            CHECK(traj[j] == doctest::Approx(grover_law(traj[0], j)).epsilon(1e-8));
        }
    }
}

TEST_CASE("P3 threshold at the larger-distance label marks the other config") {
    const auto g = p3();
    const MinFinder finder(g, 1);
    const auto& labeled = *finder.labeled();
    const auto& configs = labeled.configs();
    auto peak = [&](std::size_t row) {
        const auto& p = labeled.label_table()[row];
        return static_cast<std::uint64_t>(std::max_element(p.begin(), p.end()) - p.begin());
    };
    const std::size_t hi = oracle::distance(g, configs[0]) > oracle::distance(g, configs[1]) ? 0 : 1;
    const auto marked = compile_comparator(labeled.label_bits(), peak(hi));
    CHECK(marked[peak(1 - hi)] == 1);
    CHECK(marked[peak(hi)] == 0);
}

TEST_CASE("Boyer schedule") {
    std::mt19937_64 rng(1);
    BoyerSchedule s(20);
    CHECK(s.next(rng) == 0);
    for (int i = 0; i < 100; ++i) {
        s.on_failure();
        CHECK(s.m() <= std::sqrt(20.0) + 1e-12);
        CHECK(s.next(rng) <= static_cast<std::uint64_t>(std::ceil(std::sqrt(20.0))));
    }
    s.on_success();
    CHECK(s.m() == 1.0);
    CHECK_THROWS_AS(BoyerSchedule(20, 1.5), InvalidArgument);
}

TEST_CASE("Boyer schedule: expected iterations scale as sqrt(S/t)") {
    // Abstract search on S = 20 with t marked: after j iterations a
    // measurement succeeds with probability sin^2((2j+1) theta).
    const std::uint64_t S = 20;
    std::vector<double> means;
    for (std::size_t t : {1, 2, 5}) {
        const double theta = std::asin(std::sqrt(static_cast<double>(t) / S));
        std::mt19937_64 rng(77 + t);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double total = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            BoyerSchedule sched(S);
            std::uint64_t used = 0;
            for (;;) {
                const std::uint64_t j = sched.next(rng);
                used += j;
                if (u(rng) < std::pow(std::sin((2.0 * j + 1.0) * theta), 2)) {
                    break;
                }
                sched.on_failure();
            }
            total += static_cast<double>(used);
        }
        const double mean = total / 1000.0;
        CHECK(mean <= 4.5 * std::sqrt(static_cast<double>(S) / t));
        means.push_back(mean);
    }
    CHECK(means[0] > means[1]);
    CHECK(means[1] > means[2]);
}

TEST_CASE("P3 full-mode minimum finding") {
    const auto g = p3();
    const MinFinder finder(g, 1);
    const auto best = argmin_bruteforce(g, 1);
    CHECK(best.config.to_string() == "10");
    CHECK(best.distance == doctest::Approx(4.0));
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = finder.run(seed);
        check_run(r, finder.budget());
        hits += r.config == best.config ? 1 : 0;
    }
    CHECK(hits >= 50);
}

TEST_CASE("runs are deterministic per seed") {
    const MinFinder finder(p3(), 1);
    const auto a = finder.run(9);
    const auto b = finder.run(9);
    CHECK(run_log_json_lines(a.run) == run_log_json_lines(b.run));
    std::istringstream lines(run_log_json_lines(a.run));
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("step"));
        CHECK(j.contains("action"));
        CHECK(j.contains("measured"));
        CHECK(j.contains("accepted"));
        ++n;
    }
    CHECK(n == a.run.log.size());
}

TEST_CASE("single configuration returns immediately") {
    const auto g = p3();
    for (auto mode : {MinFinderMode::Full, MinFinderMode::Hybrid}) {
        MinFinderOptions opt;
        opt.mode = mode;
        const auto r = find_minimum(g, 2, 3, opt);
        CHECK(r.config.to_string() == "11");
        CHECK(r.run.steps_used == 0);
        CHECK(r.distance == doctest::Approx(oracle::distance(g, r.config)));
    }
}

TEST_CASE("uniform cycle: every config is a minimizer") {
    const auto g = WeightedGraph::cycle(5);
    MinFinderOptions opt;
    opt.mode = MinFinderMode::Hybrid;
    const auto r = find_minimum(g, 2, 4, opt);
    CHECK(r.distance == doctest::Approx(argmin_bruteforce(g, 2).distance));
    CHECK(r.distance == doctest::Approx(oracle::distance(g, r.config)));
}

TEST_CASE("hybrid mode on 9 edges") {
    const auto g = WeightedGraph::random(9, 9, 3);
    MinFinderOptions opt;
    opt.mode = MinFinderMode::Hybrid;
    const MinFinder finder(g, 2, opt);
    CHECK(finder.S() == 36);
    const auto best = argmin_bruteforce(g, 2);
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = finder.run(seed);
        check_run(r, finder.budget());
        hits += std::abs(r.distance - best.distance) < 1e-12 ? 1 : 0;
    }
    CHECK(hits >= 50);
}

TEST_CASE("reduced budget returns the best so far") {
    MinFinderOptions opt;
    opt.mode = MinFinderMode::Hybrid;
    opt.budget = 1;
    const MinFinder finder(ring4(), 2, opt);
    const auto r = finder.run(2);
    CHECK(r.run.reduced_budget);
    CHECK(r.run.steps_used <= 1);
    CHECK(r.distance == doctest::Approx(oracle::distance(ring4(), r.config)));
}

TEST_CASE("full mode respects the qubit cap") {
    MinFinderOptions opt;
    opt.cap = 18;
    CHECK_THROWS_AS(MinFinder(p3(), 1, opt), ResourceCapError);
}
