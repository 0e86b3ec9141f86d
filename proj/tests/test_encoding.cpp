#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "qsg/encoding.hpp"
#include "qsg/error.hpp"

using namespace qsg;

namespace {

RegisterLayout qubits(std::size_t n) {
    RegisterLayout l;
    l.add("q", n);
    return l;
}

Statevector run(const Circuit& c) {
    Statevector s(qubits(c.num_qubits()));
    c.apply(s);
    return s;
}

WeightedGraph p3(double b0 = 1.0, double b1 = 3.0) {
    return WeightedGraph(3, {{0, 1, b0}, {1, 2, b1}});
}

}  // namespace

TEST_CASE("Dicke N=4 x=2 occupies exactly {3,5,6,9,10,12}") {
    const Statevector s = run(dicke_prepare(4, 2));
    std::set<std::size_t> support;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::abs(s[i]) > 1e-10) {
            support.insert(i);
            CHECK(std::abs(s[i] - 1 / std::sqrt(6.0)) <= 1e-10);
        }
    }
    CHECK(support == std::set<std::size_t>{3, 5, 6, 9, 10, 12});
}

TEST_CASE("Dicke small cases") {
    const Statevector all = run(dicke_prepare(3, 3));
    CHECK(std::abs(all[7] - 1.0) <= 1e-12);
    const Statevector w = run(dicke_prepare(5, 1));
    for (std::size_t i = 0; i < 32; ++i) {
        const double want = oracle::popcount(i) == 1 ? 1 / std::sqrt(5.0) : 0.0;
        CHECK(std::abs(w[i] - want) <= 1e-10);
    }
    CHECK_THROWS_AS(dicke_prepare(3, 4), CardinalityError);
}

TEST_CASE("Dicke amplitudes for every N <= 12") {
    for (std::size_t N = 1; N <= 12; ++N) {
        for (std::size_t x = 0; x <= N; ++x) {
            const Circuit c = dicke_prepare(N, x);
            const Statevector s = run(c);
            const double want = 1 / std::sqrt(oracle::binom(N, x));
            double err = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                err = std::max(err, std::abs(s[i] - (oracle::popcount(i) == x ? want : 0.0)));
            }
            CHECK(err <= 1e-10);
            // O(N x) gates.
            CHECK(c.size() <= 3 * N * std::max<std::size_t>(x, 1) + N);
        }
    }
}

TEST_CASE("Hadamard topology") {
    for (std::size_t n = 1; n <= 3; ++n) {
        const Statevector s = run(hadamard_topology(n));
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(std::abs(s[i] - std::pow(2.0, -0.5 * n)) <= 1e-12);
        }
    }
    Circuit two(6);
    two.append_mapped(hadamard_topology(3), {0, 1, 2}).append_mapped(hadamard_topology(3), {3, 4, 5});
    const Statevector s = run(two);
    for (std::size_t i = 0; i < 64; ++i) {
        CHECK(std::abs(s[i] - 0.125) <= 1e-12);
    }
}

TEST_CASE("uniformly controlled RY reproduces each branch rotation") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> a(-6.0, 6.0);
    for (std::size_t q = 0; q <= 4; ++q) {
        std::vector<double> angles(std::size_t{1} << q);
        for (double& v : angles) {
            v = a(rng);
        }
        angles[0] = 0.0;
        std::vector<std::size_t> controls;
        for (std::size_t t = 0; t < q; ++t) {
            controls.push_back(t + 1);
        }
        const Circuit c = uniformly_controlled_ry(angles, controls, 0, q + 1);
        for (std::size_t val = 0; val < angles.size(); ++val) {
            Statevector s = Statevector::basis(qubits(q + 1), val << 1);
            c.apply(s);
            CHECK(std::abs(s[val << 1] - std::cos(angles[val] / 2)) <= 1e-12);
            CHECK(std::abs(s[(val << 1) | 1] - std::sin(angles[val] / 2)) <= 1e-12);
        }
    }
}

TEST_CASE("amplitude encoding") {
    const RegisterDims d4 = register_dims(4, 4);
    const RegisterLayout layout = psi_layout(d4);
    Statevector s(layout);
    const std::vector<double> ones{1, 1, 1, 1};
    amplitude_encode_weights(ones, d4).apply(s);
    for (std::uint64_t i = 0; i < 4; ++i) {
        const std::uint64_t idx = layout.with_field(layout.with_field(0, "edge1", i), "edge2", i);
        CHECK(std::abs(s[idx] - 0.5) <= 1e-12);
    }

    const RegisterDims d2 = register_dims(2, 3);
    const RegisterLayout l2 = psi_layout(d2);
    Statevector t(l2);
    const std::vector<double> b34{3, 4};
    amplitude_encode_weights(b34, d2).apply(t);
    CHECK(std::abs(t[l2.with_field(0, "edge1", 0)] - 0.6) <= 1e-12);
    CHECK(std::abs(t[l2.with_field(l2.with_field(0, "edge1", 1), "edge2", 1)] - 0.8) <= 1e-12);

    const RegisterDims d3 = register_dims(3, 3);
    const RegisterLayout l3 = psi_layout(d3);
    Statevector u(l3);
    const std::vector<double> b3{1, 2, 2};
    amplitude_encode_weights(b3, d3).apply(u);
    CHECK(std::abs(u[l3.with_field(l3.with_field(0, "edge1", 3), "edge2", 3)]) <= 1e-14);
    CHECK(std::abs(u[l3.with_field(l3.with_field(0, "edge1", 2), "edge2", 2)] - 2.0 / 3.0) <= 1e-12);

    const std::vector<double> signed_v{0.5, -1.0, 2.0, -0.25, 0.0, 1.0};
    const Statevector sv = run(amplitude_encode(signed_v, 3));
    double norm = 0.0;
    for (double v : signed_v) {
        norm += v * v;
    }
    for (std::size_t i = 0; i < 8; ++i) {
        const double want = i < signed_v.size() ? signed_v[i] / std::sqrt(norm) : 0.0;
        CHECK(std::abs(sv[i] - want) <= 1e-12);
    }
    CHECK_THROWS_AS(amplitude_encode_weights(std::vector<double>{}, d4), InvalidArgument);
}

TEST_CASE("block encoding extraction") {
    // Single edge: E_s = [[1, 0], [-1, 0]] padded to 2x2.
    const WeightedGraph single(2, {{0, 1, 1.0}});
    const BlockEncoding be1 = block_encode_incidence(build_incidence(single));
    CHECK(be1.alpha == 2.0);
    const Eigen::MatrixXcd blk1 = be1.extract_block();
    CHECK(std::abs(blk1(0, 0) - 0.5) <= 1e-10);
    CHECK(std::abs(blk1(1, 0) + 0.5) <= 1e-10);
    CHECK(std::abs(blk1(0, 1)) <= 1e-10);
    CHECK(std::abs(blk1(1, 1)) <= 1e-10);

    const BlockEncoding be3 = block_encode_incidence(build_incidence(p3()));
    const Eigen::MatrixXcd b3 = be3.extract_block();
    CHECK(be3.alpha == 4.0);
    const double col0[4] = {1, -1, 0, 0};
    const double col1[4] = {0, 1, -1, 0};
    for (int r = 0; r < 4; ++r) {
        CHECK(std::abs(b3(r, 0) - col0[r] / 4.0) <= 1e-10);
        CHECK(std::abs(b3(r, 1) - col1[r] / 4.0) <= 1e-10);
        CHECK(std::abs(b3(r, 2)) <= 1e-10);
        CHECK(std::abs(b3(r, 3)) <= 1e-10);
    }

    for (const WeightedGraph& g : oracle::builtin_graphs()) {
        const BlockEncoding be = block_encode_incidence(build_incidence(g));
        CHECK(be.error <= 1e-10);
    }

    // Arbitrary entries in [-1, 1].
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd a(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i) {
        a(i % 4, i / 4) = u(rng);
    }
    CHECK(block_encode_matrix(a).error <= 1e-12);
    CHECK_THROWS_AS(block_encode_matrix(a * 2.0), InvalidArgument);
    CHECK_THROWS_AS(block_encode_matrix(Eigen::MatrixXd::Zero(4, 4), 4), ResourceCapError);
}

TEST_CASE("single-edge removal") {
    const RegisterDims dims = register_dims(4, 4);
    const RegisterLayout l = rse_layout(dims);
    const Circuit rse = remove_single_edge(dims);
    for (std::uint64_t e = 0; e < 4; ++e) {
        for (std::uint64_t i = 0; i < 4; ++i) {
            Statevector s = Statevector::basis(l, l.with_field(l.with_field(0, "topo", e), "edge1", i));
            rse.apply(s);
            const std::uint64_t want = l.with_field(l.with_field(l.with_field(0, "topo", e), "edge1", i), "flag", e == i ? 1 : 0);
            CHECK(std::abs(s[want] - 1.0) <= 1e-12);
        }
    }
    // Uniform input: each e-th term flags exactly its own edge.
    Statevector s(l);
    Circuit prep(l.total_qubits());
    prep.append_mapped(hadamard_topology(2), l.qubits("topo"));
    prep.append_mapped(hadamard_topology(2), {l.qubit("edge1", 0), l.qubit("edge1", 1)});
    prep.apply(s);
    rse.apply(s);
    for (std::uint64_t e = 0; e < 4; ++e) {
        for (std::uint64_t i = 0; i < 4; ++i) {
            const std::uint64_t base = l.with_field(l.with_field(0, "topo", e), "edge1", i);
            CHECK(std::abs(s[l.with_field(base, "flag", e == i)] - 0.25) <= 1e-12);
        }
    }
}

TEST_CASE("multi-edge removal control patterns for N=4") {
    const RegisterDims dims = register_dims(4, 4);
    const RegisterLayout l = psi_layout(dims);
    const Circuit rme = remove_multiple_edges(dims);
    REQUIRE(rme.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        const Gate& g = rme.gates()[i];
        CHECK(g.targets[0] == l.qubit("flag", 0));
        REQUIRE(g.controls.size() == 3);
        CHECK(g.controls[0].qubit == l.qubit("dicke", i));
        CHECK(g.controls[0].polarity);
        CHECK(g.controls[1].qubit == l.qubit("edge1", 0));
        CHECK(g.controls[1].polarity == ((i & 1) != 0));
        CHECK(g.controls[2].qubit == l.qubit("edge1", 1));
        CHECK(g.controls[2].polarity == ((i & 2) != 0));
    }
    for (std::uint64_t d = 0; d < 16; ++d) {
        for (std::uint64_t i = 0; i < 4; ++i) {
            Statevector s = Statevector::basis(l, l.with_field(l.with_field(0, "dicke", d), "edge1", i));
            rme.apply(s);
            const bool flip = ((d >> i) & 1) != 0;
            CHECK(std::abs(s[l.with_field(l.with_field(l.with_field(0, "dicke", d), "edge1", i), "flag", flip)] - 1.0) <= 1e-12);
        }
    }
    // Involution on a random state.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    std::vector<amplitude> amps(std::size_t{1} << l.total_qubits());
    double norm = 0.0;
    for (auto& a : amps) {
        a = {g(rng), g(rng)};
        norm += std::norm(a);
    }
    for (auto& a : amps) {
        a /= std::sqrt(norm);
    }
    Statevector s = Statevector::from_amplitudes(l, amps);
    rme.apply(s);
    rme.apply(s);
    double err = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        err = std::max(err, std::abs(s[i] - amps[i]));
    }
    CHECK(err <= 1e-12);
}

TEST_CASE("psi_f probabilities follow the distance law") {
    std::vector<WeightedGraph> graphs{p3(), p3(1.0, 1.0), WeightedGraph::path(4), WeightedGraph::cycle(4),
                                      WeightedGraph::star(4), WeightedGraph(4, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 0.5}, {3, 0, 1.5}})};
    for (const WeightedGraph& g : graphs) {
        for (std::size_t x = 0; x <= g.edge_count(); ++x) {
            const PreparedState ps = prepare_psi_f(g, x);
            REQUIRE_FALSE(ps.blockwise());
            CHECK(std::abs(ps.state().norm_squared() - 1.0) <= 1e-10);
            double total = 0.0;
            double expected_total = 0.0;
            for (const Configuration& d : enumerate_configurations(g.edge_count(), x)) {
                const double want = oracle::distance(g, d) / (std::pow(ps.alpha(), 4) * ps.S() * g.weight_norm_squared());
                const double got = ps.success_probability(d);
                CHECK(std::abs(got - want) <= 1e-9);
                total += got;
                expected_total += want;
            }
            CHECK(std::abs(total - expected_total) <= 1e-9);
            // Postselection on flag = 1 and zero ancillas sums the same branches.
            if (expected_total > 0) {
                double sel = 0.0;
                const auto& l = ps.layout();
                for (std::uint64_t i = 0; i < ps.state().size(); ++i) {
                    if (l.field(i, "flag") == 1 && (l.field(i, "edge1") >> ps.dims().m) == 0 &&
                        (l.field(i, "edge2") >> ps.dims().m) == 0) {
                        sel += ps.state().probability(i);
                    }
                }
                CHECK(std::abs(sel - expected_total) <= 1e-9);
            }
        }
    }
}

TEST_CASE("P3 x=1 probability per removed edge") {
    const WeightedGraph g = p3(1.0, 3.0);
    const PreparedState ps = prepare_psi_f(g, 1);
    CHECK(ps.alpha() == 4.0);
    const double W = 10.0;
    for (std::size_t k = 0; k < 2; ++k) {
        const double b = g.edge(k).weight;
        const auto d = Configuration::from_index(2, std::uint64_t{1} << k);
        CHECK(ps.success_probability(d) == doctest::Approx(4 * b * b / (256.0 * 2 * W)).epsilon(1e-12));
    }
}

TEST_CASE("flag=0 branch carries the active-edge terms") {
    const WeightedGraph g(4, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 0.5}, {3, 0, 1.5}});
    const PreparedState ps = prepare_psi_f(g, 2);
    const Eigen::MatrixXd E = build_incidence(g).dense();
    const double norm = 1.0 / (ps.alpha() * ps.alpha() * std::sqrt(ps.S() * g.weight_norm_squared()));
    const std::size_t R = std::size_t{1} << ps.dims().reg;
    for (const Configuration& d : ps.configs()) {
        const auto br = ps.branch(d);
        for (std::size_t r1 = 0; r1 < 4; ++r1) {
            for (std::size_t r2 = 0; r2 < 4; ++r2) {
                double want = 0.0;
                for (std::size_t i = 0; i < 4; ++i) {
                    if (!d.removed(i)) {
                        want += g.edge(i).weight * E(r1, i) * E(r2, i);
                    }
                }
                CHECK(std::abs(br[r1 + R * r2] - want * norm) <= 1e-12);
            }
        }
    }
}

TEST_CASE("blockwise and dense psi_f agree") {
    const WeightedGraph g = WeightedGraph::random(4, 5, 2);
    PrepareOptions dense_opt;
    dense_opt.blockwise = false;
    PrepareOptions block_opt;
    block_opt.blockwise = true;
    const PreparedState a = prepare_psi_f(g, 2, dense_opt);
    const PreparedState b = prepare_psi_f(g, 2, block_opt);
    CHECK(b.blockwise());
    for (const Configuration& d : a.configs()) {
        CHECK(std::abs(a.success_probability(d) - b.success_probability(d)) <= 1e-14);
        const auto ba = a.branch(d);
        const auto bb = b.branch(d);
        double err = 0.0;
        for (std::size_t i = 0; i < ba.size(); ++i) {
            err = std::max(err, std::abs(ba[i] - bb[i]));
        }
        CHECK(err <= 1e-13);
    }
    // Same shot marginals on the success patterns, statistically.
    const std::uint64_t shots = 2000000;
    const auto ha = a.sample(shots, 1);
    const auto hb = b.sample(shots, 2);
    CHECK(ha.total() == shots);
    CHECK(hb.total() == shots);
}

TEST_CASE("basis-state preparation and cap errors") {
    const WeightedGraph g = p3();
    PrepareOptions opt;
    opt.basis = Configuration::from_string("01");
    const PreparedState ps = prepare_psi_f(g, 1, opt);
    CHECK(ps.S() == 1);
    CHECK(ps.success_probability(Configuration::from_string("01")) ==
          doctest::Approx(oracle::distance(g, Configuration::from_string("01")) / (256.0 * 10.0)));
    CHECK(ps.success_probability(Configuration::from_string("10")) == 0.0);

    PrepareOptions small;
    small.cap = 10;
    try {
        prepare_psi_f(g, 1, small);
        FAIL("expected a cap error");
    } catch (const ResourceCapError& e) {
        CHECK(e.required() == 13);
    }
    CHECK_THROWS_AS(prepare_psi_f(g, 3), CardinalityError);
}
