#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "weapo/covering.hpp"
#include "weapo/error.hpp"

using namespace weapo;

namespace {

// Reference relation straight from the definition, without any bit tricks.
bool covers_ref(const VoteVector& h, const VoteVector& l) {
    bool strict = false;
    for (std::size_t j = 0; j < h.size(); ++j) {
        if (h[j] < l[j]) return false;
        if (h[j] > l[j]) strict = true;
    }
    return strict;
}

std::vector<VoteVector> unique_sorted(std::vector<VoteVector> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Floyd-Warshall closure over the edge set.
std::set<std::pair<VoteVector, VoteVector>> closure(const std::vector<VoteVector>& nodes,
                                                     const std::vector<HasseEdge>& edges) {
    const std::size_t k = nodes.size();
    auto idx = [&](const VoteVector& v) {
        return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
    };
    std::vector<std::vector<char>> reach(k, std::vector<char>(k, 0));
    for (const auto& e : edges) reach[idx(e.low)][idx(e.high)] = 1;
    for (std::size_t m = 0; m < k; ++m)
        for (std::size_t a = 0; a < k; ++a)
            if (reach[a][m])
                for (std::size_t b = 0; b < k; ++b)
                    if (reach[m][b]) reach[a][b] = 1;
    std::set<std::pair<VoteVector, VoteVector>> out;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if (reach[a][b]) out.emplace(nodes[a], nodes[b]);
    return out;
}

}  // namespace

TEST_CASE("covers examples") {
    CHECK(covers(VoteVector{1, 1, 0}, VoteVector{1, 0, 0}));
    CHECK(!covers(VoteVector{1, 0, 1}, VoteVector{0, 1, 1}));
    CHECK(!covers(VoteVector{0, 1, 1}, VoteVector{1, 0, 1}));
    CHECK(!covers(VoteVector{1, 0}, VoteVector{1, 0}));
    CHECK_THROWS_AS(covers(VoteVector{1, 0}, VoteVector{1, 0, 0}), DataError);
}

TEST_CASE("covering is a strict partial order") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t m = 1 + rng() % 6;
        const VoteVector a = testutil::random_votes(rng, m);
        const VoteVector b = testutil::random_votes(rng, m);
        const VoteVector c = testutil::random_votes(rng, m);
        CHECK(covers(a, b) == covers_ref(a, b));
        CHECK(!covers(a, a));
        if (covers(a, b)) CHECK(!covers(b, a));
        if (covers(a, b) && covers(b, c)) CHECK(covers(a, c));
    }
}

TEST_CASE("hasse_edges on the chain 100 < 110 < 111") {
    const auto edges = hasse_edges({VoteVector{1, 0, 0}, VoteVector{1, 1, 0}, VoteVector{1, 1, 1}});
    REQUIRE(edges.size() == 2);
    CHECK(edges[0] == HasseEdge{VoteVector{1, 0, 0}, VoteVector{1, 1, 0}});
    CHECK(edges[1] == HasseEdge{VoteVector{1, 1, 0}, VoteVector{1, 1, 1}});
}

TEST_CASE("hasse_edges on a diamond") {
    const auto edges = hasse_edges({VoteVector{1, 0}, VoteVector{0, 1}, VoteVector{1, 1}});
    REQUIRE(edges.size() == 2);
    CHECK(edges[0] == HasseEdge{VoteVector{0, 1}, VoteVector{1, 1}});
    CHECK(edges[1] == HasseEdge{VoteVector{1, 0}, VoteVector{1, 1}});
}

TEST_CASE("hasse_edges on incomparable vectors and duplicates") {
    CHECK(hasse_edges({VoteVector{1, 0}, VoteVector{0, 1}}).empty());
    CHECK(hasse_edges({}).empty());
    CHECK(hasse_edges({VoteVector{1, 0}, VoteVector{1, 0}, VoteVector{1, 1}}).size() == 1);
}

TEST_CASE("hasse_edges skips over absent intermediates") {
    // 110 is absent, so 100 -> 111 is a direct edge.
    const auto edges = hasse_edges({VoteVector{1, 0, 0}, VoteVector{1, 1, 1}});
    REQUIRE(edges.size() == 1);
    CHECK(edges[0] == HasseEdge{VoteVector{1, 0, 0}, VoteVector{1, 1, 1}});
}

TEST_CASE("transitive closure of hasse_edges equals the covering relation") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 300; ++t) {
        const std::size_t m = 1 + rng() % 8;
        const std::size_t k = 1 + rng() % 50;
        std::vector<VoteVector> vs;
        for (std::size_t i = 0; i < k; ++i) vs.push_back(testutil::random_votes(rng, m));
        const auto edges = hasse_edges(vs);
        const auto nodes = unique_sorted(vs);

        std::set<std::pair<VoteVector, VoteVector>> expected;
        for (const auto& l : nodes)
            for (const auto& h : nodes)
                if (covers_ref(h, l)) expected.emplace(l, h);
        CHECK(closure(nodes, edges) == expected);

        // Irreducible: no edge has an intermediate node.
        for (const auto& e : edges) {
            CHECK(covers_ref(e.high, e.low));
            for (const auto& z : nodes) CHECK(!(covers_ref(z, e.low) && covers_ref(e.high, z)));
        }
        CHECK(std::is_sorted(edges.begin(), edges.end()));
    }
}

TEST_CASE("constraint_matrix row for 10 -> 11") {
    // Records 0 and 1 vote [1,1], record 2 votes [1,0].
    const Dataset d = testutil::dataset_from_votes({{1, 1}, {1, 1}, {1, 0}});
    const SliceTable t = build_slices(d);
    const auto edges = hasse_edges(t.keys());
    REQUIRE(edges.size() == 1);
    const ConstraintMatrix A = constraint_matrix(t, edges, d.size());
    REQUIRE(A.num_rows() == 1);

    std::vector<double> dense(3, 0.0);
    for (const auto& e : A.row(0)) dense[e.index] += e.value;
    CHECK(dense[0] == -0.5);
    CHECK(dense[1] == -0.5);
    CHECK(dense[2] == 1.0);
    CHECK(A.row_sum(0) == 0.0);

    const std::vector<double> s{0.9, 0.7, 0.2};
    CHECK(A.row_dot(0, s) == doctest::Approx(0.2 - 0.8).epsilon(1e-15));
}

TEST_CASE("constraint_matrix with no edges") {
    const Dataset d = testutil::dataset_from_votes({{1, 0}, {0, 1}});
    const SliceTable t = build_slices(d);
    const ConstraintMatrix A = constraint_matrix(t, hasse_edges(t.keys()), d.size());
    CHECK(A.num_rows() == 0);
}

TEST_CASE("constraint_matrix rejects an edge whose endpoint is not a slice") {
    const Dataset d = testutil::dataset_from_votes({{1, 0}, {1, 0}});
    const SliceTable t = build_slices(d);
    const std::vector<HasseEdge> bogus{{VoteVector{1, 0}, VoteVector{1, 1}}};
    CHECK_THROWS_AS(constraint_matrix(t, bogus, d.size()), DataError);
}

TEST_CASE("row sums are exactly zero and monotone scores satisfy A s <= 0") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng() % 6;
        const Dataset d = testutil::random_dataset(rng, m, 1 + rng() % 300, 0.6);
        const SliceTable t = build_slices(d);
        if (t.slices.empty()) continue;
        const auto edges = hasse_edges(t.keys());
        const ConstraintMatrix A = constraint_matrix(t, edges, d.size());
        REQUIRE(A.num_rows() == edges.size());

        // Any non-negative weighting of the votes is monotone under covering.
        std::vector<double> w(m);
        for (double& x : w) x = u(rng);
        std::vector<double> s(d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = 0; j < m; ++j) s[i] += w[j] * d[i].votes[j];

        for (std::size_t r = 0; r < A.num_rows(); ++r) {
            CHECK(A.row_sum(r) == 0.0);
            CHECK(A.row_dot(r, s) <= 1e-12);
            std::size_t n_low = 0, n_high = 0;
            for (const auto& e : A.row(r)) (e.value > 0 ? n_low : n_high) += 1;
            CHECK(n_low == t.slices.at(A.edge(r).low).size());
            CHECK(n_high == t.slices.at(A.edge(r).high).size());
        }
    }
}
