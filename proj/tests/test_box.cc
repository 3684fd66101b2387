#include <gtest/gtest.h>

#include <set>

#include "ncycle/box.h"
#include "ncycle/error.h"
#include "oracles.h"

using namespace ncycle;

namespace {

std::vector<double> vec(const Box &b) { return {b.data().begin(), b.data().end()}; }

}  // namespace

TEST(Gamma, CanonicalAndParsing) {
    EXPECT_EQ(Gamma::canonical(4).to_string(), "+++-");
    EXPECT_EQ(Gamma::all_plus(3).to_string(), "+++");
    EXPECT_EQ(Gamma::parse("+-++"), Gamma({1, -1, 1, 1}));
    EXPECT_EQ(Gamma::parse("1,-1,1"), Gamma({1, -1, 1}));
    EXPECT_THROW(Gamma({1, 0, 1}), std::invalid_argument);
    EXPECT_THROW(Gamma::parse("+x+"), std::invalid_argument);
    EXPECT_TRUE(Gamma::canonical(5).is_odd());
    EXPECT_EQ(Gamma::canonical(5).flipped(4), Gamma::all_plus(5));
    EXPECT_EQ(Gamma::all_plus(5).first_minus(), -1);
}

TEST(Gamma, EnumerationCountsAndOrder) {
    for (int n = 3; n <= 9; n++) {
        auto odd = odd_gammas(n);
        auto even = even_gammas(n);
        EXPECT_EQ(odd.size(), size_t{1} << (n - 1));
        EXPECT_EQ(even.size(), size_t{1} << (n - 1));
        EXPECT_TRUE(std::is_sorted(odd.begin(), odd.end()));
        for (const auto &g : odd) {
            EXPECT_TRUE(g.is_odd());
        }
        for (const auto &g : even) {
            EXPECT_FALSE(g.is_odd());
        }
    }
    EXPECT_EQ(odd_gammas(3).front().to_string(), "---");
}

TEST(Box, ConstructionValidates) {
    EXPECT_THROW(Box(2, 2, std::vector<double>(8, 0.25)), std::invalid_argument);
    EXPECT_THROW(Box(3, 2, std::vector<double>(11, 0.25)), std::invalid_argument);
    std::vector<double> bad(12, 0.25);
    bad[0] = 0.5;
    EXPECT_THROW(Box(3, 2, bad), std::invalid_argument);
    bad[0] = -0.25;
    bad[1] = 0.75;
    EXPECT_THROW(Box(3, 2, bad), std::invalid_argument);
    Box ok(3, 2, std::vector<double>(12, 0.25), kConstructionTol, "w");
    EXPECT_EQ(ok.label(), "w");
    EXPECT_DOUBLE_EQ(ok.at(2, 1, 0), 0.25);
    EXPECT_THROW(ok.edge(3), std::out_of_range);
}

TEST(Box, MarginalsAndDisturbance) {
    Box w = white_noise(5, 3);
    EXPECT_TRUE(is_nondisturbing(w, 1e-12));
    auto m = marginal(w, 2, Side::right);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_NEAR(m[1], 1.0 / 3, 1e-15);

    // X_2 = 0 on edge (X_1,X_2) but uniform on edge (X_2,X_3).
    std::vector<double> p = {0.5, 0, 0.5, 0, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25, 0.25};
    Box disturbing(3, 2, p);
    EXPECT_NEAR(disturbance(disturbing, 1), 0.5, 1e-15);
    EXPECT_EQ(first_disturbed_observable(disturbing, 1e-9), 1);
    EXPECT_FALSE(is_nondisturbing(disturbing, 1e-9));
}

TEST(Box, VerticesAreNondisturbingAndDistinct) {
    for (int n = 3; n <= 7; n++) {
        std::set<std::vector<double>> seen;
        for (const auto &a : all_assignments(n, 2)) {
            Box b = deterministic_box(a);
            EXPECT_TRUE(is_nondisturbing(b, 0));
            seen.insert(vec(b));
        }
        for (const auto &g : odd_gammas(n)) {
            Box b = pr_box(g);
            EXPECT_TRUE(is_nondisturbing(b, 0));
            EXPECT_DOUBLE_EQ(oracle::c(b, g.signs()), n);
            seen.insert(vec(b));
        }
        EXPECT_EQ(seen.size(), (size_t{1} << n) + (size_t{1} << (n - 1)));
    }
    EXPECT_THROW(pr_box(Gamma::all_plus(4)), std::invalid_argument);
    EXPECT_THROW(classical_box(Gamma::canonical(4)), std::invalid_argument);
}

TEST(Box, ClassicalBoxIsLocalVertexMixture) {
    // classical_box(all plus) is the equal mixture of the two constant assignments.
    for (int n = 3; n <= 6; n++) {
        std::vector<int> zeros(static_cast<size_t>(n), 0), ones(static_cast<size_t>(n), 1);
        Box expect = mix(deterministic_box(zeros), deterministic_box(ones), 0.5);
        EXPECT_EQ(max_abs_difference(classical_box(Gamma::all_plus(n)), expect), 0.0);
    }
}

TEST(Box, MixValidatesWeights) {
    Box a = white_noise(4);
    Box b = pr_box(Gamma::canonical(4));
    std::vector<Box> boxes{a, b};
    std::vector<double> w{0.3, 0.6};
    EXPECT_THROW(mix(boxes, w), std::invalid_argument);
    w = {-0.1, 1.1};
    EXPECT_THROW(mix(boxes, w), std::invalid_argument);
    EXPECT_THROW(mix(a, white_noise(5), 0.5), std::invalid_argument);
}

TEST(BoxProperty, MixIsAssociative) {
    for (std::uint64_t s = 0; s < 50; s++) {
        Box a = random_ns_box(5, 3 * s), b = random_ns_box(5, 3 * s + 1), c = random_ns_box(5, 3 * s + 2);
        double x = 0.1 + 0.008 * static_cast<double>(s), y = 0.7;
        Box nested = mix(mix(a, b, x), c, y);
        std::vector<Box> all{a, b, c};
        std::vector<double> w{x * y, (1 - x) * y, 1 - y};
        EXPECT_LT(max_abs_difference(nested, mix(all, w)), 1e-15);
        EXPECT_TRUE(is_nondisturbing(nested, 1e-10));
    }
}

TEST(Box, RandomSamplersAreSeededAndValid) {
    for (int n = 3; n <= 8; n++) {
        EXPECT_EQ(random_ns_box(n, 7), random_ns_box(n, 7));
        EXPECT_NE(random_ns_box(n, 7), random_ns_box(n, 8));
        EXPECT_TRUE(is_nondisturbing(random_ns_box(n, 11), 1e-10));
        EXPECT_TRUE(is_nondisturbing(random_local_box(n, 11), 1e-10));
        EXPECT_TRUE(is_nondisturbing(random_pr_weighted_box(n, 11), 1e-10));
        // Deterministic vertices alone cannot exceed the C bound.
        EXPECT_LE(oracle::max_c(random_local_box(n, 5)), n - 2 + 1e-12);
    }
    auto dec = random_ns_decomposition(4, 3);
    EXPECT_EQ(dec.weights.size(), 24u);
    EXPECT_NEAR(dec.total(), 1.0, 1e-12);
    EXPECT_NO_THROW(dec.validate());
    EXPECT_LT(max_abs_difference(dec.remix(4), random_ns_box(4, 3)), 1e-15);
}

TEST(Box, VertexLabels) {
    EXPECT_EQ(VertexLabel::deterministic({0, 1, 0, 1}).to_string(), "det:0101");
    EXPECT_EQ(VertexLabel::extremal(Gamma::parse("+-++")).to_string(), "ns:+-++");
    EXPECT_EQ(vertex_box(VertexLabel::extremal(Gamma::canonical(4))), pr_box(Gamma::canonical(4)));
}

TEST(Chsh, VerticesMatchCycleVertices) {
    auto verts = chsh_vertices();
    ASSERT_EQ(verts.size(), 24u);
    std::set<std::vector<double>> pr_data;
    for (const auto &g : odd_gammas(4)) {
        pr_data.insert(vec(pr_box(g)));
    }
    std::set<std::vector<double>> det_data;
    for (const auto &a : all_assignments(4, 2)) {
        det_data.insert(vec(deterministic_box(a)));
    }
    int det = 0, pr = 0;
    for (const auto &v : verts) {
        Box b = chsh_box(v);
        EXPECT_TRUE(is_nondisturbing(b, 0));
        if (v.kind == ChshVertex::Kind::pr) {
            EXPECT_TRUE(pr_data.count(vec(b))) << v.to_string();
            pr++;
        } else {
            EXPECT_TRUE(det_data.count(vec(b))) << v.to_string();
            det++;
        }
    }
    EXPECT_EQ(det, 16);
    EXPECT_EQ(pr, 8);
}

TEST(Chsh, ProbabilityRule) {
    // Standard PR box: a xor b = x y.
    auto v = ChshVertex::pr(0, 0, 0);
    EXPECT_DOUBLE_EQ(chsh_probability(v, 0, 0, 1, 1), 0.0);
    EXPECT_DOUBLE_EQ(chsh_probability(v, 0, 1, 1, 1), 0.5);
    EXPECT_DOUBLE_EQ(chsh_probability(v, 1, 1, 0, 1), 0.5);
    auto d = ChshVertex::deterministic(1, 0, 0, 1);
    EXPECT_DOUBLE_EQ(chsh_probability(d, 1, 1, 1, 0), 1.0);
    EXPECT_DOUBLE_EQ(chsh_probability(d, 0, 1, 0, 0), 1.0);
}
