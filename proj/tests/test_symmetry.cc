#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ncycle/inequalities.h"
#include "ncycle/local_oracle.h"
#include "ncycle/symmetry.h"
#include "oracles.h"

using namespace ncycle;

namespace {

LocalOperation random_op(int n, std::mt19937_64 &rng) {
    std::vector<Atom> atoms;
    std::uniform_int_distribution<int> kind(0, 2), idx(0, n - 1);
    int len = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < len; i++) {
        switch (kind(rng)) {
            case 0:
                atoms.push_back(OutputFlip{{idx(rng)}});
                break;
            case 1:
                atoms.push_back(CyclicShift{idx(rng)});
                break;
            default:
                atoms.push_back(EdgeDoubleFlip{idx(rng)});
        }
    }
    return LocalOperation(atoms);
}

std::vector<double> sorted(std::vector<double> v) {
    for (double &x : v) {
        x = std::round(x * 1e10) / 1e10;
    }
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST(Symmetry, AtomsAndNormalForms) {
    for (int n = 3; n <= 7; n++) {
        EXPECT_TRUE(LocalOperation::shift(n).is_identity(n));
        EXPECT_FALSE(LocalOperation::shift(1).is_identity(n));
        EXPECT_TRUE(LocalOperation::flip({0, 1}).then(LocalOperation::flip({1, 0})).is_identity(n));
        LocalOperation edge_flip({EdgeDoubleFlip{n - 1}});
        EXPECT_EQ(edge_flip.normal_form(n), LocalOperation::flip({n - 1, 0}).normal_form(n));
    }
    EXPECT_EQ(LocalOperation::flip({0, 2}).then(LocalOperation::shift(1)).to_string(), "flip{1,3} ; shift(1)");
    EXPECT_EQ(LocalOperation().to_string(), "identity");
}

TEST(Symmetry, ShiftRelabelsObservables) {
    Box b = random_ns_box(5, 3);
    Box s = apply(LocalOperation::shift(2), b);
    for (int i = 0; i < 5; i++) {
        EXPECT_EQ(oracle::edge(s, i), oracle::edge(b, (i + 2) % 5));
    }
}

TEST(Symmetry, FlipSwapsOutcomes) {
    Box b = random_ns_box(4, 8);
    Box f = apply(LocalOperation::flip({1}), b);
    // Edge 0 is (X_1, X_2): second index flips. Edge 1 is (X_2, X_3): first index flips.
    EXPECT_EQ(f.at(0, 0, 0), b.at(0, 0, 1));
    EXPECT_EQ(f.at(1, 0, 1), b.at(1, 1, 1));
    EXPECT_EQ(f.at(2, 1, 0), b.at(2, 1, 0));
    EXPECT_THROW(apply(LocalOperation::flip({0}), white_noise(4, 3)), std::invalid_argument);
    EXPECT_THROW(apply(LocalOperation::flip({4}), b), std::invalid_argument);
}

TEST(SymmetryProperty, InversesUndoOperations) {
    std::mt19937_64 rng(5);
    for (int n = 3; n <= 8; n++) {
        for (int t = 0; t < 40; t++) {
            auto op = random_op(n, rng);
            Box b = random_ns_box(n, static_cast<std::uint64_t>(t));
            EXPECT_EQ(apply(op.inverse(), apply(op, b)), b);
            EXPECT_TRUE(op.then(op.inverse()).is_identity(n));
            EXPECT_EQ(apply(LocalOperation::from_normal_form(op.normal_form(n)), b), apply(op, b));
        }
    }
}

TEST(SymmetryProperty, OperationsPermuteInequalityValues) {
    std::mt19937_64 rng(6);
    for (int n = 3; n <= 7; n++) {
        for (int t = 0; t < 30; t++) {
            auto op = random_op(n, rng);
            Box b = random_pr_weighted_box(n, static_cast<std::uint64_t>(t));
            Box ob = apply(op, b);
            std::vector<double> cs, ocs;
            for (const auto &g : odd_gammas(n)) {
                EXPECT_NEAR(c_value(ob, transform_gamma(op, g)), c_value(b, g), 1e-12);
                cs.push_back(c_value(b, g));
                ocs.push_back(c_value(ob, g));
            }
            EXPECT_EQ(sorted(cs), sorted(ocs));
            EXPECT_EQ(sorted(bc_values(b)), sorted(bc_values(ob)));
            EXPECT_EQ(facet_check(b).is_local, facet_check(ob).is_local);
        }
    }
}

TEST(Twirl, GroupStructure) {
    for (int n = 3; n <= 8; n++) {
        for (const auto &g : odd_gammas(n)) {
            auto spec = twirl_group(g);
            ASSERT_EQ(spec.elements.size(), static_cast<size_t>(2 * n));
            Box pr = pr_box(g);
            for (const auto &op : spec.elements) {
                EXPECT_EQ(transform_gamma(op, g), g);
                EXPECT_LT(max_abs_difference(apply(op, pr), pr), 1e-15);
                EXPECT_LT(max_abs_difference(apply(op, white_noise(n)), white_noise(n)), 1e-15);
            }
        }
    }
}

TEST(TwirlProperty, AverageIsInvariantUnderGroup) {
    for (int n = 3; n <= 6; n++) {
        Gamma g = odd_gammas(n)[static_cast<size_t>(n) % odd_gammas(n).size()];
        auto spec = twirl_group(g);
        for (std::uint64_t s = 0; s < 10; s++) {
            Box b = random_ns_box(n, s);
            Box t = twirl(spec, b);
            for (const auto &op : spec.elements) {
                EXPECT_LT(max_abs_difference(twirl(spec, apply(op, b)), t), 1e-14);
                EXPECT_LT(max_abs_difference(apply(op, t), t), 1e-14);
            }
        }
    }
}

TEST(Depolarize, Contract) {
    for (int n = 3; n <= 8; n++) {
        for (std::uint64_t s = 0; s < 25; s++) {
            Box b = random_pr_weighted_box(n, s);
            for (const auto &g : {Gamma::canonical(n), odd_gammas(n).front()}) {
                Box out = depolarize(b, g);
                double eps = c_value(b, g) / n;
                EXPECT_NEAR(c_value(out, g), c_value(b, g), 1e-12);
                Box pr = pr_box(g);
                for (int e = 0; e < n; e++) {
                    for (int x = 0; x < 2; x++) {
                        for (int y = 0; y < 2; y++) {
                            EXPECT_NEAR(out.at(e, x, y), eps * pr.at(e, x, y) + (1 - eps) * 0.25, 1e-12);
                        }
                    }
                }
                EXPECT_TRUE(is_nondisturbing(out, 1e-10));
                EXPECT_LT(max_abs_difference(depolarize(out, g), out), 1e-12);
            }
        }
    }
    EXPECT_THROW(depolarize(white_noise(4), Gamma::all_plus(4)), std::invalid_argument);
    EXPECT_THROW(depolarize(white_noise(4, 3), Gamma::canonical(4)), std::invalid_argument);
    EXPECT_THROW(depolarize(white_noise(4), Gamma::canonical(5)), std::invalid_argument);
}

TEST(Depolarize, KeepsLocalBoxesLocal) {
    for (int n = 3; n <= 6; n++) {
        for (std::uint64_t s = 0; s < 20; s++) {
            Box b = random_local_box(n, s);
            for (const auto &g : odd_gammas(n)) {
                EXPECT_TRUE(facet_check(depolarize(b, g)).is_local);
            }
        }
    }
}

TEST(Alignment, MovesViolationToCanonical) {
    for (int n = 3; n <= 7; n++) {
        for (const auto &g : odd_gammas(n)) {
            auto op = canonical_relabeling(g);
            EXPECT_EQ(transform_gamma(op, g), Gamma::canonical(n));
            Box b = mix(pr_box(g), white_noise(n), 0.9);
            auto al = align_to_canonical(b);
            ASSERT_TRUE(al.original.has_value());
            EXPECT_EQ(*al.original, g);
            EXPECT_NEAR(c_value(al.box, Gamma::canonical(n)), c_value(b, g), 1e-12);
        }
        EXPECT_TRUE(canonical_relabeling(Gamma::canonical(n)).is_identity(n));
        auto local = align_to_canonical(white_noise(n));
        EXPECT_FALSE(local.original.has_value());
        EXPECT_TRUE(local.op.is_identity(n));
    }
}
