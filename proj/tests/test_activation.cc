#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ncycle/activation.h"
#include "ncycle/inequalities.h"
#include "ncycle/local_oracle.h"
#include "ncycle/symmetry.h"
#include "oracles.h"

using namespace ncycle;

TEST(MixtureBc, MatchesDirectMixtureRoute) {
    for (int n = 3; n <= 7; n++) {
        Gamma comp = Gamma::all_plus(n);
        Box cl = classical_box(comp);
        for (std::uint64_t s = 0; s < 10; s++) {
            Box b = random_pr_weighted_box(n, s);
            MixtureBc mb(b, comp);
            for (double v : {0.5, 0.2, 1e-2, 1e-3, 1e-4}) {
                Box m = mix(b, cl, v);
                for (int k = 0; k < n; k++) {
                    double direct = oracle::bc(m, k);
                    EXPECT_NEAR(mb.value(v, k), direct, 1e-11 * std::max(1.0, std::abs(direct)));
                    EXPECT_NEAR(mb.density(std::log(v), k), direct / v, 1e-9 * std::max(1.0, std::abs(direct / v)));
                }
            }
            EXPECT_EQ(mb.value(0, 0), 0.0);
        }
    }
}

TEST(MixtureBc, RateFormSurvivesUnderflow) {
    Box iso = isotropic_box(5, 0.7, Gamma::canonical(5));
    MixtureBc mb(iso, Gamma::all_plus(5));
    double slope = mb.log_slope(4);
    EXPECT_NEAR(slope, (5 * 0.7 - 3) / (2 * std::log(2.0)), 1e-12);
    // Far below double range the density is dominated by slope * ln(1/v).
    double log_v = -1e6;
    double d = mb.density(log_v, 4);
    EXPECT_GT(d, 0);
    EXPECT_NEAR(d / (slope * 1e6), 1.0, 1e-4);
    EXPECT_THROW(MixtureBc(iso, Gamma::canonical(5)), std::invalid_argument);
    EXPECT_THROW(bc_of_mixture(iso, Gamma::all_plus(5), 1.5, 0), std::invalid_argument);
}

TEST(Expansion, ModelAndDomain) {
    for (int n = 4; n <= 8; n++) {
        for (double eps : {0.1, 0.5, 0.9}) {
            auto m = expansion_model(n, eps);
            EXPECT_NEAR(m.coefficient, 2 - n * (1 - eps), 1e-15);
            double ln2 = std::log(2.0);
            double f = 2 - n * (1 - eps) * (1 + ln2) + (n + eps - n * eps) * std::log(1 - eps) -
                       eps * std::log(1 + eps) + std::log(4 / (1 - eps * eps));
            EXPECT_NEAR(m.f_value, f, 1e-12);
            EXPECT_DOUBLE_EQ(m.evaluate(1e-4), expansion_eq9(n, eps, 1e-4));
        }
    }
    EXPECT_THROW(expansion_model(4, 0), std::domain_error);
    EXPECT_THROW(expansion_model(4, 1), std::domain_error);
    EXPECT_THROW(expansion_eq9(4, 0.5, 0), std::domain_error);
    EXPECT_THROW(expansion_eq9(4, 0.5, 1), std::domain_error);
}

TEST(Expansion, ConvergesToExactMixture) {
    for (int n = 3; n <= 8; n++) {
        for (double eps : {0.2, 0.6, 0.95}) {
            Box iso = isotropic_box(n, eps, Gamma::canonical(n));
            double prev = INFINITY;
            for (double v : {1e-4, 1e-5, 1e-6, 1e-7}) {
                double exact = bc_of_mixture(iso, Gamma::all_plus(n), v, n - 1);
                double rel = std::abs(exact - expansion_eq9(n, eps, v)) / std::abs(exact);
                EXPECT_LT(rel, 1e-2);
                EXPECT_LT(rel, prev);
                prev = rel;
            }
        }
    }
}

TEST(Expansion, SmallVFitSlopeIsTwoMinusC) {
    for (std::uint64_t s = 0; s < 40; s++) {
        Box b = random_pr_weighted_box(4, s);
        auto al = align_to_canonical(b);
        double c = c_value(al.box, Gamma::canonical(4));
        // Corrections are O(v ln v): the residual shrinks with the fitting window.
        auto fit = fit_small_v(al.box, Gamma::all_plus(4), 3);
        EXPECT_NEAR(fit.slope, 2 - c, 1e-4) << "seed " << s;
        auto deep = fit_small_v(al.box, Gamma::all_plus(4), 3, 1e-9, 1e-7);
        EXPECT_NEAR(deep.slope, 2 - c, 1e-6) << "seed " << s;
        EXPECT_LT(std::abs(deep.slope - (2 - c)), std::abs(fit.slope - (2 - c)));
    }
    // Isotropic boxes: the intercept is f(4, eps) from the expansion.
    auto fit = fit_small_v(isotropic_box(4, 0.8, Gamma::canonical(4)), Gamma::all_plus(4), 3);
    EXPECT_NEAR(fit.intercept, expansion_model(4, 0.8).f_value, 1e-3);
}

TEST(Activation, GridShape) {
    GridSpec g;
    auto grid = grid_log_v(g);
    ASSERT_GT(grid.size(), 64u);
    EXPECT_DOUBLE_EQ(grid.front(), std::log(0.5));
    EXPECT_TRUE(std::is_sorted(grid.rbegin(), grid.rend()));
    EXPECT_GE(grid.back(), -1e13 * (1 + 1e-12));
    EXPECT_LT(grid.back(), -1e12);
}

TEST(Activation, PrBoxActivatesAtOneHalf) {
    auto r = activation_search(pr_box(Gamma::canonical(4)));
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.status, ActivationStatus::activated);
    EXPECT_EQ(r.k_star, 3);
    EXPECT_NEAR(r.v_star, 0.5, 1e-6);
    EXPECT_NEAR(r.bc_at_v, 1.0, 1e-9);
    EXPECT_NEAR(bc_of_mixture(pr_box(Gamma::canonical(4)), Gamma::all_plus(4), 0.5, 3), 1.0, 1e-15);
    EXPECT_NE(describe(r).find("status: activated"), std::string::npos);
}

TEST(Activation, LocalBoxesAreReportedLocal) {
    for (int n = 3; n <= 7; n++) {
        auto r = activation_search(random_local_box(n, 1));
        EXPECT_EQ(r.status, ActivationStatus::local);
        EXPECT_FALSE(r.found);
    }
    EXPECT_THROW(activation_search(white_noise(4, 3)), std::invalid_argument);
}

TEST(Activation, ThresholdOnIsotropicBoxes) {
    for (int n = 3; n <= 9; n++) {
        double thr = static_cast<double>(n - 2) / n;
        for (double delta : {-0.02, 0.003, 0.02, 0.2}) {
            double eps = thr + delta;
            if (eps > 1) {
                continue;
            }
            for (bool depol : {true, false}) {
                ActivationOptions o;
                o.depolarize = depol;
                EXPECT_EQ(activation_search(isotropic_box(n, eps, Gamma::canonical(n)), o).found, delta > 0)
                    << n << " " << eps;
            }
        }
    }
}

TEST(ActivationProperty, InvariantUnderRelabeling) {
    std::mt19937_64 rng(17);
    for (int n = 3; n <= 6; n++) {
        for (std::uint64_t s = 0; s < 40; s++) {
            Box b = random_pr_weighted_box(n, s);
            auto base = activation_search(b);
            auto op = LocalOperation::shift(static_cast<int>(rng() % n))
                          .then(LocalOperation::flip({static_cast<int>(rng() % n)}));
            auto moved = activation_search(apply(op, b));
            EXPECT_EQ(base.status, moved.status);
            EXPECT_NEAR(base.c_value, moved.c_value, 1e-12);
            if (base.found) {
                // The depolarized box depends only on C. BC is flat at its maximiser, so compare the maximum.
                EXPECT_EQ(base.k_star, moved.k_star);
                EXPECT_NEAR(base.bc_at_v, moved.bc_at_v, 1e-10 * base.bc_at_v);
                EXPECT_NEAR(base.bc_density, moved.bc_density, 1e-6 * base.bc_density);
                EXPECT_NEAR(base.log_v_star, moved.log_v_star, 1e-6 * std::abs(base.log_v_star));
            }
        }
    }
}

TEST(ActivationProperty, EveryNonlocalBoxIsActivated) {
    for (int n = 3; n <= 7; n++) {
        int nonlocal = 0;
        for (std::uint64_t s = 0; nonlocal < 1000; s++) {
            Box b = random_pr_weighted_box(n, trial_seed(77, s));
            if (facet_check(b).is_local) {
                continue;
            }
            nonlocal++;
            auto r = activation_search(b);
            ASSERT_TRUE(r.found) << "n=" << n << " seed index " << s;
            EXPECT_GT(r.bc_density, 0);
            EXPECT_EQ(r.k_star, n - 1);
        }
    }
}

TEST(Appendix, DeterministicAcrossThreadCounts) {
    AppendixOptions one, many;
    one.threads = 1;
    many.threads = 4;
    one.sampler = many.sampler = Sampler::pr_weighted;
    auto a = appendix_experiment(5, 200, 3, one);
    auto b = appendix_experiment(5, 200, 3, many);
    EXPECT_EQ(a.nonlocal, b.nonlocal);
    EXPECT_EQ(a.activated, b.activated);
    EXPECT_EQ(a.local, b.local);
    EXPECT_EQ(a.min_c_excess, b.min_c_excess);
    EXPECT_EQ(a.max_log_inv_v, b.max_log_inv_v);
    EXPECT_EQ(a.nonlocal + a.local, 200);
    EXPECT_EQ(a.failed, 0);
    EXPECT_EQ(a.local_activated, 0);
    EXPECT_THROW(appendix_experiment(8, 10, 1), std::invalid_argument);
    AppendixOptions conj;
    conj.conjecture = true;
    EXPECT_NO_THROW(appendix_experiment(8, 5, 1, conj));
    EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
    EXPECT_NE(trial_seed(1, 0), trial_seed(2, 0));
    EXPECT_EQ(sampler_name(Sampler::pr_weighted), "pr-weighted");
}

TEST(Chsh, WeightFormulaMatchesCValue) {
    auto verts = chsh_vertices();
    Gamma g({1, 1, -1, 1});
    for (const auto &v : verts) {
        std::map<ChshVertex, double> w{{v, 1.0}};
        EXPECT_NEAR(c4_from_weights(w), c_value(chsh_box(v), g) / 2, 1e-15) << v.to_string();
    }
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; t++) {
        std::map<ChshVertex, double> w;
        double total = 0;
        for (const auto &v : verts) {
            double x = std::exponential_distribution<double>(1.0)(rng);
            w[v] = x;
            total += x;
        }
        for (auto &[v, x] : w) {
            x /= total;
        }
        Box b = chsh_remix(w);
        EXPECT_NEAR(c4_from_weights(w), c_value(b, g) / 2, 1e-12);
        EXPECT_NEAR(c4_from_weights(w), oracle::c(b, g.signs()) / 2, 1e-12);
    }
    std::map<ChshVertex, double> bad{{verts[0], 0.7}};
    EXPECT_THROW(c4_from_weights(bad), std::invalid_argument);
}

TEST(Curve, RowsAndCsv) {
    Box iso = isotropic_box(4, 0.9, Gamma::canonical(4));
    std::vector<double> vs = {1e-6, 1e-3, 0.5};
    auto rows = bc_curve(iso, Gamma::all_plus(4), vs, expansion_model(4, 0.9));
    ASSERT_EQ(rows.size(), 12u);
    for (const auto &r : rows) {
        EXPECT_EQ(std::isnan(r.bc_eq9), r.k != 3);
        EXPECT_NEAR(r.bc_exact, bc_of_mixture(iso, Gamma::all_plus(4), r.v, r.k), 1e-15);
    }
    auto csv = curve_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "v,k,bc_value_exact,bc_value_eq9");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}
