#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <stdexcept>

#include "ruleout/metrics.hpp"

using namespace ruleout;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Brute-force oracle: predictive values counted directly from an integer
// population table, bypassing the likelihood-ratio route.
struct PopulationTable {
    std::int64_t tp, fp, tn, fn;
    double ppv() const { return double(tp) / double(tp + fp); }
    double npv() const { return double(tn) / double(tn + fn); }
    double prevalence() const {
        return double(tp + fn) / double(tp + fp + tn + fn);
    }
};

}  // namespace

TEST_CASE("likelihood ratios at the published baseline and corners") {
    auto lr = likelihood_ratios(RocPoint(0.906, 0.065));
    CHECK(lr.positive == doctest::Approx(0.906 / 0.065).epsilon(1e-12));  // 13.938...
    CHECK(lr.negative == doctest::Approx(0.094 / 0.935).epsilon(1e-12));  // 0.1005...

    auto chance = likelihood_ratios(RocPoint(0.5, 0.5));
    CHECK(chance.positive == 1.0);
    CHECK(chance.negative == 1.0);

    auto perfect = likelihood_ratios(RocPoint(1.0, 0.0));
    CHECK(std::isinf(perfect.positive));
    CHECK(perfect.negative == 0.0);

    // chance-line limits at the degenerate corners
    CHECK(likelihood_ratios(RocPoint(0.0, 0.0)).positive == 1.0);
    CHECK(likelihood_ratios(RocPoint(1.0, 1.0)).negative == 1.0);
    CHECK(std::isinf(likelihood_ratios(RocPoint(0.3, 1.0)).negative));
}

TEST_CASE("ppv matches a direct population count") {
    // 10^6 patients at prevalence 0.007 with tpr 0.906, fpr 0.065: every cell
    // is integral, so the count-based PPV is exact.
    PopulationTable t{6342, 64545, 928455, 658};
    REQUIRE(t.prevalence() == 0.007);

    UtilityContext ctx(0.007, 162.0);
    RocPoint p(0.906, 0.065);
    CHECK(ppv(p, ctx) == doctest::Approx(t.ppv()).epsilon(1e-12));
    CHECK(std::abs(ppv(p, ctx) - 0.0895) < 1e-4);

    CHECK(ppv(RocPoint(1.0, 0.0), ctx) == 1.0);
}

TEST_CASE("ppv equals prevalence on the chance diagonal") {
    for (double pi : {0.007, 0.1, 0.5, 0.93}) {
        UtilityContext ctx(pi, 10.0);
        CHECK(ppv(RocPoint(0.5, 0.5), ctx) == doctest::Approx(pi).epsilon(1e-12));
        CHECK(npv(RocPoint(0.5, 0.5), ctx) == doctest::Approx(1.0 - pi).epsilon(1e-12));
    }
}

TEST_CASE("npv at the published baseline") {
    UtilityContext ctx(0.007, 162.0);
    PopulationTable t{6342, 64545, 928455, 658};
    CHECK(npv(RocPoint(0.906, 0.065), ctx) == doctest::Approx(t.npv()).epsilon(1e-12));
    CHECK(std::abs(npv(RocPoint(0.906, 0.065), ctx) - 0.9993) < 5e-4);
    CHECK(npv(RocPoint(1.0, 0.0), ctx) == 1.0);
}

TEST_CASE("expected utility") {
    SUBCASE("perfect accuracy with unit utilities") {
        UtilityContext ctx(0.3, OutcomeUtilities{1, 0, 1, 0});
        CHECK(expected_utility(RocPoint(1.0, 0.0), ctx) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("outcome-independent utility is constant") {
        // equal utilities violate the correct>incorrect ordering, so build the
        // context with an explicit U_Rel and a nearly-flat quadruple
        const double k = 3.25;
        UtilityContext ctx(0.2, OutcomeUtilities{k + 1e-9, k, k + 1e-9, k});
        for (auto& p : {RocPoint(0.1, 0.9), RocPoint(0.7, 0.2), RocPoint(0.0, 0.0)})
            CHECK(expected_utility(p, ctx) == doctest::Approx(k).epsilon(1e-9));
    }
    SUBCASE("hand-evaluated value realizing U_Rel = 162") {
        UtilityContext ctx(0.007, OutcomeUtilities{162, 0, 1, 0});
        REQUIRE(ctx.relative_utility == doctest::Approx(162.0).epsilon(1e-12));
        const double oracle = 162 * 0.906 * 0.007 + 0.935 * 0.993;  // 1.955859
        CHECK(expected_utility(RocPoint(0.906, 0.065), ctx) ==
              doctest::Approx(oracle).epsilon(1e-12));
    }
    SUBCASE("rejects missing outcome utilities") {
        UtilityContext ctx(0.007, 162.0);
        CHECK_THROWS_AS(expected_utility(RocPoint(0.9, 0.1), ctx), std::invalid_argument);
    }
}

TEST_CASE("iso-utility slope in ROC space") {
    CHECK(iso_slope_roc(UtilityContext(0.007, 162.0)) ==
          doctest::Approx((0.993 / 0.007) / 162.0).epsilon(1e-12));  // 0.87566...
    CHECK(iso_slope_roc(UtilityContext(0.5, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(iso_slope_roc(UtilityContext(0.007, 1e12)) < 1e-9);
}

TEST_CASE("iui reproduces the published table rows from rounded inputs") {
    UtilityContext ctx(0.007, 162.0);
    CHECK(std::abs(iui(RocPoint(0.906, 0.065), ctx) - 0.85) < 5e-3);
    CHECK(std::abs(iui(RocPoint(0.539, 0.012), ctx) - 0.529) < 5e-3);

    // zero false positives: intercept equals the sensitivity
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> rate(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double t = rate(gen);
        CHECK(iui(RocPoint(t, 0.0), ctx) == t);
    }
}

TEST_CASE("diui reproduces the published scenario rows") {
    CHECK(std::abs(diui(RdPoint(0.032, 0.0061), 111.0) - 5.83e-3) < 0.1e-3);
    CHECK(std::abs(diui(RdPoint(0.012, 0.0053), 111.0) - 5.21e-3) < 0.1e-3);
    CHECK(diui(RdPoint(0.0, 0.0), 42.0) == 0.0);
}

TEST_CASE("roc_to_rd substitution") {
    UtilityContext ctx(0.007, 162.0);

    auto perfect = roc_to_rd(RocPoint(1.0, 0.0), ctx);
    CHECK(perfect.recall_rate == doctest::Approx(0.007).epsilon(1e-12));
    CHECK(perfect.detection_rate == doctest::Approx(0.007).epsilon(1e-12));

    auto base = roc_to_rd(RocPoint(0.906, 0.065), ctx);
    CHECK(base.detection_rate == doctest::Approx(0.007 * 0.906).epsilon(1e-12));
    CHECK(base.recall_rate ==
          doctest::Approx(0.007 * 0.906 + 0.993 * 0.065).epsilon(1e-12));  // 0.070887

    auto origin = roc_to_rd(RocPoint(0.0, 0.0), ctx);
    CHECK(origin.recall_rate == 0.0);
    CHECK(origin.detection_rate == 0.0);
}

TEST_CASE("rd_to_roc inversion and impossibility checks") {
    UtilityContext ctx(0.007, 162.0);

    auto perfect = rd_to_roc(RdPoint(0.007, 0.007), ctx);
    CHECK(perfect.tpr == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(perfect.fpr == doctest::Approx(0.0).scale(1.0));

    auto base = rd_to_roc(RdPoint(0.070887, 0.006342), ctx);
    CHECK(base.tpr == doctest::Approx(0.906).epsilon(1e-12));
    CHECK(base.fpr == doctest::Approx(0.065).epsilon(1e-12));

    // detection above prevalence would need tpr > 1
    CHECK_THROWS_AS(rd_to_roc(RdPoint(0.5, 0.02), ctx), std::invalid_argument);
    // recalled-benign fraction above 1 - pi would need fpr > 1
    CHECK_THROWS_AS(rd_to_roc(RdPoint(0.9999, 0.0), UtilityContext(0.5, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("relative utility from slopes") {
    CHECK(relative_utility_from_roc_slope((0.993 / 0.007) / 162.0, 0.007) ==
          doctest::Approx(162.0).epsilon(1e-12));
    CHECK(relative_utility_from_roc_slope(0.993 / 0.007, 0.007) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(relative_utility_from_roc_slope(1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(relative_utility_from_rd_slope(1.0 / 112.0) == doctest::Approx(111.0).epsilon(1e-12));
    CHECK(relative_utility_from_rd_slope(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(relative_utility_from_rd_slope(1.0 / 163.0) == doctest::Approx(162.0).epsilon(1e-12));
    CHECK_THROWS_AS(relative_utility_from_rd_slope(0.0), std::invalid_argument);
    CHECK_THROWS_AS(relative_utility_from_rd_slope(1.0), std::invalid_argument);
    CHECK_THROWS_AS(relative_utility_from_rd_slope(-0.2), std::invalid_argument);
    CHECK_THROWS_AS(relative_utility_from_roc_slope(0.0, 0.3), std::invalid_argument);
}

TEST_CASE("slope round trip for reference relative utilities") {
    for (double u : {1.0, 10.0, 111.0, 162.0, 1000.0}) {
        const double slope = 1.0 / (1.0 + u);
        CHECK(relative_utility_from_rd_slope(slope) == doctest::Approx(u).epsilon(1e-12));
    }
}

TEST_CASE("type validation") {
    CHECK_THROWS_AS(RocPoint(1.2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(RocPoint(0.5, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(RdPoint(0.1, 0.2), std::invalid_argument);  // detection > recall
    CHECK_THROWS_AS(UtilityContext(0.0, 162.0), std::invalid_argument);
    CHECK_THROWS_AS(UtilityContext(1.0, 162.0), std::invalid_argument);
    CHECK_THROWS_AS(UtilityContext(0.007, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(UtilityContext(0.007, OutcomeUtilities{0, 0, 1, 0}),
                    std::invalid_argument);  // U_TP must exceed U_FN
    CHECK_THROWS_AS(UtilityContext(0.007, 10.0, OutcomeUtilities{162, 0, 1, 0}),
                    std::invalid_argument);  // inconsistent U_Rel

    ConfusionCounts good{173, 1713, 24636, 18};
    auto p = RocPoint::from_counts(good);
    CHECK(p.tpr == doctest::Approx(173.0 / 191.0).epsilon(1e-15));
    CHECK(p.fpr == doctest::Approx(1713.0 / 26349.0).epsilon(1e-15));
    CHECK(p.counts.has_value());
    CHECK_THROWS_AS(RocPoint(0.5, 0.065, good), std::invalid_argument);
    CHECK_THROWS_AS(RocPoint::from_counts(ConfusionCounts{-1, 0, 0, 5}),
                    std::invalid_argument);
}

TEST_CASE("property: roc<->rd round trip to 1e-12") {
    std::mt19937_64 gen(20240811);
    std::uniform_real_distribution<double> rate(0.0, 1.0);
    std::uniform_real_distribution<double> prev(0.001, 0.999);
    for (int i = 0; i < 10000; ++i) {
        UtilityContext ctx(prev(gen), 1.0 + 200.0 * rate(gen));
        RocPoint p(rate(gen), rate(gen));
        RocPoint back = rd_to_roc(roc_to_rd(p, ctx), ctx);
        REQUIRE(std::abs(back.tpr - p.tpr) <= 1e-12);
        REQUIRE(std::abs(back.fpr - p.fpr) <= 1e-12);
    }
}

TEST_CASE("property: diui equals pi*U/(1+U)*iui across spaces") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> rate(0.0, 1.0);
    std::uniform_real_distribution<double> prev(0.001, 0.999);
    std::uniform_real_distribution<double> logu(-2.0, 3.0);
    for (int i = 0; i < 10000; ++i) {
        const double pi = prev(gen);
        const double u = std::pow(10.0, logu(gen));
        UtilityContext ctx(pi, u);
        RocPoint p(rate(gen), rate(gen));
        RdPoint rd = roc_to_rd(p, ctx);
        const double lhs = diui(rd, u);
        const double rhs = pi * (u / (1.0 + u)) * iui(p, ctx);
        // relative to the operating-point scale: near-zero intercepts arise
        // from cancellation of O(recall_rate) terms
        const double scale = std::max({std::abs(lhs), std::abs(rhs), rd.recall_rate});
        REQUIRE(std::abs(lhs - rhs) <= 1e-12 * std::max(scale, 1e-300));
    }
}

TEST_CASE("property: points on one iso-utility line share the IUI") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> rate(0.0, 1.0);
    std::uniform_real_distribution<double> prev(0.001, 0.999);
    for (int i = 0; i < 10000; ++i) {
        UtilityContext ctx(prev(gen), 0.5 + 300.0 * rate(gen));
        const double slope = iso_slope_roc(ctx);
        RocPoint a(rate(gen), rate(gen));
        const double c = iui(a, ctx);
        // second point on the same line, clipped to the unit square
        const double f2 = rate(gen) * std::min(1.0, std::max(0.0, (1.0 - c) / slope));
        const double t2 = slope * f2 + c;
        if (t2 < 0.0 || t2 > 1.0) continue;
        RocPoint b(t2, f2);
        REQUIRE(std::abs(iui(b, ctx) - c) <= 1e-12);
    }
}

TEST_CASE("property: Se/Sp dominance implies predictive-value and IUI dominance") {
    std::mt19937_64 gen(1234);
    std::uniform_real_distribution<double> rate(0.0, 1.0);
    std::uniform_real_distribution<double> prev(0.001, 0.999);
    for (int i = 0; i < 10000; ++i) {
        // B arbitrary, A dominating B
        const double tb = rate(gen), fb = rate(gen);
        const double ta = tb + (1.0 - tb) * rate(gen);
        const double fa = fb * rate(gen);
        if (!(ta > tb || fa < fb)) continue;
        RocPoint a(ta, fa), b(tb, fb);
        UtilityContext ctx(prev(gen), 0.5 + 300.0 * rate(gen));
        REQUIRE(ppv(a, ctx) >= ppv(b, ctx));
        REQUIRE(npv(a, ctx) >= npv(b, ctx));
        REQUIRE(iui(a, ctx) >= iui(b, ctx));
    }
}

TEST_CASE("property: PPV monotone in rho+, NPV monotone in rho-") {
    std::mt19937_64 gen(5678);
    std::uniform_real_distribution<double> rate(0.001, 0.999);
    std::uniform_real_distribution<double> prev(0.001, 0.999);
    for (int i = 0; i < 10000; ++i) {
        RocPoint a(rate(gen), rate(gen));
        RocPoint b(rate(gen), rate(gen));
        UtilityContext ctx(prev(gen), 2.0);
        auto la = likelihood_ratios(a);
        auto lb = likelihood_ratios(b);
        if (la.positive > lb.positive) REQUIRE(ppv(a, ctx) > ppv(b, ctx));
        if (la.negative < lb.negative) REQUIRE(npv(a, ctx) > npv(b, ctx));
    }
}

TEST_CASE("property: expected utility with U_FN=U_FP=0, U_TN=1, U_TP=U_Rel ranks like IUI") {
    std::mt19937_64 gen(31337);
    std::uniform_real_distribution<double> rate(0.0, 1.0);
    std::uniform_real_distribution<double> prev(0.01, 0.99);
    std::uniform_real_distribution<double> urel(1.5, 300.0);
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
        const double u = urel(gen);
        UtilityContext ctx(prev(gen), OutcomeUtilities{u, 0, 1, 0});
        RocPoint a(rate(gen), rate(gen));
        RocPoint b(rate(gen), rate(gen));
        const double di = iui(a, ctx) - iui(b, ctx);
        if (std::abs(di) < 1e-9) continue;  // rounding can flip exact ties
        const double de = expected_utility(a, ctx) - expected_utility(b, ctx);
        REQUIRE(((di > 0) == (de > 0)));
        ++checked;
    }
    CHECK(checked > 9000);
}
