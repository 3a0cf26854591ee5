#pragma once

#include <cstdint>
#include <optional>

namespace ruleout {

/// Raw 2x2 outcome counts behind an operating point.
struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t signal_present() const { return tp + fn; }
    std::int64_t signal_absent() const { return fp + tn; }
    std::int64_t total() const { return signal_present() + signal_absent(); }
};

/// Operating point in ROC space: true-positive rate (sensitivity) and
/// false-positive rate (1 - specificity). When counts are attached they must
/// reproduce the rates to 1e-12 relative.
struct RocPoint {
    double tpr = 0.0;
    double fpr = 0.0;
    std::optional<ConfusionCounts> counts;

    RocPoint(double tpr, double fpr);
    RocPoint(double tpr, double fpr, const ConfusionCounts& counts);
    static RocPoint from_counts(const ConfusionCounts& counts);
};

/// Operating point in recall/detection space: fraction of all screened
/// patients recalled, and fraction recalled with the disease present.
/// Invariant: 0 <= detection_rate <= recall_rate <= 1.
struct RdPoint {
    double recall_rate = 0.0;
    double detection_rate = 0.0;
    std::optional<std::int64_t> n_patients;

    RdPoint(double recall_rate, double detection_rate);
    RdPoint(double recall_rate, double detection_rate, std::int64_t n_patients);
};

/// Utilities of the four decision outcomes, in arbitrary (but common) units.
/// A correct decision must have greater utility than the matching incorrect
/// one: tp > fn and tn > fp.
struct OutcomeUtilities {
    double tp = 0.0;
    double fp = 0.0;
    double tn = 0.0;
    double fn = 0.0;

    double relative_utility() const { return (tp - fn) / (tn - fp); }
};

/// Disease prevalence plus the utility trade-off that fixes the iso-utility
/// geometry. Absolute outcome utilities are optional; most analyses only
/// need the relative utility (U_TP - U_FN) / (U_TN - U_FP).
struct UtilityContext {
    double prevalence = 0.0;
    double relative_utility = 1.0;
    std::optional<OutcomeUtilities> outcome_utilities;

    UtilityContext(double prevalence, double relative_utility);
    UtilityContext(double prevalence, const OutcomeUtilities& utilities);
    UtilityContext(double prevalence, double relative_utility,
                   const OutcomeUtilities& utilities);

    /// Prevalence odds against disease, (1 - pi) / pi.
    double prevalence_odds() const { return (1.0 - prevalence) / prevalence; }
};

/// Positive and negative likelihood ratios of an operating point.
/// Degenerate corners use the chance-line limit: rho+ = 1 at (0,0) and
/// rho- = 1 at (1,1); rho+ = +inf when fpr = 0 < tpr, rho- = +inf when
/// fpr = 1 > tpr.
struct LikelihoodRatios {
    double positive = 1.0;  // tpr / fpr
    double negative = 1.0;  // (1 - tpr) / (1 - fpr)
};

LikelihoodRatios likelihood_ratios(const RocPoint& p);

/// P(disease | positive) = rho+ / (rho+ + Q_pi).
double ppv(const RocPoint& p, const UtilityContext& ctx);

/// P(no disease | negative) = Q_pi / (rho- + Q_pi).
double npv(const RocPoint& p, const UtilityContext& ctx);

/// Expected utility per patient from the four outcome probabilities.
/// Requires ctx.outcome_utilities; throws std::invalid_argument otherwise.
double expected_utility(const RocPoint& p, const UtilityContext& ctx);

/// Slope of iso-utility lines in ROC space, Q_pi / U_Rel.
double iso_slope_roc(const UtilityContext& ctx);

/// Iso-utility intercept: y-intercept of the iso-utility line through p in
/// ROC space, tpr - (Q_pi / U_Rel) * fpr. Unitless linear proxy for
/// expected utility.
double iui(const RocPoint& p, const UtilityContext& ctx);

/// Detection iso-utility intercept: the recall/detection-space analogue,
/// detection_rate - recall_rate / (1 + U_Rel).
double diui(const RdPoint& p, double relative_utility);

/// Exact transform to recall/detection space:
/// R_D = pi * tpr, R_R = pi * tpr + (1 - pi) * fpr.
RdPoint roc_to_rd(const RocPoint& p, const UtilityContext& ctx);

/// Algebraic inverse of roc_to_rd. Rejects points no prevalence-pi ROC
/// point can produce (detection_rate > pi, or recalled-benign fraction
/// above 1 - pi); tolerates rounding at the boundary.
RocPoint rd_to_roc(const RdPoint& p, const UtilityContext& ctx);

/// U_Rel implied by an ROC-space iso-utility (tangent) slope: Q_pi / slope.
double relative_utility_from_roc_slope(double slope, double prevalence);

/// U_Rel implied by a recall/detection-space slope: 1/slope - 1.
/// The slope must lie strictly inside (0, 1).
double relative_utility_from_rd_slope(double slope);

}  // namespace ruleout
