#include "ruleout/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ruleout {

namespace {

constexpr double kBoundarySlack = 1e-12;   // absolute, for [0,1] clamping
constexpr double kConsistencyTol = 1e-12;  // relative, counts vs rates
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_rate(double v, const char* name) {
    if (!std::isfinite(v) || v < -kBoundarySlack || v > 1.0 + kBoundarySlack) {
        std::ostringstream msg;
        msg << name << " must be a probability in [0,1], got " << v;
        throw std::invalid_argument(msg.str());
    }
    if (v < 0.0) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
}

bool relatively_close(double a, double b, double tol) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= tol * std::max(scale, 1.0);
}

void check_counts(const ConfusionCounts& c) {
    if (c.tp < 0 || c.fp < 0 || c.tn < 0 || c.fn < 0)
        throw std::invalid_argument("confusion counts must be non-negative");
    if (c.signal_present() == 0 && c.signal_absent() == 0)
        throw std::invalid_argument("confusion counts are all zero");
}

}  // namespace

RocPoint::RocPoint(double tpr_, double fpr_)
    : tpr(clamp_rate(tpr_, "tpr")), fpr(clamp_rate(fpr_, "fpr")) {}

RocPoint::RocPoint(double tpr_, double fpr_, const ConfusionCounts& counts_)
    : RocPoint(tpr_, fpr_) {
    check_counts(counts_);
    const double tpr_from_counts =
        counts_.signal_present() > 0
            ? static_cast<double>(counts_.tp) / static_cast<double>(counts_.signal_present())
            : tpr;
    const double fpr_from_counts =
        counts_.signal_absent() > 0
            ? static_cast<double>(counts_.fp) / static_cast<double>(counts_.signal_absent())
            : fpr;
    if (!relatively_close(tpr, tpr_from_counts, kConsistencyTol) ||
        !relatively_close(fpr, fpr_from_counts, kConsistencyTol))
        throw std::invalid_argument("confusion counts do not reproduce the stated rates");
    counts = counts_;
}

RocPoint RocPoint::from_counts(const ConfusionCounts& c) {
    check_counts(c);
    const double tpr = c.signal_present() > 0
                           ? static_cast<double>(c.tp) / static_cast<double>(c.signal_present())
                           : 0.0;
    const double fpr = c.signal_absent() > 0
                           ? static_cast<double>(c.fp) / static_cast<double>(c.signal_absent())
                           : 0.0;
    RocPoint p(tpr, fpr);
    p.counts = c;
    return p;
}

RdPoint::RdPoint(double recall, double detection)
    : recall_rate(clamp_rate(recall, "recall_rate")),
      detection_rate(clamp_rate(detection, "detection_rate")) {
    if (detection_rate > recall_rate) {
        if (detection_rate - recall_rate > kBoundarySlack) {
            std::ostringstream msg;
            msg << "detection_rate (" << detection_rate << ") exceeds recall_rate ("
                << recall_rate << "): a detected cancer is necessarily recalled";
            throw std::invalid_argument(msg.str());
        }
        detection_rate = recall_rate;
    }
}

RdPoint::RdPoint(double recall, double detection, std::int64_t n)
    : RdPoint(recall, detection) {
    if (n <= 0) throw std::invalid_argument("n_patients must be positive");
    n_patients = n;
}

namespace {

void check_prevalence(double pi) {
    if (!std::isfinite(pi) || pi <= 0.0 || pi >= 1.0)
        throw std::invalid_argument("prevalence must lie strictly inside (0,1)");
}

void check_relative_utility(double u) {
    if (!std::isfinite(u) || u <= 0.0)
        throw std::invalid_argument("relative_utility must be positive");
}

void check_outcome_utilities(const OutcomeUtilities& u) {
    if (!(u.tp > u.fn) || !(u.tn > u.fp))
        throw std::invalid_argument(
            "outcome utilities must satisfy U_TP > U_FN and U_TN > U_FP");
}

}  // namespace

UtilityContext::UtilityContext(double pi, double u_rel)
    : prevalence(pi), relative_utility(u_rel) {
    check_prevalence(pi);
    check_relative_utility(u_rel);
}

UtilityContext::UtilityContext(double pi, const OutcomeUtilities& u)
    : UtilityContext(pi, (check_outcome_utilities(u), u.relative_utility())) {
    outcome_utilities = u;
}

UtilityContext::UtilityContext(double pi, double u_rel, const OutcomeUtilities& u)
    : UtilityContext(pi, u_rel) {
    check_outcome_utilities(u);
    if (!relatively_close(u_rel, u.relative_utility(), kConsistencyTol))
        throw std::invalid_argument(
            "relative_utility is inconsistent with the outcome utilities");
    outcome_utilities = u;
}

LikelihoodRatios likelihood_ratios(const RocPoint& p) {
    LikelihoodRatios r;
    if (p.fpr > 0.0)
        r.positive = p.tpr / p.fpr;
    else
        r.positive = p.tpr > 0.0 ? kInf : 1.0;  // chance-line limit at (0,0)
    if (p.fpr < 1.0)
        r.negative = (1.0 - p.tpr) / (1.0 - p.fpr);
    else
        r.negative = p.tpr < 1.0 ? kInf : 1.0;  // chance-line limit at (1,1)
    return r;
}

double ppv(const RocPoint& p, const UtilityContext& ctx) {
    const double rho = likelihood_ratios(p).positive;
    if (std::isinf(rho)) return 1.0;
    return rho / (rho + ctx.prevalence_odds());
}

double npv(const RocPoint& p, const UtilityContext& ctx) {
    const double rho = likelihood_ratios(p).negative;
    const double q = ctx.prevalence_odds();
    if (std::isinf(rho)) return 0.0;
    return q / (rho + q);
}

double expected_utility(const RocPoint& p, const UtilityContext& ctx) {
    if (!ctx.outcome_utilities)
        throw std::invalid_argument(
            "expected_utility requires absolute outcome utilities; "
            "use iui/diui as utility proxies when only U_Rel is known");
    const OutcomeUtilities& u = *ctx.outcome_utilities;
    const double pi = ctx.prevalence;
    return u.tp * p.tpr * pi + u.fn * (1.0 - p.tpr) * pi +
           u.tn * (1.0 - p.fpr) * (1.0 - pi) + u.fp * p.fpr * (1.0 - pi);
}

double iso_slope_roc(const UtilityContext& ctx) {
    return ctx.prevalence_odds() / ctx.relative_utility;
}

double iui(const RocPoint& p, const UtilityContext& ctx) {
    return p.tpr - iso_slope_roc(ctx) * p.fpr;
}

double diui(const RdPoint& p, double relative_utility) {
    check_relative_utility(relative_utility);
    return p.detection_rate - p.recall_rate / (1.0 + relative_utility);
}

RdPoint roc_to_rd(const RocPoint& p, const UtilityContext& ctx) {
    const double pi = ctx.prevalence;
    const double detection = pi * p.tpr;
    const double recall = pi * p.tpr + (1.0 - pi) * p.fpr;
    return RdPoint(recall, detection);
}

RocPoint rd_to_roc(const RdPoint& p, const UtilityContext& ctx) {
    const double pi = ctx.prevalence;
    const double tpr = p.detection_rate / pi;
    const double fpr = (p.recall_rate - p.detection_rate) / (1.0 - pi);
    constexpr double slack = 1e-9;  // relative, absorbs rounding of valid inputs
    if (tpr > 1.0 + slack) {
        std::ostringstream msg;
        msg << "detection_rate " << p.detection_rate << " exceeds prevalence " << pi
            << ": no ROC point can produce it";
        throw std::invalid_argument(msg.str());
    }
    if (fpr > 1.0 + slack) {
        std::ostringstream msg;
        msg << "recalled-benign fraction " << (p.recall_rate - p.detection_rate)
            << " exceeds the signal-absent fraction " << (1.0 - pi);
        throw std::invalid_argument(msg.str());
    }
    return RocPoint(std::min(tpr, 1.0), std::min(fpr, 1.0));
}

double relative_utility_from_roc_slope(double slope, double prevalence) {
    check_prevalence(prevalence);
    if (!std::isfinite(slope) || slope <= 0.0)
        throw std::invalid_argument("ROC iso-utility slope must be positive");
    return ((1.0 - prevalence) / prevalence) / slope;
}

double relative_utility_from_rd_slope(double slope) {
    if (!std::isfinite(slope) || slope <= 0.0 || slope >= 1.0)
        throw std::invalid_argument(
            "recall/detection slope must lie strictly inside (0,1); "
            "values outside imply a non-positive relative utility");
    return 1.0 / slope - 1.0;
}

}  // namespace ruleout
