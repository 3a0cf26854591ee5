#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ruleout/cohort.hpp"
#include "ruleout/metrics.hpp"
#include "ruleout/rng.hpp"

namespace ruleout {

struct BootstrapConfig {
    std::int64_t n_resamples = 5000;
    double ci_level = 0.95;
    std::uint64_t seed = 0;
    int n_threads = 0;           // 0 = hardware concurrency
    bool unconditional = false;  // also resample the truth-class split
    bool keep_replicates = false;

    void validate() const;
};

/// Summary of one side of a bootstrapped comparison. Percentile CIs of a
/// skewed statistic may exclude the plug-in point estimate; ci_low <=
/// ci_high always holds. exceedance_probability counts strict inequalities
/// over all resamples; exact ties are tallied separately in n_ties.
struct BootstrapResult {
    double point_estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double exceedance_probability = 0.0;  // P(this side > other side)
    std::int64_t n_undefined = 0;
    std::int64_t n_ties = 0;
    std::optional<std::vector<double>> replicate_values;
};

struct BootstrapPair {
    BootstrapResult candidate;  // with-device / scenario side
    BootstrapResult reference;  // without-device / baseline side
};

/// Paired metric: maps a (resampled) outcome table to the candidate and
/// reference values of one statistic. Return NaN to mark the replicate
/// undefined (for example on a zero denominator).
using PairedMetric =
    std::function<std::pair<double, double>(const PairedOutcomeTable&)>;

/// One paired resample: each truth class's three nested cells are redrawn
/// from a multinomial with the class total and empirical cell proportions,
/// so the believe-the-negative nesting is preserved by construction.
/// Classes with total zero are returned unchanged.
PairedOutcomeTable resample_paired(const PairedOutcomeTable& table, rng::Stream& stream);

/// Percentile bootstrap of a paired metric. Deterministic for a given
/// config (per-replicate RNG streams keyed by replicate index), independent
/// of thread count. Replicates where either side is non-finite are excluded
/// from the CIs and counted; more than 1% undefined raises an error.
BootstrapPair bootstrap_metric(const PairedOutcomeTable& table, const PairedMetric& metric,
                               const BootstrapConfig& cfg);

/// Per-workflow outcome counts in recall/detection space. Ground truth is
/// known only for recalled patients, so there is no truth-class split.
struct RdOutcomeCounts {
    std::int64_t n_detected = 0;         // recalled, cancer confirmed
    std::int64_t n_recalled_benign = 0;  // recalled, no cancer
    std::int64_t n_not_recalled = 0;

    std::int64_t total() const { return n_detected + n_recalled_benign + n_not_recalled; }
    std::int64_t n_recalled() const { return n_detected + n_recalled_benign; }
    RdPoint point() const;
    void validate() const;
};

/// Bootstrap of the detection iso-utility intercept for a rule-out scenario
/// against its baseline. The scenario's recalled sets nest inside the
/// baseline's, so the pair determines a joint outcome structure (detected in
/// both / baseline only, recalled-benign in both / baseline only, recalled
/// in neither) which is resampled as one multinomial per replicate. The
/// CI/exceedance contract matches bootstrap_metric.
BootstrapPair bootstrap_rd(const RdOutcomeCounts& scenario, const RdOutcomeCounts& baseline,
                           double relative_utility, const BootstrapConfig& cfg);

/// Ready-made paired metrics over outcome tables.
PairedMetric iui_metric(const UtilityContext& ctx);
/// Joint predictive-value comparison: candidate value is
/// min(PPV_with - PPV_without, NPV_with - NPV_without), reference value 0,
/// so candidate > reference iff both predictive values strictly improve.
PairedMetric ppv_npv_margin_metric(const UtilityContext& ctx);

/// Percentile interval (linear interpolation between order statistics) of a
/// sample at the given central coverage. Used by the bootstrap internally;
/// exposed for derived statistics such as replicate ratios.
std::pair<double, double> percentile_interval(std::vector<double> values, double ci_level);

}  // namespace ruleout
