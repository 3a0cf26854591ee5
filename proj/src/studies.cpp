#include "ruleout/studies.hpp"

#include <cmath>
#include <limits>

#include "ruleout/cohort.hpp"
#include "ruleout/metrics.hpp"

namespace ruleout {

namespace {

constexpr double kNA = std::numeric_limits<double>::quiet_NaN();

// Ratio CI from paired replicate arrays; non-finite or zero-denominator
// replicates are skipped.
void ratio_interval(const BootstrapPair& pair, double ci_level, double& lo, double& hi) {
    std::vector<double> ratios;
    const auto& cand = *pair.candidate.replicate_values;
    const auto& ref = *pair.reference.replicate_values;
    ratios.reserve(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) {
        if (!std::isfinite(cand[i]) || !std::isfinite(ref[i]) || ref[i] == 0.0) continue;
        ratios.push_back(cand[i] / ref[i]);
    }
    auto interval = percentile_interval(std::move(ratios), ci_level);
    lo = interval.first;
    hi = interval.second;
}

}  // namespace

const Us2019Fixture& us2019() {
    static const Us2019Fixture fixture{
        0.007,
        162.0,
        26540,
        191,
        {
            // pct    se     sp     IUI    CI low  CI high  P(IUI)  P(PPV,NPV)
            {0.0, 0.906, 0.935, 0.850, 0.806, 0.890, kNA, kNA},
            {10.0, 0.901, 0.939, 0.849, 0.803, 0.890, 36.5, 36.4},
            {20.0, 0.895, 0.943, 0.847, 0.801, 0.888, 40.9, 13.2},
            {30.0, 0.880, 0.948, 0.835, 0.787, 0.882, 12.5, 0.6},
            {40.0, 0.859, 0.954, 0.819, 0.768, 0.865, 1.6, 0.0},
            {50.0, 0.827, 0.960, 0.793, 0.737, 0.845, 0.0, 0.0},
            {60.0, 0.785, 0.966, 0.756, 0.696, 0.813, 0.0, 0.0},
            {70.0, 0.759, 0.973, 0.736, 0.676, 0.796, 0.0, 0.0},
            {80.0, 0.639, 0.980, 0.622, 0.553, 0.690, 0.0, 0.0},
            {90.0, 0.539, 0.988, 0.529, 0.460, 0.599, 0.0, 0.0},
        }};
    return fixture;
}

const Euro2022Fixture& euro2022() {
    static const Euro2022Fixture fixture{
        111.0,
        122969,
        {
            // pct   recall detection  DIUI   CI low  CI high  P(EU)
            {0.0, 0.032, 0.0061, 5.83, 5.40, 6.27, kNA},
            {30.0, 0.026, 0.0060, 5.74, 5.31, 6.17, 0.18},
            {50.0, 0.021, 0.0058, 5.66, 5.24, 6.08, 0.0},
            {70.0, 0.012, 0.0053, 5.21, 4.81, 5.60, 0.0},
        }};
    return fixture;
}

RdOutcomeCounts euro2022_counts(const Euro2022Row& row) {
    const auto n = euro2022().n_mammograms;
    RdOutcomeCounts c;
    c.n_detected = std::llround(row.detection_rate * double(n));
    const std::int64_t recalled = std::llround(row.recall_rate * double(n));
    c.n_recalled_benign = recalled - c.n_detected;
    c.n_not_recalled = n - recalled;
    return c;
}

std::vector<Us2019Result> reproduce_us2019(const BootstrapConfig& cfg) {
    const Us2019Fixture& fx = us2019();
    const UtilityContext ctx(fx.prevalence, fx.relative_utility);
    const RocPoint baseline(fx.rows[0].se, 1.0 - fx.rows[0].sp);
    const double baseline_iui = iui(baseline, ctx);

    BootstrapConfig with_replicates = cfg;
    with_replicates.keep_replicates = true;

    std::vector<Us2019Result> out;
    out.reserve(fx.rows.size());
    for (std::size_t i = 0; i < fx.rows.size(); ++i) {
        const Us2019Row& row = fx.rows[i];
        const RocPoint point(row.se, 1.0 - row.sp);
        const PairedOutcomeTable table =
            table_from_aggregates(fx.n_cancer, fx.n_noncancer(), baseline, point);
        const BootstrapPair iui_pair =
            bootstrap_metric(table, iui_metric(ctx), with_replicates);

        Us2019Result r;
        r.input = row;
        r.iui = iui(point, ctx);
        r.ci_low = iui_pair.candidate.ci_low;
        r.ci_high = iui_pair.candidate.ci_high;
        if (i == 0) {
            r.p_iui_pct = kNA;
            r.p_ppv_npv_pct = kNA;
        } else {
            r.p_iui_pct = iui_pair.candidate.exceedance_probability * 100.0;
            const BootstrapPair margin =
                bootstrap_metric(table, ppv_npv_margin_metric(ctx), cfg);
            r.p_ppv_npv_pct = margin.candidate.exceedance_probability * 100.0;
        }
        r.eu_ratio = r.iui / baseline_iui;
        ratio_interval(iui_pair, cfg.ci_level, r.eu_ratio_ci_low, r.eu_ratio_ci_high);
        out.push_back(r);
    }
    return out;
}

std::vector<Euro2022Result> reproduce_euro2022(const BootstrapConfig& cfg) {
    const Euro2022Fixture& fx = euro2022();
    const RdOutcomeCounts baseline_counts = euro2022_counts(fx.rows[0]);
    const RdPoint baseline(fx.rows[0].recall_rate, fx.rows[0].detection_rate);
    const double baseline_diui = diui(baseline, fx.relative_utility);

    BootstrapConfig with_replicates = cfg;
    with_replicates.keep_replicates = true;

    std::vector<Euro2022Result> out;
    out.reserve(fx.rows.size());
    for (std::size_t i = 0; i < fx.rows.size(); ++i) {
        const Euro2022Row& row = fx.rows[i];
        const BootstrapPair pair = bootstrap_rd(euro2022_counts(row), baseline_counts,
                                                fx.relative_utility, with_replicates);

        Euro2022Result r;
        r.input = row;
        r.diui = diui(RdPoint(row.recall_rate, row.detection_rate), fx.relative_utility);
        r.ci_low = pair.candidate.ci_low;
        r.ci_high = pair.candidate.ci_high;
        r.p_eu_pct = i == 0 ? kNA : pair.candidate.exceedance_probability * 100.0;
        r.eu_ratio = r.diui / baseline_diui;
        ratio_interval(pair, cfg.ci_level, r.eu_ratio_ci_low, r.eu_ratio_ci_high);
        out.push_back(r);
    }
    return out;
}

}  // namespace ruleout
