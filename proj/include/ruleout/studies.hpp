#pragma once

#include <cstdint>
#include <vector>

#include "ruleout/inference.hpp"

namespace ruleout {

/// One row of the 2019 U.S. retrospective rule-out study: sensitivity and
/// specificity of the simulated with-device workflow at one rule-out
/// percentage, plus the published derived values used for side-by-side
/// comparison. Published probabilities are NaN on the baseline row.
struct Us2019Row {
    double ruleout_pct;
    double se;
    double sp;
    double published_iui;
    double published_iui_ci_low;
    double published_iui_ci_high;
    double published_p_iui_pct;
    double published_p_ppv_npv_pct;
};

struct Us2019Fixture {
    double prevalence;          // rounded published prevalence
    double relative_utility;    // U.S. screening baseline
    std::int64_t n_mammograms;
    std::int64_t n_cancer;      // nearest integer consistent with the study description
    std::vector<Us2019Row> rows;  // baseline first, then by rule-out percentage

    std::int64_t n_noncancer() const { return n_mammograms - n_cancer; }
};

/// One row of the 2022 European (double-reading) pre-screen study: recall
/// and cancer-detection rates per scenario. Published DIUI columns are in
/// units of 1e-3 as printed in the source table.
struct Euro2022Row {
    double ruleout_pct;
    double recall_rate;
    double detection_rate;
    double published_diui_e3;
    double published_diui_ci_low_e3;
    double published_diui_ci_high_e3;
    double published_p_eu_pct;
};

struct Euro2022Fixture {
    double relative_utility;   // European double-reading baseline
    std::int64_t n_mammograms;  // rates are per screen, not per patient
    std::vector<Euro2022Row> rows;
};

const Us2019Fixture& us2019();
const Euro2022Fixture& euro2022();

/// Computed reproduction of one U.S. table row: headline IUI from the
/// published rates, bootstrap CI and exceedance probabilities from the
/// reconstructed nested counts, and the expected-utility ratio against the
/// baseline row (point estimate and percentile CI over replicate ratios).
struct Us2019Result {
    Us2019Row input;
    double iui;
    double ci_low;
    double ci_high;
    double p_iui_pct;      // NaN on the baseline row
    double p_ppv_npv_pct;  // NaN on the baseline row
    double eu_ratio;
    double eu_ratio_ci_low;
    double eu_ratio_ci_high;
};

struct Euro2022Result {
    Euro2022Row input;
    double diui;
    double ci_low;
    double ci_high;
    double p_eu_pct;  // NaN on the baseline row
    double eu_ratio;
    double eu_ratio_ci_low;
    double eu_ratio_ci_high;
};

std::vector<Us2019Result> reproduce_us2019(const BootstrapConfig& cfg);
std::vector<Euro2022Result> reproduce_euro2022(const BootstrapConfig& cfg);

/// Outcome counts implied by the euro fixture rates at one row.
RdOutcomeCounts euro2022_counts(const Euro2022Row& row);

}  // namespace ruleout
