#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ruleout/metrics.hpp"

namespace ruleout {

/// One screened patient: ground truth, the reader's recall decision from the
/// without-device workflow, and the AI suspicion score.
struct PatientRecord {
    std::string patient_id;
    bool truth = false;            // 1 = signal present (cancer)
    bool reader_decision = false;  // 1 = recalled by the reader
    double ai_score = 0.0;         // higher = more suspicious
};

/// Immutable, validated list of patient records (non-empty, unique ids,
/// finite scores). Row order is preserved from ingestion.
class Cohort {
  public:
    explicit Cohort(std::vector<PatientRecord> records);

    const std::vector<PatientRecord>& records() const { return records_; }
    std::int64_t size() const { return static_cast<std::int64_t>(records_.size()); }
    std::int64_t n_cancer() const { return n_cancer_; }
    std::int64_t n_noncancer() const { return size() - n_cancer_; }
    double prevalence() const { return double(n_cancer_) / double(size()); }

  private:
    std::vector<PatientRecord> records_;
    std::int64_t n_cancer_ = 0;
};

/// Joint outcome counts of one truth class under the paired workflows.
/// A with-device positive requires reader-positive AND retained, so the
/// with-device positives nest inside the without-device positives and a
/// "positive with device only" cell cannot occur.
struct PairedClassCounts {
    std::int64_t pos_both = 0;      // recalled in both workflows
    std::int64_t pos_ref_only = 0;  // recalled without the device, ruled out with it
    std::int64_t neg_both = 0;      // recalled in neither

    std::int64_t total() const { return pos_both + pos_ref_only + neg_both; }
    std::int64_t pos_ref() const { return pos_both + pos_ref_only; }
};

/// Nested joint outcome table of the with-device (candidate) and
/// without-device (reference) workflows; the unit of paired resampling.
struct PairedOutcomeTable {
    PairedClassCounts cancer;
    PairedClassCounts noncancer;

    /// Operating point of the simulated with-device workflow, counts attached.
    RocPoint with_device() const;
    /// Operating point of the reference without-device workflow.
    RocPoint without_device() const;

    void validate() const;  // throws std::invalid_argument on negative cells
};

/// Everything apply_ruleout produces for one threshold.
struct RuleOutResult {
    RocPoint with_device;
    RocPoint without_device;
    PairedOutcomeTable table;
    double ruled_out_fraction = 0.0;
};

struct ThresholdChoice {
    double threshold = 0.0;
    double achieved_fraction = 0.0;
};

struct SweepPoint {
    double requested_fraction = 0.0;
    double achieved_fraction = 0.0;
    double threshold = 0.0;
    RuleOutResult result;
};

/// Parse the documented cohort format: comma-separated, UTF-8, header
/// `patient_id,truth,reader_decision,ai_score`, `#`-prefixed comment lines
/// ignored. Malformed input throws std::runtime_error naming the data row.
Cohort ingest_cohort(std::istream& in);

/// Convenience wrapper opening `path` and delegating to ingest_cohort.
Cohort load_cohort(const std::string& path);

/// Simulate the believe-the-negative combination at one AI threshold.
/// A patient is ruled out iff ai_score < threshold (retained on equality);
/// the with-device workflow recalls a patient iff retained and
/// reader-positive. Requires both truth classes present.
RuleOutResult apply_ruleout(const Cohort& c, double threshold);

/// Smallest usable threshold whose ruled-out fraction is the largest
/// achievable value <= fraction. Score ties make some fractions
/// unattainable; the achieved fraction is always reported. The returned
/// threshold is one of the observed scores, or +infinity when the whole
/// cohort is ruled out.
ThresholdChoice threshold_for_fraction(const Cohort& c, double fraction);

/// apply_ruleout at the thresholds realizing each requested fraction,
/// ordered by requested fraction (duplicates preserved).
std::vector<SweepPoint> sweep(const Cohort& c, std::vector<double> fractions);

/// Reconstruct the nested outcome table from published per-class rates of a
/// reference workflow and a rule-out candidate. Implied counts are rounded
/// to the nearest integer; rate pairs that cannot arise from a
/// believe-the-negative simulation (candidate above reference) are rejected.
PairedOutcomeTable table_from_aggregates(std::int64_t n_cancer,
                                         std::int64_t n_noncancer,
                                         const RocPoint& ref, const RocPoint& cand);

}  // namespace ruleout
