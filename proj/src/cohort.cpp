#include "ruleout/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace ruleout {

namespace {

constexpr const char* kHeader = "patient_id,truth,reader_decision,ai_score";

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void row_error(std::int64_t row, std::int64_t line, const std::string& what) {
    std::ostringstream msg;
    msg << "cohort: row " << row << " (file line " << line << "): " << what;
    throw std::runtime_error(msg.str());
}

bool parse_binary(const std::string& field, bool& out) {
    if (field == "0") { out = false; return true; }
    if (field == "1") { out = true; return true; }
    return false;
}

}  // namespace

Cohort::Cohort(std::vector<PatientRecord> records) : records_(std::move(records)) {
    if (records_.empty()) throw std::invalid_argument("empty cohort");
    std::unordered_set<std::string> seen;
    seen.reserve(records_.size());
    for (const auto& r : records_) {
        if (r.patient_id.empty())
            throw std::invalid_argument("cohort: empty patient_id");
        if (!seen.insert(r.patient_id).second)
            throw std::invalid_argument("cohort: duplicate patient_id '" + r.patient_id + "'");
        if (!std::isfinite(r.ai_score))
            throw std::invalid_argument("cohort: non-finite ai_score for patient '" +
                                        r.patient_id + "'");
        if (r.truth) ++n_cancer_;
    }
}

Cohort ingest_cohort(std::istream& in) {
    std::vector<PatientRecord> records;
    std::unordered_set<std::string> seen;
    std::string line;
    std::int64_t file_line = 0;
    std::int64_t row = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++file_line;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;

        if (!header_seen) {
            std::string compact;
            for (char c : stripped)
                if (c != ' ' && c != '\t') compact.push_back(c);
            if (compact != kHeader) {
                std::ostringstream msg;
                msg << "cohort: file line " << file_line << ": expected header '"
                    << kHeader << "', got '" << stripped << "'";
                throw std::runtime_error(msg.str());
            }
            header_seen = true;
            continue;
        }

        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != 4)
            row_error(row, file_line,
                      "expected 4 comma-separated fields, got " + std::to_string(fields.size()));

        PatientRecord rec;
        rec.patient_id = fields[0];
        if (rec.patient_id.empty()) row_error(row, file_line, "empty patient_id");
        if (!seen.insert(rec.patient_id).second)
            row_error(row, file_line, "duplicate patient_id '" + rec.patient_id + "'");
        if (!parse_binary(fields[1], rec.truth))
            row_error(row, file_line, "truth must be 0 or 1, got '" + fields[1] + "'");
        if (!parse_binary(fields[2], rec.reader_decision))
            row_error(row, file_line,
                      "reader_decision must be 0 or 1, got '" + fields[2] + "'");

        const std::string& score = fields[3];
        char* end = nullptr;
        errno = 0;
        const double value = std::strtod(score.c_str(), &end);
        if (score.empty() || end != score.c_str() + score.size() || errno == ERANGE ||
            !std::isfinite(value))
            row_error(row, file_line, "ai_score must be a finite decimal, got '" + score + "'");
        rec.ai_score = value;
        records.push_back(std::move(rec));
    }

    if (!header_seen) throw std::runtime_error("cohort: empty cohort (missing header)");
    if (records.empty()) throw std::runtime_error("cohort: empty cohort (no data rows)");
    return Cohort(std::move(records));
}

Cohort load_cohort(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cohort: cannot open '" + path + "'");
    return ingest_cohort(in);
}

void PairedOutcomeTable::validate() const {
    for (const auto* c : {&cancer, &noncancer})
        if (c->pos_both < 0 || c->pos_ref_only < 0 || c->neg_both < 0)
            throw std::invalid_argument("paired outcome table has a negative cell");
    if (cancer.total() + noncancer.total() == 0)
        throw std::invalid_argument("paired outcome table is empty");
}

RocPoint PairedOutcomeTable::with_device() const {
    return RocPoint::from_counts(ConfusionCounts{
        cancer.pos_both, noncancer.pos_both,
        noncancer.pos_ref_only + noncancer.neg_both,
        cancer.pos_ref_only + cancer.neg_both});
}

RocPoint PairedOutcomeTable::without_device() const {
    return RocPoint::from_counts(ConfusionCounts{cancer.pos_ref(), noncancer.pos_ref(),
                                                 noncancer.neg_both, cancer.neg_both});
}

RuleOutResult apply_ruleout(const Cohort& c, double threshold) {
    if (std::isnan(threshold))
        throw std::invalid_argument("apply_ruleout: threshold must not be NaN");
    if (c.n_cancer() == 0 || c.n_noncancer() == 0)
        throw std::invalid_argument(
            "apply_ruleout: cohort must contain both signal-present and "
            "signal-absent patients");

    PairedOutcomeTable table{};
    std::int64_t ruled_out = 0;
    for (const auto& r : c.records()) {
        const bool retained = !(r.ai_score < threshold);
        if (!retained) ++ruled_out;
        const bool pos_without = r.reader_decision;
        const bool pos_with = retained && pos_without;
        PairedClassCounts& row = r.truth ? table.cancer : table.noncancer;
        if (pos_with)
            ++row.pos_both;
        else if (pos_without)
            ++row.pos_ref_only;
        else
            ++row.neg_both;
    }

    return RuleOutResult{table.with_device(), table.without_device(), table,
                         double(ruled_out) / double(c.size())};
}

ThresholdChoice threshold_for_fraction(const Cohort& c, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw std::invalid_argument("threshold_for_fraction: fraction must lie in [0,1]");

    std::vector<double> scores;
    scores.reserve(c.records().size());
    for (const auto& r : c.records()) scores.push_back(r.ai_score);
    std::sort(scores.begin(), scores.end());

    const auto n = static_cast<std::int64_t>(scores.size());
    // ruling out exactly k patients is achievable iff k = 0, k = n, or the
    // k-th smallest score is strictly below the next one
    auto achievable = [&](std::int64_t k) {
        return k == 0 || k == n || scores[k - 1] < scores[k];
    };
    std::int64_t k = std::min<std::int64_t>(
        n, static_cast<std::int64_t>(std::floor(fraction * double(n) + 1e-9)));
    while (!achievable(k)) --k;

    ThresholdChoice choice;
    choice.achieved_fraction = double(k) / double(n);
    if (k == n)
        choice.threshold = std::numeric_limits<double>::infinity();
    else
        choice.threshold = scores[k];  // rules out exactly the k strictly-smaller scores
    return choice;
}

std::vector<SweepPoint> sweep(const Cohort& c, std::vector<double> fractions) {
    std::stable_sort(fractions.begin(), fractions.end());
    std::vector<SweepPoint> out;
    out.reserve(fractions.size());
    for (double f : fractions) {
        const ThresholdChoice choice = threshold_for_fraction(c, f);
        out.push_back(SweepPoint{f, choice.achieved_fraction, choice.threshold,
                                 apply_ruleout(c, choice.threshold)});
    }
    return out;
}

PairedOutcomeTable table_from_aggregates(std::int64_t n_cancer, std::int64_t n_noncancer,
                                         const RocPoint& ref, const RocPoint& cand) {
    if (n_cancer < 0 || n_noncancer < 0)
        throw std::invalid_argument("table_from_aggregates: class sizes must be non-negative");
    constexpr double tol = 1e-12;
    if (cand.tpr > ref.tpr + tol || cand.fpr > ref.fpr + tol)
        throw std::invalid_argument(
            "table_from_aggregates: candidate rates exceed the reference; the pair "
            "cannot arise from a believe-the-negative rule-out");

    auto reconstruct = [](std::int64_t total, double ref_rate, double cand_rate) {
        PairedClassCounts row;
        const std::int64_t ref_pos = std::llround(ref_rate * double(total));
        row.pos_both = std::llround(cand_rate * double(total));
        row.pos_ref_only = ref_pos - row.pos_both;
        row.neg_both = total - ref_pos;
        return row;
    };

    PairedOutcomeTable table;
    table.cancer = reconstruct(n_cancer, ref.tpr, cand.tpr);
    table.noncancer = reconstruct(n_noncancer, ref.fpr, cand.fpr);
    table.validate();
    return table;
}

}  // namespace ruleout
