// ruleout-eval: decision-analytic evaluation of AI rule-out triage for
// screening workflows. Subcommands: metrics, compare, simulate, baseline-ru,
// reproduce. Exit codes: 0 success, 2 usage/validation error, 1 internal.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ruleout/cohort.hpp"
#include "ruleout/inference.hpp"
#include "ruleout/metrics.hpp"
#include "ruleout/regions.hpp"
#include "ruleout/rng.hpp"
#include "ruleout/spline.hpp"
#include "ruleout/studies.hpp"

using nlohmann::json;
using namespace ruleout;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// formatting

std::string fmt(double v, const char* spec = "%.6g") {
    if (std::isnan(v)) return "-";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// shortest round-trip decimal form, for machine-readable CSV cells
std::string num_str(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return json(v).dump();
}

json json_num(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

void print_aligned(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (width.size() <= c) width.resize(c + 1, 0);
            width[c] = std::max(width[c], row[c].size());
        }
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c];
            if (c + 1 < row.size())
                out << std::string(width[c] - row[c].size() + 2, ' ');
        }
        out << '\n';
    }
}

void print_kv_csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
    out << "field,value\n";
    for (const auto& [k, v] : kv) out << k << ',' << v << '\n';
}

json bootstrap_json(const BootstrapResult& r, bool with_exceedance) {
    json j{{"point_estimate", json_num(r.point_estimate)},
           {"ci_low", json_num(r.ci_low)},
           {"ci_high", json_num(r.ci_high)},
           {"n_undefined", r.n_undefined}};
    if (with_exceedance) {
        j["exceedance_probability"] = json_num(r.exceedance_probability);
        j["n_ties"] = r.n_ties;
    }
    return j;
}

struct CommonOpts {
    std::string format = "table";
    std::uint64_t seed = 0;
    std::int64_t samples = 5000;
    double ci = 0.95;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_bootstrap) {
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->capture_default_str();
    if (with_bootstrap) {
        cmd->add_option("--seed", opts.seed, "Bootstrap RNG seed")->capture_default_str();
        cmd->add_option("--samples", opts.samples, "Bootstrap resamples")
            ->capture_default_str();
        cmd->add_option("--ci", opts.ci, "Confidence level")->capture_default_str();
        cmd->add_option("--threads", opts.threads,
                        "Bootstrap worker threads (0 = hardware)")
            ->capture_default_str();
    }
}

BootstrapConfig make_config(const CommonOpts& opts, bool unconditional = false) {
    BootstrapConfig cfg;
    cfg.n_resamples = opts.samples;
    cfg.ci_level = opts.ci;
    cfg.seed = opts.seed;
    cfg.n_threads = opts.threads;
    cfg.unconditional = unconditional;
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsOpts {
    CommonOpts common;
    std::optional<double> se, sp, prevalence, recall, detection, relative_utility;
};

int run_metrics(const MetricsOpts& o) {
    const bool roc_inputs = o.se || o.sp;
    const bool rd_inputs = o.recall || o.detection;
    if (roc_inputs && (!o.se || !o.sp))
        throw UsageError("--se and --sp must be given together");
    if (rd_inputs && (!o.recall || !o.detection))
        throw UsageError("--recall-rate and --detection-rate must be given together");
    if (roc_inputs && rd_inputs)
        throw UsageError("give either --se/--sp or --recall-rate/--detection-rate, not both");
    if (!roc_inputs && !rd_inputs)
        throw UsageError("give --se/--sp or --recall-rate/--detection-rate");
    if (roc_inputs && !o.prevalence)
        throw UsageError("--prevalence is required with --se/--sp");
    if (rd_inputs && !o.prevalence && !o.relative_utility)
        throw UsageError("recall/detection inputs need --relative-utility (for the DIUI) "
                         "or --prevalence (for ROC-space metrics)");

    json inputs, metrics;
    std::optional<RocPoint> roc;
    std::optional<RdPoint> rd;

    if (roc_inputs) {
        roc = RocPoint(*o.se, 1.0 - *o.sp);
        inputs["se"] = *o.se;
        inputs["sp"] = *o.sp;
    } else {
        rd = RdPoint(*o.recall, *o.detection);
        inputs["recall_rate"] = *o.recall;
        inputs["detection_rate"] = *o.detection;
    }
    if (o.prevalence) inputs["prevalence"] = *o.prevalence;
    if (o.relative_utility) inputs["relative_utility"] = *o.relative_utility;

    if (o.prevalence) {
        const UtilityContext ctx(*o.prevalence, o.relative_utility.value_or(1.0));
        if (!roc) roc = rd_to_roc(*rd, ctx);
        if (!rd) rd = roc_to_rd(*roc, ctx);
        const LikelihoodRatios lr = likelihood_ratios(*roc);
        metrics["rho_plus"] = json_num(lr.positive);
        metrics["rho_minus"] = json_num(lr.negative);
        metrics["ppv"] = json_num(ppv(*roc, ctx));
        metrics["npv"] = json_num(npv(*roc, ctx));
        metrics["se"] = json_num(roc->tpr);
        metrics["sp"] = json_num(1.0 - roc->fpr);
        if (o.relative_utility) {
            metrics["iso_slope_roc"] = json_num(iso_slope_roc(ctx));
            metrics["iui"] = json_num(iui(*roc, ctx));
        }
    }
    if (rd) {
        metrics["recall_rate"] = json_num(rd->recall_rate);
        metrics["detection_rate"] = json_num(rd->detection_rate);
        if (o.relative_utility) metrics["diui"] = json_num(diui(*rd, *o.relative_utility));
    }

    if (o.common.format == "json") {
        json report{{"command", "metrics"}, {"inputs", inputs}, {"metrics", metrics}};
        std::cout << report.dump(2) << '\n';
    } else if (o.common.format == "csv") {
        std::vector<std::pair<std::string, std::string>> kv;
        for (auto it = metrics.begin(); it != metrics.end(); ++it)
            kv.emplace_back(it.key(), it.value().is_number()
                                          ? num_str(it.value().get<double>())
                                          : it.value().dump());
        print_kv_csv(std::cout, kv);
    } else {
        std::vector<std::vector<std::string>> rows;
        for (auto it = metrics.begin(); it != metrics.end(); ++it) {
            std::string v = it.value().is_number() ? fmt(it.value().get<double>())
                                                   : it.value().get<std::string>();
            rows.push_back({it.key(), v});
        }
        print_aligned(std::cout, rows);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareOpts {
    CommonOpts common;
    std::optional<double> ref_se, ref_sp, cand_se, cand_sp;
    std::optional<std::int64_t> n_cancer, n_noncancer;
    std::string cohort_path;
    std::optional<double> threshold, fraction;
    std::optional<double> prevalence, relative_utility;
    int boundaries = 0;
    bool unconditional = false;
};

int run_compare(const CompareOpts& o) {
    if (!o.relative_utility)
        throw UsageError("--relative-utility is required for the utility comparison");

    std::optional<PairedOutcomeTable> table;
    std::optional<RocPoint> cand, ref;
    double prevalence = 0.0;
    json inputs;

    if (!o.cohort_path.empty()) {
        const Cohort cohort = load_cohort(o.cohort_path);
        double threshold = 0.0;
        if (o.threshold) {
            threshold = *o.threshold;
        } else if (o.fraction) {
            threshold = threshold_for_fraction(cohort, *o.fraction).threshold;
        } else {
            throw UsageError("--cohort needs --threshold or --fraction");
        }
        const RuleOutResult r = apply_ruleout(cohort, threshold);
        table = r.table;
        cand = r.with_device;
        ref = r.without_device;
        prevalence = o.prevalence.value_or(cohort.prevalence());
        inputs["cohort"] = o.cohort_path;
        inputs["threshold"] = json_num(threshold);
        inputs["ruled_out_fraction"] = r.ruled_out_fraction;
    } else {
        if (!o.ref_se || !o.ref_sp || !o.cand_se || !o.cand_sp || !o.n_cancer ||
            !o.n_noncancer)
            throw UsageError("aggregate mode needs --ref-se --ref-sp --cand-se --cand-sp "
                             "--n-cancer --n-noncancer (or use --cohort)");
        ref = RocPoint(*o.ref_se, 1.0 - *o.ref_sp);
        cand = RocPoint(*o.cand_se, 1.0 - *o.cand_sp);
        table = table_from_aggregates(*o.n_cancer, *o.n_noncancer, *ref, *cand);
        prevalence =
            o.prevalence.value_or(double(*o.n_cancer) / double(*o.n_cancer + *o.n_noncancer));
        inputs["ref_se"] = *o.ref_se;
        inputs["ref_sp"] = *o.ref_sp;
        inputs["cand_se"] = *o.cand_se;
        inputs["cand_sp"] = *o.cand_sp;
        inputs["n_cancer"] = *o.n_cancer;
        inputs["n_noncancer"] = *o.n_noncancer;
    }
    inputs["prevalence"] = prevalence;
    inputs["relative_utility"] = *o.relative_utility;

    const UtilityContext ctx(prevalence, *o.relative_utility);
    const RegionVerdict verdict = classify(*cand, *ref, ctx);
    const BootstrapConfig cfg = make_config(o.common, o.unconditional);
    const BootstrapPair iui_pair = bootstrap_metric(*table, iui_metric(ctx), cfg);
    const BootstrapPair pv_pair = bootstrap_metric(*table, ppv_npv_margin_metric(ctx), cfg);

    auto line_json = [](const BoundaryLine& l) {
        return json{{"slope", json_num(l.slope)},
                    {"intercept", json_num(l.intercept)},
                    {"anchor_x", l.anchor_x},
                    {"anchor_y", l.anchor_y}};
    };
    json report{
        {"command", "compare"},
        {"inputs", inputs},
        {"verdict",
         {{"sesp_superior", verdict.sesp_superior},
          {"ppv_npv_superior", verdict.ppv_npv_superior},
          {"eu_superior", verdict.eu_superior},
          {"boundary_lines",
           {{"ppv", line_json(verdict.ppv_line)},
            {"npv", line_json(verdict.npv_line)},
            {"iso_utility", line_json(verdict.iso_utility_line)}}}}},
        {"iui",
         {{"candidate", bootstrap_json(iui_pair.candidate, true)},
          {"reference", bootstrap_json(iui_pair.reference, true)}}},
        {"ppv_npv_joint",
         {{"exceedance_probability", json_num(pv_pair.candidate.exceedance_probability)},
          {"n_ties", pv_pair.candidate.n_ties}}},
        {"metadata",
         {{"seed", cfg.seed},
          {"samples", cfg.n_resamples},
          {"ci_level", cfg.ci_level},
          {"resampling",
           cfg.unconditional ? "unconditional (class totals redrawn)"
                             : "conditional on class totals"}}}};

    std::vector<PlotPoint> boundary_points;
    if (o.boundaries > 0) {
        boundary_points = boundary_polylines(*ref, ctx, o.boundaries);
        json arr = json::array();
        for (const auto& p : boundary_points)
            arr.push_back(json{{"region", p.region},
                               {"segment_index", p.segment_index},
                               {"x", p.x},
                               {"y", p.y}});
        report["boundaries"] = arr;
    }

    if (o.common.format == "json") {
        std::cout << report.dump(2) << '\n';
        return 0;
    }

    std::vector<std::pair<std::string, std::string>> kv{
        {"sesp_superior", verdict.sesp_superior ? "true" : "false"},
        {"ppv_npv_superior", verdict.ppv_npv_superior ? "true" : "false"},
        {"eu_superior", verdict.eu_superior ? "true" : "false"},
        {"iui_candidate", num_str(iui_pair.candidate.point_estimate)},
        {"iui_candidate_ci_low", num_str(iui_pair.candidate.ci_low)},
        {"iui_candidate_ci_high", num_str(iui_pair.candidate.ci_high)},
        {"iui_reference", num_str(iui_pair.reference.point_estimate)},
        {"iui_reference_ci_low", num_str(iui_pair.reference.ci_low)},
        {"iui_reference_ci_high", num_str(iui_pair.reference.ci_high)},
        {"p_iui_greater", num_str(iui_pair.candidate.exceedance_probability)},
        {"p_iui_ties", num_str(double(iui_pair.candidate.n_ties) / double(cfg.n_resamples))},
        {"p_ppv_npv_greater", num_str(pv_pair.candidate.exceedance_probability)},
        {"seed", std::to_string(cfg.seed)},
        {"samples", std::to_string(cfg.n_resamples)}};

    if (o.common.format == "csv") {
        print_kv_csv(std::cout, kv);
    } else {
        std::vector<std::vector<std::string>> rows;
        for (auto& [k, v] : kv) rows.push_back({k, v});
        print_aligned(std::cout, rows);
    }
    if (!boundary_points.empty()) std::cout << '\n' << polylines_to_csv(boundary_points);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
    CommonOpts common;
    std::string cohort_path;
    std::vector<double> fractions;
    std::vector<double> thresholds;
    std::optional<double> prevalence, relative_utility;
    bool unconditional = false;
};

int run_simulate(const SimulateOpts& o) {
    if (o.cohort_path.empty()) throw UsageError("--cohort is required");
    if (o.fractions.empty() && o.thresholds.empty())
        throw UsageError("--fractions or --thresholds is required");
    if (!o.relative_utility) throw UsageError("--relative-utility is required");

    const Cohort cohort = load_cohort(o.cohort_path);
    const double prevalence = o.prevalence.value_or(cohort.prevalence());
    const UtilityContext ctx(prevalence, *o.relative_utility);
    const BootstrapConfig cfg = make_config(o.common, o.unconditional);

    std::vector<SweepPoint> points;
    if (!o.fractions.empty()) {
        points = sweep(cohort, o.fractions);
    } else {
        std::vector<double> thresholds = o.thresholds;
        std::sort(thresholds.begin(), thresholds.end());
        for (double t : thresholds) {
            RuleOutResult r = apply_ruleout(cohort, t);
            const double achieved = r.ruled_out_fraction;
            points.push_back(SweepPoint{kNaN, achieved, t, std::move(r)});
        }
    }

    json rows = json::array();
    std::vector<std::vector<std::string>> table{{"requested", "achieved", "threshold", "se",
                                                 "sp", "ppv", "npv", "iui", "ci_low",
                                                 "ci_high", "p_vs_baseline"}};
    std::vector<std::string> csv_lines{
        "requested_fraction,achieved_fraction,threshold,se,sp,ppv,npv,iui,iui_ci_low,"
        "iui_ci_high,p_iui_greater_than_baseline"};

    for (const auto& pt : points) {
        const RocPoint& with = pt.result.with_device;
        const BootstrapPair pair = bootstrap_metric(pt.result.table, iui_metric(ctx), cfg);
        const bool degenerate = pt.result.table.cancer.pos_ref_only == 0 &&
                                pt.result.table.noncancer.pos_ref_only == 0;
        // identical workflows tie on every replicate; report no probability
        const double p_exceed =
            degenerate ? kNaN : pair.candidate.exceedance_probability;

        rows.push_back(json{{"requested_fraction", json_num(pt.requested_fraction)},
                            {"achieved_fraction", pt.achieved_fraction},
                            {"threshold", json_num(pt.threshold)},
                            {"se", with.tpr},
                            {"sp", 1.0 - with.fpr},
                            {"ppv", ppv(with, ctx)},
                            {"npv", npv(with, ctx)},
                            {"iui", iui(with, ctx)},
                            {"iui_ci_low", pair.candidate.ci_low},
                            {"iui_ci_high", pair.candidate.ci_high},
                            {"p_iui_greater_than_baseline", json_num(p_exceed)},
                            {"n_ties", pair.candidate.n_ties}});
        table.push_back({fmt(pt.requested_fraction, "%.3g"), fmt(pt.achieved_fraction, "%.4f"),
                         fmt(pt.threshold, "%.6g"), fmt(with.tpr, "%.4f"),
                         fmt(1.0 - with.fpr, "%.4f"), fmt(ppv(with, ctx), "%.4f"),
                         fmt(npv(with, ctx), "%.4f"), fmt(iui(with, ctx), "%.4f"),
                         fmt(pair.candidate.ci_low, "%.4f"), fmt(pair.candidate.ci_high, "%.4f"),
                         fmt(p_exceed, "%.4f")});
        std::ostringstream line;
        line << num_str(pt.requested_fraction) << ',' << num_str(pt.achieved_fraction) << ','
             << num_str(pt.threshold) << ',' << num_str(with.tpr) << ','
             << num_str(1.0 - with.fpr) << ',' << num_str(ppv(with, ctx)) << ','
             << num_str(npv(with, ctx)) << ',' << num_str(iui(with, ctx)) << ','
             << num_str(pair.candidate.ci_low) << ',' << num_str(pair.candidate.ci_high) << ','
             << num_str(p_exceed);
        csv_lines.push_back(line.str());
    }

    if (o.common.format == "json") {
        json report{{"command", "simulate"},
                    {"inputs",
                     {{"cohort", o.cohort_path},
                      {"prevalence", prevalence},
                      {"relative_utility", *o.relative_utility},
                      {"n_patients", cohort.size()},
                      {"n_cancer", cohort.n_cancer()}}},
                    {"rows", rows},
                    {"metadata",
                     {{"seed", cfg.seed},
                      {"samples", cfg.n_resamples},
                      {"ci_level", cfg.ci_level}}}};
        std::cout << report.dump(2) << '\n';
    } else if (o.common.format == "csv") {
        for (const auto& line : csv_lines) std::cout << line << '\n';
    } else {
        std::cout << "cohort: " << o.cohort_path << "  n=" << cohort.size()
                  << "  cancers=" << cohort.n_cancer() << "  prevalence=" << fmt(prevalence)
                  << "  U_Rel=" << fmt(*o.relative_utility) << "  seed=" << cfg.seed << "\n\n";
        print_aligned(std::cout, table);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// baseline-ru

struct BaselineRuOpts {
    CommonOpts common;
    std::string curve_path;
    std::optional<double> at;
    std::string space = "rd";
    std::optional<double> prevalence;
    std::int64_t resample_knots = 0;
};

int run_baseline_ru(const BaselineRuOpts& o) {
    if (o.curve_path.empty()) throw UsageError("--curve is required");
    if (!o.at) throw UsageError("--at is required");
    const CurveSpace space =
        o.space == "roc" ? CurveSpace::roc : CurveSpace::recall_detection;
    if (space == CurveSpace::roc && !o.prevalence)
        throw UsageError("--prevalence is required with --space roc");

    const PerformanceCurve curve = load_curve(o.curve_path, space);
    for (const auto& w : curve.warnings) std::cerr << "warning: " << w << '\n';

    const CubicSpline model = fit_spline(curve);
    const double slope = slope_at(model, *o.at);
    const double u = baseline_relative_utility(curve, *o.at, o.prevalence);

    json report{{"command", "baseline-ru"},
                {"inputs",
                 {{"curve", o.curve_path},
                  {"at", *o.at},
                  {"space", o.space},
                  {"n_knots", curve.x.size()}}},
                {"slope", slope},
                {"relative_utility", u},
                {"warnings", curve.warnings}};
    if (o.prevalence) report["inputs"]["prevalence"] = *o.prevalence;

    std::vector<std::pair<std::string, std::string>> kv{
        {"slope", num_str(slope)}, {"relative_utility", num_str(u)}};

    if (o.resample_knots > 0) {
        // Heuristic only: resample knots with replacement and refit. This is
        // not the estimator's sampling distribution; it only gauges how much
        // the tangent leans on individual curve points.
        std::vector<double> replicates;
        std::int64_t skipped = 0;
        const std::size_t n = curve.x.size();
        for (std::int64_t rep = 0; rep < o.resample_knots; ++rep) {
            rng::Stream stream(o.common.seed, std::uint64_t(rep));
            std::vector<double> xs, ys;
            std::vector<bool> taken(n, false);
            for (std::size_t i = 0; i < n; ++i) {
                const auto pick = std::size_t(stream.next_unit() * double(n));
                if (taken[pick]) continue;  // duplicate x cannot enter a spline
                taken[pick] = true;
                xs.push_back(curve.x[pick]);
                ys.push_back(curve.y[pick]);
            }
            try {
                PerformanceCurve resampled(xs, ys, space);
                replicates.push_back(
                    baseline_relative_utility(resampled, *o.at, o.prevalence));
            } catch (const std::exception&) {
                ++skipped;  // query left the knot range or slope left its domain
            }
        }
        if (!replicates.empty()) {
            auto [lo, hi] = percentile_interval(replicates, o.common.ci);
            report["knot_resampling_heuristic"] = {
                {"ci_low", lo},
                {"ci_high", hi},
                {"n_replicates", o.resample_knots},
                {"n_skipped", skipped},
                {"seed", o.common.seed},
                {"note", "knot-resampling spread, a heuristic; not a sampling "
                         "distribution for the estimate"}};
            kv.emplace_back("heuristic_ci_low", num_str(lo));
            kv.emplace_back("heuristic_ci_high", num_str(hi));
            kv.emplace_back("heuristic_skipped", std::to_string(skipped));
        }
    }

    if (o.common.format == "json") {
        std::cout << report.dump(2) << '\n';
    } else if (o.common.format == "csv") {
        print_kv_csv(std::cout, kv);
    } else {
        std::vector<std::vector<std::string>> rows;
        for (auto& [k, v] : kv) rows.push_back({k, v});
        print_aligned(std::cout, rows);
        if (o.resample_knots > 0)
            std::cout << "(knot-resampling interval is a heuristic spread, "
                         "not a confidence interval)\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// reproduce

struct ReproduceOpts {
    CommonOpts common;
    std::string study;
};

int run_reproduce(const ReproduceOpts& o) {
    const BootstrapConfig cfg = make_config(o.common);
    json report{{"command", "reproduce"}, {"study", o.study}};
    json rows = json::array();
    json plot = json::array();
    std::vector<std::vector<std::string>> table;
    std::vector<std::string> csv_lines;
    std::vector<std::string> notes;

    if (o.study == "us-2019") {
        const auto& fx = us2019();
        notes = {
            "inputs: published with-device Se/Sp by rule-out percentage; "
            "prevalence 0.7%, relative utility 162",
            "cancer count 191 of 26540 screens implies an unrounded prevalence of "
            "0.7197%; the source's predictive values (PPV 9.18%) match the "
            "unrounded figure, while the rounded 0.7% gives PPV 8.95%",
            "bootstrap: per truth class, the nested outcome cells are redrawn as a "
            "multinomial conditioned on the class total; the source did not "
            "describe its scheme, so probability columns are approximate"};
        const auto results = reproduce_us2019(cfg);
        table.push_back({"ruleout%", "se", "sp", "iui", "iui_pub", "delta", "ci",
                         "ci_pub", "P(IUI>)%", "pub%", "P(PPV,NPV>)%", "pub%"});
        csv_lines.push_back(
            "ruleout_pct,se,sp,iui,iui_published,iui_delta,ci_low,ci_high,"
            "ci_low_published,ci_high_published,p_iui_pct,p_iui_published_pct,"
            "p_ppv_npv_pct,p_ppv_npv_published_pct");
        for (const auto& r : results) {
            rows.push_back(json{{"ruleout_pct", r.input.ruleout_pct},
                                {"se", r.input.se},
                                {"sp", r.input.sp},
                                {"iui", r.iui},
                                {"iui_published", r.input.published_iui},
                                {"iui_delta", r.iui - r.input.published_iui},
                                {"ci_low", r.ci_low},
                                {"ci_high", r.ci_high},
                                {"ci_low_published", r.input.published_iui_ci_low},
                                {"ci_high_published", r.input.published_iui_ci_high},
                                {"p_iui_pct", json_num(r.p_iui_pct)},
                                {"p_iui_published_pct", json_num(r.input.published_p_iui_pct)},
                                {"p_ppv_npv_pct", json_num(r.p_ppv_npv_pct)},
                                {"p_ppv_npv_published_pct",
                                 json_num(r.input.published_p_ppv_npv_pct)}});
            plot.push_back(json{{"ruleout_pct", r.input.ruleout_pct},
                                {"eu_ratio", r.eu_ratio},
                                {"ci_low", r.eu_ratio_ci_low},
                                {"ci_high", r.eu_ratio_ci_high}});
            char ci_buf[64], cipub_buf[64];
            std::snprintf(ci_buf, sizeof ci_buf, "(%.3f,%.3f)", r.ci_low, r.ci_high);
            std::snprintf(cipub_buf, sizeof cipub_buf, "(%.3f,%.3f)",
                          r.input.published_iui_ci_low, r.input.published_iui_ci_high);
            table.push_back({fmt(r.input.ruleout_pct, "%.0f"), fmt(r.input.se, "%.3f"),
                             fmt(r.input.sp, "%.3f"), fmt(r.iui, "%.4f"),
                             fmt(r.input.published_iui, "%.3f"),
                             fmt(r.iui - r.input.published_iui, "%+.4f"), ci_buf, cipub_buf,
                             fmt(r.p_iui_pct, "%.1f"), fmt(r.input.published_p_iui_pct, "%.1f"),
                             fmt(r.p_ppv_npv_pct, "%.1f"),
                             fmt(r.input.published_p_ppv_npv_pct, "%.1f")});
            std::ostringstream line;
            line << num_str(r.input.ruleout_pct) << ',' << num_str(r.input.se) << ','
                 << num_str(r.input.sp) << ',' << num_str(r.iui) << ','
                 << num_str(r.input.published_iui) << ','
                 << num_str(r.iui - r.input.published_iui) << ',' << num_str(r.ci_low) << ','
                 << num_str(r.ci_high) << ',' << num_str(r.input.published_iui_ci_low) << ','
                 << num_str(r.input.published_iui_ci_high) << ',' << num_str(r.p_iui_pct)
                 << ',' << num_str(r.input.published_p_iui_pct) << ','
                 << num_str(r.p_ppv_npv_pct) << ','
                 << num_str(r.input.published_p_ppv_npv_pct);
            csv_lines.push_back(line.str());
        }
        report["inputs"] = {{"prevalence", fx.prevalence},
                            {"relative_utility", fx.relative_utility},
                            {"n_mammograms", fx.n_mammograms},
                            {"n_cancer", fx.n_cancer}};
    } else {
        const auto& fx = euro2022();
        notes = {
            "inputs: published recall and cancer-detection rates per AI pre-screen "
            "scenario; relative utility 111 from the double-reading baseline curve",
            "bootstrap at the mammogram level (N = 122,969), matching the per-screen "
            "rate denominators; joint resampling of the nested recall outcome cells",
            "the source's probability column depends on its unspecified resampling "
            "scheme and unrounded rates; values here are approximate"};
        const auto results = reproduce_euro2022(cfg);
        table.push_back({"ruleout%", "recall%", "detect%", "DIUI(e-3)", "pub", "delta",
                         "ci(e-3)", "ci_pub", "P(EU>)%", "pub%"});
        csv_lines.push_back(
            "ruleout_pct,recall_rate,detection_rate,diui,diui_published,diui_delta,"
            "ci_low,ci_high,ci_low_published,ci_high_published,p_eu_pct,"
            "p_eu_published_pct");
        for (const auto& r : results) {
            const double pub = r.input.published_diui_e3 * 1e-3;
            rows.push_back(json{{"ruleout_pct", r.input.ruleout_pct},
                                {"recall_rate", r.input.recall_rate},
                                {"detection_rate", r.input.detection_rate},
                                {"diui", r.diui},
                                {"diui_published", pub},
                                {"diui_delta", r.diui - pub},
                                {"ci_low", r.ci_low},
                                {"ci_high", r.ci_high},
                                {"ci_low_published", r.input.published_diui_ci_low_e3 * 1e-3},
                                {"ci_high_published", r.input.published_diui_ci_high_e3 * 1e-3},
                                {"p_eu_pct", json_num(r.p_eu_pct)},
                                {"p_eu_published_pct", json_num(r.input.published_p_eu_pct)}});
            plot.push_back(json{{"ruleout_pct", r.input.ruleout_pct},
                                {"eu_ratio", r.eu_ratio},
                                {"ci_low", r.eu_ratio_ci_low},
                                {"ci_high", r.eu_ratio_ci_high}});
            char ci_buf[64], cipub_buf[64];
            std::snprintf(ci_buf, sizeof ci_buf, "(%.2f,%.2f)", r.ci_low * 1e3,
                          r.ci_high * 1e3);
            std::snprintf(cipub_buf, sizeof cipub_buf, "(%.2f,%.2f)",
                          r.input.published_diui_ci_low_e3, r.input.published_diui_ci_high_e3);
            table.push_back({fmt(r.input.ruleout_pct, "%.0f"),
                             fmt(r.input.recall_rate * 100, "%.1f"),
                             fmt(r.input.detection_rate * 100, "%.2f"),
                             fmt(r.diui * 1e3, "%.3f"), fmt(r.input.published_diui_e3, "%.2f"),
                             fmt((r.diui - pub) * 1e3, "%+.3f"), ci_buf, cipub_buf,
                             fmt(r.p_eu_pct, "%.2f"), fmt(r.input.published_p_eu_pct, "%.2f")});
            std::ostringstream line;
            line << num_str(r.input.ruleout_pct) << ',' << num_str(r.input.recall_rate) << ','
                 << num_str(r.input.detection_rate) << ',' << num_str(r.diui) << ','
                 << num_str(pub) << ',' << num_str(r.diui - pub) << ',' << num_str(r.ci_low)
                 << ',' << num_str(r.ci_high) << ','
                 << num_str(r.input.published_diui_ci_low_e3 * 1e-3) << ','
                 << num_str(r.input.published_diui_ci_high_e3 * 1e-3) << ','
                 << num_str(r.p_eu_pct) << ',' << num_str(r.input.published_p_eu_pct);
            csv_lines.push_back(line.str());
        }
        report["inputs"] = {{"relative_utility", fx.relative_utility},
                            {"n_mammograms", fx.n_mammograms}};
    }

    report["rows"] = rows;
    report["eu_ratio_plot"] = plot;
    report["notes"] = notes;
    report["metadata"] = {{"seed", cfg.seed},
                          {"samples", cfg.n_resamples},
                          {"ci_level", cfg.ci_level}};

    if (o.common.format == "json") {
        std::cout << report.dump(2) << '\n';
        return 0;
    }
    if (o.common.format == "csv") {
        for (const auto& line : csv_lines) std::cout << line << '\n';
        std::cout << "\nruleout_pct,eu_ratio,eu_ratio_ci_low,eu_ratio_ci_high\n";
        for (const auto& p : plot)
            std::cout << num_str(p["ruleout_pct"].get<double>()) << ','
                      << num_str(p["eu_ratio"].get<double>()) << ','
                      << num_str(p["ci_low"].get<double>()) << ','
                      << num_str(p["ci_high"].get<double>()) << '\n';
        return 0;
    }

    std::cout << "study: " << o.study << "  seed=" << cfg.seed
              << "  samples=" << cfg.n_resamples << "  ci=" << fmt(cfg.ci_level) << '\n';
    for (const auto& n : notes) std::cout << "note: " << n << '\n';
    std::cout << '\n';
    print_aligned(std::cout, table);
    std::cout << "\nEU ratio vs rule-out fraction (with-device / without-device):\n";
    std::vector<std::vector<std::string>> plot_table{
        {"ruleout%", "eu_ratio", "ci_low", "ci_high"}};
    for (const auto& p : plot)
        plot_table.push_back({fmt(p["ruleout_pct"].get<double>(), "%.0f"),
                              fmt(p["eu_ratio"].get<double>(), "%.4f"),
                              fmt(p["ci_low"].get<double>(), "%.4f"),
                              fmt(p["ci_high"].get<double>(), "%.4f")});
    print_aligned(std::cout, plot_table);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decision-analytic evaluation of AI rule-out triage for screening "
                 "(predictive values, expected-utility intercepts, believe-the-negative "
                 "simulation, paired bootstrap)"};
    app.require_subcommand(1);

    MetricsOpts metrics_opts;
    auto* metrics_cmd = app.add_subcommand(
        "metrics", "Closed-form metrics for one operating point");
    metrics_cmd->add_option("--se", metrics_opts.se, "Sensitivity");
    metrics_cmd->add_option("--sp", metrics_opts.sp, "Specificity");
    metrics_cmd->add_option("--prevalence", metrics_opts.prevalence, "Disease prevalence");
    metrics_cmd->add_option("--recall-rate", metrics_opts.recall, "Recall rate");
    metrics_cmd->add_option("--detection-rate", metrics_opts.detection,
                            "Cancer detection rate");
    metrics_cmd->add_option("--relative-utility", metrics_opts.relative_utility,
                            "Relative utility U_Rel");
    add_common(metrics_cmd, metrics_opts.common, false);

    CompareOpts compare_opts;
    auto* compare_cmd = app.add_subcommand(
        "compare", "Paired comparison of a rule-out candidate against a reference");
    compare_cmd->add_option("--ref-se", compare_opts.ref_se, "Reference sensitivity");
    compare_cmd->add_option("--ref-sp", compare_opts.ref_sp, "Reference specificity");
    compare_cmd->add_option("--cand-se", compare_opts.cand_se, "Candidate sensitivity");
    compare_cmd->add_option("--cand-sp", compare_opts.cand_sp, "Candidate specificity");
    compare_cmd->add_option("--n-cancer", compare_opts.n_cancer, "Signal-present count");
    compare_cmd->add_option("--n-noncancer", compare_opts.n_noncancer,
                            "Signal-absent count");
    compare_cmd->add_option("--cohort", compare_opts.cohort_path,
                            "Cohort CSV (alternative to aggregate rates)");
    compare_cmd->add_option("--threshold", compare_opts.threshold, "AI rule-out threshold");
    compare_cmd->add_option("--fraction", compare_opts.fraction,
                            "Requested rule-out fraction (with --cohort)");
    compare_cmd->add_option("--prevalence", compare_opts.prevalence,
                            "Prevalence override (default: from counts)");
    compare_cmd->add_option("--relative-utility", compare_opts.relative_utility,
                            "Relative utility U_Rel");
    compare_cmd->add_option("--boundaries", compare_opts.boundaries,
                            "Also emit region-boundary polylines at this resolution");
    compare_cmd->add_flag("--unconditional", compare_opts.unconditional,
                          "Also resample the truth-class split");
    add_common(compare_cmd, compare_opts.common, true);

    SimulateOpts simulate_opts;
    auto* simulate_cmd = app.add_subcommand(
        "simulate", "Believe-the-negative rule-out sweep over a cohort file");
    simulate_cmd->add_option("--cohort", simulate_opts.cohort_path, "Cohort CSV");
    simulate_cmd->add_option("--fractions", simulate_opts.fractions,
                             "Requested rule-out fractions")
        ->delimiter(',');
    simulate_cmd->add_option("--thresholds", simulate_opts.thresholds,
                             "Explicit AI thresholds")
        ->delimiter(',');
    simulate_cmd->add_option("--prevalence", simulate_opts.prevalence,
                             "Prevalence override (default: cohort)");
    simulate_cmd->add_option("--relative-utility", simulate_opts.relative_utility,
                             "Relative utility U_Rel");
    simulate_cmd->add_flag("--unconditional", simulate_opts.unconditional,
                           "Also resample the truth-class split");
    add_common(simulate_cmd, simulate_opts.common, true);

    BaselineRuOpts baseline_opts;
    auto* baseline_cmd = app.add_subcommand(
        "baseline-ru", "Relative utility from the tangent of a performance curve");
    baseline_cmd->add_option("--curve", baseline_opts.curve_path, "Curve CSV (header x,y)");
    baseline_cmd->add_option("--at", baseline_opts.at, "Query rate for the tangent");
    baseline_cmd->add_option("--space", baseline_opts.space, "Curve space")
        ->check(CLI::IsMember({"rd", "roc"}))
        ->capture_default_str();
    baseline_cmd->add_option("--prevalence", baseline_opts.prevalence,
                             "Prevalence (required for --space roc)");
    baseline_cmd->add_option("--resample-knots", baseline_opts.resample_knots,
                             "Heuristic: knot-resampling replicates (0 = off)");
    add_common(baseline_cmd, baseline_opts.common, true);

    ReproduceOpts reproduce_opts;
    auto* reproduce_cmd = app.add_subcommand(
        "reproduce", "Regenerate a published study table from embedded aggregates");
    reproduce_cmd->add_option("--study", reproduce_opts.study, "Study fixture")
        ->required()
        ->check(CLI::IsMember({"us-2019", "euro-2022"}));
    add_common(reproduce_cmd, reproduce_opts.common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (metrics_cmd->parsed()) return run_metrics(metrics_opts);
        if (compare_cmd->parsed()) return run_compare(compare_opts);
        if (simulate_cmd->parsed()) return run_simulate(simulate_opts);
        if (baseline_cmd->parsed()) return run_baseline_ru(baseline_opts);
        if (reproduce_cmd->parsed()) return run_reproduce(reproduce_opts);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
