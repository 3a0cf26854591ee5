#include "ruleout/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ruleout {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxUndefinedFraction = 0.01;

double quantile_sorted(const std::vector<double>& v, double q) {
    const double h = q * double(v.size() - 1);
    const auto lo = std::size_t(std::floor(h));
    if (lo + 1 >= v.size()) return v.back();
    const double frac = h - double(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

PairedClassCounts resample_class(const PairedClassCounts& c, std::int64_t total,
                                 rng::Stream& stream) {
    if (c.total() == 0 || total == 0) return PairedClassCounts{0, 0, 0};
    const double weights[3] = {double(c.pos_both), double(c.pos_ref_only),
                               double(c.neg_both)};
    std::int64_t cells[3];
    stream.multinomial(total, weights, cells);
    return PairedClassCounts{cells[0], cells[1], cells[2]};
}

// Shared percentile/exceedance assembly over indexed replicate pairs.
BootstrapPair assemble(double point_cand, double point_ref, std::vector<double> cand,
                       std::vector<double> ref, const BootstrapConfig& cfg) {
    const auto n = std::int64_t(cand.size());
    std::int64_t undefined = 0, ties = 0, cand_greater = 0, ref_greater = 0;
    std::vector<double> cand_ok, ref_ok;
    cand_ok.reserve(cand.size());
    ref_ok.reserve(ref.size());
    for (std::int64_t i = 0; i < n; ++i) {
        if (!std::isfinite(cand[i]) || !std::isfinite(ref[i])) {
            ++undefined;
            continue;
        }
        cand_ok.push_back(cand[i]);
        ref_ok.push_back(ref[i]);
        if (cand[i] > ref[i])
            ++cand_greater;
        else if (ref[i] > cand[i])
            ++ref_greater;
        else
            ++ties;
    }
    if (double(undefined) > kMaxUndefinedFraction * double(n)) {
        std::ostringstream msg;
        msg << "bootstrap: " << undefined << " of " << n
            << " replicates were undefined (limit 1%)";
        throw std::runtime_error(msg.str());
    }
    if (cand_ok.empty()) throw std::runtime_error("bootstrap: no defined replicates");

    auto side = [&](double point, std::vector<double> defined, std::int64_t greater,
                    std::vector<double>&& raw) {
        BootstrapResult r;
        r.point_estimate = point;
        auto [lo, hi] = percentile_interval(std::move(defined), cfg.ci_level);
        r.ci_low = lo;
        r.ci_high = hi;
        r.exceedance_probability = double(greater) / double(n);
        r.n_undefined = undefined;
        r.n_ties = ties;
        if (cfg.keep_replicates) r.replicate_values = std::move(raw);
        return r;
    };
    BootstrapPair pair{side(point_cand, cand_ok, cand_greater, std::move(cand)),
                       side(point_ref, ref_ok, ref_greater, std::move(ref))};
    return pair;
}

// Runs replicate_fn for indices [0, n) across cfg.n_threads threads, writing
// into index-addressed arrays so the result is identical to serial execution.
void run_replicates(const BootstrapConfig& cfg,
                    const std::function<std::pair<double, double>(std::int64_t,
                                                                  rng::Stream&)>& replicate_fn,
                    std::vector<double>& cand, std::vector<double>& ref) {
    const auto n = cfg.n_resamples;
    cand.assign(std::size_t(n), kNaN);
    ref.assign(std::size_t(n), kNaN);

    unsigned threads = cfg.n_threads > 0 ? unsigned(cfg.n_threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, unsigned(std::max<std::int64_t>(n, 1)));

    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&](std::int64_t begin, std::int64_t end) {
        try {
            for (std::int64_t i = begin; i < end; ++i) {
                rng::Stream stream(cfg.seed, std::uint64_t(i));
                const auto [c, r] = replicate_fn(i, stream);
                cand[std::size_t(i)] = c;
                ref[std::size_t(i)] = r;
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    if (threads <= 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (n + std::int64_t(threads) - 1) / std::int64_t(threads);
        for (unsigned t = 0; t < threads; ++t) {
            const std::int64_t begin = std::int64_t(t) * chunk;
            const std::int64_t end = std::min<std::int64_t>(begin + chunk, n);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

void BootstrapConfig::validate() const {
    if (n_resamples < 1)
        throw std::invalid_argument("bootstrap: n_resamples must be at least 1");
    if (!(ci_level > 0.0 && ci_level < 1.0))
        throw std::invalid_argument("bootstrap: ci_level must lie strictly inside (0,1)");
    if (n_threads < 0) throw std::invalid_argument("bootstrap: n_threads must be >= 0");
}

std::pair<double, double> percentile_interval(std::vector<double> values, double ci_level) {
    if (values.empty()) throw std::invalid_argument("percentile_interval: empty sample");
    std::sort(values.begin(), values.end());
    const double alpha = (1.0 - ci_level) / 2.0;
    return {quantile_sorted(values, alpha), quantile_sorted(values, 1.0 - alpha)};
}

PairedOutcomeTable resample_paired(const PairedOutcomeTable& table, rng::Stream& stream) {
    table.validate();
    PairedOutcomeTable out;
    out.cancer = resample_class(table.cancer, table.cancer.total(), stream);
    out.noncancer = resample_class(table.noncancer, table.noncancer.total(), stream);
    return out;
}

BootstrapPair bootstrap_metric(const PairedOutcomeTable& table, const PairedMetric& metric,
                               const BootstrapConfig& cfg) {
    cfg.validate();
    table.validate();
    const auto [point_cand, point_ref] = metric(table);
    const std::int64_t total = table.cancer.total() + table.noncancer.total();
    const double cancer_share = double(table.cancer.total()) / double(total);

    std::vector<double> cand, ref;
    run_replicates(
        cfg,
        [&](std::int64_t, rng::Stream& stream) {
            PairedOutcomeTable replicate;
            if (cfg.unconditional) {
                // redraw the truth-class split before the per-class cells
                const std::int64_t n_cancer = stream.binomial(total, cancer_share);
                replicate.cancer = resample_class(table.cancer, n_cancer, stream);
                replicate.noncancer = resample_class(table.noncancer, total - n_cancer, stream);
            } else {
                replicate = resample_paired(table, stream);
            }
            return metric(replicate);
        },
        cand, ref);
    return assemble(point_cand, point_ref, std::move(cand), std::move(ref), cfg);
}

RdPoint RdOutcomeCounts::point() const {
    const double n = double(total());
    return RdPoint(double(n_recalled()) / n, double(n_detected) / n, total());
}

void RdOutcomeCounts::validate() const {
    if (n_detected < 0 || n_recalled_benign < 0 || n_not_recalled < 0)
        throw std::invalid_argument("rd counts must be non-negative");
    if (total() == 0) throw std::invalid_argument("rd counts are all zero");
}

BootstrapPair bootstrap_rd(const RdOutcomeCounts& scenario, const RdOutcomeCounts& baseline,
                           double relative_utility, const BootstrapConfig& cfg) {
    cfg.validate();
    scenario.validate();
    baseline.validate();
    if (scenario.total() != baseline.total())
        throw std::invalid_argument("bootstrap_rd: scenario and baseline cover different "
                                    "numbers of screens");
    // believe-the-negative nesting: the scenario's recalled sets are subsets
    // of the baseline's
    if (scenario.n_detected > baseline.n_detected ||
        scenario.n_recalled_benign > baseline.n_recalled_benign)
        throw std::invalid_argument("bootstrap_rd: scenario recalls exceed the baseline; "
                                    "not reachable by rule-out");

    // joint nested cells over all screens; truth is unknown off the recalled
    // sets, so there is no per-class split to condition on
    const double weights[5] = {
        double(scenario.n_detected),                        // detected in both
        double(baseline.n_detected - scenario.n_detected),  // detected, baseline only
        double(scenario.n_recalled_benign),                 // benign recall in both
        double(baseline.n_recalled_benign - scenario.n_recalled_benign),
        double(baseline.n_not_recalled)};                   // recalled in neither
    const std::int64_t total = baseline.total();
    const double n = double(total);

    std::vector<double> cand, ref;
    run_replicates(
        cfg,
        [&](std::int64_t, rng::Stream& stream) {
            std::int64_t cells[5];
            stream.multinomial(total, weights, cells);
            const double det_s = double(cells[0]);
            const double det_b = det_s + double(cells[1]);
            const double rec_s = det_s + double(cells[2]);
            const double rec_b = det_b + double(cells[2]) + double(cells[3]);
            const double c = diui(RdPoint(rec_s / n, det_s / n), relative_utility);
            const double r = diui(RdPoint(rec_b / n, det_b / n), relative_utility);
            return std::pair<double, double>(c, r);
        },
        cand, ref);
    return assemble(diui(scenario.point(), relative_utility),
                    diui(baseline.point(), relative_utility), std::move(cand), std::move(ref),
                    cfg);
}

PairedMetric iui_metric(const UtilityContext& ctx) {
    return [ctx](const PairedOutcomeTable& t) -> std::pair<double, double> {
        if (t.cancer.total() == 0 || t.noncancer.total() == 0) return {kNaN, kNaN};
        return {iui(t.with_device(), ctx), iui(t.without_device(), ctx)};
    };
}

PairedMetric ppv_npv_margin_metric(const UtilityContext& ctx) {
    return [ctx](const PairedOutcomeTable& t) -> std::pair<double, double> {
        if (t.cancer.total() == 0 || t.noncancer.total() == 0) return {kNaN, kNaN};
        const RocPoint with = t.with_device();
        const RocPoint without = t.without_device();
        const double d_ppv = ppv(with, ctx) - ppv(without, ctx);
        const double d_npv = npv(with, ctx) - npv(without, ctx);
        return {std::min(d_ppv, d_npv), 0.0};
    };
}

}  // namespace ruleout
