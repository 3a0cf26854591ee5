#include "ruleout/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ruleout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool rho_plus_greater(const RocPoint& a, const RocPoint& b) {
    if (a.fpr > 0.0 && b.fpr > 0.0)
        return a.tpr * b.fpr > b.tpr * a.fpr;  // defining inequality, no division
    return likelihood_ratios(a).positive > likelihood_ratios(b).positive;
}

bool rho_minus_less(const RocPoint& a, const RocPoint& b) {
    if (a.fpr < 1.0 && b.fpr < 1.0)
        return (1.0 - a.tpr) * (1.0 - b.fpr) < (1.0 - b.tpr) * (1.0 - a.fpr);
    return likelihood_ratios(a).negative < likelihood_ratios(b).negative;
}

BoundaryLine through(double slope, double anchor_x, double anchor_y) {
    BoundaryLine line;
    line.slope = slope;
    line.intercept = std::isinf(slope) ? kNaN : anchor_y - slope * anchor_x;
    line.anchor_x = anchor_x;
    line.anchor_y = anchor_y;
    return line;
}

void sample_line(const BoundaryLine& line, const std::string& region, int resolution,
                 std::vector<PlotPoint>& out) {
    if (std::isinf(line.slope)) {
        for (int j = 0; j < resolution; ++j)
            out.push_back(PlotPoint{region, j, line.anchor_x,
                                    double(j) / double(resolution - 1)});
        return;
    }
    // x-interval where the line stays inside the unit square
    double lo = 0.0, hi = 1.0;
    if (line.slope > 0.0) {
        lo = std::max(lo, (0.0 - line.intercept) / line.slope);
        hi = std::min(hi, (1.0 - line.intercept) / line.slope);
    }
    lo = std::min(std::max(lo, 0.0), 1.0);
    hi = std::min(std::max(hi, 0.0), 1.0);
    if (hi < lo) hi = lo;
    for (int j = 0; j < resolution; ++j) {
        const double x = lo + (hi - lo) * double(j) / double(resolution - 1);
        const double y = std::min(1.0, std::max(0.0, line.slope * x + line.intercept));
        out.push_back(PlotPoint{region, j, x, y});
    }
}

}  // namespace

RegionVerdict classify(const RocPoint& cand, const RocPoint& ref, const UtilityContext& ctx) {
    RegionVerdict v;
    v.sesp_superior = cand.tpr >= ref.tpr && cand.fpr <= ref.fpr &&
                      (cand.tpr > ref.tpr || cand.fpr < ref.fpr);
    v.ppv_npv_superior = rho_plus_greater(cand, ref) && rho_minus_less(cand, ref);
    v.eu_superior = iui(cand, ctx) > iui(ref, ctx);

    const LikelihoodRatios lr = likelihood_ratios(ref);
    v.ppv_line = through(lr.positive, 0.0, 0.0);
    v.npv_line = through(lr.negative, 1.0, 1.0);
    v.iso_utility_line = through(iso_slope_roc(ctx), ref.fpr, ref.tpr);
    return v;
}

std::vector<PlotPoint> boundary_polylines(const RocPoint& ref, const UtilityContext& ctx,
                                          int resolution) {
    if (resolution < 2)
        throw std::invalid_argument("boundary_polylines: resolution must be at least 2");
    const RegionVerdict v = classify(ref, ref, ctx);  // boundary lines only
    std::vector<PlotPoint> out;
    out.reserve(std::size_t(resolution) * 3);
    sample_line(v.ppv_line, "ppv", resolution, out);
    sample_line(v.npv_line, "npv", resolution, out);
    sample_line(v.iso_utility_line, "iso_utility", resolution, out);
    return out;
}

std::string polylines_to_csv(const std::vector<PlotPoint>& points) {
    std::ostringstream out;
    out.precision(17);
    out << "region,segment_index,x,y\n";
    for (const auto& p : points)
        out << p.region << ',' << p.segment_index << ',' << p.x << ',' << p.y << '\n';
    return out.str();
}

}  // namespace ruleout
