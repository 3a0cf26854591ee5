#pragma once

#include <string>
#include <vector>

#include "ruleout/metrics.hpp"

namespace ruleout {

/// One superiority-region boundary in ROC space. A vertical line (infinite
/// slope, possible when the reference sits on the fpr = 0 edge) is encoded
/// by slope = +inf; the anchor point is always on the line.
struct BoundaryLine {
    double slope = 0.0;
    double intercept = 0.0;  // y-intercept; NaN when vertical
    double anchor_x = 0.0;
    double anchor_y = 0.0;
};

/// Which superiority regions a candidate point falls into, relative to a
/// reference point. Ties are never superior; each verdict requires strict
/// improvement in its defining comparison.
struct RegionVerdict {
    bool sesp_superior = false;     // higher Se and Sp (one strictly)
    bool ppv_npv_superior = false;  // strictly larger rho+ and strictly smaller rho-
    bool eu_superior = false;       // strictly larger iso-utility intercept
    BoundaryLine ppv_line;          // constant-PPV line through (0,0)
    BoundaryLine npv_line;          // constant-NPV line through (1,1)
    BoundaryLine iso_utility_line;  // iso-utility line through the reference
};

/// Classify `cand` against `ref`. The likelihood-ratio comparisons are made
/// on the defining cross-products (never on derived PPV/NPV values), with
/// the metrics-core infinity conventions at fpr = 0 and fpr = 1.
RegionVerdict classify(const RocPoint& cand, const RocPoint& ref, const UtilityContext& ctx);

struct PlotPoint {
    std::string region;  // "ppv", "npv" or "iso_utility"
    int segment_index = 0;
    double x = 0.0;
    double y = 0.0;
};

/// Sample the three boundary lines clipped to the unit square, `resolution`
/// points per line (resolution = 2 gives exactly the clipped endpoints).
std::vector<PlotPoint> boundary_polylines(const RocPoint& ref, const UtilityContext& ctx,
                                          int resolution);

/// Serialize a plot dataset as `region,segment_index,x,y` CSV.
std::string polylines_to_csv(const std::vector<PlotPoint>& points);

}  // namespace ruleout
