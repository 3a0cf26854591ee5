#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ruleout {

/// Natural (free-boundary) interpolating cubic spline: passes through every
/// knot, C2 on the knot interval, second derivative zero at both endpoints.
/// Queries outside the knot range are rejected; tangent estimation beyond
/// the data is meaningless here.
class CubicSpline {
  public:
    CubicSpline(std::vector<double> x, std::vector<double> y);

    double value_at(double x) const;
    double derivative_at(double x) const;
    double second_derivative_at(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    std::size_t n_knots() const { return x_.size(); }

  private:
    std::size_t interval_of(double x) const;  // throws outside [x_min, x_max]

    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives at the knots
};

enum class CurveSpace { recall_detection, roc };

/// Empirical performance curve: (x, y) rate pairs with strictly increasing x
/// after sorting. Noisy data may violate y-monotonicity; that is tolerated
/// but reported through `warnings`.
struct PerformanceCurve {
    std::vector<double> x;
    std::vector<double> y;
    CurveSpace space = CurveSpace::recall_detection;
    std::vector<std::string> warnings;

    PerformanceCurve(std::vector<double> x, std::vector<double> y, CurveSpace space);
};

/// Interpolating natural cubic spline through the curve's knots.
CubicSpline fit_spline(const PerformanceCurve& curve);

/// First derivative of the fitted spline at x (within the knot range).
double slope_at(const CubicSpline& model, double x);

/// Relative utility implied by the curve's tangent at `at`:
/// 1/slope - 1 in recall/detection space (slope must lie in (0,1)),
/// Q_pi / slope in ROC space (prevalence required, slope > 0).
/// Out-of-domain slopes are reported as errors, never clamped.
double baseline_relative_utility(const PerformanceCurve& curve, double at,
                                 std::optional<double> prevalence = std::nullopt);

/// Parse the documented curve format: comma-separated `x,y` header, rates as
/// decimals in [0,1], any row order; `#` comments ignored.
PerformanceCurve parse_curve(std::istream& in, CurveSpace space);
PerformanceCurve load_curve(const std::string& path, CurveSpace space);

}  // namespace ruleout
