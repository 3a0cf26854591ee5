#include "ruleout/spline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ruleout {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 3) throw std::invalid_argument("spline: at least 3 knots required");
    if (y_.size() != n) throw std::invalid_argument("spline: x/y size mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
            throw std::invalid_argument("spline: knots must be finite");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("spline: knot x-values must be strictly increasing");

    // Solve the tridiagonal system for the knot second derivatives with
    // natural boundaries m[0] = m[n-1] = 0 (Thomas algorithm).
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double lower = x_[i] - x_[i - 1];
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
        if (i == 1) break;
    }
}

std::size_t CubicSpline::interval_of(double x) const {
    if (!std::isfinite(x) || x < x_.front() || x > x_.back()) {
        std::ostringstream msg;
        msg << "spline: query x=" << x << " outside the knot range [" << x_.front() << ", "
            << x_.back() << "] (no extrapolation)";
        throw std::invalid_argument(msg.str());
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t idx = std::size_t(it - x_.begin());
    if (idx > 0) --idx;
    if (idx + 1 >= x_.size()) idx = x_.size() - 2;
    return idx;
}

double CubicSpline::value_at(double x) const {
    const std::size_t i = interval_of(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative_at(double x) const {
    const std::size_t i = interval_of(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
}

double CubicSpline::second_derivative_at(double x) const {
    const std::size_t i = interval_of(x);
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
}

PerformanceCurve::PerformanceCurve(std::vector<double> x_in, std::vector<double> y_in,
                                   CurveSpace space_in)
    : x(std::move(x_in)), y(std::move(y_in)), space(space_in) {
    if (x.size() != y.size())
        throw std::invalid_argument("performance curve: x/y size mismatch");
    if (x.size() < 3)
        throw std::invalid_argument("performance curve: at least 3 points required");

    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> xs(x.size()), ys(y.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        xs[i] = x[order[i]];
        ys[i] = y[order[i]];
    }
    x = std::move(xs);
    y = std::move(ys);

    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || x[i] < 0.0 || x[i] > 1.0 || !std::isfinite(y[i]) ||
            y[i] < 0.0 || y[i] > 1.0)
            throw std::invalid_argument("performance curve: rates must lie in [0,1]");
        if (i > 0 && !(x[i] > x[i - 1]))
            throw std::invalid_argument("performance curve: duplicate x value");
    }
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (y[i] < y[i - 1]) {
            std::ostringstream msg;
            msg << "y decreases between x=" << x[i - 1] << " and x=" << x[i]
                << "; the curve is noisy or mis-ordered";
            warnings.push_back(msg.str());
        }
    }
}

CubicSpline fit_spline(const PerformanceCurve& curve) {
    return CubicSpline(curve.x, curve.y);
}

double slope_at(const CubicSpline& model, double x) {
    return model.derivative_at(x);
}

double baseline_relative_utility(const PerformanceCurve& curve, double at,
                                 std::optional<double> prevalence) {
    const CubicSpline model = fit_spline(curve);
    const double slope = model.derivative_at(at);
    if (curve.space == CurveSpace::recall_detection) {
        if (!(slope > 0.0 && slope < 1.0)) {
            std::ostringstream msg;
            msg << "slope " << slope << " at x=" << at
                << " lies outside (0,1); the curve is not concave there and no "
                   "positive relative utility is implied";
            throw std::invalid_argument(msg.str());
        }
        return 1.0 / slope - 1.0;
    }
    if (!prevalence)
        throw std::invalid_argument("ROC-space relative utility requires the prevalence");
    if (!(slope > 0.0)) {
        std::ostringstream msg;
        msg << "slope " << slope << " at x=" << at << " must be positive in ROC space";
        throw std::invalid_argument(msg.str());
    }
    return ((1.0 - *prevalence) / *prevalence) / slope;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_rate(const std::string& field, double& out) {
    char* end = nullptr;
    errno = 0;
    out = std::strtod(field.c_str(), &end);
    return !field.empty() && end == field.c_str() + field.size() && errno != ERANGE &&
           std::isfinite(out);
}

}  // namespace

PerformanceCurve parse_curve(std::istream& in, CurveSpace space) {
    std::vector<double> xs, ys;
    std::string line;
    bool header_seen = false;
    std::int64_t file_line = 0;
    while (std::getline(in, line)) {
        ++file_line;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        if (!header_seen) {
            std::string compact;
            for (char c : stripped)
                if (c != ' ' && c != '\t') compact.push_back(c);
            if (compact != "x,y") {
                std::ostringstream msg;
                msg << "curve: file line " << file_line << ": expected header 'x,y'";
                throw std::runtime_error(msg.str());
            }
            header_seen = true;
            continue;
        }
        const auto comma = stripped.find(',');
        double x = 0.0, y = 0.0;
        if (comma == std::string::npos || !parse_rate(trim(stripped.substr(0, comma)), x) ||
            !parse_rate(trim(stripped.substr(comma + 1)), y)) {
            std::ostringstream msg;
            msg << "curve: file line " << file_line << ": expected two decimal rates";
            throw std::runtime_error(msg.str());
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    if (!header_seen) throw std::runtime_error("curve: empty file (missing header)");
    return PerformanceCurve(std::move(xs), std::move(ys), space);
}

PerformanceCurve load_curve(const std::string& path, CurveSpace space) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("curve: cannot open '" + path + "'");
    return parse_curve(in, space);
}

}  // namespace ruleout
