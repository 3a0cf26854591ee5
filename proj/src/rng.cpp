#include "ruleout/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ruleout::rng {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Stirling series tail of log(k!), exact table for small k.
double stirling_correction(std::int64_t k) {
    static const double table[10] = {
        0.08106146679532726, 0.04134069595540929, 0.02767792568499834,
        0.02079067210376509, 0.01664469118982119, 0.01387612882307075,
        0.01189670994589177, 0.01041126526197209, 0.009255462182712733,
        0.008330563433362871};
    if (k < 10) return table[k];
    const double kk = double(k) + 1.0;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * kk * kk)) / (kk * kk)) / kk;
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

Stream::Stream(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(seed + kGolden * (stream + 1))) {}

std::uint64_t Stream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double Stream::next_unit() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t Stream::binomial(std::int64_t n, double p) {
    if (n < 0) throw std::invalid_argument("binomial: n must be non-negative");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p must lie in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);

    const double np = double(n) * p;
    if (np < 30.0) {
        // sequential inversion through the pmf recurrence
        const double q = 1.0 - p;
        const double r = p / q;
        double pmf = std::exp(double(n) * std::log1p(-p));
        double u = next_unit();
        std::int64_t k = 0;
        while (u > pmf) {
            u -= pmf;
            ++k;
            if (k > n) return n;  // guards the floating residue of the cdf
            pmf *= r * double(n - k + 1) / double(k);
        }
        return k;
    }

    // BTRS: transformed rejection with squeeze (Hoermann 1993), exact for
    // p <= 0.5 and n*p >= 10.
    const double q = 1.0 - p;
    const double spq = std::sqrt(np * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = np + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double r = p / q;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const auto m = std::int64_t((double(n) + 1.0) * p);

    while (true) {
        const double u = next_unit() - 0.5;
        double v = next_unit();
        const double us = 0.5 - std::abs(u);
        const auto k = std::int64_t(std::floor((2.0 * a / us + b) * u + c));
        if (k < 0 || k > n) continue;
        if (us >= 0.07 && v <= vr) return k;

        v = std::log(v * alpha / (a / (us * us) + b));
        const double upper =
            (double(m) + 0.5) * std::log((double(m) + 1.0) / (r * double(n - m + 1))) +
            (double(n) + 1.0) * std::log(double(n - m + 1) / double(n - k + 1)) +
            (double(k) + 0.5) * std::log(r * double(n - k + 1) / (double(k) + 1.0)) +
            stirling_correction(m) + stirling_correction(n - m) -
            stirling_correction(k) - stirling_correction(n - k);
        if (v <= upper) return k;
    }
}

void Stream::multinomial(std::int64_t n, std::span<const double> weights,
                         std::span<std::int64_t> out) {
    if (weights.size() != out.size())
        throw std::invalid_argument("multinomial: weights/out size mismatch");
    if (weights.empty()) throw std::invalid_argument("multinomial: no cells");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("multinomial: negative weight");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("multinomial: weights sum to zero");

    std::int64_t remaining = n;
    double rest = total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        if (remaining == 0 || rest <= 0.0) {
            out[i] = 0;
            continue;
        }
        const double cond = std::min(1.0, std::max(0.0, weights[i] / rest));
        out[i] = binomial(remaining, cond);
        remaining -= out[i];
        rest -= weights[i];
    }
    out[weights.size() - 1] = remaining;
}

}  // namespace ruleout::rng
