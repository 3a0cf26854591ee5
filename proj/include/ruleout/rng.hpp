#pragma once

#include <cstdint>
#include <span>

namespace ruleout::rng {

/// SplitMix64 finalizer: bijective avalanche mix of a 64-bit word.
std::uint64_t mix64(std::uint64_t z);

/// Counter-based SplitMix64 stream. The k-th output is a pure function of
/// (seed, stream, k), so replicate streams derived from (seed, replicate
/// index) reproduce identically regardless of scheduling or thread count.
class Stream {
  public:
    Stream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit();

    /// Exact binomial(n, p) variate: sequential inversion for small n*p,
    /// Hoermann's BTRS transformed rejection otherwise.
    std::int64_t binomial(std::int64_t n, double p);

    /// Multinomial draw of `n` items over non-negative weights via
    /// conditional binomials. Weights need not be normalized; out and
    /// weights must have equal size.
    void multinomial(std::int64_t n, std::span<const double> weights,
                     std::span<std::int64_t> out);

  private:
    std::uint64_t state_;
};

}  // namespace ruleout::rng
