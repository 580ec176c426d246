#pragma once

#include <cstdint>
#include <span>

namespace fastsketch {

struct SeparationParams {
    std::uint32_t t = 0;
    // First prefix length at which an early Below is allowed; 1 <= r <= t.
    std::uint32_t r = 1;
    double gamma = 0.5;
};

enum class Separation { Below, Above };

struct SeparationResult {
    Separation decision = Separation::Below;
    // Loop iterations executed (prefix length at exit, t when Above).
    std::uint32_t iterations = 0;
};

// Sequential threshold test over x[0..t). With S_i the sum of the first i
// values, returns Below at the first i >= r with S_i <= i*gamma + i^(2/3),
// and Above if no such i exists. Throws ContractViolation if
// x.size() != p.t or r is outside [1, t].
SeparationResult separate(std::span<const double> x, const SeparationParams& p);

// Smallest r for which the Above guarantee at gap delta applies
// (r >= 8 / delta^3).
std::uint32_t min_rounds_for_gap(double delta);

// Whether p.r meets min_rounds_for_gap(delta). Advisory only; separate()
// runs either way.
bool separation_guarantee_holds(const SeparationParams& p, double delta);

}  // namespace fastsketch
