#include "fastsketch/separation.hpp"

#include <cmath>
#include <string>

#include "fastsketch/error.hpp"

namespace fastsketch {

SeparationResult separate(std::span<const double> x, const SeparationParams& p) {
    if (x.size() != p.t) {
        throw ContractViolation("separate: got " + std::to_string(x.size()) +
                                " values for t=" + std::to_string(p.t));
    }
    if (p.r == 0 || p.r > p.t) {
        throw ContractViolation("separate: r must lie in [1, t]");
    }
    double sum = 0.0;
    for (std::uint32_t i = 1; i <= p.t; ++i) {
        sum += x[i - 1];
        if (i >= p.r) {
            const double di = static_cast<double>(i);
            if (sum <= di * p.gamma + std::cbrt(di * di)) return {Separation::Below, i};
        }
    }
    return {Separation::Above, p.t};
}

std::uint32_t min_rounds_for_gap(double delta) {
    if (!(delta > 0.0) || delta > 1.0) throw InvalidParameters("gap must lie in (0, 1]");
    return static_cast<std::uint32_t>(std::ceil(8.0 / (delta * delta * delta) - 1e-9));
}

bool separation_guarantee_holds(const SeparationParams& p, double delta) {
    return p.r >= min_rounds_for_gap(delta);
}

}  // namespace fastsketch
