#include "relayvi/special.hpp"

#include <limits>
#include <stdexcept>

namespace relayvi {

double digamma(double x) {
    if (!(x > 0.0)) {
        throw std::invalid_argument("digamma: argument must be positive");
    }
    double acc = 0.0;
    // psi(x) = psi(x+1) - 1/x, shift until the asymptotic series is accurate.
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) ~ ln x - 1/(2x) - sum B_2n / (2n x^2n)
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = std::log(x) - 0.5 * inv;
    series -= inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    return acc + series;
}

} // namespace relayvi
