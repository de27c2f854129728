#include "relayvi/dsc_channel.hpp"

#include <algorithm>
#include <stdexcept>

#include "relayvi/special.hpp"

namespace relayvi {

cplx HopChannelRealization::at(int t, int l) const {
    const int i = t - time_offset;
    if (i < 0 || i >= n_time)
        throw std::out_of_range("HopChannelRealization::at: time outside trajectory span");
    for (const auto& tap : taps) {
        if (tap.delay == l) return tap.trajectory(i);
    }
    return 0.0;
}

CVec sample_trajectory(double f_d, double power, int n, double t_s,
                       std::mt19937_64& rng) {
    if (f_d < 0.0 || power <= 0.0 || n < 1 || t_s <= 0.0)
        throw std::invalid_argument("sample_trajectory: bad arguments");

    RMat cov(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double r = power * bessel_j0(2.0 * kPi * f_d * (i - j) * t_s);
            cov(i, j) = r;
            cov(j, i) = r;
        }
    }

    Eigen::SelfAdjointEigenSolver<RMat> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("sample_trajectory: covariance factorization failed");
    // Clip negatives and solver noise so rank-deficient covariances (f_d = 0)
    // factor exactly onto their range space.
    const double floor = 1e-12 * std::max(eig.eigenvalues().maxCoeff(), 0.0);
    RVec lam = (eig.eigenvalues().array() < floor).select(RVec::Zero(n), eig.eigenvalues());

    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    CVec white(n);
    for (int i = 0; i < n; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        white(i) = cplx(re, im);
    }
    // Color white CN(0,1) noise with U sqrt(Lambda).
    return eig.eigenvectors() * (lam.cwiseSqrt().asDiagonal() * white);
}

HopChannelRealization draw_hop(const HopChannelSpec& spec, int n_time,
                               int time_offset, int norm_n, std::mt19937_64& rng) {
    if (n_time < 1) throw std::invalid_argument("draw_hop: n_time must be positive");
    if (norm_n < 1) throw std::invalid_argument("draw_hop: bad norm_n");
    if (spec.tap_position_pool.empty())
        throw std::invalid_argument("draw_hop: empty tap position pool");
    if (spec.n_taps > static_cast<int>(spec.tap_position_pool.size()))
        throw std::invalid_argument("draw_hop: more taps than pool positions");
    for (int p : spec.tap_position_pool) {
        if (p < 0 || p >= spec.max_delay)
            throw std::invalid_argument("draw_hop: pool position outside delay span");
    }

    // Positions: uniform without replacement.
    std::vector<int> pool = spec.tap_position_pool;
    std::vector<int> positions;
    for (int i = 0; i < spec.n_taps; ++i) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(pool.size()) - 1);
        const int k = pick(rng);
        positions.push_back(pool[k]);
        pool.erase(pool.begin() + k);
    }
    std::sort(positions.begin(), positions.end());

    // One tap carries the maximum Doppler, the rest are uniform in (0, max].
    std::vector<double> doppler(spec.n_taps, 0.0);
    if (spec.max_norm_doppler > 0.0) {
        std::uniform_int_distribution<int> pick(0, spec.n_taps - 1);
        const int max_tap = pick(rng);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int i = 0; i < spec.n_taps; ++i) {
            doppler[i] = (i == max_tap) ? spec.max_norm_doppler
                                        : spec.max_norm_doppler * (1.0 - uni(rng));
        }
    }

    // Exponential power delay profile over the ordered taps, unit total.
    std::vector<double> power(spec.n_taps);
    double total = 0.0;
    for (int i = 0; i < spec.n_taps; ++i) {
        power[i] = std::exp(-static_cast<double>(i));
        total += power[i];
    }
    for (double& p : power) p /= total;

    HopChannelRealization out;
    out.time_offset = time_offset;
    out.n_time = n_time;
    out.max_delay = spec.max_delay;
    // Only the product f*Ts matters; quote everything against Ts = 1.
    for (int i = 0; i < spec.n_taps; ++i) {
        HopTap tap;
        tap.delay = positions[i];
        tap.doppler_norm = doppler[i];
        tap.power = power[i];
        tap.trajectory = sample_trajectory(doppler[i] / norm_n, power[i], n_time, 1.0, rng);
        out.taps.push_back(std::move(tap));
    }
    return out;
}

} // namespace relayvi
