#ifndef RELAYVI_DSC_CHANNEL_HPP
#define RELAYVI_DSC_CHANNEL_HPP

#include <random>
#include <vector>

#include "relayvi/types.hpp"

namespace relayvi {

/// Statistical description of one hop's doubly-selective channel.
/// Doppler is quoted as N*f*Ts (normalized to the OFDM symbol).
struct HopChannelSpec {
    int max_delay = 1;                 // L_max: taps live in 0..max_delay-1
    int n_taps = 1;
    std::vector<int> tap_position_pool;
    double max_norm_doppler = 0.0;
};

struct HopTap {
    int delay = 0;
    double doppler_norm = 0.0;  // N*f*Ts
    double power = 1.0;
    CVec trajectory;            // trajectory(i) = h(time_offset + i, delay)
};

/// One drawn hop: per-tap Jakes trajectories over [time_offset, time_offset+n_time-1].
struct HopChannelRealization {
    std::vector<HopTap> taps;   // sorted by delay
    int time_offset = 0;
    int n_time = 0;
    int max_delay = 1;

    /// h(t, l) at absolute time t; zero where no tap sits.
    cplx at(int t, int l) const;
};

/// Zero-mean circularly-symmetric Gaussian sequence with autocovariance
/// power * J0(2 pi f_d tau T_s), generated by eigen-factorizing the
/// Toeplitz covariance (negative eigenvalues clipped at zero).
CVec sample_trajectory(double f_d, double power, int n, double t_s,
                       std::mt19937_64& rng);

/// Draws tap positions (uniform, without replacement), Doppler shifts
/// (one tap pinned at the maximum, the rest uniform in (0, max]), powers
/// (exponential profile over delay order, unit total), and trajectories.
/// norm_n is the subcarrier count the normalized Doppler refers to.
HopChannelRealization draw_hop(const HopChannelSpec& spec, int n_time,
                               int time_offset, int norm_n, std::mt19937_64& rng);

} // namespace relayvi

#endif
