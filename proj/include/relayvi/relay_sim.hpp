#ifndef RELAYVI_RELAY_SIM_HPP
#define RELAYVI_RELAY_SIM_HPP

#include <random>
#include <vector>

#include "relayvi/dsc_channel.hpp"
#include "relayvi/ofdm_frame.hpp"
#include "relayvi/types.hpp"

namespace relayvi {

/// K parallel amplify-and-forward links of n_hops hops each. Per link,
/// relay rho in 0..n_hops-2 applies gain relay_gains[k][rho] and injects
/// AWGN of power relay_noise_powers[k][rho] at its input; the destination
/// adds dest_noise_power once.
struct RelaySystem {
    int n_links = 0;
    int n_hops = 0;  // Upsilon + 1, must be >= 2
    std::vector<std::vector<HopChannelRealization>> hops;  // [k][rho]
    std::vector<std::vector<double>> relay_gains;
    std::vector<std::vector<double>> relay_noise_powers;
    double dest_noise_power = 0.0;

    /// max over links of (sum of hop delay spans) - Upsilon.
    int composite_len() const;
};

/// End-to-end time-varying tap matrix and its circular-convolution form.
struct CompositeChannel {
    CMat taps;            // N x length, taps(n, l)
    CMat circulant_form;  // N x N
    int length = 0;
};

struct PropagateResult {
    CVec y_freq;            // received symbol after CP strip + DFT
    CompositeChannel truth;
    CVec v_freq;            // realized composite noise, y = F H F^H x + v
};

/// Linear-convolution matrix of one hop: n_rows x (n_rows + L - 1), row r
/// holds [h(t_r, L-1) ... h(t_r, 0)] starting at column r, with
/// t_r = row_time_offset + r.
CMat hop_matrix(const HopChannelRealization& hop, int n_rows, int row_time_offset);

/// Draws all hops of a system with consistent trajectory spans, fixed-gain
/// amplification 1/sqrt(1 + noise_power) at every relay, and a common noise
/// power at relays and destination. Validates composite length against cp_len.
RelaySystem draw_system(const std::vector<std::vector<HopChannelSpec>>& hop_specs,
                        double noise_power, int n_subcarriers, int cp_len,
                        std::mt19937_64& rng);

/// Chains hops into the composite channel via time-varying convolution and
/// wraps it through the cyclic prefix.
CompositeChannel composite_channel(const RelaySystem& system, int n_subcarriers);

/// Hop-by-hop time-domain simulation with AWGN injected at every relay and
/// the destination. Also returns the exact composite channel and the realized
/// composite noise so that y = F H F^H x + v holds to numerical precision.
PropagateResult propagate(const OfdmFrameSpec& frame, const FreqSymbol& x,
                          const RelaySystem& system, std::mt19937_64& rng);

} // namespace relayvi

#endif
