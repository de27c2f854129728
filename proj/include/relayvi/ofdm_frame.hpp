#ifndef RELAYVI_OFDM_FRAME_HPP
#define RELAYVI_OFDM_FRAME_HPP

#include <cstdint>
#include <vector>

#include "relayvi/types.hpp"

namespace relayvi {

/// Unitary DFT matrix, [F]_{m,n} = n^{-1/2} exp(-j 2 pi m n / n).
CMat dft_matrix(int n);

/// Unit-power QPSK constellation. Index k maps to
/// ((1-2*(k&1)) + j(1-2*(k>>1))) / sqrt(2); ties in nearest-point
/// quantization break toward the smallest index.
std::vector<cplx> qpsk_constellation();

/// One OFDM symbol's frequency plan: which subcarriers carry pilots
/// (with their declared values), which carry data, and which data
/// positions are forced to zero at the trellis edges.
struct OfdmFrameSpec {
    int n_subcarriers = 0;
    int cp_len = 0;
    std::vector<int> pilot_indices;   // sorted
    std::vector<int> data_indices;    // sorted
    int zero_edge_count = 0;          // first/last data subcarriers pinned to 0
    std::vector<cplx> constellation;  // unit average power
    CVec pilot_values;                // aligned with pilot_indices
    CMat dft;                         // cached unitary DFT

    int n_pilots() const { return static_cast<int>(pilot_indices.size()); }
    int n_data() const { return static_cast<int>(data_indices.size()); }

    /// True if the k-th data position (index into data_indices) is a forced zero.
    bool is_forced_zero_data(int k) const {
        return k < zero_edge_count || k >= n_data() - zero_edge_count;
    }
};

struct FreqSymbol {
    CVec values;                      // length N
    std::vector<std::uint8_t> known_mask;  // true at pilots and forced zeros
};

/// Equal-spaced pilot clusters of width 3: a complex-Gaussian center pilot
/// with power pilot_power_ratio relative to data, flanked by two zero
/// guards. Cluster c starts at subcarrier floor(c*N/n_clusters).
OfdmFrameSpec build_pilot_pattern(int n_subcarriers, int n_clusters,
                                  std::uint64_t rng_seed, double pilot_power_ratio,
                                  int zero_edge_count = 0);

/// Scatter data and pilots onto their subcarriers; forced-zero edge data
/// positions are set to 0 regardless of the supplied values.
FreqSymbol assemble(const OfdmFrameSpec& spec, const CVec& data, const CVec& pilots);

/// IDFT plus cyclic prefix: returns [s(N-Lcp..N-1), s(0..N-1)] with s = F^H x.
CVec modulate(const OfdmFrameSpec& spec, const FreqSymbol& x);

/// DFT of a CP-stripped time-domain symbol.
CVec demodulate(const OfdmFrameSpec& spec, const CVec& y_time);

} // namespace relayvi

#endif
