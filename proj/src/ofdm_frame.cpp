#include "relayvi/ofdm_frame.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace relayvi {

CMat dft_matrix(int n) {
    if (n < 1) throw std::invalid_argument("dft_matrix: n must be positive");
    CMat f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            const double phase = -2.0 * kPi * static_cast<double>(static_cast<long long>(m) * k % n) / n;
            f(m, k) = scale * cplx(std::cos(phase), std::sin(phase));
        }
    }
    return f;
}

std::vector<cplx> qpsk_constellation() {
    const double a = 1.0 / std::sqrt(2.0);
    return {cplx(a, a), cplx(-a, a), cplx(a, -a), cplx(-a, -a)};
}

OfdmFrameSpec build_pilot_pattern(int n_subcarriers, int n_clusters,
                                  std::uint64_t rng_seed, double pilot_power_ratio,
                                  int zero_edge_count) {
    if (n_subcarriers < 1) throw std::invalid_argument("build_pilot_pattern: bad N");
    if (n_clusters < 0 || 3 * n_clusters > n_subcarriers)
        throw std::invalid_argument("build_pilot_pattern: 3*n_clusters must not exceed N");
    if (pilot_power_ratio < 0.0)
        throw std::invalid_argument("build_pilot_pattern: negative pilot power");

    OfdmFrameSpec spec;
    spec.n_subcarriers = n_subcarriers;
    spec.cp_len = 0;  // set by callers that know the channel
    spec.constellation = qpsk_constellation();

    std::vector<std::uint8_t> is_pilot(n_subcarriers, 0);
    std::vector<int> centers;
    for (int c = 0; c < n_clusters; ++c) {
        const int start = static_cast<int>((static_cast<long long>(c) * n_subcarriers) / n_clusters);
        if (start + 2 >= n_subcarriers)
            throw std::invalid_argument("build_pilot_pattern: cluster exceeds band edge");
        for (int k = start; k < start + 3; ++k) {
            if (is_pilot[k]) throw std::invalid_argument("build_pilot_pattern: clusters overlap");
            is_pilot[k] = 1;
        }
        centers.push_back(start + 1);
    }

    for (int k = 0; k < n_subcarriers; ++k) {
        if (is_pilot[k]) spec.pilot_indices.push_back(k);
        else spec.data_indices.push_back(k);
    }

    // Center pilots are zero-mean complex Gaussian with the requested power;
    // guards stay zero.
    spec.pilot_values = CVec::Zero(spec.n_pilots());
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(pilot_power_ratio / 2.0));
    for (int c : centers) {
        const auto it = std::lower_bound(spec.pilot_indices.begin(), spec.pilot_indices.end(), c);
        const int slot = static_cast<int>(it - spec.pilot_indices.begin());
        const double re = gauss(rng);
        const double im = gauss(rng);
        spec.pilot_values(slot) = cplx(re, im);
    }

    if (zero_edge_count < 0 || 2 * zero_edge_count > spec.n_data())
        throw std::invalid_argument("build_pilot_pattern: zero_edge_count too large");
    spec.zero_edge_count = zero_edge_count;

    spec.dft = dft_matrix(n_subcarriers);
    return spec;
}

FreqSymbol assemble(const OfdmFrameSpec& spec, const CVec& data, const CVec& pilots) {
    if (data.size() != spec.n_data() || pilots.size() != spec.n_pilots())
        throw std::invalid_argument("assemble: length mismatch");

    FreqSymbol out;
    out.values = CVec::Zero(spec.n_subcarriers);
    out.known_mask.assign(spec.n_subcarriers, 0);
    for (int i = 0; i < spec.n_pilots(); ++i) {
        out.values(spec.pilot_indices[i]) = pilots(i);
        out.known_mask[spec.pilot_indices[i]] = 1;
    }
    for (int i = 0; i < spec.n_data(); ++i) {
        if (spec.is_forced_zero_data(i)) {
            out.values(spec.data_indices[i]) = 0.0;
            out.known_mask[spec.data_indices[i]] = 1;
        } else {
            out.values(spec.data_indices[i]) = data(i);
        }
    }
    return out;
}

CVec modulate(const OfdmFrameSpec& spec, const FreqSymbol& x) {
    if (x.values.size() != spec.n_subcarriers)
        throw std::invalid_argument("modulate: length mismatch");
    const CVec s = spec.dft.adjoint() * x.values;
    CVec out(spec.n_subcarriers + spec.cp_len);
    out.head(spec.cp_len) = s.tail(spec.cp_len);
    out.tail(spec.n_subcarriers) = s;
    return out;
}

CVec demodulate(const OfdmFrameSpec& spec, const CVec& y_time) {
    if (y_time.size() != spec.n_subcarriers)
        throw std::invalid_argument("demodulate: length mismatch");
    return spec.dft * y_time;
}

} // namespace relayvi
