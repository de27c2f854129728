#include "relayvi/relay_sim.hpp"

#include <stdexcept>

namespace relayvi {

namespace {

// Earliest output time needed from each hop so the destination can form
// y(0..N-1): the last hop emits from 0, each earlier hop from
// T_{rho+1} - (L_{rho+1} - 1).
std::vector<int> hop_output_offsets(const std::vector<int>& delay_spans) {
    const int h = static_cast<int>(delay_spans.size());
    std::vector<int> t(h, 0);
    for (int rho = h - 2; rho >= 0; --rho) {
        t[rho] = t[rho + 1] - (delay_spans[rho + 1] - 1);
    }
    return t;
}

std::vector<int> delay_spans_of(const std::vector<HopChannelRealization>& link) {
    std::vector<int> spans;
    spans.reserve(link.size());
    for (const auto& hop : link) spans.push_back(hop.max_delay);
    return spans;
}

CVec draw_awgn(int n, double power, std::mt19937_64& rng) {
    CVec w = CVec::Zero(n);
    if (power <= 0.0) return w;
    std::normal_distribution<double> gauss(0.0, std::sqrt(power / 2.0));
    for (int i = 0; i < n; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        w(i) = cplx(re, im);
    }
    return w;
}

// Time-varying convolution: out(t) = sum_l h(t, l) in(t - l), where both
// streams are stored with explicit start times.
CVec convolve_stream(const HopChannelRealization& hop, const CVec& in, int in_start,
                     int out_start, int out_len) {
    CVec out = CVec::Zero(out_len);
    for (int i = 0; i < out_len; ++i) {
        const int t = out_start + i;
        cplx acc = 0.0;
        for (const auto& tap : hop.taps) {
            const int j = t - tap.delay - in_start;
            if (j < 0 || j >= in.size())
                throw std::out_of_range("propagate: input stream too short");
            acc += tap.trajectory(t - hop.time_offset) * in(j);
        }
        out(i) = acc;
    }
    return out;
}

} // namespace

int RelaySystem::composite_len() const {
    int len = 0;
    for (const auto& link : hops) {
        int sum = 0;
        for (const auto& hop : link) sum += hop.max_delay;
        len = std::max(len, sum - (n_hops - 1));
    }
    return len;
}

CMat hop_matrix(const HopChannelRealization& hop, int n_rows, int row_time_offset) {
    if (n_rows < 1) throw std::invalid_argument("hop_matrix: bad n_rows");
    const int l_max = hop.max_delay;
    CMat m = CMat::Zero(n_rows, n_rows + l_max - 1);
    for (int r = 0; r < n_rows; ++r) {
        const int t = row_time_offset + r;
        if (t < hop.time_offset || t >= hop.time_offset + hop.n_time)
            throw std::out_of_range("hop_matrix: trajectory span insufficient");
        for (const auto& tap : hop.taps) {
            m(r, r + l_max - 1 - tap.delay) = tap.trajectory(t - hop.time_offset);
        }
    }
    return m;
}

RelaySystem draw_system(const std::vector<std::vector<HopChannelSpec>>& hop_specs,
                        double noise_power, int n_subcarriers, int cp_len,
                        std::mt19937_64& rng) {
    if (hop_specs.empty()) throw std::invalid_argument("draw_system: no links");
    const int n_hops = static_cast<int>(hop_specs.front().size());
    if (n_hops < 2) throw std::invalid_argument("draw_system: need at least two hops");

    RelaySystem sys;
    sys.n_links = static_cast<int>(hop_specs.size());
    sys.n_hops = n_hops;
    sys.dest_noise_power = noise_power;

    for (const auto& link_specs : hop_specs) {
        if (static_cast<int>(link_specs.size()) != n_hops)
            throw std::invalid_argument("draw_system: ragged hop counts");
        std::vector<int> spans;
        for (const auto& s : link_specs) spans.push_back(s.max_delay);
        const std::vector<int> offsets = hop_output_offsets(spans);

        std::vector<HopChannelRealization> link;
        for (int rho = 0; rho < n_hops; ++rho) {
            link.push_back(draw_hop(link_specs[rho], n_subcarriers - offsets[rho],
                                    offsets[rho], n_subcarriers, rng));
        }
        sys.hops.push_back(std::move(link));
        sys.relay_gains.emplace_back(n_hops - 1, 1.0 / std::sqrt(1.0 + noise_power));
        sys.relay_noise_powers.emplace_back(n_hops - 1, noise_power);
    }

    if (sys.composite_len() > cp_len)
        throw std::invalid_argument("draw_system: composite channel exceeds CP length");
    return sys;
}

CompositeChannel composite_channel(const RelaySystem& system, int n_subcarriers) {
    const int n = n_subcarriers;
    const int len = system.composite_len();
    if (len > n) throw std::invalid_argument("composite_channel: length exceeds N");

    CompositeChannel out;
    out.length = len;
    out.taps = CMat::Zero(n, len);

    for (int k = 0; k < system.n_links; ++k) {
        const auto& link = system.hops[k];
        const std::vector<int> spans = delay_spans_of(link);
        const std::vector<int> offsets = hop_output_offsets(spans);

        // Running composite response through hop rho, rows indexed by
        // time - offsets[rho].
        int width = spans[0];
        CMat comp(n - offsets[0], width);
        for (int i = 0; i < comp.rows(); ++i) {
            const int t = offsets[0] + i;
            for (int l = 0; l < width; ++l) comp(i, l) = link[0].at(t, l);
        }

        for (int rho = 1; rho < system.n_hops; ++rho) {
            const int new_width = width + spans[rho] - 1;
            CMat next = CMat::Zero(n - offsets[rho], new_width);
            for (int i = 0; i < next.rows(); ++i) {
                const int t = offsets[rho] + i;
                for (const auto& tap : link[rho].taps) {
                    const cplx h = tap.trajectory(t - link[rho].time_offset);
                    const int row_prev = t - tap.delay - offsets[rho - 1];
                    for (int l2 = 0; l2 < width; ++l2) {
                        next(i, tap.delay + l2) += h * comp(row_prev, l2);
                    }
                }
            }
            comp.swap(next);
            width = new_width;
        }

        double gain = 1.0;
        for (double g : system.relay_gains[k]) gain *= g;
        out.taps.leftCols(width) += gain * comp;  // offsets.back() == 0
    }

    out.circulant_form = CMat::Zero(n, n);
    for (int t = 0; t < n; ++t) {
        for (int l = 0; l < len; ++l) {
            out.circulant_form(t, (t - l + n) % n) += out.taps(t, l);
        }
    }
    return out;
}

PropagateResult propagate(const OfdmFrameSpec& frame, const FreqSymbol& x,
                          const RelaySystem& system, std::mt19937_64& rng) {
    const int n = frame.n_subcarriers;
    if (x.values.size() != n) throw std::invalid_argument("propagate: symbol length mismatch");
    if (system.composite_len() > frame.cp_len)
        throw std::invalid_argument("propagate: composite channel exceeds CP length");

    // CP-extended source stream over [-cp_len, n-1].
    const CVec s = frame.dft.adjoint() * x.values;
    CVec s_ext(n + frame.cp_len);
    for (int i = 0; i < s_ext.size(); ++i) {
        s_ext(i) = s(((i - frame.cp_len) % n + n) % n);
    }

    CVec sig_dest = CVec::Zero(n);
    CVec noise_dest = CVec::Zero(n);

    for (int k = 0; k < system.n_links; ++k) {
        const auto& link = system.hops[k];
        const std::vector<int> offsets = hop_output_offsets(delay_spans_of(link));

        CVec sig = convolve_stream(link[0], s_ext, -frame.cp_len, offsets[0],
                                   n - offsets[0]);
        CVec noise = draw_awgn(n - offsets[0], system.relay_noise_powers[k][0], rng);

        for (int rho = 1; rho < system.n_hops; ++rho) {
            const double gain = system.relay_gains[k][rho - 1];
            sig *= gain;
            noise *= gain;
            CVec sig_next = convolve_stream(link[rho], sig, offsets[rho - 1],
                                            offsets[rho], n - offsets[rho]);
            CVec noise_next = convolve_stream(link[rho], noise, offsets[rho - 1],
                                              offsets[rho], n - offsets[rho]);
            if (rho < system.n_hops - 1) {
                noise_next += draw_awgn(n - offsets[rho], system.relay_noise_powers[k][rho], rng);
            }
            sig.swap(sig_next);
            noise.swap(noise_next);
        }
        sig_dest += sig;
        noise_dest += noise;
    }
    noise_dest += draw_awgn(n, system.dest_noise_power, rng);

    PropagateResult out;
    out.truth = composite_channel(system, n);
    out.y_freq = frame.dft * (sig_dest + noise_dest);
    out.v_freq = frame.dft * noise_dest;
    return out;
}

} // namespace relayvi
