#ifndef RELAYVI_TEST_SUPPORT_HPP
#define RELAYVI_TEST_SUPPORT_HPP

#include <random>

#include "relayvi/bem.hpp"
#include "relayvi/ofdm_frame.hpp"
#include "relayvi/types.hpp"

namespace relayvi::test {

inline CVec random_cvec(int n, std::mt19937_64& rng, double stddev = 1.0) {
    std::normal_distribution<double> gauss(0.0, stddev / std::sqrt(2.0));
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = cplx(gauss(rng), gauss(rng));
    return v;
}

// Naive DFT matrix straight from the definition; oracle for the cached one.
inline CMat naive_dft(int n) {
    CMat f(n, n);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            f(m, k) = std::exp(cplx(0.0, -2.0 * kPi * m * k / n)) / std::sqrt(double(n));
        }
    }
    return f;
}

// Cyclic-shift matrix P(l) = [e_l, ..., e_{N-1}, e_0, ..., e_{l-1}].
inline CMat shift_matrix(int n, int l) {
    CMat p = CMat::Zero(n, n);
    for (int c = 0; c < n; ++c) p((c + l) % n, c) = 1.0;
    return p;
}

// Column-by-column G[x] via explicit F diag(phi_q) P(l) F^H products;
// independent of the production operator path.
inline CMat naive_operator_G(const CVec& x, const BemBasis& basis) {
    const int n = basis.n;
    const CMat f = naive_dft(n);
    CMat g(n, basis.n_active());
    for (int i = 0; i < basis.n_active(); ++i) {
        const int col = basis.active[i];
        const int q = basis.q_of(col);
        const int l = basis.l_of(col);
        CVec phi(n);
        for (int t = 0; t < n; ++t) {
            phi(t) = std::exp(cplx(0.0, 2.0 * kPi * q * t / (double(basis.v) * n)));
        }
        g.col(i) = f * (phi.asDiagonal() * (shift_matrix(n, l) * (f.adjoint() * x)));
    }
    return g;
}

// Random QPSK data respecting the frame's forced-zero edges.
inline CVec random_data(const OfdmFrameSpec& frame, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, int(frame.constellation.size()) - 1);
    CVec d = CVec::Zero(frame.n_data());
    for (int i = 0; i < frame.n_data(); ++i) {
        if (!frame.is_forced_zero_data(i)) d(i) = frame.constellation[pick(rng)];
    }
    return d;
}

} // namespace relayvi::test

#endif
