#ifndef RELAYVI_BEM_HPP
#define RELAYVI_BEM_HPP

#include <vector>

#include "relayvi/ofdm_frame.hpp"
#include "relayvi/types.hpp"

namespace relayvi {

/// Complex-exponential basis over the delay-Doppler plane: frequencies
/// q/(V*N) for |q| <= Q paired with cyclic delays 0..L-1. Coefficient
/// vectors are laid out q-major: column j <-> (q, l) with
/// j = (q+Q)*L + l. active_columns tracks the surviving subset.
struct BemBasis {
    int n = 0;       // subcarriers
    int v = 1;       // oversampling factor
    int q_max = 0;   // Q
    int l_span = 0;  // delay span (CP length)
    std::vector<int> active;  // sorted column ids in [0, total_cols)

    CMat phi;   // n x (2Q+1): phi(t, qi) = exp(j 2 pi (qi-Q) t / (v n))
    CMat ring;  // n x (2Q+1): first circulant column of F diag(phi_q) F^H
    CMat wl;    // n x l_span: wl(m, l) = exp(-j 2 pi m l / n)
    CMat dft;   // unitary DFT

    int total_cols() const { return (2 * q_max + 1) * l_span; }
    int n_active() const { return static_cast<int>(active.size()); }
    int q_of(int col) const { return col / l_span - q_max; }
    int l_of(int col) const { return col % l_span; }
    int col_index(int q, int l) const { return (q + q_max) * l_span + l; }
};

/// Q = ceil(v * f_upper_norm); all columns start active.
/// f_upper_norm is the composite Doppler bound in N*f*Ts units.
BemBasis make_basis(int n, int v, double f_upper_norm, int l_cp);

/// Tap trajectories N x L synthesized from coefficients on the active set.
CMat coeffs_to_taps(const BemBasis& basis, const CVec& mu);

/// N x |active| operator with column (q,l) = F diag(phi_q) P(l) F^H x.
CMat operator_G(const FreqSymbol& x, const BemBasis& basis);
CMat operator_G(const CVec& x_values, const BemBasis& basis);

/// Frequency-domain channel matrix D[mu] = F H F^H, dense N x N.
CMat operator_D(const CVec& mu, const BemBasis& basis);

/// Frobenius-ratio channel MSE ||est - truth||^2 / ||truth||^2 computed on
/// tap matrices (the cyclic diagonals of H are disjoint, so this equals the
/// ratio on the full matrices). Widths may differ; the narrower matrix is
/// zero-padded.
double channel_mse(const CMat& estimate_taps, const CMat& truth_taps);

} // namespace relayvi

#endif
