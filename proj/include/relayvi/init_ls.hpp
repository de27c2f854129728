#ifndef RELAYVI_INIT_LS_HPP
#define RELAYVI_INIT_LS_HPP

#include "relayvi/bem.hpp"
#include "relayvi/ofdm_frame.hpp"
#include "relayvi/types.hpp"

namespace relayvi {

/// Starting point for the iterative estimator: a CE-BEM (V=1) least-squares
/// channel fit from pilots, the quantized LS data estimate built on it, and
/// a residual-based noise-power seed. The implied initial posterior ratios
/// are a0/b0 = 1/M per coefficient and c0/d0 = 1/noise_power0.
struct InitBundle {
    CVec mu0;               // CE-BEM coefficients (V=1 layout)
    CVec x_d0;              // quantized data estimate, zeros at forced edges
    double noise_power0 = 0.0;
};

/// Pilot-row least squares: mu = (Gp^H Gp)^{-1} Gp^H y_p with G built on
/// the pilot-only symbol. Ill-conditioned normal equations get a 1e-8 ridge.
CVec ls_channel(const CVec& y, const OfdmFrameSpec& spec, const BemBasis& basis_v1);

/// LS equalization against D[mu_hat] after removing the pilot contribution.
CVec ls_equalize(const CVec& y, const CVec& mu_hat, const OfdmFrameSpec& spec,
                 const BemBasis& basis_v1);

/// Per-entry nearest constellation point (ties toward the smallest index);
/// forced-zero edge positions come back as exact zeros.
CVec quantize(const CVec& x_hat, const OfdmFrameSpec& spec);

/// Mean squared reconstruction residual ||y - G[x0] mu_hat||^2 / N.
double estimate_noise_power(const CVec& y, const CVec& x_d0, const CVec& mu_hat,
                            const OfdmFrameSpec& spec, const BemBasis& basis_v1);

/// Runs the full pipeline: ls_channel, ls_equalize, quantize, noise estimate.
InitBundle make_init(const CVec& y, const OfdmFrameSpec& spec, const BemBasis& basis_v1);

} // namespace relayvi

#endif
