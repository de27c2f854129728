#ifndef RELAYVI_VI_ESTIMATOR_HPP
#define RELAYVI_VI_ESTIMATOR_HPP

#include <functional>

#include "relayvi/bem.hpp"
#include "relayvi/init_ls.hpp"
#include "relayvi/ofdm_frame.hpp"
#include "relayvi/types.hpp"

namespace relayvi {

/// Gamma hyperprior parameters; uninformative by default.
struct ViHyperParams {
    double a = 1e-6;
    double b = 1e-6;
    double c = 1e-6;
    double d = 1e-6;
};

struct ViEig {
    RVec lambda;  // kept eigenvalues of sigma_mu
    CMat xi;      // matching eigenvectors, one per column
};

/// Variational posterior over the active basis columns:
///   Q(mu)   = CN(m_mu, sigma_mu)
///   Q(alpha_j) = Gamma(a_t(j), b_t(j))
///   Q(beta) = Gamma(c_t, d_t)
///   Q(x_d)  = delta at x_d_hat
/// x_hat caches the assembled full symbol E_p x_p + E_d x_d_hat.
struct ViState {
    BemBasis basis;
    CVec m_mu;
    CMat sigma_mu;
    RVec a_t, b_t;
    double c_t = 1.0, d_t = 1.0;
    CVec x_d_hat;
    CVec x_hat;
    ViHyperParams hyper;
    ViEig eig;  // refreshed by the data step
};

ViState make_initial_state(const InitBundle& init, const BemBasis& basis,
                           const OfdmFrameSpec& frame, const ViHyperParams& hyper = {});

/// sigma_mu = (diag(a_t/b_t) + (c_t/d_t) G^H G)^{-1},
/// m_mu = (c_t/d_t) sigma_mu G^H y, with G = G[x_hat].
void update_channel_posterior(ViState& state, const CVec& y);

/// a_t(j) = a + 1, b_t(j) = b + |m_mu(j)|^2 + sigma_mu(j,j).
void update_alpha(ViState& state);

/// c_t = c + N, d_t = d + y^H y - 2 Re{y^H G m} + Tr{G^H G (m m^H + sigma)}.
void update_noise(ViState& state, const CVec& y);

/// Drops column j when |m_mu(j)|^2 + sigma_mu(j,j) < threshold, shrinking
/// all posterior blocks and the active column set coherently. At least one
/// column always survives.
void prune(ViState& state, double threshold = 1e-10);
void prune(ViState& state, const RVec& per_column_threshold);

/// Eigenpairs of sigma_mu with eigenvalues below eigenvalue_floor truncated.
ViEig eigendecompose_sigma(const ViState& state, double eigenvalue_floor = 1e-14);

/// Closed-form variational free energy (additive constants dropped, so
/// values are comparable only at a fixed active set).
double free_energy(const ViState& state, const CVec& y, const ViHyperParams& hyper);

/// The x_d-dependent free-energy slice Tr{G^H G (m m^H + sigma)} - 2 Re{y^H G m},
/// evaluated densely. Used to accept or reject the banded Viterbi candidate.
double data_slice_objective(const ViState& state, const CVec& y);

struct ViRunOptions {
    int n_iters = 10;
    int kappa = 3;
    double prune_abs = 1e-10;
    // The paper-order absolute threshold cannot fire at finite SNR
    // (sigma_mu(j,j) >= 1/(max alpha + beta ||x||^2) stays far above it),
    // so the loop also prunes columns whose posterior power falls below
    // prune_noise_factor noise units (d_t/c_t)/(G^H G)_{jj}.
    double prune_noise_factor = 2.5;
    double spread_rel_threshold = 1e-12;
    bool guard_data_step = true;
    ViHyperParams hyper{};
    // (iteration, state after the iteration's updates, free energy)
    std::function<void(int, const ViState&, double)> diagnostics;
};

/// One iteration of the coordinate updates in fixed order:
/// channel posterior, alpha, Viterbi data step, noise, prune.
void vi_iterate(ViState& state, const CVec& y, const OfdmFrameSpec& frame,
                const ViRunOptions& opts);

/// Runs n_iters iterations from the LS initialization.
ViState run(const CVec& y, const OfdmFrameSpec& frame, const BemBasis& basis,
            const InitBundle& init, const ViRunOptions& opts = {});

} // namespace relayvi

#endif
