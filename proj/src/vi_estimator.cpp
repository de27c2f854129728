#include "relayvi/vi_estimator.hpp"

#include <cstdio>
#include <stdexcept>

#include "relayvi/special.hpp"
#include "relayvi/viterbi_detector.hpp"

namespace relayvi {

namespace {

CMat gram(const CMat& g) { return g.adjoint() * g; }

// Tr{G^H G (m m^H + sigma)} without forming m m^H + sigma.
double quad_trace(const CMat& ghg, const CVec& m, const CMat& sigma) {
    const double mean_part = std::real(m.dot(ghg * m));  // m^H (G^H G) m
    const double cov_part = std::real(ghg.cwiseProduct(sigma.transpose()).sum());
    return mean_part + cov_part;
}

} // namespace

ViState make_initial_state(const InitBundle& init, const BemBasis& basis,
                           const OfdmFrameSpec& frame, const ViHyperParams& hyper) {
    if (basis.n_active() != basis.total_cols())
        throw std::invalid_argument("make_initial_state: basis must start fully active");

    ViState st;
    st.basis = basis;
    st.hyper = hyper;
    const int m = basis.total_cols();

    // Seed the coefficient mean from the CE-BEM estimate where the V=1
    // frequencies q/N land on the oversampled grid (only q=0 when V*|q| > Q);
    // the first posterior update overwrites this anyway.
    st.m_mu = CVec::Zero(m);
    const int m1 = static_cast<int>(init.mu0.size());
    const int q1_max = (m1 / basis.l_span - 1) / 2;
    for (int j = 0; j < m1; ++j) {
        const int q1 = j / basis.l_span - q1_max;
        const int l = j % basis.l_span;
        const int q = q1 * basis.v;
        if (std::abs(q) <= basis.q_max) {
            st.m_mu(basis.col_index(q, l)) = init.mu0(j);
        }
    }
    st.sigma_mu = CMat::Identity(m, m) / static_cast<double>(m);

    st.a_t = RVec::Ones(m);
    st.b_t = RVec::Constant(m, static_cast<double>(m));  // a0/b0 = 1/M
    st.c_t = 1.0;
    st.d_t = std::max(init.noise_power0, 1e-300);        // c0/d0 = 1/noise_power0

    st.x_d_hat = init.x_d0;
    st.x_hat = assemble(frame, init.x_d0, frame.pilot_values).values;
    return st;
}

void update_channel_posterior(ViState& state, const CVec& y) {
    const int m = state.basis.n_active();
    const CMat g = operator_G(state.x_hat, state.basis);
    const double beta = state.c_t / state.d_t;

    CMat precision = beta * gram(g);
    precision.diagonal() += (state.a_t.array() / state.b_t.array()).matrix().cast<cplx>();

    Eigen::LDLT<CMat> ldlt(precision);
    bool bad = ldlt.info() != Eigen::Success;
    if (!bad) {
        const RVec d = ldlt.vectorD().real();
        bad = !(d.minCoeff() > 0.0) || d.maxCoeff() / d.minCoeff() > 1e12;
    }
    if (bad) {
        std::fprintf(stderr, "vi: ill-conditioned posterior precision, adding 1e-12 jitter\n");
        precision.diagonal().array() += 1e-12;
        ldlt.compute(precision);
        if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().real().minCoeff() > 0.0))
            throw std::runtime_error("vi: posterior precision not positive definite");
    }

    state.sigma_mu = ldlt.solve(CMat::Identity(m, m));
    state.sigma_mu = (state.sigma_mu + state.sigma_mu.adjoint()).eval() / 2.0;
    state.m_mu = beta * (state.sigma_mu * (g.adjoint() * y));
}

void update_alpha(ViState& state) {
    const int m = state.basis.n_active();
    state.a_t = RVec::Constant(m, state.hyper.a + 1.0);
    for (int j = 0; j < m; ++j) {
        state.b_t(j) = state.hyper.b + std::norm(state.m_mu(j)) +
                       std::real(state.sigma_mu(j, j));
    }
}

void update_noise(ViState& state, const CVec& y) {
    const CMat g = operator_G(state.x_hat, state.basis);
    const CMat ghg = gram(g);
    const int n = static_cast<int>(y.size());

    state.c_t = state.hyper.c + n;
    double d_new = state.hyper.d + y.squaredNorm() -
                   2.0 * std::real(y.dot(g * state.m_mu)) +
                   quad_trace(ghg, state.m_mu, state.sigma_mu);
    if (!(d_new > 0.0)) {
        std::fprintf(stderr, "vi: nonpositive noise rate %.3e, clamping\n", d_new);
        d_new = 1e-300;
    }
    state.d_t = d_new;
}

void prune(ViState& state, double threshold) {
    prune(state, RVec::Constant(state.basis.n_active(), threshold));
}

void prune(ViState& state, const RVec& per_column_threshold) {
    const int m = state.basis.n_active();
    if (per_column_threshold.size() != m)
        throw std::invalid_argument("prune: threshold length mismatch");

    std::vector<int> keep;
    int arg_max = 0;
    double p_max = -1.0;
    for (int j = 0; j < m; ++j) {
        const double p = std::norm(state.m_mu(j)) + std::real(state.sigma_mu(j, j));
        if (p > p_max) {
            p_max = p;
            arg_max = j;
        }
        if (p >= per_column_threshold(j)) keep.push_back(j);
    }
    if (keep.empty()) keep.push_back(arg_max);
    if (static_cast<int>(keep.size()) == m) return;

    const int mk = static_cast<int>(keep.size());
    CVec m_new(mk);
    CMat s_new(mk, mk);
    RVec a_new(mk), b_new(mk);
    std::vector<int> active_new(mk);
    for (int i = 0; i < mk; ++i) {
        m_new(i) = state.m_mu(keep[i]);
        a_new(i) = state.a_t(keep[i]);
        b_new(i) = state.b_t(keep[i]);
        active_new[i] = state.basis.active[keep[i]];
        for (int j = 0; j < mk; ++j) s_new(i, j) = state.sigma_mu(keep[i], keep[j]);
    }
    state.m_mu.swap(m_new);
    state.sigma_mu.swap(s_new);
    state.a_t.swap(a_new);
    state.b_t.swap(b_new);
    state.basis.active.swap(active_new);
    state.eig = ViEig{};
}

ViEig eigendecompose_sigma(const ViState& state, double eigenvalue_floor) {
    Eigen::SelfAdjointEigenSolver<CMat> eig(state.sigma_mu);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("vi: eigendecomposition of sigma_mu failed");
    const RVec& lam = eig.eigenvalues();
    int kept = 0;
    for (int j = 0; j < lam.size(); ++j) {
        if (lam(j) >= eigenvalue_floor) ++kept;
    }
    ViEig out;
    out.lambda.resize(kept);
    out.xi.resize(state.sigma_mu.rows(), kept);
    int at = 0;
    for (int j = 0; j < lam.size(); ++j) {
        if (lam(j) < eigenvalue_floor) continue;
        out.lambda(at) = lam(j);
        out.xi.col(at) = eig.eigenvectors().col(j);
        ++at;
    }
    return out;
}

double free_energy(const ViState& state, const CVec& y, const ViHyperParams& hyper) {
    const int m = state.basis.n_active();
    const int n = static_cast<int>(y.size());

    Eigen::LDLT<CMat> ldlt(state.sigma_mu);
    double log_det_sigma = 0.0;
    for (int j = 0; j < m; ++j) {
        log_det_sigma += std::log(std::real(ldlt.vectorD()(j)));
    }

    double f = -log_det_sigma;
    for (int j = 0; j < m; ++j) {
        const double at = state.a_t(j);
        const double bt = state.b_t(j);
        const double p = std::norm(state.m_mu(j)) + std::real(state.sigma_mu(j, j));
        const double psi_m_log = digamma(at) - std::log(bt);
        f += (at / bt) * p;
        f += at * std::log(bt) + (at - 1.0) * psi_m_log - at - std::lgamma(at);
        f -= hyper.a * std::log(hyper.b) + (hyper.a - 1.0) * psi_m_log -
             hyper.b * at / bt - std::lgamma(hyper.a);
        f -= psi_m_log;
    }

    const double psi_c = digamma(state.c_t) - std::log(state.d_t);
    f += state.c_t * std::log(state.d_t) + (state.c_t - 1.0) * psi_c - state.c_t -
         std::lgamma(state.c_t);
    f -= (hyper.c - 1.0) * psi_c - hyper.d * state.c_t / state.d_t;
    f -= n * psi_c;

    const CMat g = operator_G(state.x_hat, state.basis);
    const double fit = quad_trace(gram(g), state.m_mu, state.sigma_mu) + y.squaredNorm() -
                       2.0 * std::real(y.dot(g * state.m_mu));
    f += (state.c_t / state.d_t) * fit;
    // The delta-mixture term is zero: x_d_hat stays on the constellation.
    return f;
}

namespace {

double data_slice_for(const BemBasis& basis, const CVec& x_hat, const CVec& m,
                      const CMat& sigma, const CVec& y) {
    const CMat g = operator_G(x_hat, basis);
    return quad_trace(gram(g), m, sigma) - 2.0 * std::real(y.dot(g * m));
}

} // namespace

double data_slice_objective(const ViState& state, const CVec& y) {
    return data_slice_for(state.basis, state.x_hat, state.m_mu, state.sigma_mu, y);
}

void vi_iterate(ViState& state, const CVec& y, const OfdmFrameSpec& frame,
                const ViRunOptions& opts) {
    update_channel_posterior(state, y);
    update_alpha(state);

    // Data step: exact minimization of the banded objective, accepted only
    // if the dense slice does not increase (the banded approximation alone
    // cannot guarantee that).
    state.eig = eigendecompose_sigma(state);
    std::vector<CMat> spread;
    spread.reserve(state.eig.lambda.size());
    for (int j = 0; j < state.eig.lambda.size(); ++j) {
        spread.push_back(operator_D(state.eig.xi.col(j), state.basis));
    }
    const BandedSet banded =
        make_banded_set(operator_D(state.m_mu, state.basis), state.eig.lambda, spread,
                        opts.kappa, opts.spread_rel_threshold);
    const CVec candidate = detect(y, banded, frame);

    const CVec x_new = assemble(frame, candidate, frame.pilot_values).values;
    bool accept = true;
    if (opts.guard_data_step) {
        const double f_old = data_slice_objective(state, y);
        const double f_new =
            data_slice_for(state.basis, x_new, state.m_mu, state.sigma_mu, y);
        accept = f_new <= f_old + 1e-12 * std::max(1.0, std::abs(f_old));
    }
    if (accept) {
        state.x_d_hat = candidate;
        state.x_hat = x_new;
    }

    update_noise(state, y);

    // Prune on the posterior power, with the noise-referenced floor.
    const CMat g = operator_G(state.x_hat, state.basis);
    const RVec gdiag = gram(g).diagonal().real();
    RVec thresholds(state.basis.n_active());
    for (int j = 0; j < thresholds.size(); ++j) {
        const double noise_unit = (state.d_t / state.c_t) / std::max(gdiag(j), 1e-300);
        thresholds(j) = std::max(opts.prune_abs, opts.prune_noise_factor * noise_unit);
    }
    prune(state, thresholds);
}

ViState run(const CVec& y, const OfdmFrameSpec& frame, const BemBasis& basis,
            const InitBundle& init, const ViRunOptions& opts) {
    ViState state = make_initial_state(init, basis, frame, opts.hyper);
    for (int i = 1; i <= opts.n_iters; ++i) {
        vi_iterate(state, y, frame, opts);
        if (opts.diagnostics) {
            opts.diagnostics(i, state, free_energy(state, y, opts.hyper));
        }
    }
    return state;
}

} // namespace relayvi
