#include "relayvi/bem.hpp"

#include <cmath>
#include <stdexcept>

namespace relayvi {

BemBasis make_basis(int n, int v, double f_upper_norm, int l_cp) {
    if (n < 1 || v < 1 || l_cp < 1 || f_upper_norm < 0.0)
        throw std::invalid_argument("make_basis: bad arguments");

    BemBasis b;
    b.n = n;
    b.v = v;
    // Guard against upward rounding when v * f_upper_norm is an exact integer.
    b.q_max = static_cast<int>(std::ceil(v * f_upper_norm - 1e-12));
    if (b.q_max < 0) b.q_max = 0;
    b.l_span = l_cp;
    b.active.resize(b.total_cols());
    for (int j = 0; j < b.total_cols(); ++j) b.active[j] = j;

    const int nq = 2 * b.q_max + 1;
    b.phi.resize(n, nq);
    for (int qi = 0; qi < nq; ++qi) {
        const double freq = static_cast<double>(qi - b.q_max) / (static_cast<double>(v) * n);
        for (int t = 0; t < n; ++t) {
            const double phase = 2.0 * kPi * freq * t;
            b.phi(t, qi) = cplx(std::cos(phase), std::sin(phase));
        }
    }

    b.dft = dft_matrix(n);
    b.ring = (b.dft * b.phi) / std::sqrt(static_cast<double>(n));

    b.wl.resize(n, l_cp);
    for (int m = 0; m < n; ++m) {
        for (int l = 0; l < l_cp; ++l) {
            const double phase = -2.0 * kPi * static_cast<double>(static_cast<long long>(m) * l % n) / n;
            b.wl(m, l) = cplx(std::cos(phase), std::sin(phase));
        }
    }
    return b;
}

CMat coeffs_to_taps(const BemBasis& basis, const CVec& mu) {
    if (mu.size() != basis.n_active())
        throw std::invalid_argument("coeffs_to_taps: coefficient length mismatch");
    CMat taps = CMat::Zero(basis.n, basis.l_span);
    for (int i = 0; i < basis.n_active(); ++i) {
        const int col = basis.active[i];
        taps.col(basis.l_of(col)) += mu(i) * basis.phi.col(basis.q_of(col) + basis.q_max);
    }
    return taps;
}

CMat operator_G(const CVec& x_values, const BemBasis& basis) {
    if (x_values.size() != basis.n)
        throw std::invalid_argument("operator_G: symbol length mismatch");
    const int n = basis.n;
    const CVec t = basis.dft.adjoint() * x_values;

    CMat u(n, basis.n_active());
    for (int i = 0; i < basis.n_active(); ++i) {
        const int col = basis.active[i];
        const int qi = basis.q_of(col) + basis.q_max;
        const int l = basis.l_of(col);
        // u = phi_q .* (t cyclically delayed by l)
        for (int m = 0; m < n; ++m) {
            u(m, i) = basis.phi(m, qi) * t((m - l + n) % n);
        }
    }
    return basis.dft * u;
}

CMat operator_G(const FreqSymbol& x, const BemBasis& basis) {
    return operator_G(x.values, basis);
}

CMat operator_D(const CVec& mu, const BemBasis& basis) {
    if (mu.size() != basis.n_active())
        throw std::invalid_argument("operator_D: coefficient length mismatch");
    const int n = basis.n;
    const int nq = 2 * basis.q_max + 1;

    // Per-q frequency response d_q(m) = sum_l mu_q(l) exp(-j 2 pi m l / n).
    CMat dq = CMat::Zero(n, nq);
    std::vector<char> q_used(nq, 0);
    for (int i = 0; i < basis.n_active(); ++i) {
        const int col = basis.active[i];
        const int qi = basis.q_of(col) + basis.q_max;
        dq.col(qi) += mu(i) * basis.wl.col(basis.l_of(col));
        q_used[qi] = 1;
    }

    // D = sum_q B_q diag(d_q) with B_q circulant: B_q(m, c) = ring((m-c) mod n, q).
    CMat d = CMat::Zero(n, n);
    for (int qi = 0; qi < nq; ++qi) {
        if (!q_used[qi]) continue;
        const auto b = basis.ring.col(qi);
        for (int c = 0; c < n; ++c) {
            const cplx w = dq(c, qi);
            if (w == cplx(0.0, 0.0)) continue;
            auto dst = d.col(c);
            // dst(m) += w * b((m - c) mod n), split at the wrap point
            const int head = n - c;
            dst.tail(head).noalias() += w * b.head(head);
            dst.head(c).noalias() += w * b.tail(c);
        }
    }
    return d;
}

double channel_mse(const CMat& estimate_taps, const CMat& truth_taps) {
    if (estimate_taps.rows() != truth_taps.rows())
        throw std::invalid_argument("channel_mse: row mismatch");
    const int rows = static_cast<int>(truth_taps.rows());
    const int width = static_cast<int>(std::max(estimate_taps.cols(), truth_taps.cols()));
    CMat diff = CMat::Zero(rows, width);
    diff.leftCols(estimate_taps.cols()) = estimate_taps;
    diff.leftCols(truth_taps.cols()) -= truth_taps;
    const double denom = truth_taps.squaredNorm();
    if (denom == 0.0) throw std::invalid_argument("channel_mse: zero truth channel");
    return diff.squaredNorm() / denom;
}

} // namespace relayvi
