#include "relayvi/init_ls.hpp"

#include <cstdio>
#include <stdexcept>

namespace relayvi {

namespace {

// Hermitian solve with a ridge fallback when the normal matrix is close to
// singular (condition estimated from the diagonal of the LDLT factor).
CVec solve_normal_equations(CMat a, const CVec& rhs) {
    Eigen::LDLT<CMat> ldlt(a);
    bool degenerate = ldlt.info() != Eigen::Success;
    if (!degenerate) {
        const RVec d = ldlt.vectorD().real();
        const double dmax = d.maxCoeff();
        const double dmin = d.minCoeff();
        degenerate = !(dmin > 0.0) || dmax / dmin > 1e10;
    }
    if (degenerate) {
        std::fprintf(stderr, "init_ls: near-singular normal equations, adding 1e-8 ridge\n");
        a.diagonal().array() += 1e-8;
        ldlt.compute(a);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("init_ls: normal equations unsolvable");
    }
    return ldlt.solve(rhs);
}

} // namespace

CVec ls_channel(const CVec& y, const OfdmFrameSpec& spec, const BemBasis& basis_v1) {
    const int np = spec.n_pilots();
    const int m = basis_v1.n_active();
    if (np < m)
        throw std::invalid_argument("ls_channel: fewer pilot rows than unknowns");
    if (y.size() != spec.n_subcarriers)
        throw std::invalid_argument("ls_channel: observation length mismatch");

    const FreqSymbol pilots_only = assemble(spec, CVec::Zero(spec.n_data()), spec.pilot_values);
    const CMat g = operator_G(pilots_only, basis_v1);

    CMat gp(np, m);
    CVec yp(np);
    for (int i = 0; i < np; ++i) {
        gp.row(i) = g.row(spec.pilot_indices[i]);
        yp(i) = y(spec.pilot_indices[i]);
    }
    return solve_normal_equations(gp.adjoint() * gp, gp.adjoint() * yp);
}

CVec ls_equalize(const CVec& y, const CVec& mu_hat, const OfdmFrameSpec& spec,
                 const BemBasis& basis_v1) {
    const CMat d = operator_D(mu_hat, basis_v1);
    const FreqSymbol pilots_only = assemble(spec, CVec::Zero(spec.n_data()), spec.pilot_values);
    const CVec y_clean = y - d * pilots_only.values;

    CMat dd(spec.n_subcarriers, spec.n_data());
    for (int i = 0; i < spec.n_data(); ++i) {
        dd.col(i) = d.col(spec.data_indices[i]);
    }
    return solve_normal_equations(dd.adjoint() * dd, dd.adjoint() * y_clean);
}

CVec quantize(const CVec& x_hat, const OfdmFrameSpec& spec) {
    if (x_hat.size() != spec.n_data())
        throw std::invalid_argument("quantize: length mismatch");
    CVec out(spec.n_data());
    for (int i = 0; i < spec.n_data(); ++i) {
        if (spec.is_forced_zero_data(i)) {
            out(i) = 0.0;
            continue;
        }
        int best = 0;
        double best_d2 = std::norm(x_hat(i) - spec.constellation[0]);
        for (int k = 1; k < static_cast<int>(spec.constellation.size()); ++k) {
            const double d2 = std::norm(x_hat(i) - spec.constellation[k]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = k;
            }
        }
        out(i) = spec.constellation[best];
    }
    return out;
}

double estimate_noise_power(const CVec& y, const CVec& x_d0, const CVec& mu_hat,
                            const OfdmFrameSpec& spec, const BemBasis& basis_v1) {
    const FreqSymbol x0 = assemble(spec, x_d0, spec.pilot_values);
    const CVec resid = y - operator_G(x0, basis_v1) * mu_hat;
    return resid.squaredNorm() / spec.n_subcarriers;
}

InitBundle make_init(const CVec& y, const OfdmFrameSpec& spec, const BemBasis& basis_v1) {
    InitBundle init;
    init.mu0 = ls_channel(y, spec, basis_v1);
    init.x_d0 = quantize(ls_equalize(y, init.mu0, spec, basis_v1), spec);
    init.noise_power0 = estimate_noise_power(y, init.x_d0, init.mu0, spec, basis_v1);
    if (init.noise_power0 <= 0.0) init.noise_power0 = 1e-12;
    return init;
}

} // namespace relayvi
