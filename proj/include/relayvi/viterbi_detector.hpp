#ifndef RELAYVI_VITERBI_DETECTOR_HPP
#define RELAYVI_VITERBI_DETECTOR_HPP

#include <cstddef>
#include <vector>

#include "relayvi/ofdm_frame.hpp"
#include "relayvi/types.hpp"

namespace relayvi {

/// Band of half-width kappa stored row-wise: rows(r, j) = D(r, r-kappa+j)
/// for r-kappa+j in [0, N-1], zero elsewhere. Wrap entries are discarded;
/// the frame's forced-zero edge symbols make them irrelevant.
struct BandedMatrix {
    int kappa = 0;
    CMat rows;  // N x (2*kappa+1)
};

/// The detector objective's matrices: the posterior-mean channel plus the
/// eigenvalue-weighted spread matrices of the posterior covariance.
struct BandedSet {
    int kappa = 0;
    BandedMatrix center;
    std::vector<double> lambda;
    std::vector<BandedMatrix> spread;
};

BandedMatrix banded_projection(const CMat& d, int kappa);

/// Assembles a BandedSet, dropping eigenpairs with
/// lambda_j < spread_rel_threshold * lambda_max.
BandedSet make_banded_set(const CMat& d_center, const RVec& lambda,
                          const std::vector<CMat>& d_spread, int kappa,
                          double spread_rel_threshold = 1e-12);

/// Branch metric at trellis step n (row r = n-kappa): window holds the
/// 2*kappa+1 symbols aligned to columns n-2*kappa .. n; out-of-range
/// columns are ignored.
double branch_metric(const CVec& window, int n, const BandedSet& banded,
                     const CVec& y);

/// Full objective ||Bc x||^2 + sum_j lambda_j ||Bj x||^2 - 2 Re{y^H Bc x}
/// on the banded matrices; the sum of branch metrics over all rows.
double banded_objective(const CVec& x_full, const BandedSet& banded, const CVec& y);

/// Exact minimizer of the banded objective over constellation sequences,
/// with pilots and forced-zero edges pinned. Returns the data vector
/// (length N_d, zeros at forced edges).
CVec detect(const CVec& y, const BandedSet& banded, const OfdmFrameSpec& spec);

/// Largest per-step state count of the detect() trellis for this frame.
std::size_t max_state_count(const OfdmFrameSpec& spec, int kappa);

} // namespace relayvi

#endif
