#include "relayvi/viterbi_detector.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace relayvi {

namespace {

constexpr std::size_t kMaxStates = std::size_t{1} << 22;

// Per-position symbol alphabets: pilots and forced-zero edge data are pinned.
std::vector<std::vector<cplx>> position_domains(const OfdmFrameSpec& spec) {
    std::vector<std::vector<cplx>> dom(spec.n_subcarriers);
    for (int i = 0; i < spec.n_pilots(); ++i) {
        dom[spec.pilot_indices[i]] = {spec.pilot_values(i)};
    }
    for (int i = 0; i < spec.n_data(); ++i) {
        if (spec.is_forced_zero_data(i)) {
            dom[spec.data_indices[i]] = {cplx(0.0, 0.0)};
        } else {
            dom[spec.data_indices[i]] = spec.constellation;
        }
    }
    return dom;
}

// Quadratic-form coefficients of one observation row r over its in-band
// columns [c0, c1]: metric(v) = v^H A v - 2 Re{g . v}.
struct RowQuad {
    int c0 = 0;
    int width = 0;
    CMat a;
    CVec g;
};

RowQuad build_row_quad(int r, const BandedSet& banded, const CVec& y) {
    const int n = static_cast<int>(banded.center.rows.rows());
    const int kappa = banded.kappa;
    RowQuad q;
    q.c0 = std::max(0, r - kappa);
    const int c1 = std::min(n - 1, r + kappa);
    q.width = c1 - q.c0 + 1;

    CVec rv(q.width);
    for (int i = 0; i < q.width; ++i) {
        rv(i) = banded.center.rows(r, q.c0 + i - r + kappa);
    }
    q.a = rv.conjugate() * rv.transpose();
    q.g = std::conj(y(r)) * rv;

    CVec sv(q.width);
    for (std::size_t j = 0; j < banded.spread.size(); ++j) {
        for (int i = 0; i < q.width; ++i) {
            sv(i) = banded.spread[j].rows(r, q.c0 + i - r + kappa);
        }
        q.a.noalias() += banded.lambda[j] * (sv.conjugate() * sv.transpose());
    }
    return q;
}

double row_quad_eval(const RowQuad& q, const cplx* v) {
    cplx quad = 0.0;
    for (int i = 0; i < q.width; ++i) {
        if (v[i] == cplx(0.0, 0.0)) continue;
        cplx acc = 0.0;
        for (int j = 0; j < q.width; ++j) acc += q.a(i, j) * v[j];
        quad += std::conj(v[i]) * acc;
    }
    double lin = 0.0;
    for (int i = 0; i < q.width; ++i) {
        lin += std::real(q.g(i) * v[i]);
    }
    return std::real(quad) - 2.0 * lin;
}

} // namespace

BandedMatrix banded_projection(const CMat& d, int kappa) {
    if (d.rows() != d.cols()) throw std::invalid_argument("banded_projection: square matrix required");
    const int n = static_cast<int>(d.rows());
    if (kappa < 0 || 2 * kappa + 1 > n)
        throw std::invalid_argument("banded_projection: kappa too large for N");
    BandedMatrix out;
    out.kappa = kappa;
    out.rows = CMat::Zero(n, 2 * kappa + 1);
    for (int r = 0; r < n; ++r) {
        for (int j = 0; j < 2 * kappa + 1; ++j) {
            const int c = r - kappa + j;
            if (c >= 0 && c < n) out.rows(r, j) = d(r, c);
        }
    }
    return out;
}

BandedSet make_banded_set(const CMat& d_center, const RVec& lambda,
                          const std::vector<CMat>& d_spread, int kappa,
                          double spread_rel_threshold) {
    if (lambda.size() != static_cast<Eigen::Index>(d_spread.size()))
        throw std::invalid_argument("make_banded_set: lambda/spread mismatch");
    BandedSet set;
    set.kappa = kappa;
    set.center = banded_projection(d_center, kappa);
    const double lam_max = lambda.size() ? lambda.maxCoeff() : 0.0;
    for (Eigen::Index j = 0; j < lambda.size(); ++j) {
        if (lambda(j) < spread_rel_threshold * lam_max) continue;
        set.lambda.push_back(lambda(j));
        set.spread.push_back(banded_projection(d_spread[j], kappa));
    }
    return set;
}

double branch_metric(const CVec& window, int n, const BandedSet& banded,
                     const CVec& y) {
    const int kappa = banded.kappa;
    if (window.size() != 2 * kappa + 1)
        throw std::invalid_argument("branch_metric: window must hold 2*kappa+1 symbols");
    const int r = n - kappa;
    const int nn = static_cast<int>(banded.center.rows.rows());
    if (r < 0 || r >= nn) throw std::invalid_argument("branch_metric: step outside trellis");

    const RowQuad q = build_row_quad(r, banded, y);
    std::vector<cplx> v(q.width);
    for (int i = 0; i < q.width; ++i) {
        v[i] = window(q.c0 + i - (n - 2 * kappa));
    }
    return row_quad_eval(q, v.data());
}

double banded_objective(const CVec& x_full, const BandedSet& banded, const CVec& y) {
    const int n = static_cast<int>(x_full.size());
    double total = 0.0;
    std::vector<cplx> v;
    for (int r = 0; r < n; ++r) {
        const RowQuad q = build_row_quad(r, banded, y);
        v.resize(q.width);
        for (int i = 0; i < q.width; ++i) v[i] = x_full(q.c0 + i);
        total += row_quad_eval(q, v.data());
    }
    return total;
}

std::size_t max_state_count(const OfdmFrameSpec& spec, int kappa) {
    const auto dom = position_domains(spec);
    const int n = spec.n_subcarriers;
    std::size_t best = 0;
    for (int pos = 0; pos < n; ++pos) {
        std::size_t count = 1;
        for (int p = std::max(0, pos - 2 * kappa + 1); p <= pos; ++p) {
            count *= dom[p].size();
        }
        best = std::max(best, count);
    }
    return best;
}

CVec detect(const CVec& y, const BandedSet& banded, const OfdmFrameSpec& spec) {
    const int n = spec.n_subcarriers;
    const int kappa = banded.kappa;
    if (y.size() != n) throw std::invalid_argument("detect: observation length mismatch");
    if (2 * kappa + 1 > n) throw std::invalid_argument("detect: kappa too large for N");
    if (kappa > 0 && spec.zero_edge_count < std::min(kappa, spec.n_data() / 2))
        throw std::invalid_argument("detect: frame lacks the forced-zero trellis edges");
    if (max_state_count(spec, kappa) > kMaxStates)
        throw std::invalid_argument("detect: trellis state budget exceeded");

    const auto dom = position_domains(spec);
    std::vector<int> radix(n);
    for (int p = 0; p < n; ++p) radix[p] = static_cast<int>(dom[p].size());

    std::vector<RowQuad> rq;
    rq.reserve(n);
    for (int r = 0; r < n; ++r) rq.push_back(build_row_quad(r, banded, y));

    const auto window_start = [&](int pos) { return std::max(0, pos - 2 * kappa + 1); };
    const double inf = std::numeric_limits<double>::infinity();

    // Step 0: states enumerate dom[0].
    std::vector<double> prev(radix[0], 0.0);
    std::vector<std::vector<std::int32_t>> bp(n);
    std::vector<cplx> win(2 * kappa + 1);
    std::vector<cplx> sym(2 * kappa + 1);

    for (int pos = 1; pos < n; ++pos) {
        std::size_t keep_mod = 1;
        for (int p = window_start(pos); p <= pos - 1; ++p) keep_mod *= radix[p];
        const std::size_t n_states = keep_mod * radix[pos];
        std::vector<double> cur(n_states, inf);
        bp[pos].assign(n_states, -1);

        const int ws_old = window_start(pos - 1);
        const int n_old = pos - ws_old;  // symbols held by an old state
        const int emit_row = pos - kappa;
        const RowQuad* q = (emit_row >= 0) ? &rq[emit_row] : nullptr;

        for (std::size_t os = 0; os < prev.size(); ++os) {
            if (prev[os] == inf) continue;
            // Decode the old window, oldest first.
            std::size_t rem = os;
            for (int p = pos - 1; p >= ws_old; --p) {
                sym[p - ws_old] = dom[p][rem % radix[p]];
                rem /= radix[p];
            }
            const std::size_t suffix = os % keep_mod;
            for (int s = 0; s < radix[pos]; ++s) {
                double m = prev[os];
                if (q) {
                    // Row emit_row spans columns [q->c0, pos]; all but the
                    // last are inside the old window.
                    const int w = q->width;
                    for (int i = 0; i < w - 1; ++i) {
                        win[i] = sym[q->c0 + i - ws_old];
                    }
                    win[w - 1] = dom[pos][s];
                    m += row_quad_eval(*q, win.data());
                }
                const std::size_t ns = suffix * radix[pos] + s;
                if (m < cur[ns]) {
                    cur[ns] = m;
                    bp[pos][ns] = static_cast<std::int32_t>(os);
                }
            }
        }
        prev.swap(cur);
    }

    // Closing rows N-kappa .. N-1 depend only on the final window.
    const int ws_final = window_start(n - 1);
    std::size_t best_state = 0;
    double best_metric = inf;
    for (std::size_t st = 0; st < prev.size(); ++st) {
        if (prev[st] == inf) continue;
        std::size_t rem = st;
        for (int p = n - 1; p >= ws_final; --p) {
            sym[p - ws_final] = dom[p][rem % radix[p]];
            rem /= radix[p];
        }
        double m = prev[st];
        for (int r = std::max(0, n - kappa); r < n; ++r) {
            const RowQuad& q2 = rq[r];
            for (int i = 0; i < q2.width; ++i) win[i] = sym[q2.c0 + i - ws_final];
            m += row_quad_eval(q2, win.data());
        }
        if (m < best_metric) {
            best_metric = m;
            best_state = st;
        }
    }
    if (best_metric == inf) throw std::runtime_error("detect: empty trellis");

    // Backtrack symbol indices.
    std::vector<int> choice(n);
    std::size_t st = best_state;
    for (int pos = n - 1; pos >= 1; --pos) {
        choice[pos] = static_cast<int>(st % radix[pos]);
        st = static_cast<std::size_t>(bp[pos][st]);
    }
    choice[0] = static_cast<int>(st);

    CVec x_d = CVec::Zero(spec.n_data());
    for (int i = 0; i < spec.n_data(); ++i) {
        x_d(i) = dom[spec.data_indices[i]][choice[spec.data_indices[i]]];
    }
    return x_d;
}

} // namespace relayvi
