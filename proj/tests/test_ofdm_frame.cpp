#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relayvi/ofdm_frame.hpp"
#include "test_support.hpp"

using namespace relayvi;

TEST_CASE("paper pilot pattern: 14 clusters on 128 subcarriers") {
    const OfdmFrameSpec spec = build_pilot_pattern(128, 14, 1, 3.0);
    CHECK(spec.n_pilots() == 42);
    CHECK(spec.n_data() == 86);
    // Every cluster is zero guard, Gaussian center, zero guard.
    int nonzero = 0;
    for (int i = 0; i < spec.n_pilots(); ++i) {
        if (std::abs(spec.pilot_values(i)) > 0.0) ++nonzero;
    }
    CHECK(nonzero == 14);
    for (int c = 0; c < 14; ++c) {
        const int start = c * 128 / 14;
        CHECK(std::binary_search(spec.pilot_indices.begin(), spec.pilot_indices.end(), start));
        CHECK(std::binary_search(spec.pilot_indices.begin(), spec.pilot_indices.end(), start + 1));
        CHECK(std::binary_search(spec.pilot_indices.begin(), spec.pilot_indices.end(), start + 2));
    }
}

TEST_CASE("degenerate full-pilot frame") {
    const OfdmFrameSpec spec = build_pilot_pattern(6, 2, 1, 3.0);
    CHECK(spec.n_pilots() == 6);
    CHECK(spec.n_data() == 0);
    CHECK(spec.pilot_indices == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("pilot values reproduce bit-exactly under a fixed seed") {
    const OfdmFrameSpec a = build_pilot_pattern(128, 14, 99, 3.0);
    const OfdmFrameSpec b = build_pilot_pattern(128, 14, 99, 3.0);
    CHECK((a.pilot_values - b.pilot_values).cwiseAbs().maxCoeff() == 0.0);
    const OfdmFrameSpec c = build_pilot_pattern(128, 14, 100, 3.0);
    CHECK((a.pilot_values - c.pilot_values).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("cluster preconditions") {
    CHECK_THROWS_AS(build_pilot_pattern(8, 3, 1, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(build_pilot_pattern(128, 14, 1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_pilot_pattern(128, 14, 1, 3.0, 100), std::invalid_argument);
}

TEST_CASE("pilot power matches the requested ratio within 5%") {
    double acc = 0.0;
    long count = 0;
    for (int trial = 0; trial < 8000; ++trial) {
        const OfdmFrameSpec spec = build_pilot_pattern(128, 14, 1000 + trial, 3.0);
        for (int i = 0; i < spec.n_pilots(); ++i) {
            const double p = std::norm(spec.pilot_values(i));
            if (p > 0.0) {
                acc += p;
                ++count;
            }
        }
    }
    CHECK(count == 8000 * 14);
    CHECK(acc / count == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("assemble scatters by index") {
    OfdmFrameSpec spec = build_pilot_pattern(16, 2, 5, 3.0);
    const int nd = spec.n_data();

    SUBCASE("all zero input gives the zero vector") {
        const FreqSymbol x = assemble(spec, CVec::Zero(nd), CVec::Zero(spec.n_pilots()));
        CHECK(x.values.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("unit placement at the first data subcarrier") {
        CVec d = CVec::Zero(nd);
        d(0) = 1.0;
        const FreqSymbol x = assemble(spec, d, CVec::Zero(spec.n_pilots()));
        for (int k = 0; k < 16; ++k) {
            CHECK(std::abs(x.values(k)) == (k == spec.data_indices[0] ? 1.0 : 0.0));
        }
    }

    SUBCASE("matches the dense E_d x_d + E_p x_p oracle") {
        std::mt19937_64 rng(3);
        CMat ed = CMat::Zero(16, nd), ep = CMat::Zero(16, spec.n_pilots());
        for (int i = 0; i < nd; ++i) ed(spec.data_indices[i], i) = 1.0;
        for (int i = 0; i < spec.n_pilots(); ++i) ep(spec.pilot_indices[i], i) = 1.0;
        for (int trial = 0; trial < 20; ++trial) {
            const CVec d = test::random_cvec(nd, rng);
            const CVec p = test::random_cvec(spec.n_pilots(), rng);
            const CVec expect = ed * d + ep * p;
            CHECK((assemble(spec, d, p).values - expect).cwiseAbs().maxCoeff() < 1e-14);
        }
    }

    SUBCASE("forced-zero edges override data and are marked known") {
        spec.zero_edge_count = 2;
        const CVec ones = CVec::Ones(nd);
        const FreqSymbol x = assemble(spec, ones, CVec::Zero(spec.n_pilots()));
        CHECK(std::abs(x.values(spec.data_indices[0])) == 0.0);
        CHECK(std::abs(x.values(spec.data_indices[1])) == 0.0);
        CHECK(std::abs(x.values(spec.data_indices[nd - 1])) == 0.0);
        CHECK(x.known_mask[spec.data_indices[0]] == 1);
        CHECK(x.known_mask[spec.data_indices[2]] == 0);
    }

    SUBCASE("length mismatch rejected") {
        CHECK_THROWS_AS(assemble(spec, CVec::Zero(nd + 1), CVec::Zero(spec.n_pilots())),
                        std::invalid_argument);
    }
}

TEST_CASE("modulate: DC subcarrier gives a constant time signal with CP") {
    OfdmFrameSpec spec = build_pilot_pattern(16, 0, 1, 3.0);
    spec.cp_len = 4;
    CVec d = CVec::Zero(spec.n_data());
    d(0) = 1.0;  // with no pilots, data index 0 is subcarrier 0
    const CVec s = modulate(spec, assemble(spec, d, CVec::Zero(0)));
    CHECK(s.size() == 20);
    for (int i = 0; i < 20; ++i) {
        CHECK(std::abs(s(i) - cplx(0.25, 0.0)) < 1e-12);
    }
}

TEST_CASE("modulate/demodulate round trip and Parseval") {
    OfdmFrameSpec spec = build_pilot_pattern(64, 6, 7, 3.0);
    spec.cp_len = 8;
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const FreqSymbol x = assemble(spec, test::random_cvec(spec.n_data(), rng),
                                      test::random_cvec(spec.n_pilots(), rng));
        const CVec s = modulate(spec, x);
        CHECK(s.size() == 72);
        CHECK(s.head(8).isApprox(s.tail(8), 1e-12));
        const CVec back = demodulate(spec, s.tail(64));
        CHECK((back - x.values).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(x.values.squaredNorm() == doctest::Approx(s.tail(64).squaredNorm()).epsilon(1e-12));
    }
}

TEST_CASE("demodulate: time impulse gives a flat spectrum") {
    OfdmFrameSpec spec = build_pilot_pattern(32, 0, 1, 3.0);
    CVec imp = CVec::Zero(32);
    imp(0) = 1.0;
    const CVec spectrum = demodulate(spec, imp);
    for (int k = 0; k < 32; ++k) {
        CHECK(std::abs(spectrum(k)) == doctest::Approx(1.0 / std::sqrt(32.0)).epsilon(1e-12));
    }
}

TEST_CASE("DFT is unitary up to N = 1024") {
    for (int n : {8, 128, 512, 1024}) {
        const CMat f = dft_matrix(n);
        const double err = (f * f.adjoint() - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
        CHECK(err < 1e-12);
    }
}

TEST_CASE("cached DFT matches the naive definition") {
    const CMat f = dft_matrix(64);
    CHECK((f - test::naive_dft(64)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("assemble gathers back to the inputs (bijection on index sets)") {
    const OfdmFrameSpec spec = build_pilot_pattern(128, 14, 2, 3.0);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const CVec d = test::random_cvec(spec.n_data(), rng);
        const CVec p = test::random_cvec(spec.n_pilots(), rng);
        const FreqSymbol x = assemble(spec, d, p);
        for (int i = 0; i < spec.n_data(); ++i) CHECK(x.values(spec.data_indices[i]) == d(i));
        for (int i = 0; i < spec.n_pilots(); ++i) CHECK(x.values(spec.pilot_indices[i]) == p(i));
    }
}

TEST_CASE("QPSK constellation has unit average power") {
    double p = 0.0;
    for (cplx c : qpsk_constellation()) p += std::norm(c);
    CHECK(p / 4.0 == doctest::Approx(1.0).epsilon(1e-15));
}
