#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "relayvi/dsc_channel.hpp"
#include "relayvi/special.hpp"
#include "test_support.hpp"

using namespace relayvi;

TEST_CASE("forced selection when the pool is exhausted") {
    HopChannelSpec spec{2, 2, {0, 1}, 0.1};
    std::mt19937_64 rng(1);
    const auto hop = draw_hop(spec, 16, 0, 128, rng);
    REQUIRE(hop.taps.size() == 2);
    CHECK(hop.taps[0].delay == 0);
    CHECK(hop.taps[1].delay == 1);
}

TEST_CASE("zero Doppler freezes every trajectory") {
    HopChannelSpec spec{3, 2, {0, 1, 2}, 0.0};
    std::mt19937_64 rng(2);
    const auto hop = draw_hop(spec, 64, -4, 128, rng);
    for (const auto& tap : hop.taps) {
        CHECK((tap.trajectory.array() - tap.trajectory(0)).abs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("tap pairs are uniform over the pool (multinomial oracle)") {
    HopChannelSpec spec{3, 2, {0, 1, 2}, 0.0};
    std::mt19937_64 rng(3);
    std::map<std::pair<int, int>, int> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const auto hop = draw_hop(spec, 2, 0, 128, rng);
        counts[{hop.taps[0].delay, hop.taps[1].delay}]++;
    }
    REQUIRE(counts.size() == 3);
    const double p = 1.0 / 3.0;
    const double sigma = std::sqrt(p * (1 - p) * draws);
    for (const auto& [pair, c] : counts) {
        CHECK(std::abs(c - p * draws) < 3.0 * sigma);
    }
}

TEST_CASE("one tap carries the maximum Doppler, the rest stay in (0, max]") {
    HopChannelSpec spec{4, 3, {0, 1, 2, 3}, 0.15};
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto hop = draw_hop(spec, 4, 0, 128, rng);
        int at_max = 0;
        for (const auto& tap : hop.taps) {
            CHECK(tap.doppler_norm > 0.0);
            CHECK(tap.doppler_norm <= 0.15);
            if (tap.doppler_norm == 0.15) ++at_max;
        }
        CHECK(at_max >= 1);
    }
}

TEST_CASE("exponential power profile, unit total") {
    HopChannelSpec spec{4, 3, {0, 1, 2, 3}, 0.1};
    std::mt19937_64 rng(5);
    const auto hop = draw_hop(spec, 4, 0, 128, rng);
    double total = 0.0;
    for (const auto& tap : hop.taps) total += tap.power;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hop.taps[0].power / hop.taps[1].power == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(hop.taps[1].power / hop.taps[2].power == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("draw_hop rejects bad pools") {
    std::mt19937_64 rng(6);
    HopChannelSpec empty{2, 1, {}, 0.1};
    CHECK_THROWS_AS(draw_hop(empty, 8, 0, 128, rng), std::invalid_argument);
    HopChannelSpec too_many{2, 3, {0, 1}, 0.1};
    CHECK_THROWS_AS(draw_hop(too_many, 8, 0, 128, rng), std::invalid_argument);
}

TEST_CASE("f_d = 0 gives a constant with variance equal to the power") {
    std::mt19937_64 rng(7);
    const double power = 0.7;
    double acc = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const CVec h = sample_trajectory(0.0, power, 8, 1.0, rng);
        CHECK((h.array() - h(0)).abs().maxCoeff() < 1e-9);
        acc += std::norm(h(0));
    }
    CHECK(acc / draws == doctest::Approx(power).epsilon(0.05));
}

TEST_CASE("empirical autocovariance follows the Bessel profile") {
    std::mt19937_64 rng(8);
    const double f_ts = 0.15 / 128.0;  // normalized Doppler 0.15 at N=128
    const double power = 1.0;
    const int n = 24, draws = 10000;
    CMat samples(n, draws);
    for (int i = 0; i < draws; ++i) {
        samples.col(i) = sample_trajectory(f_ts, power, n, 1.0, rng);
    }
    // lag 0 within 3%
    const double lag0 = samples.squaredNorm() / (n * draws);
    CHECK(lag0 == doctest::Approx(power).epsilon(0.03));
    // lags 1..10 within 5% of power * J0(2 pi f k Ts)
    for (int k = 1; k <= 10; ++k) {
        cplx acc = 0.0;
        long count = 0;
        for (int i = 0; i < draws; ++i) {
            for (int t = 0; t + k < n; ++t) {
                acc += samples(t + k, i) * std::conj(samples(t, i));
                ++count;
            }
        }
        const double expect = power * bessel_j0(2.0 * kPi * f_ts * k);
        const cplx got = acc / double(count);
        CHECK(std::abs(got - expect) < 0.05 * power);
        // Hermitian symmetry: conj at lag -k equals lag +k.
        cplx acc_neg = 0.0;
        for (int i = 0; i < draws; ++i) {
            for (int t = k; t < n; ++t) acc_neg += samples(t - k, i) * std::conj(samples(t, i));
        }
        CHECK(std::abs(std::conj(acc_neg / double(count)) - got) < 1e-12);
    }
}

TEST_CASE("distinct taps are statistically independent") {
    HopChannelSpec spec{2, 2, {0, 1}, 0.12};
    std::mt19937_64 rng(9);
    const int draws = 4000;
    cplx cross = 0.0;
    double p0 = 0.0, p1 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const auto hop = draw_hop(spec, 8, 0, 128, rng);
        cross += hop.taps[0].trajectory(3) * std::conj(hop.taps[1].trajectory(3));
        p0 += std::norm(hop.taps[0].trajectory(3));
        p1 += std::norm(hop.taps[1].trajectory(3));
    }
    const double scale = std::sqrt(p0 / draws) * std::sqrt(p1 / draws);
    CHECK(std::abs(cross / double(draws)) < 5.0 / std::sqrt(double(draws)) * scale);
}

TEST_CASE("trajectory spans cover the requested offset") {
    HopChannelSpec spec{2, 1, {1}, 0.05};
    std::mt19937_64 rng(10);
    const auto hop = draw_hop(spec, 20, -4, 128, rng);
    CHECK(hop.time_offset == -4);
    CHECK(hop.n_time == 20);
    CHECK_NOTHROW(hop.at(-4, 1));
    CHECK_NOTHROW(hop.at(15, 1));
    CHECK_THROWS_AS(hop.at(16, 1), std::out_of_range);
    CHECK(hop.at(0, 0) == cplx(0.0, 0.0));  // no tap at delay 0
}
