#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relayvi/special.hpp"

using namespace relayvi;

TEST_CASE("digamma matches high-precision references") {
    // Reference values computed with 30-digit arithmetic.
    CHECK(digamma(0.5) == doctest::Approx(-1.9635100260214234794).epsilon(1e-12));
    CHECK(digamma(1.0) == doctest::Approx(-0.57721566490153286061).epsilon(1e-12));
    CHECK(digamma(1.000001) == doctest::Approx(-0.5772140199686680682).epsilon(1e-12));
    CHECK(digamma(2.0) == doctest::Approx(0.42278433509846713939).epsilon(1e-12));
    CHECK(digamma(3.5) == doctest::Approx(1.1031566406452431872).epsilon(1e-12));
    CHECK(digamma(10.0) == doctest::Approx(2.2517525890667211076).epsilon(1e-12));
    CHECK(digamma(128.000001) == doctest::Approx(4.8481189355307365354).epsilon(1e-12));
    CHECK(digamma(1e-6) == doctest::Approx(-1000000.5772140199687).epsilon(1e-12));
    CHECK(digamma(0.001) == doctest::Approx(-1000.5755719318103005).epsilon(1e-12));
}

TEST_CASE("digamma recurrence identity psi(x+1) = psi(x) + 1/x") {
    for (double x : {0.1, 0.7, 1.3, 4.2, 9.9, 55.0}) {
        CHECK(digamma(x + 1.0) == doctest::Approx(digamma(x) + 1.0 / x).epsilon(1e-12));
    }
}

TEST_CASE("digamma rejects nonpositive arguments") {
    CHECK_THROWS_AS(digamma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(digamma(-1.5), std::invalid_argument);
}

TEST_CASE("bessel_j0 matches tabulated values to 1e-10") {
    CHECK(bessel_j0(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bessel_j0(0.1) == doctest::Approx(0.99750156206604003228).epsilon(1e-10));
    CHECK(bessel_j0(0.5) == doctest::Approx(0.93846980724081290423).epsilon(1e-10));
    CHECK(bessel_j0(1.0) == doctest::Approx(0.76519768655796655145).epsilon(1e-10));
    CHECK(bessel_j0(2.0) == doctest::Approx(0.22389077914123566805).epsilon(1e-10));
    CHECK(bessel_j0(5.0) == doctest::Approx(-0.17759677131433830435).epsilon(1e-10));
    CHECK(bessel_j0(10.0) == doctest::Approx(-0.2459357644513483352).epsilon(1e-10));
    // First zero.
    CHECK(std::abs(bessel_j0(2.404825557695773)) < 1e-10);
}
