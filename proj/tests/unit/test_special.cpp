#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "../oracles/oracles.hpp"
#include "coalesce/special.hpp"

namespace sp = coalesce::special;

TEST_CASE("Airy function against the series oracle")
{
    double worst = 0.0;
    for (int k = 0; k <= 600; ++k) {
        const double x = 0.01 * k;
        worst = std::max(worst, std::abs(sp::airy_ai(x) - static_cast<double>(oracle::airy_series(x))));
    }
    CHECK(worst <= 1e-10);
    CHECK(sp::airy_ai(0.0) == doctest::Approx(0.355028053887817239).epsilon(1e-15));
    CHECK(sp::airy_ai_prime(0.0) == doctest::Approx(-0.258819403792806798).epsilon(1e-15));
    CHECK(sp::airy_ai(1.0) == doctest::Approx(0.135292416312881416).epsilon(1e-14));
    CHECK_THROWS_AS(sp::airy_ai(-1.0), std::domain_error);
}

TEST_CASE("Airy derivative against the series oracle")
{
    for (double x : {0.0, 0.5, 1.0, 2.5, 4.0, 5.5}) {
        CHECK(sp::airy_ai_prime(x) ==
              doctest::Approx(static_cast<double>(oracle::airy_prime_series(x))).epsilon(1e-7));
    }
}

TEST_CASE("Airy function is positive and decreasing")
{
    double previous = sp::airy_ai(0.0);
    for (int k = 1; k <= 400; ++k) {
        const double value = sp::airy_ai(0.05 * k);
        CHECK(value > 0.0);
        CHECK(value < previous);
        previous = value;
    }
    CHECK(sp::airy_ai(30.0) < 1e-40);
}

TEST_CASE("series and asymptotic branches agree at the crossover")
{
    const long double x = sp::kAiryCrossover;
    CHECK(std::abs(static_cast<double>(sp::airy_ai_series(x) - sp::airy_ai_asymptotic(x))) <= 1e-12);
    CHECK(std::abs(static_cast<double>(sp::airy_ai_prime_series(x) -
                                       sp::airy_ai_prime_asymptotic(x))) <= 1e-11);
    CHECK(sp::airy_ai_eval(5.0).method == sp::AiryMethod::series);
    CHECK(sp::airy_ai_eval(7.0).method == sp::AiryMethod::asymptotic);
}

TEST_CASE("gamma constants")
{
    CHECK(static_cast<double>(sp::kGammaOneThird) ==
          doctest::Approx(std::tgamma(1.0 / 3.0)).epsilon(1e-15));
    CHECK(static_cast<double>(sp::kGammaTwoThirds) ==
          doctest::Approx(std::tgamma(2.0 / 3.0)).epsilon(1e-15));
    const long double reflection = sp::kGammaOneThird * sp::kGammaTwoThirds;
    CHECK(std::abs(static_cast<double>(reflection - 2.0L * std::numbers::pi_v<long double> /
                                                        std::sqrt(3.0L))) <= 1e-12);
}

TEST_CASE("stationary avoidance")
{
    CHECK(sp::stationary_avoidance(1.0, 0.0) == 1.0);
    CHECK(sp::stationary_avoidance(0.0, 3.0) == 1.0);
    const double ratio = static_cast<double>(oracle::airy_series(1.0) / oracle::airy_series(0.0));
    CHECK(sp::stationary_avoidance(1.0, 1.0) == doctest::Approx(ratio).epsilon(1e-12));
    CHECK(sp::stationary_avoidance(1.0, 1.0) == doctest::Approx(0.3811).epsilon(1e-3));
    // Depends on lambda and length only through lambda^{1/3} length.
    CHECK(sp::stationary_avoidance(8.0, 0.5) ==
          doctest::Approx(sp::stationary_avoidance(1.0, 1.0)).epsilon(1e-13));
    double previous = 1.0;
    for (int k = 1; k <= 50; ++k) {
        const double v = sp::stationary_avoidance(1.0, 0.2 * k);
        CHECK(v < previous);
        previous = v;
    }
    CHECK_THROWS_AS(sp::stationary_avoidance(-1.0, 1.0), std::domain_error);
}

TEST_CASE("stationary intensity")
{
    CHECK(sp::stationary_intensity(0.0) == 0.0);
    CHECK(sp::stationary_intensity(1.0) == doctest::Approx(oracle::intensity(1.0)).epsilon(1e-14));
    CHECK(sp::stationary_intensity(1.0) == doctest::Approx(0.7290112).epsilon(1e-7));
    CHECK(sp::stationary_intensity(8.0) ==
          doctest::Approx(2.0 * sp::stationary_intensity(1.0)).epsilon(1e-14));
    for (double lambda : {0.1, 1.0, 10.0, 123.0}) {
        CHECK(std::abs(sp::stationary_intensity(lambda) - sp::stationary_intensity_from_airy(lambda)) <=
              1e-10);
        // Slope of the avoidance function at zero length.
        const double d = 1e-7;
        CHECK((1.0 - sp::stationary_avoidance(lambda, d)) / d ==
              doctest::Approx(sp::stationary_intensity(lambda)).epsilon(1e-5));
    }
    CHECK_THROWS_AS(sp::stationary_intensity(-1.0), std::domain_error);
}
