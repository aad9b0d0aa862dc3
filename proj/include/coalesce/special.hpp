#pragma once

// Airy function on the nonnegative axis and the closed-form stationary laws
// of coalescing Brownian motion with Poisson immigration.

namespace coalesce::special {

// Gamma(1/3) and Gamma(2/3) to long double precision.
inline constexpr long double kGammaOneThird = 2.678938534707747633655692940974677644L;
inline constexpr long double kGammaTwoThirds = 1.354117939426400416945288028154513785L;

// Ai and Ai' switch from the Maclaurin series to the large-x expansion here.
inline constexpr double kAiryCrossover = 6.0;

enum class AiryMethod { series, asymptotic };

struct AiryEval {
    double x = 0.0;
    double value = 0.0;
    AiryMethod method = AiryMethod::series;
};

// Ai(x) for x >= 0. Throws std::domain_error for negative or NaN x.
double airy_ai(double x);
AiryEval airy_ai_eval(double x);

// Ai'(x) for x >= 0.
double airy_ai_prime(double x);

// The two branches, exposed so their agreement at the crossover can be
// checked. Both accept any x >= 0; the asymptotic one is only accurate for
// large x.
long double airy_ai_series(long double x);
long double airy_ai_asymptotic(long double x);
long double airy_ai_prime_series(long double x);
long double airy_ai_prime_asymptotic(long double x);

/// Probability that the stationary point process puts no point in an
/// interval of the given length: Ai(lambda^{1/3} length) / Ai(0).
double stationary_avoidance(double lambda, double length);

/// Expected number of stationary points per unit length,
/// (3 lambda)^{1/3} Gamma(2/3) / Gamma(1/3).
double stationary_intensity(double lambda);

/// Same quantity through the Airy derivative, -lambda^{1/3} Ai'(0) / Ai(0).
double stationary_intensity_from_airy(double lambda);

} // namespace coalesce::special
