#include "coalesce/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace coalesce::special {
namespace {

// Ai(0) = 3^{-2/3} / Gamma(2/3) and -Ai'(0) = 3^{-1/3} / Gamma(1/3).
const long double kAiryC1 = 1.0L / (std::cbrt(9.0L) * kGammaTwoThirds);
const long double kAiryC2 = 1.0L / (std::cbrt(3.0L) * kGammaOneThird);

constexpr long double kStopRatio = 1e-16L;
constexpr int kMaxTerms = 200;

void require_nonnegative(double x)
{
    if (!(x >= 0.0)) {
        throw std::domain_error("Airy function evaluated off the nonnegative axis");
    }
}

// Sum of (-1)^k c_k / zeta^k with c_k from the u_k recurrence; stops at the
// smallest term of the divergent series.
template <class Coefficient>
long double asymptotic_sum(long double zeta, Coefficient coefficient)
{
    long double sum = 1.0L;
    long double u = 1.0L;
    long double power = 1.0L;
    long double previous = 1.0L;
    for (int k = 1; k < kMaxTerms; ++k) {
        u *= static_cast<long double>((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) /
             static_cast<long double>((2 * k - 1) * 216 * k);
        power /= zeta;
        const long double term = coefficient(k, u) * power;
        if (std::fabs(term) >= previous) {
            break;
        }
        sum += (k % 2 == 0) ? term : -term;
        previous = std::fabs(term);
        if (previous < 1e-20L) {
            break;
        }
    }
    return sum;
}

} // namespace

long double airy_ai_series(long double x)
{
    const long double cube = x * x * x;
    long double f_term = 1.0L;
    long double g_term = x;
    long double f = f_term;
    long double g = g_term;
    for (int k = 1; k < kMaxTerms; ++k) {
        f_term *= cube / static_cast<long double>((3 * k - 1) * (3 * k));
        g_term *= cube / static_cast<long double>((3 * k) * (3 * k + 1));
        f += f_term;
        g += g_term;
        if (f_term <= kStopRatio * f && g_term <= kStopRatio * g) {
            break;
        }
    }
    return kAiryC1 * f - kAiryC2 * g;
}

long double airy_ai_prime_series(long double x)
{
    const long double cube = x * x * x;
    long double f_term = x * x / 2.0L;
    long double g_term = 1.0L;
    long double f = f_term;
    long double g = g_term;
    for (int k = 2; k < kMaxTerms; ++k) {
        f_term *= cube / static_cast<long double>((3 * k - 1) * (3 * k - 3));
        g_term *= cube / static_cast<long double>((3 * k - 3) * (3 * k - 5));
        f += f_term;
        g += g_term;
        if (f_term <= kStopRatio * f && g_term <= kStopRatio * g) {
            break;
        }
    }
    return kAiryC1 * f - kAiryC2 * g;
}

long double airy_ai_asymptotic(long double x)
{
    const long double zeta = 2.0L / 3.0L * x * std::sqrt(x);
    const long double sum = asymptotic_sum(zeta, [](int, long double u) { return u; });
    return std::exp(-zeta) / (2.0L * std::sqrt(std::numbers::pi_v<long double>) *
                              std::pow(x, 0.25L)) *
           sum;
}

long double airy_ai_prime_asymptotic(long double x)
{
    const long double zeta = 2.0L / 3.0L * x * std::sqrt(x);
    const long double sum = asymptotic_sum(zeta, [](int k, long double u) {
        return -static_cast<long double>(6 * k + 1) / static_cast<long double>(6 * k - 1) * u;
    });
    return -std::pow(x, 0.25L) * std::exp(-zeta) /
           (2.0L * std::sqrt(std::numbers::pi_v<long double>)) * sum;
}

AiryEval airy_ai_eval(double x)
{
    require_nonnegative(x);
    if (x <= kAiryCrossover) {
        return {x, static_cast<double>(airy_ai_series(x)), AiryMethod::series};
    }
    return {x, static_cast<double>(airy_ai_asymptotic(x)), AiryMethod::asymptotic};
}

double airy_ai(double x)
{
    return airy_ai_eval(x).value;
}

double airy_ai_prime(double x)
{
    require_nonnegative(x);
    if (x <= kAiryCrossover) {
        return static_cast<double>(airy_ai_prime_series(x));
    }
    return static_cast<double>(airy_ai_prime_asymptotic(x));
}

double stationary_avoidance(double lambda, double length)
{
    if (lambda < 0.0 || length < 0.0) {
        throw std::domain_error("stationary_avoidance: lambda and length must be nonnegative");
    }
    return airy_ai(std::cbrt(lambda) * length) / static_cast<double>(kAiryC1);
}

double stationary_intensity(double lambda)
{
    if (lambda < 0.0) {
        throw std::domain_error("stationary_intensity: lambda must be nonnegative");
    }
    return static_cast<double>(std::cbrt(3.0L * lambda) * kGammaTwoThirds / kGammaOneThird);
}

double stationary_intensity_from_airy(double lambda)
{
    if (lambda < 0.0) {
        throw std::domain_error("stationary_intensity: lambda must be nonnegative");
    }
    return -std::cbrt(lambda) * airy_ai_prime(0.0) / airy_ai(0.0);
}

} // namespace coalesce::special
