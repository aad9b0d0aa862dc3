#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

namespace oracle {

// Ai(x) from the power series of y'' = x y, summed in long double.
// a_{k+3} = a_k / ((k + 2)(k + 3)), with a_0 = Ai(0), a_1 = Ai'(0).
inline long double airy_series(long double x, int terms = 60)
{
    const long double g13 = std::tgamma(1.0L / 3.0L);
    const long double g23 = std::tgamma(2.0L / 3.0L);
    const long double ai0 = 1.0L / (std::pow(3.0L, 2.0L / 3.0L) * g23);
    const long double aip0 = -1.0L / (std::pow(3.0L, 1.0L / 3.0L) * g13);
    long double f = ai0;      // even-family term, x^{3k}
    long double g = aip0 * x;  // odd-family term, x^{3k+1}
    long double sum = f + g;
    for (int k = 0; k < terms; ++k) {
        const long double n = 3.0L * k;
        f *= x * x * x / ((n + 2.0L) * (n + 3.0L));
        g *= x * x * x / ((n + 3.0L) * (n + 4.0L));
        sum += f + g;
    }
    return sum;
}

inline long double airy_prime_series(long double x, int terms = 60)
{
    const long double h = 1e-6L;
    return (airy_series(x + h, terms) - airy_series(x - h, terms)) / (2.0L * h);
}

// (3 lambda)^{1/3} Gamma(2/3) / Gamma(1/3).
inline double intensity(double lambda)
{
    return std::cbrt(3.0 * lambda) * std::tgamma(2.0 / 3.0) / std::tgamma(1.0 / 3.0);
}

// P(X = k) for X = Poisson(a) - Poisson(b), by the Bessel form.
inline double skellam(double a, double b, long k)
{
    if (a == 0.0 && b == 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    if (b == 0.0) {
        return k < 0 ? 0.0 : std::exp(-a + k * std::log(a) - std::lgamma(k + 1.0));
    }
    if (a == 0.0) {
        return k > 0 ? 0.0 : skellam(b, 0.0, -k);
    }
    const double nu = static_cast<double>(std::abs(k));
    return std::exp(-(a + b)) * std::pow(a / b, 0.5 * static_cast<double>(k)) *
           std::cyl_bessel_i(nu, 2.0 * std::sqrt(a * b));
}

// Probability that B with variance rate 2, B(0) = d0 > 0, B(h) = d1 > 0,
// dips below 0: ratio of the reflected and direct Gaussian densities.
inline double bridge_hit(double d0, double d1, double h)
{
    const double var = 2.0 * h;
    const double log_direct = -(d1 - d0) * (d1 - d0) / (2.0 * var);
    const double log_reflected = -(d1 + d0) * (d1 + d0) / (2.0 * var);
    return std::exp(log_reflected - log_direct);
}

// Exact law at time t of m ordered p-simple coalescing walks on a lattice
// (sites start[i] + integer shifts), by uniformization on the box
// |site - start| <= reach. States are sorted position vectors; a walker that
// lands on a neighbour's site merges with it.
class LatticeLaw {
public:
    using State = std::vector<long>;

    LatticeLaw(const std::vector<long>& start, double p, double t, long reach = 16)
    {
        const double rate = static_cast<double>(start.size());
        std::map<State, double> current{{start, 1.0}};
        std::map<State, double> sum;
        const double lt = rate * t;
        double weight = std::exp(-lt);
        const int terms = static_cast<int>(lt + 12.0 * std::sqrt(lt) + 40.0);
        const long lo = *std::min_element(start.begin(), start.end()) - reach;
        const long hi = *std::max_element(start.begin(), start.end()) + reach;
        for (int k = 0; k <= terms; ++k) {
            for (const auto& [s, q] : current) {
                sum[s] += weight * q;
            }
            std::map<State, double> next;
            for (const auto& [s, q] : current) {
                // Distinct sites move; stacked walkers move together.
                double stay = 1.0;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    if (i > 0 && s[i] == s[i - 1]) {
                        continue;
                    }
                    for (int dir : {+1, -1}) {
                        const double r = (dir > 0 ? p : 1.0 - p) / rate;
                        if (r == 0.0) {
                            continue;
                        }
                        State moved = s;
                        const long from = s[i];
                        const long to = from + dir;
                        if (to < lo || to > hi) {
                            continue;  // held at the boundary
                        }
                        for (std::size_t j = 0; j < s.size(); ++j) {
                            if (s[j] == from) {
                                moved[j] = to;
                            }
                        }
                        next[moved] += q * r;
                        stay -= r;
                    }
                }
                next[s] += q * stay;
            }
            current.swap(next);
            weight *= lt / static_cast<double>(k + 1);
        }
        law_ = std::move(sum);
    }

    const std::map<State, double>& law() const noexcept { return law_; }

    double total() const
    {
        double s = 0.0;
        for (const auto& [state, q] : law_) {
            s += q;
        }
        return s;
    }

private:
    std::map<State, double> law_;
};

} // namespace oracle
