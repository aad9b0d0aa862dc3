#pragma once

// Two-sample machinery for checking that two simulated laws agree.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

namespace coalesce::stats {

/// Empirical law over a finite alphabet of symbols [0, alphabet_size).
/// Counts are kept sparsely; merging is associative and commutative, so
/// partial samples from parallel workers can be combined in any grouping.
class CategoricalSample {
public:
    CategoricalSample() = default;
    explicit CategoricalSample(std::uint64_t alphabet_size);

    void add(std::uint64_t symbol, std::uint64_t count = 1);
    void merge(const CategoricalSample& other);

    std::uint64_t alphabet_size() const noexcept { return alphabet_size_; }
    std::uint64_t total() const noexcept { return total_; }
    std::uint64_t count(std::uint64_t symbol) const;
    const std::map<std::uint64_t, std::uint64_t>& counts() const noexcept { return counts_; }

    double frequency(std::uint64_t symbol) const;

private:
    std::uint64_t alphabet_size_ = 0;
    std::uint64_t total_ = 0;
    std::map<std::uint64_t, std::uint64_t> counts_;
};

struct Thresholds {
    double p_value = 1e-3;
    double tv_multiplier = 3.0;
    double min_expected = 5.0;
    std::uint64_t min_total = 1000;
};

struct TestReport {
    double statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    double tv = 0.0;
    double tv_bound = 0.0;     // calibrated sqrt(K / N) scale
    std::size_t support = 0;   // K: symbols seen in either sample
    std::size_t cells = 0;     // cells after pooling
    std::uint64_t n_first = 0;
    std::uint64_t n_second = 0;
    bool pass = false;
    std::uint64_t seed = 0;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

// Half the L1 distance between the empirical frequencies.
double tv_distance(const CategoricalSample& p, const CategoricalSample& q);

// sqrt(K / N) with K the joint support size and N the smaller total.
double tv_scale(const CategoricalSample& p, const CategoricalSample& q);

// Pearson two-sample chi-square on cells pooled to the expected-count floor,
// plus the TV check. Throws std::invalid_argument on mismatched alphabets,
// totals below thresholds.min_total, or fewer than two cells after pooling.
TestReport two_sample_test(const CategoricalSample& p, const CategoricalSample& q,
                           const Thresholds& thresholds = {});

// Upper tail of the chi-square distribution.
double chi_square_survival(double statistic, double degrees_of_freedom);

nlohmann::ordered_json to_json(const TestReport& report);

// Mean and standard error of a sample, accumulated in index order.
struct MeanEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::uint64_t n = 0;
};

template <class Range>
MeanEstimate mean_estimate(const Range& values)
{
    MeanEstimate out;
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        ++out.n;
    }
    if (out.n == 0) {
        return out;
    }
    out.mean = sum / static_cast<double>(out.n);
    double squares = 0.0;
    for (double v : values) {
        squares += (v - out.mean) * (v - out.mean);
    }
    if (out.n > 1) {
        out.standard_error =
            std::sqrt(squares / static_cast<double>(out.n - 1) / static_cast<double>(out.n));
    }
    return out;
}

} // namespace coalesce::stats
