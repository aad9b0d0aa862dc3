#include "coalesce/stats.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace coalesce::stats {

CategoricalSample::CategoricalSample(std::uint64_t alphabet_size) : alphabet_size_(alphabet_size)
{
    if (alphabet_size == 0) {
        throw std::invalid_argument("categorical sample: empty alphabet");
    }
}

void CategoricalSample::add(std::uint64_t symbol, std::uint64_t count)
{
    if (symbol >= alphabet_size_) {
        throw std::out_of_range("categorical sample: symbol outside the alphabet");
    }
    if (count == 0) {
        return;
    }
    counts_[symbol] += count;
    total_ += count;
}

void CategoricalSample::merge(const CategoricalSample& other)
{
    if (other.alphabet_size_ != alphabet_size_) {
        throw std::invalid_argument("categorical sample: alphabets differ");
    }
    for (const auto& [symbol, count] : other.counts_) {
        counts_[symbol] += count;
    }
    total_ += other.total_;
}

std::uint64_t CategoricalSample::count(std::uint64_t symbol) const
{
    const auto it = counts_.find(symbol);
    return it == counts_.end() ? 0 : it->second;
}

double CategoricalSample::frequency(std::uint64_t symbol) const
{
    return total_ == 0 ? 0.0 : static_cast<double>(count(symbol)) / static_cast<double>(total_);
}

namespace {

void require_same_alphabet(const CategoricalSample& p, const CategoricalSample& q)
{
    if (p.alphabet_size() != q.alphabet_size()) {
        throw std::invalid_argument("two-sample comparison: alphabets differ");
    }
}

std::vector<std::uint64_t> joint_support(const CategoricalSample& p, const CategoricalSample& q)
{
    std::vector<std::uint64_t> symbols;
    for (const auto& [symbol, count] : p.counts()) {
        symbols.push_back(symbol);
    }
    for (const auto& [symbol, count] : q.counts()) {
        if (p.count(symbol) == 0) {
            symbols.push_back(symbol);
        }
    }
    std::sort(symbols.begin(), symbols.end());
    return symbols;
}

} // namespace

double tv_distance(const CategoricalSample& p, const CategoricalSample& q)
{
    require_same_alphabet(p, q);
    double sum = 0.0;
    for (std::uint64_t symbol : joint_support(p, q)) {
        sum += std::fabs(p.frequency(symbol) - q.frequency(symbol));
    }
    return 0.5 * sum;
}

double tv_scale(const CategoricalSample& p, const CategoricalSample& q)
{
    require_same_alphabet(p, q);
    const auto n = static_cast<double>(std::min(p.total(), q.total()));
    const auto k = static_cast<double>(joint_support(p, q).size());
    return n == 0.0 ? 0.0 : std::sqrt(k / n);
}

double chi_square_survival(double statistic, double degrees_of_freedom)
{
    if (statistic <= 0.0) {
        return 1.0;
    }
    return boost::math::gamma_q(0.5 * degrees_of_freedom, 0.5 * statistic);
}

TestReport two_sample_test(const CategoricalSample& p, const CategoricalSample& q,
                           const Thresholds& thresholds)
{
    require_same_alphabet(p, q);
    if (p.total() < thresholds.min_total || q.total() < thresholds.min_total) {
        throw std::invalid_argument("two_sample_test: each sample needs at least " +
                                    std::to_string(thresholds.min_total) + " draws");
    }

    const auto n1 = static_cast<double>(p.total());
    const auto n2 = static_cast<double>(q.total());
    const double share1 = n1 / (n1 + n2);
    const double share2 = n2 / (n1 + n2);

    struct Cell {
        std::uint64_t symbol;
        double first;
        double second;
    };
    std::vector<Cell> cells;
    for (std::uint64_t symbol : joint_support(p, q)) {
        cells.push_back({symbol, static_cast<double>(p.count(symbol)),
                         static_cast<double>(q.count(symbol))});
    }
    // Most frequent first; ties by symbol keeps the order reproducible.
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return a.first + a.second > b.first + b.second;
    });

    auto expected_ok = [&](const Cell& c) {
        const double combined = c.first + c.second;
        return std::min(share1, share2) * combined >= thresholds.min_expected;
    };

    std::vector<Cell> pooled;
    Cell tail{0, 0.0, 0.0};
    for (const Cell& c : cells) {
        if (tail.first + tail.second == 0.0 && expected_ok(c)) {
            pooled.push_back(c);
        } else {
            tail.first += c.first;
            tail.second += c.second;
        }
    }
    if (tail.first + tail.second > 0.0) {
        if (expected_ok(tail) || pooled.empty()) {
            pooled.push_back(tail);
        } else {
            pooled.back().first += tail.first;
            pooled.back().second += tail.second;
        }
    }
    if (pooled.size() < 2) {
        throw std::invalid_argument("two_sample_test: fewer than two cells after pooling");
    }

    TestReport report;
    const double ratio = std::sqrt(n2 / n1);
    for (const Cell& c : pooled) {
        const double diff = ratio * c.first - c.second / ratio;
        report.statistic += diff * diff / (c.first + c.second);
    }
    report.cells = pooled.size();
    report.degrees_of_freedom = static_cast<double>(pooled.size() - 1);
    report.p_value = chi_square_survival(report.statistic, report.degrees_of_freedom);
    report.tv = tv_distance(p, q);
    report.tv_bound = tv_scale(p, q);
    report.support = joint_support(p, q).size();
    report.n_first = p.total();
    report.n_second = q.total();
    report.pass = report.p_value > thresholds.p_value &&
                  report.tv <= thresholds.tv_multiplier * report.tv_bound;
    return report;
}

nlohmann::ordered_json to_json(const TestReport& report)
{
    nlohmann::ordered_json j;
    j["statistic"] = report.statistic;
    j["dof"] = report.degrees_of_freedom;
    j["p_value"] = report.p_value;
    j["tv"] = report.tv;
    j["tv_bound"] = report.tv_bound;
    j["support"] = report.support;
    j["cells"] = report.cells;
    j["n"] = {report.n_first, report.n_second};
    j["verdict"] = report.pass ? "pass" : "fail";
    j["seed"] = report.seed;
    j["config"] = report.config;
    return j;
}

} // namespace coalesce::stats
