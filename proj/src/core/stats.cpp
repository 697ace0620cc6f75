#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "errors.hpp"

namespace quansim {

namespace {

// Average ranks over tied |d| groups, doubled so they stay integers.
std::vector<long> doubled_average_ranks(const std::vector<double>& abs_diffs) {
    const std::size_t n = abs_diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return abs_diffs[i] < abs_diffs[j]; });
    std::vector<long> rank2(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && abs_diffs[order[j + 1]] == abs_diffs[order[i]]) ++j;
        // ranks i+1 .. j+1 share the average (i+j+2)/2; doubled it is i+j+2
        const long doubled = static_cast<long>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = doubled;
        i = j + 1;
    }
    return rank2;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw InvalidArgumentError("wilcoxon requires paired samples of equal length");
    }
    if (a.size() < 6) {
        throw InvalidArgumentError("wilcoxon requires at least 6 pairs, got " +
                                   std::to_string(a.size()));
    }
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) {
        throw DegenerateInputError("all paired differences are zero");
    }
    const std::size_t n = diffs.size();
    std::vector<double> abs_diffs(n);
    for (std::size_t i = 0; i < n; ++i) abs_diffs[i] = std::abs(diffs[i]);
    const std::vector<long> rank2 = doubled_average_ranks(abs_diffs);

    long w2 = 0;  // doubled W+ statistic
    for (std::size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0.0) w2 += rank2[i];
    }

    WilcoxonResult result;
    result.w_statistic = static_cast<double>(w2) / 2.0;
    result.n_effective = static_cast<int>(n);

    if (n <= 25) {
        // Exact null distribution of the doubled rank sum via subset-sum counts.
        const long max_sum = std::accumulate(rank2.begin(), rank2.end(), 0L);
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_sum) + 1, 0);
        counts[0] = 1;
        long reach = 0;
        for (long r : rank2) {
            reach += r;
            for (long s = reach; s >= r; --s) {
                counts[static_cast<std::size_t>(s)] +=
                    counts[static_cast<std::size_t>(s - r)];
            }
        }
        std::uint64_t at_or_below = 0;
        for (long s = 0; s <= w2; ++s) at_or_below += counts[static_cast<std::size_t>(s)];
        result.p_value = static_cast<double>(at_or_below) /
                         static_cast<double>(std::uint64_t{1} << n);
        result.exact = true;
        return result;
    }

    // Normal approximation with tie correction.
    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted(abs_diffs);
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (result.w_statistic - mean) / std::sqrt(var);
    result.p_value = normal_cdf(z);
    result.exact = false;
    return result;
}

double median(std::vector<double> values) {
    if (values.empty()) throw ShapeError("median of empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace quansim
