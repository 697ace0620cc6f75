#pragma once

#include <vector>

namespace quansim {

struct WilcoxonResult {
    double w_statistic = 0.0;  // sum of ranks of positive differences (a - b)
    double p_value = 1.0;      // one-sided, alternative "a < b"
    int n_effective = 0;       // pairs remaining after dropping zero differences
    bool exact = false;        // exact enumeration (n <= 25) vs normal approximation
};

// One-sided Wilcoxon signed-rank test for paired samples, alternative a < b.
// Zero differences are dropped; tied absolute differences get average ranks.
// Exact distribution by enumeration for n <= 25 effective pairs, normal
// approximation with tie correction above. Throws InvalidArgumentError for
// mismatched or short inputs (< 6 pairs) and DegenerateInputError when every
// difference is zero.
WilcoxonResult wilcoxon_one_sided(const std::vector<double>& a, const std::vector<double>& b);

double median(std::vector<double> values);  // throws ShapeError on empty input

}  // namespace quansim
