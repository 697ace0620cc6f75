#include <doctest.h>

#include <random>

#include "errors.hpp"
#include "oracles.hpp"
#include "stats.hpp"

using namespace quansim;

TEST_CASE("wilcoxon input validation") {
    CHECK_THROWS_AS(wilcoxon_one_sided({1, 2, 3}, {1, 2}), InvalidArgumentError);
    CHECK_THROWS_AS(wilcoxon_one_sided({1, 2, 3}, {4, 5, 6}), InvalidArgumentError);  // < 6 pairs
    const std::vector<double> same{1, 2, 3, 4, 5, 6};
    CHECK_THROWS_AS(wilcoxon_one_sided(same, same), DegenerateInputError);
}

TEST_CASE("uniformly smaller sample: W = 0 and exact p = 2^-n") {
    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(static_cast<double>(i));
        b.push_back(static_cast<double>(i) + 1.0 + 0.1 * i);
    }
    const WilcoxonResult r = wilcoxon_one_sided(a, b);
    CHECK(r.exact);
    CHECK(r.n_effective == 10);
    CHECK(r.w_statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(1.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("exact p-values match brute-force enumeration") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> small(-5, 5);
    int tested = 0;
    while (tested < 40) {
        std::vector<double> a(8), b(8);
        bool any_diff = false;
        for (int i = 0; i < 8; ++i) {
            a[static_cast<std::size_t>(i)] = small(rng);
            b[static_cast<std::size_t>(i)] = small(rng);  // integer values force ties
            if (a[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i)])
                any_diff = true;
        }
        if (!any_diff) continue;
        ++tested;
        const WilcoxonResult got = wilcoxon_one_sided(a, b);
        const oracles::BruteWilcoxon want = oracles::brute_force_wilcoxon(a, b);
        CHECK(got.w_statistic == doctest::Approx(want.w_statistic).epsilon(1e-12));
        CHECK(got.p_value == doctest::Approx(want.p_value).epsilon(1e-12));
    }
}

TEST_CASE("zero differences are dropped before ranking") {
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7};
    std::vector<double> b(a);
    b[0] += 1.0;  // only one informative pair after drops... too few pairs overall is fine,
    b[1] += 2.0;  // keep six non-zero differences
    b[2] += 1.5;
    b[3] += 0.5;
    b[4] += 2.5;
    b[5] += 3.0;
    const WilcoxonResult r = wilcoxon_one_sided(a, b);
    CHECK(r.n_effective == 6);
    const oracles::BruteWilcoxon want = oracles::brute_force_wilcoxon(a, b);
    CHECK(r.p_value == doctest::Approx(want.p_value).epsilon(1e-12));
}

TEST_CASE("normal approximation engages above 25 effective pairs") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> a, b;
    for (int i = 0; i < 40; ++i) {
        const double base = noise(rng);
        a.push_back(base - 0.8 + 0.3 * noise(rng));
        b.push_back(base);
    }
    const WilcoxonResult r = wilcoxon_one_sided(a, b);
    CHECK_FALSE(r.exact);
    CHECK(r.n_effective == 40);
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value < 0.05);  // strong shift should be detected

    // Opposite direction: p near 1.
    const WilcoxonResult opposite = wilcoxon_one_sided(b, a);
    CHECK(opposite.p_value > 0.5);
}

TEST_CASE("approximate and exact p agree near the boundary") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> a, b;
    for (int i = 0; i < 25; ++i) {
        const double base = noise(rng);
        a.push_back(base - 0.5 * std::abs(noise(rng)));
        b.push_back(base);
    }
    const WilcoxonResult exact = wilcoxon_one_sided(a, b);  // n = 25: exact path
    CHECK(exact.exact);

    std::vector<double> a26(a), b26(b);
    a26.push_back(0.0);
    b26.push_back(0.5);
    const WilcoxonResult approx = wilcoxon_one_sided(a26, b26);  // n = 26: approximation
    CHECK_FALSE(approx.exact);
    CHECK(approx.p_value == doctest::Approx(exact.p_value).epsilon(0.5));
}

TEST_CASE("median") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(median({}), ShapeError);
}
