#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adaffect/agreement.hpp"
#include "adaffect/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace adaffect;

namespace {

RatingsTable table_from_units(const std::vector<std::vector<std::optional<double>>>& units,
                              ScaleRange scale = {0, 4})
{
    RatingsTable t;
    const size_t raters = units.front().size();
    for (size_t r = 0; r < raters; ++r) t.raters.push_back("r" + std::to_string(r));
    for (size_t a = 0; a < units.size(); ++a) t.ads.push_back("ad" + std::to_string(a));
    t.arousal_scale = scale;
    t.arousal = MatX::Constant(static_cast<Eigen::Index>(raters),
                               static_cast<Eigen::Index>(units.size()),
                               std::numeric_limits<double>::quiet_NaN());
    for (size_t a = 0; a < units.size(); ++a)
        for (size_t r = 0; r < raters; ++r)
            if (units[a][r])
                t.arousal(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) =
                    *units[a][r];
    t.valence = t.arousal;
    t.engagement = t.arousal;
    return t;
}

std::vector<Label> to_labels(const std::vector<int>& signs)
{
    std::vector<Label> out;
    for (int s : signs) out.push_back(label_from_sign(s));
    return out;
}

} // namespace

TEST_CASE("krippendorff alpha: perfect agreement is exactly 1")
{
    std::vector<std::vector<std::optional<double>>> units;
    for (int u = 0; u < 10; ++u)
        units.push_back({static_cast<double>(u % 5), static_cast<double>(u % 5)});
    const RatingsTable t = table_from_units(units);
    for (auto metric : {AlphaMetric::Nominal, AlphaMetric::Interval, AlphaMetric::Ordinal})
        CHECK(krippendorff_alpha(t, Dimension::Arousal, metric) == 1.0);
}

TEST_CASE("krippendorff alpha: independent raters drift to chance level")
{
    Rng rng(12345);
    std::vector<std::vector<std::optional<double>>> units;
    for (int u = 0; u < 10000; ++u)
        units.push_back({static_cast<double>(rng.uniform_int(0, 4)),
                         static_cast<double>(rng.uniform_int(0, 4))});
    const RatingsTable t = table_from_units(units);
    for (auto metric : {AlphaMetric::Nominal, AlphaMetric::Ordinal})
        CHECK(std::abs(krippendorff_alpha(t, Dimension::Arousal, metric)) < 0.1);
}

TEST_CASE("krippendorff alpha: 3 raters x 4 units hand fixture matches the oracle")
{
    // one missing cell, mixed agreement
    const std::vector<std::vector<std::optional<double>>> units = {
        {1.0, 1.0, 2.0},
        {2.0, 2.0, std::nullopt},
        {0.0, 1.0, 0.0},
        {4.0, 4.0, 4.0},
    };
    const RatingsTable t = table_from_units(units);
    for (auto [metric, ometric] :
         {std::pair{AlphaMetric::Nominal, oracles::Metric::Nominal},
          std::pair{AlphaMetric::Interval, oracles::Metric::Interval},
          std::pair{AlphaMetric::Ordinal, oracles::Metric::Ordinal}}) {
        const double got = krippendorff_alpha(t, Dimension::Arousal, metric);
        const double want = *oracles::alpha_bruteforce(units, ometric);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("krippendorff alpha equals the brute-force oracle on random fixtures")
{
    Rng rng(987);
    for (int trial = 0; trial < 60; ++trial) {
        const int raters = rng.uniform_int(2, 6);
        const int ads = rng.uniform_int(2, 20);
        RatingsTable t = support::random_ratings(rng, raters, ads, 0.2);
        const auto units = support::units_view(t.arousal);
        const auto want = oracles::alpha_bruteforce(units, oracles::Metric::Ordinal);
        if (!want) {
            CHECK_THROWS_AS(krippendorff_alpha(t, Dimension::Arousal, AlphaMetric::Ordinal),
                            ValidationError);
            continue;
        }
        const double got = krippendorff_alpha(t, Dimension::Arousal, AlphaMetric::Ordinal);
        CHECK(got == doctest::Approx(*want).epsilon(1e-10));
    }
}

TEST_CASE("krippendorff alpha error paths")
{
    SUBCASE("all cells missing")
    {
        const std::vector<std::vector<std::optional<double>>> units = {
            {std::nullopt, std::nullopt}, {std::nullopt, std::nullopt}};
        CHECK_THROWS_AS(krippendorff_alpha(table_from_units(units), Dimension::Arousal),
                        ValidationError);
    }
    SUBCASE("all ratings identical returns 1 by convention")
    {
        const std::vector<std::vector<std::optional<double>>> units = {{2.0, 2.0}, {2.0, 2.0}};
        CHECK(krippendorff_alpha(table_from_units(units), Dimension::Arousal) == 1.0);
    }
    SUBCASE("alpha is invariant under rater order")
    {
        Rng rng(55);
        RatingsTable t = support::random_ratings(rng, 5, 12, 0.1);
        RatingsTable swapped = t;
        swapped.arousal.row(0).swap(swapped.arousal.row(4));
        swapped.arousal.row(1).swap(swapped.arousal.row(3));
        CHECK(krippendorff_alpha(t, Dimension::Arousal) ==
              doctest::Approx(krippendorff_alpha(swapped, Dimension::Arousal)).epsilon(1e-14));
    }
}

TEST_CASE("cohen kappa examples")
{
    SUBCASE("identical sequences with both classes -> 1")
    {
        const auto a = to_labels({+1, +1, -1, -1, +1});
        CHECK(cohen_kappa(a, a) == 1.0);
    }
    SUBCASE("hand fixture: p_o=0.75, p_e=0.5 -> 0.5")
    {
        const auto a = to_labels({+1, +1, -1, -1});
        const auto b = to_labels({+1, -1, -1, -1});
        CHECK(cohen_kappa(a, b) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("balanced complement -> -1")
    {
        const auto a = to_labels({+1, +1, -1, -1});
        const auto b = to_labels({-1, -1, +1, +1});
        CHECK(cohen_kappa(a, b) == doctest::Approx(-1.0).epsilon(1e-15));
    }
    SUBCASE("p_e == 1: identical -> 1, differing -> 0")
    {
        const auto a = to_labels({+1, +1, +1});
        CHECK(cohen_kappa(a, a) == 1.0);
        // marginals degenerate on both sides only when both all-H
        const auto c = to_labels({+1, +1, +1});
        CHECK(cohen_kappa(a, c) == 1.0);
    }
    SUBCASE("length mismatch is an error")
    {
        CHECK_THROWS_AS(cohen_kappa(to_labels({+1}), to_labels({+1, -1})), ValidationError);
    }
    SUBCASE("kappa is symmetric and matches the contingency oracle on random pairs")
    {
        Rng rng(31);
        for (int trial = 0; trial < 50; ++trial) {
            const int n = rng.uniform_int(2, 30);
            std::vector<int> a, b;
            for (int i = 0; i < n; ++i) {
                a.push_back(rng.uniform() < 0.5 ? +1 : -1);
                b.push_back(rng.uniform() < 0.5 ? +1 : -1);
            }
            const double ab = cohen_kappa(to_labels(a), to_labels(b));
            const double ba = cohen_kappa(to_labels(b), to_labels(a));
            CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
            CHECK(ab == doctest::Approx(oracles::kappa_bruteforce(a, b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("binarize_by_mean follows the documented tie rule")
{
    using L = Label;
    CHECK(binarize_by_mean({1, 1, 3, 3}) == std::vector<L>{L::Low, L::Low, L::High, L::High});
    CHECK(binarize_by_mean({2, 2, 2}) == std::vector<L>{L::Low, L::Low, L::Low});
    CHECK(binarize_by_mean({0, 4, 2.1, 1.9}) ==
          std::vector<L>{L::Low, L::High, L::High, L::Low});

    SUBCASE("labels are invariant under positive affine transforms")
    {
        Rng rng(77);
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<double> scores;
            const int n = rng.uniform_int(1, 25);
            for (int i = 0; i < n; ++i) scores.push_back(rng.uniform(-5, 5));
            const double a = rng.uniform(0.1, 10.0), b = rng.uniform(-20, 20);
            std::vector<double> mapped;
            for (double s : scores) mapped.push_back(a * s + b);
            CHECK(binarize_by_mean(scores) == binarize_by_mean(mapped));
        }
    }
}

TEST_CASE("per-rater and population kappa paths")
{
    // 2 raters, 6 ads; expert labels split H/L on arousal
    RatingsTable t;
    t.raters = {"r0", "r1"};
    t.ads = {"a0", "a1", "a2", "a3", "a4", "a5"};
    t.arousal.resize(2, 6);
    t.arousal << 4, 4, 3, 0, 1, 0, // r0 tracks experts
        4, 0, 3, 4, 1, 0;          // r1 diverges on a1/a3
    t.valence = t.arousal;
    t.engagement = t.arousal;
    std::vector<AdRecord> ads;
    for (int i = 0; i < 6; ++i)
        ads.push_back({"a" + std::to_string(i), 30, i < 3 ? Label::High : Label::Low,
                       i < 3 ? Label::High : Label::Low, {}});

    const auto per = per_rater_kappa(t, Dimension::Arousal, ads);
    REQUIRE(per.size() == 2);
    CHECK(per.at("r0") == doctest::Approx(1.0));
    CHECK(per.at("r0") > per.at("r1"));

    // population path: mean scores {4,2,3,2,1,0}, grand mean 2 -> H,L,H,L,L,L
    const double pop = population_kappa(t, Dimension::Arousal, ads);
    const double want = cohen_kappa(
        to_labels({+1, -1, +1, -1, -1, -1}), to_labels({+1, +1, +1, -1, -1, -1}));
    CHECK(pop == doctest::Approx(want).epsilon(1e-14));

    const auto rep = agreement_report(t, Dimension::Arousal, AlphaMetric::Ordinal, &ads);
    CHECK(rep.population_kappa.has_value());
    CHECK(rep.cohen_kappa_per_rater.size() == 2);
    CHECK(rep.krippendorff_alpha.count("A") == 1);
}

TEST_CASE("benjamini_hochberg step-up")
{
    SUBCASE("{0.01, 0.02, 0.04} at q=0.05 rejects all three")
    {
        const auto rej = benjamini_hochberg({0.01, 0.02, 0.04}, 0.05);
        CHECK(rej == std::vector<bool>{true, true, true});
    }
    SUBCASE("matches exhaustive enumeration on random p-vectors")
    {
        Rng rng(2024);
        for (int trial = 0; trial < 120; ++trial) {
            const int m = rng.uniform_int(1, 20);
            std::vector<double> p;
            for (int i = 0; i < m; ++i)
                p.push_back(rng.uniform() < 0.3 ? rng.uniform(0, 0.05) : rng.uniform());
            const double q = rng.uniform(0.01, 0.2);
            CHECK(benjamini_hochberg(p, q) == oracles::bh_bruteforce(p, q));
        }
    }
    SUBCASE("rejections are monotone in q")
    {
        Rng rng(555);
        for (int trial = 0; trial < 40; ++trial) {
            const int m = rng.uniform_int(1, 20);
            std::vector<double> p;
            for (int i = 0; i < m; ++i) p.push_back(rng.uniform());
            const auto lo = benjamini_hochberg(p, 0.03);
            const auto hi = benjamini_hochberg(p, 0.10);
            for (int i = 0; i < m; ++i) {
                if (lo[static_cast<size_t>(i)]) CHECK(hi[static_cast<size_t>(i)]);
            }
        }
    }
}

TEST_CASE("pearson_with_fdr")
{
    SUBCASE("duplicated dimension is perfectly correlated and significant")
    {
        Rng rng(8);
        RatingsTable t = support::random_ratings(rng, 3, 30, 0.0);
        t.engagement = t.valence; // E := V
        const auto rep = pearson_with_fdr(t, 0.05);
        const auto& ve = rep.pairs[2];
        REQUIRE(ve.dim_i == Dimension::Valence);
        REQUIRE(ve.dim_j == Dimension::Engagement);
        CHECK(*ve.mean_r == doctest::Approx(1.0));
        CHECK(ve.significant_after_fdr);
    }
    SUBCASE("zero-variance dimension reports missing r")
    {
        RatingsTable t;
        t.raters = {"r0"};
        t.ads = {"a", "b", "c", "d"};
        t.arousal.resize(1, 4);
        t.valence.resize(1, 4);
        t.engagement.resize(1, 4);
        t.arousal << 2, 2, 2, 2; // constant
        t.valence << 1, 2, 0, -1;
        t.engagement << 0, 3, 2, 1;
        const auto rep = pearson_with_fdr(t, 0.05);
        CHECK_FALSE(rep.pairs[0].mean_r.has_value()); // A-V
        CHECK_FALSE(rep.pairs[0].significant_after_fdr);
        CHECK(rep.pairs[2].mean_r.has_value()); // V-E
    }
    SUBCASE("needs at least 3 ads")
    {
        Rng rng(4);
        RatingsTable t = support::random_ratings(rng, 3, 2, 0.0);
        CHECK_THROWS_AS(pearson_with_fdr(t, 0.05), ValidationError);
    }
    SUBCASE("pearson r is invariant under positive affine transforms")
    {
        Rng rng(66);
        VecX x(20), y(20);
        for (Eigen::Index i = 0; i < 20; ++i) {
            x[i] = rng.normal();
            y[i] = 0.4 * x[i] + rng.normal();
        }
        const double base = *pearson_r(x, y);
        const VecX x2 = 3.7 * x.array() + 11.0;
        const VecX y2 = 0.2 * y.array() - 5.0;
        CHECK(*pearson_r(x2, y2) == doctest::Approx(base).epsilon(1e-12));
    }
    SUBCASE("null data: false-rejection proportion stays near q")
    {
        // full-null Monte Carlo: fraction of runs with any rejection <= ~q
        int runs_with_rejection = 0;
        const int n_runs = 1000;
        for (int seed = 0; seed < n_runs; ++seed) {
            Rng rng(static_cast<uint64_t>(seed) + 10000);
            RatingsTable t = support::random_ratings(rng, 5, 50, 0.0);
            const auto rep = pearson_with_fdr(t, 0.05);
            bool any = false;
            for (const auto& test : rep.tests) any = any || test.rejected;
            runs_with_rejection += any ? 1 : 0;
        }
        CHECK(static_cast<double>(runs_with_rejection) / n_runs <= 0.08);
    }
}

TEST_CASE("wilcoxon rank-sum")
{
    SUBCASE("identical multisets give p near 1")
    {
        const std::vector<double> x{1, 2, 3, 4, 5, 6};
        const auto res = wilcoxon_ranksum(x, x, WilcoxonMethod::Normal);
        CHECK(res.p_value > 0.9);
    }
    SUBCASE("complete separation gives tiny p")
    {
        std::vector<double> x, y;
        for (int i = 1; i <= 10; ++i) x.push_back(i);
        for (int i = 100; i <= 110; ++i) y.push_back(i);
        const auto res = wilcoxon_ranksum(x, y, WilcoxonMethod::Normal);
        CHECK(res.p_value < 0.001);
    }
    SUBCASE("all values tied across both samples -> p = 1")
    {
        const std::vector<double> x{2, 2, 2}, y{2, 2};
        CHECK(wilcoxon_ranksum(x, y, WilcoxonMethod::Normal).p_value == 1.0);
    }
    SUBCASE("|x|=4, |y|=5 fixture: normal approximation within 0.02 of exact")
    {
        const std::vector<double> x{1.2, 3.4, 2.2, 5.0};
        const std::vector<double> y{2.0, 4.1, 6.3, 0.5, 3.3};
        const auto normal = wilcoxon_ranksum(x, y, WilcoxonMethod::Normal);
        const auto exact = wilcoxon_ranksum(x, y, WilcoxonMethod::Exact);
        CHECK(exact.exact);
        CHECK(exact.p_value ==
              doctest::Approx(oracles::wilcoxon_exact_bruteforce(x, y)).epsilon(1e-12));
        CHECK(std::abs(normal.p_value - exact.p_value) <= 0.02);
    }
    SUBCASE("auto switches to exact enumeration at small n")
    {
        const std::vector<double> x{1, 2, 3}, y{4, 5};
        CHECK(wilcoxon_ranksum(x, y).exact);
        std::vector<double> big_x(8, 1.0), big_y(8, 2.0);
        for (size_t i = 0; i < 8; ++i) {
            big_x[i] += static_cast<double>(i);
            big_y[i] += static_cast<double>(i);
        }
        CHECK_FALSE(wilcoxon_ranksum(big_x, big_y).exact);
    }
    SUBCASE("library exact path matches the recursive oracle with ties")
    {
        Rng rng(91);
        for (int trial = 0; trial < 30; ++trial) {
            const int n = rng.uniform_int(1, 5), m = rng.uniform_int(1, 5);
            std::vector<double> x, y;
            for (int i = 0; i < n; ++i) x.push_back(rng.uniform_int(0, 4));
            for (int i = 0; i < m; ++i) y.push_back(rng.uniform_int(0, 4));
            const auto res = wilcoxon_ranksum(x, y, WilcoxonMethod::Exact);
            CHECK(res.p_value ==
                  doctest::Approx(oracles::wilcoxon_exact_bruteforce(x, y)).epsilon(1e-12));
        }
    }
    SUBCASE("empty sample is an error")
    {
        CHECK_THROWS_AS(wilcoxon_ranksum({}, {1.0}), ValidationError);
    }
}
