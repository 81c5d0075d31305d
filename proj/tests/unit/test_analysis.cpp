#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "optrng/analysis.hpp"
#include "optrng/sources.hpp"

using namespace optrng;
using nist::TestId;

namespace {

nist::TestResult result(TestId id, std::vector<double> ps, nist::TestStatus st = nist::TestStatus::ok) {
    nist::TestResult r;
    r.id = id;
    r.p_values = std::move(ps);
    r.status = st;
    return r;
}

nist::TestReport report(std::vector<nist::TestResult> tests, std::size_t len = 1000) {
    nist::TestReport r;
    r.length = len;
    r.tests = std::move(tests);
    return r;
}

/// rho with erfc(rho sqrt(N/2)) = alpha, by bisection on the C library erfc.
double rho_bisect(double n, double alpha) {
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::erfc(mid * std::sqrt(n / 2.0)) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Median, OddEvenAndEmpty) {
    EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
    EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
    EXPECT_EQ(median({0.7}), 0.7);
    EXPECT_THROW(median({}), DomainError);
}

TEST(MedianProfile, ReducesWithinThenAcross) {
    const std::vector<nist::TestReport> reps{
        report({result(TestId::frequency, {0.2}), result(TestId::serial, {0.1, 0.3}),
                result(TestId::universal, {}, nist::TestStatus::too_short)}),
        report({result(TestId::frequency, {0.6}), result(TestId::serial, {0.5, 0.9})}),
        report({result(TestId::frequency, {0.4}), result(TestId::serial, {0.0, 1.0})}),
    };
    const auto prof = median_profile(reps);
    ASSERT_EQ(prof.entries.size(), 2u);
    EXPECT_EQ(prof.find(TestId::frequency), 0.4);
    // per-sequence medians 0.2, 0.7, 0.5
    EXPECT_DOUBLE_EQ(*prof.find(TestId::serial), 0.5);
    EXPECT_FALSE(prof.find(TestId::universal));
    EXPECT_EQ(prof.entries[1].sequences, 3u);
}

TEST(Mae, HalvesUniversalMedian) {
    MedianProfile p;
    p.entries = {{TestId::frequency, 0.3, 1}, {TestId::universal, 1.0, 1}};
    // |0.3 - 0.5| and |1.0/2 - 0.5|
    EXPECT_DOUBLE_EQ(mae(p), 0.1);
    p.entries = {{TestId::universal, 0.2, 1}};
    EXPECT_DOUBLE_EQ(mae(p), 0.4);
    EXPECT_THROW(mae(MedianProfile{}), EmptyProfile);
}

TEST(Histogram, BinEdgesAndStatistic) {
    const auto h = histogram({0.0, 0.049, 0.05, 0.5, 0.999, 1.0}, 20);
    EXPECT_EQ(h.counts[0], 2u);
    EXPECT_EQ(h.counts[1], 1u);
    EXPECT_EQ(h.counts[10], 1u);
    EXPECT_EQ(h.counts[19], 2u);
    EXPECT_EQ(h.total, 6u);
    EXPECT_DOUBLE_EQ(h.expected(), 0.3);
    double chi2 = 0.0;
    for (auto c : h.counts) chi2 += (c - 0.3) * (c - 0.3) / 0.3;
    EXPECT_NEAR(h.chi_square(), chi2, 1e-12);
    EXPECT_EQ(h.degrees_of_freedom(), 19u);
    EXPECT_THROW(histogram({1.5}), DomainError);
    EXPECT_THROW(make_histogram(0), DomainError);
    EXPECT_THROW(aggregate_histogram({}), DomainError);
}

TEST(Histogram, UniformInputPassesChiSquare) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> ps(20000);
    for (auto& p : ps) p = u(gen);
    const auto h = histogram(ps);
    EXPECT_LT(h.chi_square(), special::chi_square_critical(19, 0.001));
}

TEST(PassRates, CountsPooledPValuesAtOrAboveAlpha) {
    const std::vector<nist::TestReport> reps{
        report({result(TestId::frequency, {0.01}), result(TestId::serial, {0.009, 0.5})}),
        report({result(TestId::frequency, {0.005}), result(TestId::serial, {}, nist::TestStatus::too_short)}),
    };
    const auto t = pass_rates(reps, 0.01);
    EXPECT_EQ(t.subsequences, 2u);
    EXPECT_EQ(t.rate(TestId::frequency).passed, 1u);
    EXPECT_DOUBLE_EQ(t.rate(TestId::frequency).percent(), 50.0);
    EXPECT_EQ(t.rate(TestId::serial).applicable_subsequences, 1u);
    EXPECT_DOUBLE_EQ(t.rate(TestId::serial).percent(), 50.0);
    EXPECT_TRUE(std::isnan(t.rate(TestId::dft).percent()));
}

TEST(PassRates, SubsequenceSplitting) {
    const auto seq = software_source(25000, 3);
    const auto t = subsequence_pass_rates(seq, 10000, nist::TestParams::reduced());
    EXPECT_EQ(t.subsequences, 2u);
    EXPECT_EQ(t.sub_len, 10000u);
    EXPECT_EQ(t.rate(TestId::frequency).applicable_subsequences, 2u);
    EXPECT_EQ(t.rate(TestId::universal).applicable_subsequences, 0u);
    EXPECT_THROW(subsequence_pass_rates(seq, 30000), TooShort);
    EXPECT_THROW(subsequence_pass_rates(software_source(40, 1), 10), TooShort);
}

TEST(Thresholds, MatchBisectionOracle) {
    for (double n : {1e2, 1e3, 1e4, 1e5, 1e6, 1e7}) {
        const auto row = balance_threshold(n);
        const double rho = rho_bisect(n, 0.01);
        EXPECT_NEAR(row.sz_max, rho, 1e-12);
        EXPECT_NEAR(row.b_max, (1 + rho) / (1 - rho), 1e-11);
        // B at the threshold makes the frequency p-value exactly alpha
        const double d = n * (row.b_max - 1) / (row.b_max + 1);
        EXPECT_NEAR(std::erfc(d / std::sqrt(2 * n)), 0.01, 1e-12);
    }
    EXPECT_THROW(balance_threshold(1.0), DomainError);
    EXPECT_THROW(balance_threshold(4.0, 1e-9), DomainError);
}

TEST(Thresholds, BalanceColumnOfReferenceTable) {
    // B is printed to two significant digits beyond the leading one
    for (const auto& ref : kStokesReference) {
        const auto row = balance_threshold(ref.n);
        EXPECT_NEAR(row.b_max, ref.balance, 0.005 * ref.balance) << ref.n;
    }
}

TEST(Csv, Layouts) {
    const auto h = histogram({0.5}, 2);
    EXPECT_EQ(histogram_csv(h), "bin,lower,upper,count,expected\n0,0,0.5,0,0.5\n1,0.5,1,1,0.5\n");
    const auto t = thresholds_csv({balance_threshold(100)}, 0.01);
    EXPECT_EQ(t.rfind("N,alpha,B_max,Sz_max\n100,0.01,1.69390", 0), 0u);
    MedianProfile p;
    p.entries = {{TestId::runs, 0.25, 4}};
    EXPECT_EQ(median_profile_csv(p), "id,name,median,sequences\n3,runs,0.25,4\n");
}
