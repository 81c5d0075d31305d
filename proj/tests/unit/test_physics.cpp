#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "optrng/physics.hpp"
#include "optrng/special.hpp"

using namespace optrng;

TEST(Photocounts, HistogramFromCounts) {
    const std::vector<std::uint64_t> counts{0, 0, 1, 0, 2, 1, 0};
    const auto h = photocount_histogram(counts);
    EXPECT_EQ(h.total_cycles, 7u);
    EXPECT_EQ(h.bins, (std::vector<std::uint64_t>{4, 2, 1}));
    EXPECT_DOUBLE_EQ(h.mean, 4.0 / 7.0);
}

TEST(Photocounts, SimulatedPoisson) {
    const auto h = simulate_photocounts(0.1, 2000000, 5);
    EXPECT_NEAR(h.mean, 0.1, 0.001);
    const auto fit = h.poisson_fit();
    EXPECT_GE(fit.degrees_of_freedom, 1u);
    EXPECT_LT(fit.chi_square, special::chi_square_critical(static_cast<double>(fit.degrees_of_freedom), 0.001));
    EXPECT_THROW(simulate_photocounts(-1.0, 10, 1), DomainError);
}

TEST(Photocounts, NonPoissonIsRejected) {
    // every cycle has exactly one photon: mean 1, no spread
    PhotocountHistogram h;
    h.add(1, 100000);
    h.add(0, 1);
    h.finalize();
    const auto fit = h.poisson_fit();
    EXPECT_GT(fit.chi_square, special::chi_square_critical(static_cast<double>(fit.degrees_of_freedom), 0.001));
}

TEST(Hom, ModelShape) {
    const HomParams p{1000.0, -0.9, 20e-6};
    EXPECT_DOUBLE_EQ(hom_model(0.0, p), 100.0);
    EXPECT_NEAR(hom_model(std::numbers::pi * 20e-6, p), 1000.0, 1e-9);
    EXPECT_NEAR(sinc(1e-6), 1.0, 1e-12);
    EXPECT_NEAR(sinc(1e-3), std::sin(1e-3) / 1e-3, 1e-15);
}

TEST(Hom, SpectralWidth) {
    const auto s = spectral_width(16e-6, 810e-9);
    EXPECT_NEAR(s.delta_omega, 299792458.0 / 16e-6, 1.0);
    EXPECT_NEAR(s.delta_lambda, 810e-9 * 810e-9 / (2 * std::numbers::pi * 16e-6), 1e-20);
    EXPECT_THROW(spectral_width(0.0, 810e-9), DomainError);
}

TEST(Hom, NoiselessFitIsExact) {
    const HomParams truth{500.0, -0.85, 15e-6};
    const auto pts = synthetic_hom(truth, linspace_delays(150e-6, 121), 0.0, 1);
    const auto fit = hom_fit(pts);
    EXPECT_TRUE(fit.converged);
    EXPECT_NEAR(fit.params.c, truth.c, 1e-6 * truth.c);
    EXPECT_NEAR(fit.params.a, truth.a, 1e-6);
    EXPECT_NEAR(fit.params.w, truth.w, 1e-6 * truth.w);
    EXPECT_LT(fit.residual_rms, 1e-6);
}

TEST(Hom, NoisyFitRecoversWidth) {
    const HomParams truth{800.0, -0.7, 25e-6};
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto fit = hom_fit(synthetic_hom(truth, linspace_delays(250e-6, 101), 0.03, seed));
        ok += std::abs(fit.params.w - truth.w) / truth.w < 0.05;
    }
    EXPECT_GE(ok, 19);
}

TEST(Hom, InitialGuessBracketsWidth) {
    const HomParams truth{100.0, -0.9, 10e-6};
    const auto g = hom_initial_guess(synthetic_hom(truth, linspace_delays(100e-6, 201), 0.0, 1));
    EXPECT_NEAR(g.w, truth.w, 0.1 * truth.w);
    EXPECT_LT(g.a, 0.0);
}

TEST(Hom, RejectsDegenerateInput) {
    EXPECT_THROW(hom_fit({{0, 1}, {1, 2}, {2, 3}}), InsufficientPoints);
    EXPECT_THROW(hom_fit({{1, 1}, {1, 2}, {1, 3}, {1, 4}}), InsufficientPoints);
    EXPECT_THROW(hom_fit({{0, 1}, {1, NAN}, {2, 3}, {3, 3}}), DomainError);
}

TEST(HomCsv, ParsesHeaderAndComments) {
    const auto pts = parse_hom_csv("L,counts\n# delay in metres\n-1e-5, 10\n0,2 # centre\n\n1e-5,10\n");
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_DOUBLE_EQ(pts[0].l, -1e-5);
    EXPECT_DOUBLE_EQ(pts[1].counts, 2.0);
    EXPECT_THROW(parse_hom_csv("0,1\nabc,2\n"), MalformedFile);
    EXPECT_THROW(parse_hom_csv("0;1\n"), MalformedFile);
    EXPECT_THROW(parse_hom_csv("0,1\n0,1x\n"), MalformedFile);
}

TEST(HomCsv, CurveOutput) {
    FitResult f;
    f.params = {10.0, -0.5, 1.0};
    EXPECT_EQ(hom_curve_csv(f, 0.0, 0.0, 1), "L,fit\n0,5\n");
}
