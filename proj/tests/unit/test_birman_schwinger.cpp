#include "kato/birman_schwinger.hpp"

#include <gtest/gtest.h>

using namespace kato;

namespace {
SupportGrid grid(const Potential& p) { return build_support_grid(p, GridSpec{}); }
}  // namespace

TEST(BSOperator, ZeroAndLinearity) {
    auto z = Potential::zero();
    auto A = assemble(z, grid(z), SpectralParameter(0.5, 0.0)).matrix;
    EXPECT_EQ(A.cwiseAbs().maxCoeff(), 0.0);

    auto p = Potential::square_well(-1.0, 1.0, Vec3(0.2, 0, 0));  // support radius independent of the amplitude
    GridSpec s;
    s.radial_order = 6;
    s.angular_order = 14;
    auto g = build_support_grid(p, s);
    auto g3 = build_support_grid(p.scaled(3.0), s);
    auto A1 = assemble(p, g, SpectralParameter(0.5, 0.1)).matrix;
    auto A3 = assemble(p.scaled(3.0), g3, SpectralParameter(0.5, 0.1)).matrix;
    EXPECT_LT((A3 - 3.0 * A1).cwiseAbs().maxCoeff(), 1e-12 * A3.cwiseAbs().maxCoeff());
}

TEST(BSOperator, BornRegimeAtLargeImaginaryEta) {
    auto p = Potential::gaussian(-8.0);
    EXPECT_LT(bs_spectral_radius(p, grid(p), SpectralParameter::imaginary(10.0)), 1.0);
}

// Counts confirmed by the radial finite-difference oracle.
TEST(Counting, Fixtures) {
    EXPECT_EQ(count_negative_bound_states(Potential::zero(), grid(Potential::zero())).count, 0);
    const std::vector<std::pair<double, int>> wells{{1.0, 0}, {4.0, 1}, {10.0, 4}, {30.0, 10}};
    for (const auto& [V0, n] : wells) {
        auto p = Potential::square_well(-V0);
        EXPECT_EQ(count_negative_bound_states(p, grid(p)).count, n) << "V0 = " << V0;
    }
    auto g1 = Potential::gaussian(-1.0), g8 = Potential::gaussian(-8.0);
    EXPECT_EQ(count_negative_bound_states(g1, grid(g1)).count, 0);
    EXPECT_EQ(count_negative_bound_states(g8, grid(g8)).count, 1);
}

TEST(Counting, RepulsiveHasNone) {
    auto p = Potential::gaussian(5.0);
    EXPECT_EQ(count_negative_bound_states(p, grid(p)).count, 0);
}

TEST(Regularity, ZeroPotentialIsIdentity) {
    auto z = Potential::zero();
    auto r = regular_at_zero(z, grid(z));
    EXPECT_EQ(r.sigma_min, 1.0);
    EXPECT_TRUE(r.regular);
    for (const auto& s : embedded_scan(z, grid(z), 25.0, 10)) EXPECT_EQ(s.sigma_min, 1.0);
    EXPECT_TRUE(homotopy_scan(z, grid(z), 10).crossings.empty());
}

TEST(Regularity, ThresholdTunedWellIsFlagged) {
    auto tuned = Potential::square_well(-1.005 * pi * pi / 4.0);
    auto r = regular_at_zero(tuned, grid(tuned));
    EXPECT_FALSE(r.regular);
    EXPECT_LT(r.sigma_min, 1e-2);
    auto g1 = Potential::gaussian(-1.0);
    EXPECT_TRUE(regular_at_zero(g1, grid(g1)).regular);
    auto sw4 = Potential::square_well(-4.0);
    // l = 1 channel: 1 - 4 / pi^2
    EXPECT_NEAR(regular_at_zero(sw4, grid(sw4)).sigma_min, 1.0 - 4.0 / (pi * pi), 1e-6);
}

TEST(EmbeddedScan, GaussianBoundedAwayFromZero) {
    auto p = Potential::gaussian(-8.0);
    const double a = scan_minimum(embedded_scan(p, grid(p), 25.0, 25));
    const double b = scan_minimum(embedded_scan(p, build_support_grid(p, GridSpec{}.refined(1.5)), 25.0, 25));
    EXPECT_GT(a, 1e-2);
    EXPECT_LT(std::abs(a - b) / a, 1e-3);
    EXPECT_THROW(embedded_scan(p, grid(p), 0.0, 5), InvalidArgument);
}

TEST(EmbeddedScan, ContinuousInCoupling) {
    auto g = grid(Potential::square_well(-1.0));
    double prev = -1.0;
    for (double c = 1.0; c <= 1.2; c += 0.02) {
        auto p = Potential::square_well(-c);
        const double m = scan_minimum(embedded_scan(p, g, 4.0, 4));
        if (prev >= 0.0) EXPECT_LT(std::abs(m - prev), 0.05);
        prev = m;
    }
}

TEST(Homotopy, CrossingsMatchCountsAndScale) {
    auto p = Potential::square_well(-4.0);
    auto h = homotopy_scan(p, grid(p), 20);
    ASSERT_EQ(h.crossings.size(), 1u);
    // zero-energy s-wave state at V0 = pi^2 / 4
    EXPECT_NEAR(h.crossings[0], pi * pi / 16.0, 1e-5);
    EXPECT_EQ(h.counts.back().second, 1);
    auto h2 = homotopy_scan(p.scaled(2.0), grid(p.scaled(2.0)), 20);
    ASSERT_EQ(h2.crossings.size(), 1u);
    EXPECT_NEAR(h2.crossings[0], h.crossings[0] / 2.0, 1e-8);
    auto p10 = Potential::square_well(-10.0);
    EXPECT_EQ(homotopy_scan(p10, grid(p10), 20).crossings.size(), 4u);
}
