#include "kato/bounds_harness.hpp"
#include "kato/io.hpp"

#include <gtest/gtest.h>

using namespace kato;

namespace {
SupportGrid grid(const Potential& p) { return build_support_grid(p, GridSpec{}); }

std::vector<EvalPair> few_pairs() {
    return {{Vec3(-0.25, 0, 0), Vec3(0.25, 0, 0)}, {Vec3(-1, 0, 0), Vec3(1, 0, 0)}, {Vec3(0.5, 0.5, 0), Vec3(0.5, 2.9, 3.2)}};
}
}  // namespace

TEST(Detail, RayPairs) {
    const auto pr = detail::ray_pairs({1.0, 2.5}, Vec3(2, 0, 0));
    ASSERT_EQ(pr.size(), 2u);
    EXPECT_DOUBLE_EQ(pr[1].sep(), 2.5);
    EXPECT_EQ(pr[0].x, Vec3(2, 0, 0));
}

TEST(Detail, EnvelopeSlopeOnSyntheticData) {
    // s^-2 cos(k s): the windowed RMS recovers the power
    const double k = 2.0;
    const auto s = linspace(2.5, 25.0, 480);
    std::vector<double> v;
    for (double x : s) v.push_back(std::cos(k * x + 0.3) / (x * x));
    EXPECT_NEAR(detail::envelope_slope(s, v, 2.0 * pi / k), -2.0, 0.05);
    std::vector<double> w;
    for (double x : s) w.push_back(std::cos(k * x) * std::pow(x, -2.5));
    EXPECT_NEAR(detail::envelope_slope(s, w, 2.0 * pi / k), -2.5, 0.05);
}

TEST(Detail, Drift) {
    EXPECT_EQ(detail::drift(2.0, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(detail::drift(1.0, 2.0), 0.5);
    EXPECT_DOUBLE_EQ(detail::drift(-1.0, 1.0), 2.0);
}

TEST(Preconditions, Bound1RejectsBoundStates) {
    auto p = Potential::square_well(-4.0);
    EXPECT_THROW(check_poisson_domination(p, grid(p), SpectralSpec{}, {1.0}, few_pairs(), PoissonBound::bound1),
                 PreconditionViolated);
    EXPECT_THROW(check_heat_domination(p, grid(p), SpectralSpec{}, {1.0}, few_pairs(), HeatBound::gauss1),
                 PreconditionViolated);
}

TEST(Preconditions, TimeRanges) {
    auto z = Potential::zero();
    EXPECT_THROW(check_poisson_domination(z, grid(z), SpectralSpec{}, {2.0}, few_pairs(), PoissonBound::bound3),
                 InvalidArgument);
    EXPECT_THROW(check_poisson_domination(z, grid(z), SpectralSpec{}, {0.5}, few_pairs(), PoissonBound::bound4),
                 InvalidArgument);
    EXPECT_THROW(check_poisson_domination(z, grid(z), SpectralSpec{}, {}, few_pairs(), PoissonBound::bound1),
                 InvalidArgument);
    EXPECT_THROW(check_k2_decay(z, grid(z), K2Mode::heat, 0.0, {1.0}, few_pairs()), InvalidArgument);
}

TEST(FreeCase, RatiosAreOne) {
    auto z = Potential::zero();
    const auto pb = check_poisson_domination(z, grid(z), SpectralSpec{}, {0.5, 1.0, 4.0}, few_pairs(), PoissonBound::bound1);
    const auto hb = check_heat_domination(z, grid(z), SpectralSpec{}, {0.5, 1.0, 4.0}, few_pairs(), HeatBound::gauss1);
    for (const auto* r : {&pb, &hb}) {
        EXPECT_TRUE(r->pass);
        EXPECT_NEAR(r->fitted_constant, 1.0, 1e-4);
        // below one only where the floor is active
        for (const auto& q : r->ratio_grid) EXPECT_LE(q.ratio, 1.0 + 1e-4);
    }
}

TEST(FreeCase, K2VanishesWithoutBoundStates) {
    auto p = Potential::gaussian(-1.0);
    const auto r = check_k2_decay(p, grid(p), K2Mode::poisson, 0.1, {0.5, 2.0}, few_pairs());
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.fitted_constant, 0.0);
    EXPECT_FALSE(r.note.empty());
}

TEST(FreeCase, BochnerRieszL2Norm) {
    auto z = Potential::zero();
    const auto r = l2_br_norm(z, grid(z), SpectralSpec{}, 0.0, 36.0);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.get("norm"), 0.9961, 5e-4);
    // smoothing only lowers the norm
    EXPECT_LT(l2_multiplier_norm(z, grid(z), SpectralSpec{}, 1.0, 36.0), r.get("norm"));
}

TEST(Gaussian, Bound1FewPairs) {
    // fast profile keeps this under a minute
    const auto s = Settings::from_profile("fast");
    auto p = Potential::gaussian(-1.0);
    const std::vector<EvalPair> prs{{Vec3(-0.5, 0, 0), Vec3(0.5, 0, 0)}, {Vec3(-2, 0, 0), Vec3(2, 0, 0)}};
    const auto r = check_poisson_domination(p, build_support_grid(p, s.grid), s.spectral, {1.0, 3.0}, prs,
                                            PoissonBound::bound1);
    EXPECT_TRUE(r.pass);
    // attractive and subcritical: the kernel exceeds the free one, boundedly
    EXPECT_GT(r.fitted_constant, 1.0);
    EXPECT_LT(r.fitted_constant, 5.0);
    EXPECT_LT(r.refinement_drift, 0.25);
    EXPECT_EQ(r.ratio_grid.size(), 4u);
}
