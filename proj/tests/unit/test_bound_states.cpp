#include "kato/bound_states.hpp"
#include "kato/oracle/radial_fd.hpp"

#include <gtest/gtest.h>

using namespace kato;

namespace {
SupportGrid grid(const Potential& p) { return build_support_grid(p, GridSpec{}); }
std::vector<BoundState> states(const Potential& p, const SupportGrid& g) {
    return bound_states(p, g, default_kappa_max(p));
}
}  // namespace

TEST(BoundStates, ZeroPotentialHasNone) {
    auto z = Potential::zero();
    EXPECT_TRUE(states(z, grid(z)).empty());
}

// s-wave root of k cot k = -kappa, k^2 + kappa^2 = 4 (scipy brentq, frozen).
TEST(BoundStates, SquareWellMatchesTranscendentalRoot) {
    auto p = Potential::square_well(-4.0);
    auto s = states(p, grid(p));
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].l, 0);
    EXPECT_NEAR(s[0].lambda_k, -0.407101483641, 1e-7);
    EXPECT_NEAR(s[0].kappa * s[0].kappa, -s[0].lambda_k, 1e-14);
    EXPECT_LT(s[0].residual, 1e-6);
}

TEST(BoundStates, DegenerateChannelsAndOrthonormality) {
    auto p = Potential::square_well(-10.0);
    auto g = grid(p);
    auto s = states(p, g);
    ASSERT_EQ(s.size(), 4u);  // one s state, three p states
    int p_states = 0;
    for (const auto& b : s)
        if (b.l == 1) {
            ++p_states;
            EXPECT_NEAR(b.lambda_k, -0.0496657250175, 1e-6);
        } else {
            EXPECT_NEAR(b.lambda_k, -4.62419408633, 1e-5);
        }
    EXPECT_EQ(p_states, 3);
    auto [off, diag] = orthonormality(s, p, g);
    EXPECT_LT(off, 1e-8);
    EXPECT_LT(diag, 1e-8);
}

TEST(BoundStates, GaussianAgainstFdOracle) {
    auto p = Potential::gaussian(-8.0);
    auto s = states(p, grid(p));
    oracle::FdOptions o;
    o.r_max = 40.0;
    auto ref = oracle::RadialFd([](double r) { return -8.0 * std::exp(-r * r); }, {}, o).all_levels();
    ASSERT_EQ(s.size(), 1u);
    ASSERT_EQ(ref.size(), 1u);
    EXPECT_LT(std::abs(s[0].lambda_k - ref[0].energy) / std::abs(ref[0].energy), 1e-6);
}

TEST(Extension, MatchesGridValuesAndIsLinear) {
    auto p = Potential::square_well(-4.0);
    auto g = grid(p);
    auto s = states(p, g);
    ASSERT_EQ(s.size(), 1u);
    double scale = 0.0;
    for (const auto& v : s[0].psi_support) scale = std::max(scale, std::abs(v));
    for (int j : {0, 5, g.size() / 2, g.size() - 1})
        EXPECT_NEAR(std::abs(extend_eigenfunction(s[0], p, g, g.nodes[j]) - s[0].psi_support[j]), 0.0, 1e-6 * scale);
    BoundState c = s[0];
    for (auto& f : c.source) f *= 2.5;
    const Vec3 x(0.3, 1.4, -0.2);
    EXPECT_NEAR(std::abs(extend_eigenfunction(c, p, g, x) - 2.5 * extend_eigenfunction(s[0], p, g, x)), 0.0, 1e-14);
}

TEST(Extension, AgmonEnvelope) {
    auto p = Potential::square_well(-4.0);
    auto g = grid(p);
    const auto b = states(p, g).front();
    const double a2 = agmon_ratio(b, p, g, {2.0 * g.radius}), a4 = agmon_ratio(b, p, g, {4.0 * g.radius});
    EXPECT_LT(std::abs(a2 - a4) / std::max(a2, a4), 0.5);
    const double C = agmon_ratio(b, p, g, {2.0 * g.radius, 4.0 * g.radius});
    for (const Vec3& x : {Vec3(2, 0, 0), Vec3(0, -3, 1), Vec3(2.5, 2.5, 2.5)}) {
        const double bound = C * std::exp(-b.kappa * x.norm()) / bracket(x);
        EXPECT_LE(std::abs(extend_eigenfunction(b, p, g, x)), bound * (1.0 + 1e-9));
    }
    EXPECT_THROW(agmon_ratio(b, p, g, {0.5}), InvalidArgument);
}

// Translating the well leaves the spectrum unchanged; exercises the tensor-grid route.
TEST(BoundStates, OffCenterTensorRoute) {
    auto p = Potential::gaussian(-8.0, 1.0, Vec3(0.3, 0.0, 0.0));
    GridSpec s;
    s.radial_order = 8;
    s.angular_order = 14;
    s.panel_length = 2.0;
    auto g = build_support_grid(p, s);
    EXPECT_FALSE(g.radial);
    auto st = states(p, g);
    ASSERT_EQ(st.size(), 1u);
    EXPECT_EQ(st[0].l, -1);
    EXPECT_NEAR(st[0].lambda_k, -1.567839345, 1e-4);
}
