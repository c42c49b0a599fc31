#include "kato/grids.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

using namespace kato;

namespace {
double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }
}  // namespace

TEST(SupportGrid, WeightsIntegrateConstants) {
    auto g = build_support_grid(Potential::square_well(-1.0), 2, 2);
    EXPECT_NEAR(g.radius, 1.0, 1e-14);
    EXPECT_NEAR(sum(g.weights), 4.0 * pi / 3.0, 1e-8);
}

TEST(SupportGrid, ZeroPotential) {
    auto g = build_support_grid(Potential::zero(), GridSpec{});
    EXPECT_GT(g.size(), 0);
    for (double v : g.potential_values) EXPECT_EQ(v, 0.0);
    EXPECT_NEAR(sum(g.weights), 4.0 * pi / 3.0, 1e-10);
}

TEST(SupportGrid, RefinementConvergesForGaussian) {
    auto p = Potential::gaussian(-8.0);
    auto mass = [&](const SupportGrid& g) {
        double s = 0.0;
        for (int i = 0; i < g.size(); ++i) s += g.weights[i] * std::abs(g.potential_values[i]);
        return s;
    };
    GridSpec s;
    const double a = mass(build_support_grid(p, s)), b = mass(build_support_grid(p, s.refined(2.0)));
    EXPECT_LT(std::abs(a - b) / b, 1e-6);
    // 8 pi^{3/2} minus the tail beyond R_supp
    EXPECT_NEAR(b, 8.0 * std::pow(pi, 1.5), 1e-6);
}

TEST(SupportGrid, SquareWellJumpOnPanelEdge) {
    auto g = build_support_grid(Potential::square_well(-4.0, 1.0), GridSpec{});
    for (int i = 0; i < g.n_radial(); ++i) {
        const double r = g.panels.r[i];
        EXPECT_EQ(g.radial_values[i], r < 1.0 ? -4.0 : 0.0);
    }
}

TEST(SupportGrid, RejectsBadOrders) {
    EXPECT_THROW(build_support_grid(Potential::zero(), 1, 6), InvalidOrder);
    GridSpec s;
    s.panel_length = 0.0;
    EXPECT_THROW(build_support_grid(Potential::zero(), s), InvalidArgument);
}

TEST(SupportGrid, CsvHasHeaderAndRows) {
    auto g = build_support_grid(Potential::square_well(-1.0), 2, 6);
    std::ostringstream os;
    g.write_csv(os);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "x,y,z,w,V");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), g.size() + 1);
    EXPECT_EQ(s.find('\r'), std::string::npos);
}

TEST(EvalGrid, Construction) {
    EvalSpec one;
    auto g1 = build_eval_grid(one, 10.0);
    ASSERT_EQ(g1.pairs.size(), 1u);
    EXPECT_NEAR(g1.pairs[0].sep(), 1.0, 1e-14);

    EvalSpec s{0.5, 8.0, 8};
    auto g = build_eval_grid(s, 10.0);
    ASSERT_EQ(g.pairs.size(), 8u);
    for (size_t k = 1; k < 8; ++k) EXPECT_NEAR(g.pairs[k].sep() / g.pairs[k - 1].sep(), std::pow(16.0, 1.0 / 7.0), 1e-12);
    EXPECT_NEAR(g.pairs.back().sep(), 8.0, 1e-12);

    s.diagonal = true;
    auto gd = build_eval_grid(s, 10.0);
    EXPECT_TRUE(gd.pairs.back().diagonal);
    EXPECT_EQ(gd.pairs.back().sep(), 0.0);

    EXPECT_THROW(build_eval_grid(EvalSpec{0.5, 30.0, 4}, 10.0), InvalidArgument);
    EXPECT_THROW(build_eval_grid(EvalSpec{2.0, 1.0, 4}, 10.0), InvalidArgument);
}
