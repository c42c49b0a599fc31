#include "kato/oracle/radial_fd.hpp"

#include <gtest/gtest.h>

using kato::oracle::FdOptions;
using kato::oracle::RadialFd;

namespace {
RadialFd well(double V0) {
    return RadialFd([V0](double r) { return r <= 1.0 ? -V0 : 0.0; }, {1.0});
}
RadialFd gauss(double A) {
    FdOptions o;
    o.r_max = 40.0;
    return RadialFd([A](double r) { return A * std::exp(-r * r); }, {}, o);
}
}  // namespace

// Reference energies from the transcendental matching condition (scipy brentq, frozen).
TEST(RadialFdOracle, SquareWellsMatchTranscendentalRoots) {
    EXPECT_EQ(well(1.0).count(), 0);
    auto w4 = well(4.0).all_levels();
    ASSERT_EQ(w4.size(), 1u);
    EXPECT_NEAR(w4[0].energy, -0.407101483641, 1e-5);
    auto w10 = well(10.0).all_levels();
    ASSERT_EQ(w10.size(), 2u);
    EXPECT_EQ(well(10.0).count(), 4);
    EXPECT_NEAR(w10[0].energy, -0.0496657250175, 2e-6);
    EXPECT_EQ(w10[0].l, 1);
    EXPECT_NEAR(w10[1].energy, -4.62419408633, 1e-4);
    auto w30 = well(30.0).all_levels();
    ASSERT_EQ(w30.size(), 4u);
    EXPECT_NEAR(w30[3].energy, -23.0362476393, 1e-3);
    EXPECT_NEAR(w30[0].energy, -4.08736802105, 1e-4);
}

// Reference energies from an independent scipy tridiagonal solve with Richardson extrapolation.
TEST(RadialFdOracle, GaussianWells) {
    EXPECT_EQ(gauss(-1.0).count(), 0);
    auto g8 = gauss(-8.0).all_levels();
    ASSERT_EQ(g8.size(), 1u);
    EXPECT_NEAR(g8[0].energy, -1.567839345, 1e-6);
    auto g20 = gauss(-20.0).all_levels();
    ASSERT_EQ(g20.size(), 3u);
    EXPECT_NEAR(g20[1].energy, -2.565722617, 1e-6);
}
