#include "kato/free_kernels.hpp"
#include "kato/quadrature.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

using namespace kato;

TEST(SpectralParameter, RejectsLowerHalfPlane) {
    EXPECT_THROW(SpectralParameter(1.0, -0.1), InvalidArgument);
    EXPECT_NO_THROW(SpectralParameter(-1.0, 0.0));
    EXPECT_NEAR(SpectralParameter::upper(-4.0).eta().imag(), 2.0, 1e-15);
    EXPECT_NEAR(SpectralParameter::lower(4.0).eta().real(), -2.0, 1e-15);
}

TEST(Resolvent0, Values) {
    Vec3 x(0, 0, 0), y(1, 0, 0);
    EXPECT_NEAR(resolvent0(SpectralParameter(0, 0), x, y).real(), 0.0795774715459477, 1e-15);
    EXPECT_NEAR(resolvent0(SpectralParameter(0, 1), x, y).real(), 0.0292749157621596, 1e-15);
    auto v = resolvent0(SpectralParameter(1, 0), x, Vec3(pi, 0, 0));
    EXPECT_NEAR(v.real(), -1.0 / (4 * pi * pi), 1e-15);
    EXPECT_NEAR(v.imag(), 0.0, 1e-15);
    EXPECT_THROW(resolvent0(SpectralParameter(1, 0), x, x), CoincidentPoints);
}

TEST(Resolvent0, UniformBoundAndConjugation) {
    for (double re : {-3.0, 0.0, 0.5, 7.0})
        for (double im : {0.0, 0.1, 2.0})
            for (double s : {0.01, 0.3, 2.0, 10.0}) {
                cplx e(re, im);
                EXPECT_LE(std::abs(resolvent0_r(e, s)), 1.0 / (4 * pi * s) * (1 + 1e-14));
                cplx a = resolvent0_r(e, s), b = resolvent0_r(-std::conj(e), s);
                EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-15);
            }
}

TEST(Heat0, Values) {
    EXPECT_NEAR(heat0_r(1.0 / (4 * pi), 0.0), 1.0, 1e-14);
    EXPECT_NEAR(heat0_r(0.25, 0.0), std::pow(pi, -1.5), 1e-15);
    EXPECT_THROW(heat0_r(0.0, 1.0), NonPositiveTime);
}

TEST(Poisson0, Values) {
    EXPECT_NEAR(poisson0_r(1.0, 0.0), 1.0 / (pi * pi), 1e-15);
    EXPECT_NEAR(poisson0_r(2.0, 0.0), 1.0 / (8 * pi * pi), 1e-15);
    EXPECT_THROW(poisson0_r(-1.0, 1.0), NonPositiveTime);
}

TEST(FreeKernels, UnitMass) {
    // radial integrals with r = u/(1-u) on (0,1)
    auto mass = [](auto k) {
        auto g = quad::composite_gl(linspace(0.0, 1.0, 401), 16);
        double s = 0.0;
        for (size_t i = 0; i < g.x.size(); ++i) {
            const double u = g.x[i], r = u / (1 - u), jac = 1 / ((1 - u) * (1 - u));
            s += g.w[i] * 4 * pi * r * r * k(r) * jac;
        }
        return s;
    };
    for (double t : {0.1, 1.0}) EXPECT_NEAR(mass([t](double r) { return heat0_r(t, r); }), 1.0, 1e-6);
    for (double t : {0.5, 2.0}) EXPECT_NEAR(mass([t](double r) { return poisson0_r(t, r); }), 1.0, 1e-6);
}

TEST(BesselJ, AgainstBoostAndClosedForms) {
    EXPECT_EQ(bessel_j(0.0, 0.0), 1.0);
    EXPECT_NEAR(bessel_j(0.5, pi / 2), 2.0 / pi, 1e-14);
    for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.7, 6.0})
        for (double z : {0.01, 0.5, 1.0, 3.0, 7.5, 11.99, 12.0, 12.01, 20.0, 55.0, 300.0}) {
            const double ref = boost::math::cyl_bessel_j(nu, z);
            EXPECT_NEAR(bessel_j(nu, z), ref, 2e-8 * std::max(1.0, std::abs(ref)) + 1e-12) << nu << " " << z;
        }
    for (double z : {0.3, 2.0, 13.0, 40.0}) {
        EXPECT_NEAR(bessel_j(1.5, z), std::sqrt(2 / (pi * z)) * (std::sin(z) / z - std::cos(z)), 2e-9);
        EXPECT_NEAR(bessel_j(2.5, z),
                    std::sqrt(2 / (pi * z)) * ((3 / (z * z) - 1) * std::sin(z) - 3 * std::cos(z) / z), 2e-9);
    }
    EXPECT_THROW(bessel_j(6.5, 1.0), OutOfSupportedRange);
    EXPECT_THROW(bessel_j(1.0, -1.0), OutOfSupportedRange);
}

TEST(BesselJ, CrossoverConsistency) {
    for (double nu : {0.0, 1.5, 2.5, 3.5, 6.0}) EXPECT_LT(bessel_crossover_gap(nu), 1e-7) << nu;
}

TEST(BesselJ, PowerAndDecayBounds) {
    // |J_nu(z)| <= min(c z^nu, c' z^{-1/2}) with c = 1/(2^nu Gamma(nu+1)), c' = 1 for the sampled orders
    for (double nu : {0.5, 1.5, 2.0, 2.5})
        for (double z : logspace(1e-3, 200.0, 300)) {
            const double c = 1.0 / (std::pow(2.0, nu) * std::tgamma(nu + 1));
            EXPECT_LE(std::abs(bessel_j(nu, z)), std::min(c * std::pow(z, nu), 1.0 / std::sqrt(z)) + 1e-12);
        }
}

TEST(BR0, ReducesToProjectionKernelAtAlphaZero) {
    for (double s : {0.2, 1.0, 3.3, 9.0}) {
        const double ref = (std::sin(s) - s * std::cos(s)) / (2 * pi * pi * s * s * s);
        EXPECT_NEAR(br0_r(0.0, 1.0, s), ref, 1e-12);
    }
    // value at the origin: volume of the unit ball over (2 pi)^3
    EXPECT_NEAR(br0_r(0.0, 1.0, 0.0), 4.0 / 3.0 * pi / std::pow(2 * pi, 3), 1e-12);
}

TEST(BR0, ScalingSymmetry) {
    for (double a : {0.0, 0.5, 1.0})
        for (double s : {0.3, 1.7, 6.0}) EXPECT_NEAR(br0_r(a, 4.0, s), 8.0 * br0_r(a, 1.0, 2.0 * s), 1e-12);
}

TEST(BR0, DecayExponent) {
    // oscillation-free envelope: local maxima of |K| on sqrt(lambda0) s in [10, 100]
    const double alpha = 0.5;
    std::vector<double> lx, ly;
    double prev2 = 0, prev1 = 0;
    auto grid = linspace(10.0, 100.0, 20001);
    for (size_t i = 0; i < grid.size(); ++i) {
        const double v = std::abs(br0_r(alpha, 1.0, grid[i]));
        if (i >= 2 && prev1 > prev2 && prev1 > v) {
            lx.push_back(std::log(grid[i - 1]));
            ly.push_back(std::log(prev1));
        }
        prev2 = prev1;
        prev1 = v;
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    EXPECT_NEAR(sxy / sxx, -(2 + alpha), 0.1);
    EXPECT_THROW(br0_kernel(0.5, 1.0, Vec3::Zero(), Vec3::Zero()), CoincidentPoints);
}
