#include "kato/resolvent.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

using namespace kato;
using boost::math::quadrature::gauss_kronrod;

namespace {
SupportGrid grid(const Potential& p) { return build_support_grid(p, GridSpec{}); }

// Spherical mean over |z| = r of e^{i eta |z - y|} / (4 pi |z - y|), |y| = s.
cplx shell_mean(cplx eta, double r, double s) {
    const double lo = std::min(r, s), hi = std::max(r, s);
    if (lo == 0.0) return std::exp(cplx(0, 1) * eta * hi) / (4.0 * pi * hi);
    return std::sin(eta * lo) * std::exp(cplx(0, 1) * eta * hi) / (4.0 * pi * eta * lo * hi);
}

template <class F>
cplx integrate(F f, double a, double b) {
    auto re = gauss_kronrod<double, 31>::integrate([&](double r) { return f(r).real(); }, a, b, 12, 1e-13);
    auto im = gauss_kronrod<double, 31>::integrate([&](double r) { return f(r).imag(); }, a, b, 12, 1e-13);
    return {re, im};
}

// Born terms (R0 V R0)(0, y) and (R0 V R0 V R0)(0, y) for a centered radial V, by nested radial quadrature.
struct BornOracle {
    std::function<double(double)> V;
    cplx eta;
    double rmax;

    cplx first(double s) const {
        return integrate([&](double r) { return 4.0 * pi * r * r * shell_mean(eta, 0.0, r) * V(r) * shell_mean(eta, r, s); },
                         0.0, rmax);
    }
    cplx second(double s) const {
        auto inner = [&](double rho) { return first(rho); };
        return integrate([&](double rho) { return 4.0 * pi * rho * rho * inner(rho) * V(rho) * shell_mean(eta, rho, s); },
                         0.0, rmax);
    }
};
}  // namespace

TEST(ResolventV, ZeroPotentialIsFree) {
    auto z = Potential::zero();
    const Vec3 x(0.2, 0, 0), y(0, 1.1, 0.3);
    for (auto eta : {SpectralParameter(0, 1), SpectralParameter(2.0, 0.0), SpectralParameter(1.0, 0.5)})
        EXPECT_NEAR(std::abs(resolvent_v(z, grid(z), eta, x, y) - resolvent0(eta, x, y)), 0.0, 1e-15);
}

TEST(ResolventV, ConjugationForRealPotential) {
    auto p = Potential::gaussian(-1.0);
    auto g = grid(p);
    const Vec3 x(0.5, 0, 0), y(-0.3, 0.8, 0);
    for (double lambda : {0.5, 3.0}) {
        const cplx up = resolvent_v(p, g, SpectralParameter::upper(lambda), x, y);
        const cplx dn = resolvent_v(p, g, SpectralParameter::lower(lambda), x, y);
        EXPECT_NEAR(std::abs(up - std::conj(dn)), 0.0, 1e-10 * std::abs(up));
    }
}

TEST(ResolventV, WeakCouplingBornSeries) {
    const double A = -0.1;
    auto p = Potential::gaussian(A);
    BornOracle o{[A](double r) { return A * std::exp(-r * r); }, cplx(0, 1), 7.0};
    for (double s : {0.7, 1.5}) {
        const Vec3 x(0, 0, 0), y(0, 0, s);
        const cplx rv = resolvent_v(p, grid(p), SpectralParameter(0, 1), x, y);
        const cplx born3 = resolvent0(SpectralParameter(0, 1), x, y) - o.first(s) + o.second(s);
        EXPECT_LT(std::abs(rv - born3) / std::abs(rv), 1e-2);
        // the remainder is third order in the amplitude
        EXPECT_LT(std::abs(rv - born3) / std::abs(rv), 1e-3);
    }
}

TEST(SpectralDensity, FreeValue) {
    auto z = Potential::zero();
    for (double lambda : {0.3, 4.0})
        EXPECT_NEAR(spectral_density(z, grid(z), lambda, Vec3::Zero(), Vec3(1, 0, 0)),
                    std::sin(std::sqrt(lambda)) / (4.0 * pi * pi), 1e-15);
    EXPECT_THROW(spectral_density(z, grid(z), 0.0, Vec3::Zero(), Vec3(1, 0, 0)), InvalidArgument);
}

TEST(SpectralDensity, AgreesWithImaginaryPartOfResolvent) {
    auto p = Potential::square_well(-4.0);
    auto g = grid(p);
    const Vec3 x(0.4, 0, 0), y(0.2, 1.3, 0);
    for (double lambda : {0.7, 6.0}) {
        const double d = spectral_density(p, g, lambda, x, y);
        const double ref = resolvent_v(p, g, SpectralParameter::upper(lambda), x, y).imag() / pi;
        EXPECT_NEAR(d, ref, 1e-6 * std::abs(ref) + 1e-12);
    }
}

TEST(DistortedWaves, FreeCaseIsSphericalBessel) {
    auto z = Potential::zero();
    const double eta = 2.3;
    const std::vector<double> r{0.3, 0.9};
    auto phi = distorted_waves(z, grid(z), eta, 2, r);
    ASSERT_EQ(phi.size(), 3u);
    for (size_t a = 0; a < r.size(); ++a) {
        const double q = eta * r[a];
        EXPECT_NEAR(phi[0][a].real(), std::sin(q) / q, 1e-12);
        EXPECT_NEAR(phi[1][a].real(), std::sin(q) / (q * q) - std::cos(q) / q, 1e-12);
    }
}

TEST(BornTail, FirstBornDensityAgainstRadialOracle) {
    const double A = -4.0;
    auto p = Potential::gaussian(A);
    const std::vector<EvalPair> pairs{{Vec3(0, 0, 0), Vec3(0, 0, 1.2)}};
    BornTail bt(p, pairs, 20.0);
    for (double eta : {3.0, 9.0}) {
        BornOracle o{[A](double r) { return A * std::exp(-r * r); }, cplx(eta, 0), 7.0};
        const double ref = -o.first(1.2).imag() / pi;
        EXPECT_NEAR(bt.density(eta)[0], ref, 1e-6 * std::abs(ref) + 1e-12) << "eta = " << eta;
    }
}
