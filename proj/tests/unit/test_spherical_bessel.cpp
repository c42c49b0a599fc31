#include "kato/spherical_bessel.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

using namespace kato;

TEST(SphericalBessel, RealAgainstBoost) {
    const int L = 60;
    std::vector<long double> j(L + 1), y(L + 1);
    for (double x : {1e-4, 0.05, 0.7, 3.0, 10.0, 45.0, 130.0}) {
        sph_bessel_jy(x, L, j.data(), y.data());
        for (int l = 0; l <= L; l += 3) {
            const double rj = boost::math::sph_bessel(l, x);
            EXPECT_NEAR(static_cast<double>(j[l]), rj, 1e-12 * std::max(std::abs(rj), 1e-300) + 1e-16) << l << " " << x;
            if (l < 25 || x > 1.0) {
                const double ry = boost::math::sph_neumann(l, x);
                if (std::isfinite(ry)) EXPECT_NEAR(static_cast<double>(y[l]) / ry, 1.0, 1e-11) << l << " " << x;
            }
        }
    }
}

TEST(SphericalBessel, ComplexMatchesRealOnAxis) {
    const int L = 40;
    std::vector<cplxl> j(L + 1), h(L + 1);
    std::vector<long double> jr(L + 1), yr(L + 1);
    for (double x : {0.01, 2.0, 17.0}) {
        sph_bessel_jh(cplxl(x, 0), L, j.data(), h.data());
        sph_bessel_jy(x, L, jr.data(), yr.data());
        for (int l = 0; l <= L; ++l) {
            EXPECT_NEAR(static_cast<double>(std::abs(j[l] - jr[l]) / std::abs(jr[l])), 0.0, 1e-13);
            EXPECT_NEAR(static_cast<double>(std::abs(h[l] - cplxl(jr[l], yr[l])) / std::abs(h[l])), 0.0, 1e-13);
        }
    }
}

TEST(SphericalBessel, WronskianOffAxis) {
    const int L = 150;
    std::vector<cplxl> j(L + 1), h(L + 1);
    for (cplxl z : {cplxl(0, 0.3), cplxl(0, 25.0), cplxl(3.0, 1.0), cplxl(40.0, 0.5), cplxl(0.002, 0.001)}) {
        sph_bessel_jh(z, L, j.data(), h.data());
        const cplxl ref = cplxl(0, 1) / (z * z);
        for (int l = 1; l <= L; ++l) {
            const cplxl w = j[l] * h[l - 1] - j[l - 1] * h[l];
            EXPECT_LT(static_cast<double>(std::abs(w - ref) / std::abs(ref)), 1e-12) << l << " " << z.imag();
        }
    }
}

TEST(SphericalBessel, ImaginaryArgumentClosedForm) {
    // j_0(i k) = sinh(k)/k, h_0(i k) = -e^{-k}/k
    std::vector<cplxl> j(3), h(3);
    sph_bessel_jh(cplxl(0, 2.5), 2, j.data(), h.data());
    EXPECT_NEAR(static_cast<double>(j[0].real()), std::sinh(2.5) / 2.5, 1e-14);
    EXPECT_NEAR(static_cast<double>(h[0].real()), -std::exp(-2.5) / 2.5, 1e-15);
}
