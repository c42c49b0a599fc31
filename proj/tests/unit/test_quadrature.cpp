#include "kato/quadrature.hpp"

#include <gtest/gtest.h>

using namespace kato;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    for (int n : {1, 2, 5, 12, 33}) {
        auto r = quad::gauss_legendre(n, 0.0, 2.0);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double s = 0.0;
            for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], d);
            EXPECT_NEAR(s, std::pow(2.0, d + 1) / (d + 1), 1e-12 * std::pow(2.0, d + 1)) << n << " " << d;
        }
    }
}

TEST(GaussLegendre, NodesAscending) {
    auto r = quad::gauss_legendre(40);
    for (size_t i = 1; i < r.x.size(); ++i) EXPECT_LT(r.x[i - 1], r.x[i]);
}

TEST(GaussLaguerre, Moments) {
    auto r = quad::gauss_laguerre(20);
    double fact = 1.0;
    for (int d = 0; d <= 20; ++d) {
        if (d > 0) fact *= d;
        double s = 0.0;
        for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], d);
        EXPECT_NEAR(s / fact, 1.0, 1e-9) << d;
    }
}

namespace {
double sphere_moment(const quad::SphereRule& r, int a, int b, int c) {
    double s = 0.0;
    for (size_t i = 0; i < r.dirs.size(); ++i)
        s += r.w[i] * std::pow(r.dirs[i].x(), a) * std::pow(r.dirs[i].y(), b) * std::pow(r.dirs[i].z(), c);
    return s;
}
// exact integral of x^a y^b z^c over the unit sphere (even exponents)
double exact_moment(int a, int b, int c) {
    if (a % 2 || b % 2 || c % 2) return 0.0;
    auto g = [](double x) { return std::tgamma(x); };
    return 2.0 * g((a + 1) / 2.0) * g((b + 1) / 2.0) * g((c + 1) / 2.0) / g((a + b + c + 3) / 2.0);
}
}  // namespace

TEST(Lebedev, ExactToDegree) {
    for (int n : {6, 14, 26, 38, 50}) {
        auto r = quad::lebedev(n);
        ASSERT_EQ(static_cast<int>(r.dirs.size()), n);
        for (const auto& d : r.dirs) EXPECT_NEAR(d.norm(), 1.0, 1e-14);
        for (int a = 0; a <= r.degree; ++a)
            for (int b = 0; a + b <= r.degree; ++b)
                for (int c = 0; a + b + c <= r.degree; ++c)
                    EXPECT_NEAR(sphere_moment(r, a, b, c), exact_moment(a, b, c), 1e-13)
                        << n << ": " << a << b << c;
    }
}

TEST(ProductSphere, ExactToDegree) {
    auto r = quad::product_sphere(6);
    for (int a = 0; a <= 11; ++a)
        for (int b = 0; a + b <= 11; ++b)
            for (int c = 0; a + b + c <= 11; ++c)
                EXPECT_NEAR(sphere_moment(r, a, b, c), exact_moment(a, b, c), 1e-12);
}

TEST(Adaptive, PeakedIntegrand) {
    double v = quad::adaptive([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-12);
    EXPECT_NEAR(v, 2.0 / 1e-2 * std::atan(1.0 / 1e-2), 1e-8);
}

TEST(Lagrange, ReproducesPolynomial) {
    auto r = quad::gauss_legendre(8, 1.0, 3.0);
    auto lam = quad::barycentric_weights(r.x);
    std::vector<double> basis(8);
    quad::lagrange_basis(r.x, lam, 2.345, basis.data());
    double s = 0.0;
    for (size_t j = 0; j < 8; ++j) s += basis[j] * std::pow(r.x[j], 7);
    EXPECT_NEAR(s, std::pow(2.345, 7), 1e-9);
}
