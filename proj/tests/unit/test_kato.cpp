#include "kato/kato.hpp"

#include <gtest/gtest.h>

using namespace kato;

namespace {
// Newtonian potential of e^{-r^2}: (4 pi / s) int_0^s e^{-r^2} r^2 dr + 4 pi int_s^inf e^{-r^2} r dr
double gauss_phi(double s) {
    if (s == 0.0) return 2.0 * pi;
    const double inner = std::sqrt(pi) / 4.0 * std::erf(s) - 0.5 * s * std::exp(-s * s);
    return 4.0 * pi / s * inner + 2.0 * pi * std::exp(-s * s);
}
// uniform unit ball
double ball_phi(double s) { return s <= 1.0 ? 2.0 * pi * (1.0 - s * s / 3.0) : 4.0 * pi / (3.0 * s); }
}  // namespace

TEST(Potential, Evaluate) {
    EXPECT_EQ(Potential::zero().evaluate(Vec3(1, 2, 3)), 0.0);
    EXPECT_DOUBLE_EQ(Potential::gaussian(-8.0).evaluate(Vec3::Zero()), -8.0);
    EXPECT_EQ(Potential::square_well(-4.0).evaluate(Vec3(2, 0, 0)), 0.0);
    EXPECT_EQ(Potential::square_well(-4.0).evaluate(Vec3(1, 0, 0)), -4.0);
}

TEST(Potential, TailBelowToleranceOutsideSupport) {
    Potential p;
    p.primitives.push_back({Shape::gaussian, Vec3(0.5, 0, 0), -8.0, 1.0});
    p.primitives.push_back({Shape::exp_decay, Vec3(0, -1, 0), 2.0, 0.7});
    const double R = p.support_radius();
    auto dirs = quad::lebedev(50).dirs;
    for (double f : {1.0, 1.3, 2.0})
        for (const auto& d : dirs) EXPECT_LE(std::abs(p.evaluate(f * R * d)), p.tail_tol);
}

TEST(Kato, ClosedFormRadialValues) {
    auto g = Potential::gaussian(1.0);
    EXPECT_NEAR(kato_norm(g), 2.0 * pi, 1e-9);
    auto b = Potential::square_well(1.0);
    EXPECT_NEAR(kato_norm(b), 2.0 * pi, 1e-9);
    EXPECT_EQ(kato_norm(Potential::zero()), 0.0);
    for (double s : {0.1, 0.5, 0.99, 1.0, 1.7, 3.0}) {
        EXPECT_NEAR(kato_integral(g, Vec3(0, s, 0), 1e300), gauss_phi(s), 1e-9) << s;
        EXPECT_NEAR(kato_integral(b, Vec3(s, 0, 0), 1e300), ball_phi(s), 1e-9) << s;
    }
}

TEST(Kato, LocalModulus) {
    auto b = Potential::square_well(1.0);
    std::vector<Vec3> probe{Vec3::Zero()};
    EXPECT_NEAR(local_kato_modulus(b, 0.1, probe), 2.0 * pi * 0.01, 1e-12);
    auto g = Potential::gaussian(1.0);
    EXPECT_NEAR(local_kato_modulus(g, 10.0, default_probe(g)), 2.0 * pi, 1e-9);
    EXPECT_EQ(local_kato_modulus(Potential::zero(), 0.3, probe), 0.0);
    // off-center probe: small ball fully inside the unit ball
    EXPECT_NEAR(kato_integral(b, Vec3(0.3, 0.2, 0), 0.1), 2.0 * pi * 0.01, 1e-9);
}

TEST(Kato, DistalModulus) {
    auto b = Potential::square_well(1.0);
    auto probe = default_probe(b);
    EXPECT_NEAR(distal_kato_modulus(b, 1.0, probe), 0.0, 1e-14);
    auto g = Potential::gaussian(1.0);
    EXPECT_NEAR(distal_kato_modulus(g, 0.0, default_probe(g)), 2.0 * pi, 1e-9);
    // shell theorem value at y = 0: 4 pi int_R^inf e^{-r^2} r dr
    EXPECT_NEAR(distal_integral(g, Vec3::Zero(), 1.0), 2.0 * pi * std::exp(-1.0), 1e-9);
}

TEST(Kato, ModuliMonotoneAndBounded) {
    auto g = Potential::gaussian(-3.0, 0.8);
    auto probe = default_probe(g, 1.0);
    auto d = kato_diagnostics(g, {0.05, 0.1, 0.5, 1.0, 3.0}, {0.0, 0.5, 1.0, 2.0, 4.0}, probe);
    double prev = 0.0;
    for (auto [e, v] : d.local_modulus) {
        EXPECT_GE(v, prev);
        EXPECT_LE(v, d.kato_norm * (1 + 1e-12));
        prev = v;
    }
    prev = 1e300;
    for (auto [R, v] : d.distal_modulus) {
        EXPECT_LE(v, prev);
        EXPECT_LE(v, d.kato_norm * (1 + 1e-12));
        prev = v;
    }
}

TEST(Kato, GenericRouteAgreesWithReduction) {
    // Off-center Gaussian plus square well; compare the direction-by-direction route with the shifted radial values.
    Potential p;
    p.primitives.push_back({Shape::gaussian, Vec3(0.4, 0, 0), 1.0, 1.0});
    Vec3 y(1.0, 0.5, 0.0);
    double exact = gauss_phi((y - Vec3(0.4, 0, 0)).norm());
    EXPECT_NEAR(kato_integral(p, y, 1e300), exact, 1e-8);
    Potential mixed = p;
    mixed.primitives.push_back({Shape::gaussian, Vec3(-5.0, 0, 0), -1.0, 1.0});
    double ref = exact + gauss_phi((y - Vec3(-5.0, 0, 0)).norm());
    EXPECT_NEAR(kato_integral(mixed, y, 1e300), ref, 1e-3 * ref);
    // distal part of an off-center Gaussian with a tiny excluded ball
    EXPECT_NEAR(distal_integral(p, y, 1e-3), exact, 1e-3 * exact);
}

TEST(Kato, FrostmanBound) {
    for (auto p : {Potential::gaussian(-8.0), Potential::square_well(-4.0), Potential::exp_decay(2.0, 0.5)}) {
        const double K = kato_norm(p);
        for (Vec3 y : {Vec3(0, 0, 0), Vec3(0.5, 0, 0), Vec3(1.2, 0.7, -0.3)})
            for (double R : {0.1, 0.5, 1.0, 3.0}) EXPECT_LE(frostman_mass(p, y, R), R * K);
    }
    // uniform ball mass
    EXPECT_NEAR(frostman_mass(Potential::square_well(1.0), Vec3::Zero(), 2.0), 4.0 * pi / 3.0, 1e-10);
    EXPECT_NEAR(frostman_mass(Potential::square_well(1.0), Vec3(0.3, 0, 0), 0.5), 4.0 * pi / 3.0 * 0.125, 1e-10);
}

TEST(Kato, ScalingInvariance) {
    for (auto p : {Potential::gaussian(-2.0, 1.0), Potential::square_well(-4.0), Potential::exp_decay(-1.0, 0.6)}) {
        const double K = kato_norm(p);
        for (double a : {0.5, 2.0}) EXPECT_NEAR(kato_norm(p.dilated(a)), K / (a * a), 1e-6 * K);
    }
}
