#include "kato/channel.hpp"
#include "kato/quadrature.hpp"

#include <gtest/gtest.h>

using namespace kato;

namespace {
channel::Panels unit_panels(int order = 12, double max_len = 0.25) {
    return channel::make_panels(channel::split_edges(1.0, {}, max_len), order);
}
}  // namespace

// int_0^1 g_0(rho, s) s^2 ds at eta = 0 is rho^2/3 + (1 - rho^2)/2.
TEST(ChannelOperator, ZeroEnergySWaveOnConstant) {
    auto P = unit_panels();
    channel::Operator op(P, 0.0, 2, {0.0, 0.37, 0.5, 1.0, 1.7});
    Eigen::MatrixXcd W = op.weights(0);
    for (int row = 0; row < op.rows(); ++row) {
        const double rho = row < op.n() ? P.r[static_cast<size_t>(row)] : std::vector<double>{0.0, 0.37, 0.5, 1.0, 1.7}[static_cast<size_t>(row - op.n())];
        const double exact = rho <= 1.0 ? rho * rho / 3.0 + 0.5 * (1.0 - rho * rho) : 1.0 / (3.0 * rho);
        EXPECT_NEAR(W.row(row).sum().real(), exact, 1e-13);
        EXPECT_NEAR(W.row(row).sum().imag(), 0.0, 1e-15);
    }
}

// Imaginary eta: g_0 = sinh(k r<) e^{-k r>} / (k r< r>); compare with adaptive quadrature on s^3.
TEST(ChannelOperator, ImaginaryEtaMatchesAdaptive) {
    auto P = unit_panels();
    const double k = 1.7;
    const std::vector<double> ev{0.2, 0.63, 1.4};
    channel::Operator op(P, cplx(0.0, k), 3, ev);
    Eigen::MatrixXcd W = op.weights(0);
    Eigen::VectorXcd f(op.n());
    for (int i = 0; i < op.n(); ++i) f[i] = std::pow(P.r[static_cast<size_t>(i)], 3);
    for (size_t m = 0; m < ev.size(); ++m) {
        const double rho = ev[m];
        auto g = [&](double s) {
            const double lo = std::min(rho, s), hi = std::max(rho, s);
            return std::sinh(k * lo) * std::exp(-k * hi) / (k * lo * hi) * s * s * s * s * s;
        };
        double exact = quad::adaptive(g, 0.0, std::min(rho, 1.0), 1e-15, 1e-14);
        if (rho < 1.0) exact += quad::adaptive(g, rho, 1.0, 1e-15, 1e-14);
        const cplx got = (W.row(op.n() + static_cast<int>(m)) * f)(0);
        EXPECT_NEAR(got.real(), exact, 1e-12 * std::abs(exact));
        EXPECT_NEAR(got.imag(), 0.0, 1e-14);
    }
}

// Higher l at real eta: W_l f against direct quadrature of pref j_l(r<) h_l(r>).
TEST(ChannelOperator, RealEtaHigherChannel) {
    auto P = unit_panels(14, 0.2);
    const double eta = 6.0, rho = 0.55;
    const int l = 4;
    channel::Operator op(P, eta, 6, {rho});
    Eigen::MatrixXcd W = op.weights(l);
    cplx got = 0.0;
    for (int i = 0; i < op.n(); ++i) got += W(op.n(), i) * std::cos(P.r[static_cast<size_t>(i)]);
    auto kern = [&](double s, bool re) {
        std::vector<cplxl> j1(7), h1(7), j2(7), h2(7);
        const double lo = std::min(rho, s), hi = std::max(rho, s);
        sph_bessel_jh(cplxl(eta * lo, 0), 6, j1.data(), h1.data());
        sph_bessel_jh(cplxl(eta * hi, 0), 6, j2.data(), h2.data());
        const cplxl g = cplxl(0, eta) * j1[l] * h2[l] * static_cast<long double>(s * s * std::cos(s));
        return static_cast<double>(re ? g.real() : g.imag());
    };
    const double re = quad::adaptive([&](double s) { return kern(s, true); }, 0.0, rho, 1e-15, 1e-13) +
                      quad::adaptive([&](double s) { return kern(s, true); }, rho, 1.0, 1e-15, 1e-13);
    const double im = quad::adaptive([&](double s) { return kern(s, false); }, 0.0, rho, 1e-15, 1e-13) +
                      quad::adaptive([&](double s) { return kern(s, false); }, rho, 1.0, 1e-15, 1e-13);
    EXPECT_NEAR(got.real(), re, 1e-11);
    EXPECT_NEAR(got.imag(), im, 1e-11);
}

// s-wave square well V0 = 4: I + W_0 V is singular at kappa^2 = 0.407101483641.
TEST(ChannelOperator, SquareWellBoundStateIsSingular) {
    auto P = unit_panels(12, 0.25);
    auto smin = [&](double kappa) {
        channel::Operator op(P, cplx(0.0, kappa), 0);
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(op.n(), op.n()) + op.weights(0) * (-4.0);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
        return svd.singularValues().minCoeff();
    };
    const double k0 = std::sqrt(0.407101483641);
    EXPECT_LT(smin(k0), 1e-9);
    EXPECT_GT(smin(k0 * 1.01), 1e-4);
}
