#pragma once

#include "kato/core.hpp"

namespace kato {

/**
 * @brief Spectral parameter eta with lambda = eta^2 and Im eta >= 0.
 *
 * Boundary values lambda + i0 and lambda - i0 for lambda > 0 correspond to
 * eta = +sqrt(lambda) and eta = -sqrt(lambda).
 */
class SpectralParameter {
public:
    SpectralParameter() = default;
    explicit SpectralParameter(cplx eta) : eta_(eta) {
        if (!(eta.imag() >= 0.0) || !std::isfinite(eta.real()) || !std::isfinite(eta.imag()))
            throw InvalidArgument("spectral parameter needs finite eta with Im eta >= 0");
    }
    SpectralParameter(double re, double im) : SpectralParameter(cplx(re, im)) {}

    /// lambda + i0 (upper boundary value) for real lambda; lambda < 0 gives eta = i sqrt(-lambda).
    static SpectralParameter upper(double lambda) {
        return lambda >= 0 ? SpectralParameter(std::sqrt(lambda), 0.0) : SpectralParameter(0.0, std::sqrt(-lambda));
    }
    /// lambda - i0.
    static SpectralParameter lower(double lambda) {
        return lambda >= 0 ? SpectralParameter(-std::sqrt(lambda), 0.0) : SpectralParameter(0.0, std::sqrt(-lambda));
    }
    static SpectralParameter imaginary(double kappa) { return SpectralParameter(0.0, kappa); }

    cplx eta() const { return eta_; }
    cplx lambda() const { return eta_ * eta_; }

private:
    cplx eta_{0.0, 0.0};
};

/// e^{i eta s} / (4 pi s) as a function of the separation.
inline cplx resolvent0_r(cplx eta, double s) { return std::exp(cplx(0.0, 1.0) * eta * s) / (4.0 * pi * s); }

inline cplx resolvent0(const SpectralParameter& eta, const Vec3& x, const Vec3& y) {
    const double s = (x - y).norm();
    if (s == 0.0) throw CoincidentPoints("resolvent0 is singular at x = y");
    return resolvent0_r(eta.eta(), s);
}

inline double heat0_r(double t, double s) {
    if (!(t > 0.0)) throw NonPositiveTime("heat kernel needs t > 0");
    return std::pow(4.0 * pi * t, -1.5) * std::exp(-s * s / (4.0 * t));
}
inline double heat0(double t, const Vec3& x, const Vec3& y) { return heat0_r(t, (x - y).norm()); }

/// Free Poisson kernel (1/pi^2) t / (t^2 + s^2)^2; this constant has total mass one.
inline double poisson0_r(double t, double s) {
    if (!(t > 0.0)) throw NonPositiveTime("Poisson kernel needs t > 0");
    const double d = t * t + s * s;
    return t / (pi * pi * d * d);
}
inline double poisson0(double t, const Vec3& x, const Vec3& y) { return poisson0_r(t, (x - y).norm()); }

namespace detail {

inline constexpr double bessel_crossover = 12.0;

inline double bessel_j_series(double nu, double z) {
    const long double h = 0.5L * z, q = -h * h;
    long double term = std::pow(h, static_cast<long double>(nu)) / std::tgamma(static_cast<long double>(nu) + 1.0L);
    long double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= q / (static_cast<long double>(k) * (k + nu));
        sum += term;
        if (std::abs(term) < 1e-21L * std::abs(sum) && k > h) break;
    }
    return static_cast<double>(sum);
}

inline double bessel_j_asymptotic(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    double P = 0.0, Q = 0.0, a = 1.0, prev = 1e300;
    for (int k = 0; k < 60; ++k) {
        // a_k(nu) / z^k
        if (k > 0) a *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
        if (std::abs(a) > prev && k > 2) break;
        prev = std::abs(a);
        const int sgn = ((k / 2) % 2 == 0) ? 1 : -1;
        if (k % 2 == 0)
            P += sgn * a;
        else
            Q += sgn * a;
        if (std::abs(a) < 1e-17) break;
    }
    const double w = z - 0.5 * nu * pi - 0.25 * pi;
    return std::sqrt(2.0 / (pi * z)) * (P * std::cos(w) - Q * std::sin(w));
}

}  // namespace detail

/// J_nu(z) for nu in [0, 6] and z >= 0; series up to z = 12, Hankel asymptotics beyond.
inline double bessel_j(double nu, double z) {
    if (!(nu >= 0.0 && nu <= 6.0) || !(z >= 0.0) || !std::isfinite(z))
        throw OutOfSupportedRange("bessel_j supports nu in [0, 6] and finite z >= 0");
    if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    return z <= detail::bessel_crossover ? detail::bessel_j_series(nu, z) : detail::bessel_j_asymptotic(nu, z);
}

/// Disagreement of the two branches at the cross-over point.
inline double bessel_crossover_gap(double nu) {
    const double z = detail::bessel_crossover;
    return std::abs(detail::bessel_j_series(nu, z) - detail::bessel_j_asymptotic(nu, z));
}

/// J_nu(a) / a^nu, continuous at a = 0.
inline double bessel_j_scaled(double nu, double a) {
    if (a < 1e-6) return (1.0 - a * a / (4.0 * (nu + 1.0))) / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
    return bessel_j(nu, a) / std::pow(a, nu);
}

/**
 * @brief Kernel of (1 - (-Delta)/lambda0)_+^alpha as a function of the separation.
 *
 * lambda0^{3/2} 2^alpha Gamma(alpha+1) (2 pi)^{-3/2} J_{3/2+alpha}(a) / a^{3/2+alpha}, a = sqrt(lambda0) s.
 */
inline double br0_r(double alpha, double lambda0, double s) {
    if (!(alpha > -1.0) || !(alpha <= 4.5)) throw OutOfSupportedRange("br0 needs alpha in (-1, 4.5]");
    if (!(lambda0 > 0.0)) throw InvalidArgument("br0 needs lambda0 > 0");
    const double nu = 1.5 + alpha, a = std::sqrt(lambda0) * s;
    return std::pow(lambda0, 1.5) * std::pow(2.0, alpha) * std::tgamma(alpha + 1.0) * std::pow(2.0 * pi, -1.5) *
           bessel_j_scaled(nu, a);
}

inline double br0_kernel(double alpha, double lambda0, const Vec3& x, const Vec3& y) {
    const double s = (x - y).norm();
    if (s == 0.0) throw CoincidentPoints("br0_kernel takes distinct points");
    return br0_r(alpha, lambda0, s);
}

}  // namespace kato
