#pragma once

#include "kato/core.hpp"

namespace kato {

/// Orthonormal real spherical harmonic Y_lm on the unit sphere, m in [-l, l].
inline double real_ylm(int l, int m, const Vec3& dir) {
    if (l < 0 || std::abs(m) > l) throw InvalidArgument("real_ylm needs |m| <= l");
    const double n = dir.norm();
    const Vec3 u = n > 0.0 ? Vec3(dir / n) : Vec3(0.0, 0.0, 1.0);
    const double ct = std::clamp(u.z(), -1.0, 1.0), st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double phi = std::atan2(u.y(), u.x());
    const int am = std::abs(m);
    // normalised associated Legendre by the standard upward recurrences
    double pmm = std::sqrt(1.0 / (4.0 * pi));
    for (int k = 1; k <= am; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * st;
    double plm = pmm;
    if (l > am) {
        double pm1 = std::sqrt(2.0 * am + 3.0) * ct * pmm;
        double prev = pmm;
        plm = pm1;
        for (int ll = am + 2; ll <= l; ++ll) {
            const double a = std::sqrt((4.0 * ll * ll - 1.0) / (static_cast<double>(ll * ll - am * am)));
            const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - am * am) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
            const double next = a * (ct * pm1 - b * prev);
            prev = pm1;
            pm1 = next;
        }
        plm = pm1;
    }
    if (m == 0) return plm;
    return std::sqrt(2.0) * plm * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

}  // namespace kato
