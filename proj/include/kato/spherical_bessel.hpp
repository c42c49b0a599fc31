#pragma once

#include "kato/core.hpp"

namespace kato {

/**
 * @brief j_l(z) and h^{(1)}_l(z) for l = 0..L at complex z != 0, in extended precision.
 *
 * j_l comes from Miller's downward recurrence normalised against j_0 or j_1,
 * h_l from the (stable) upward recurrence. Extended precision keeps the
 * products j_l(z1) h_l(z2) representable for l in the hundreds.
 */
inline void sph_bessel_jh(cplxl z, int L, cplxl* j, cplxl* h) {
    const cplxl I(0.0L, 1.0L);
    const long double az = std::abs(z);
    const cplxl zi = 1.0L / z;
    // j_0, j_1
    cplxl j0, j1;
    if (az < 1e-3L) {
        const cplxl z2 = z * z;
        j0 = 1.0L - z2 / 6.0L + z2 * z2 / 120.0L;
        j1 = z / 3.0L - z * z2 / 30.0L + z * z2 * z2 / 840.0L;
    } else {
        j0 = std::sin(z) / z;
        j1 = std::sin(z) / (z * z) - std::cos(z) / z;
    }
    if (h) {
        const cplxl e = std::exp(I * z);
        h[0] = -I * e / z;
        if (L >= 1) h[1] = -e * (z + I) / (z * z);
        for (int l = 1; l < L; ++l) h[l + 1] = static_cast<long double>(2 * l + 1) * zi * h[l] - h[l - 1];
    }
    if (!j) return;
    j[0] = j0;
    if (L == 0) return;
    const int N = L + static_cast<int>(az) + 40 + static_cast<int>(std::sqrt(40.0L * (L + az)));
    cplxl fp1 = 0.0L, f = 1e-30L;
    cplxl f0 = 0.0L, f1 = 0.0L;
    for (int l = N; l >= 1; --l) {
        const cplxl fm1 = static_cast<long double>(2 * l + 1) * zi * f - fp1;
        fp1 = f;
        f = fm1;  // f is now f_{l-1}
        if (l - 1 <= L) j[l - 1] = f;
        if (l <= L) j[l] = fp1;
        if (std::max(std::fabs(f.real()), std::fabs(f.imag())) > 1e300L) {
            const long double s = 1e-300L;
            f *= s;
            fp1 *= s;
            for (int k = l - 1; k <= L && k <= N; ++k)
                if (k >= 0) j[k] *= s;
        }
    }
    f0 = j[0];
    f1 = j[1];
    const cplxl scale = (std::abs(j0) >= std::abs(j1)) ? j0 / f0 : j1 / f1;
    for (int l = 0; l <= L; ++l) j[l] *= scale;
}

/// Real j_l(x), y_l(x) for x > 0 and l = 0..L in extended precision.
inline void sph_bessel_jy(long double x, int L, long double* j, long double* y) {
    const long double s = std::sin(x), c = std::cos(x);
    if (y) {
        y[0] = -c / x;
        if (L >= 1) y[1] = -c / (x * x) - s / x;
        for (int l = 1; l < L; ++l) y[l + 1] = static_cast<long double>(2 * l + 1) / x * y[l] - y[l - 1];
    }
    if (!j) return;
    long double j0, j1;
    if (x < 1e-3L) {
        const long double x2 = x * x;
        j0 = 1.0L - x2 / 6.0L + x2 * x2 / 120.0L;
        j1 = x / 3.0L - x * x2 / 30.0L + x * x2 * x2 / 840.0L;
    } else {
        j0 = s / x;
        j1 = s / (x * x) - c / x;
    }
    j[0] = j0;
    if (L == 0) return;
    const int N = L + static_cast<int>(x) + 40 + static_cast<int>(std::sqrt(40.0L * (L + x)));
    long double fp1 = 0.0L, f = 1e-30L;
    for (int l = N; l >= 1; --l) {
        const long double fm1 = static_cast<long double>(2 * l + 1) / x * f - fp1;
        fp1 = f;
        f = fm1;
        if (l - 1 <= L) j[l - 1] = f;
        if (l <= L) j[l] = fp1;
        if (std::abs(f) > 1e300L) {
            const long double sc = 1e-300L;
            f *= sc;
            fp1 *= sc;
            for (int k = l - 1; k <= L; ++k) j[k] *= sc;
        }
    }
    const long double scale = (std::abs(j0) >= std::abs(j1)) ? j0 / j[0] : j1 / j[1];
    for (int l = 0; l <= L; ++l) j[l] *= scale;
}

}  // namespace kato
