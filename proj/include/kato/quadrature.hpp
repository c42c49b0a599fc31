#pragma once

#include "kato/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <mutex>

namespace kato::quad {

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
inline const Rule1D& gauss_legendre(int n) {
    if (n < 1) throw InvalidOrder("Gauss-Legendre order must be positive");
    static std::mutex mtx;
    static std::map<int, Rule1D> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Rule1D r;
    r.x.resize(static_cast<size_t>(n));
    r.w.resize(static_cast<size_t>(n));
    auto legendre = [n](double z, double& dp) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        return p1;
    };
    for (int i = 0; i < n / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const double dz = legendre(z, dp) / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        legendre(z, dp);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[static_cast<size_t>(i)] = -z;
        r.x[static_cast<size_t>(n - 1 - i)] = z;
        r.w[static_cast<size_t>(i)] = w;
        r.w[static_cast<size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) {
        double dp = 0.0;
        legendre(0.0, dp);
        r.x[static_cast<size_t>(n / 2)] = 0.0;
        r.w[static_cast<size_t>(n / 2)] = 2.0 / (dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

/// Gauss-Legendre rule mapped to [a, b].
inline Rule1D gauss_legendre(int n, double a, double b) {
    Rule1D r = gauss_legendre(n);
    const double h = 0.5 * (b - a), c = 0.5 * (b + a);
    for (size_t i = 0; i < r.x.size(); ++i) {
        r.x[i] = c + h * r.x[i];
        r.w[i] *= h;
    }
    return r;
}

/// Composite Gauss-Legendre rule over consecutive breakpoints.
inline Rule1D composite_gl(const std::vector<double>& breaks, int n) {
    Rule1D out;
    for (size_t k = 0; k + 1 < breaks.size(); ++k) {
        if (!(breaks[k + 1] > breaks[k])) continue;
        Rule1D r = gauss_legendre(n, breaks[k], breaks[k + 1]);
        out.x.insert(out.x.end(), r.x.begin(), r.x.end());
        out.w.insert(out.w.end(), r.w.begin(), r.w.end());
    }
    return out;
}

/// Gauss-Laguerre rule for the weight e^{-x} on [0, inf) (Golub-Welsch).
inline Rule1D gauss_laguerre(int n) {
    if (n < 1) throw InvalidOrder("Gauss-Laguerre order must be positive");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        J(i, i) = 2.0 * i + 1.0;
        if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = i + 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule1D r;
    for (int i = 0; i < n; ++i) {
        r.x.push_back(es.eigenvalues()(i));
        const double v = es.eigenvectors()(0, i);
        r.w.push_back(v * v);
    }
    return r;
}

/// Barycentric weights for Lagrange interpolation on the given nodes.
inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
    std::vector<double> lam(x.size(), 1.0);
    for (size_t j = 0; j < x.size(); ++j) {
        for (size_t k = 0; k < x.size(); ++k)
            if (k != j) lam[j] *= (x[j] - x[k]);
        lam[j] = 1.0 / lam[j];
    }
    return lam;
}

/// Values of all Lagrange basis polynomials at s.
inline void lagrange_basis(const std::vector<double>& x, const std::vector<double>& lam, double s,
                           double* out) {
    const size_t n = x.size();
    for (size_t j = 0; j < n; ++j) {
        if (s == x[j]) {
            for (size_t k = 0; k < n; ++k) out[k] = (k == j) ? 1.0 : 0.0;
            return;
        }
    }
    double den = 0.0;
    for (size_t j = 0; j < n; ++j) {
        out[j] = lam[j] / (s - x[j]);
        den += out[j];
    }
    for (size_t j = 0; j < n; ++j) out[j] /= den;
}

struct SphereRule {
    std::vector<Vec3> dirs;
    std::vector<double> w;  // sums to 4 pi
    int degree = 0;
};

namespace detail {

inline void lebedev_orbit(SphereRule& r, int kind, double weight, double a = 0.0, double b = 0.0) {
    auto add = [&](double x, double y, double z) {
        r.dirs.emplace_back(x, y, z);
        r.w.push_back(weight * 4.0 * pi);
    };
    switch (kind) {
        case 1:  // (1,0,0) 6 points
            for (double s : {1.0, -1.0}) {
                add(s, 0, 0);
                add(0, s, 0);
                add(0, 0, s);
            }
            break;
        case 2: {  // (0,a,a) 12 points
            const double v = std::sqrt(0.5);
            for (double s1 : {1.0, -1.0})
                for (double s2 : {1.0, -1.0}) {
                    add(0, s1 * v, s2 * v);
                    add(s1 * v, 0, s2 * v);
                    add(s1 * v, s2 * v, 0);
                }
            break;
        }
        case 3: {  // (a,a,a) 8 points
            const double v = std::sqrt(1.0 / 3.0);
            for (double s1 : {1.0, -1.0})
                for (double s2 : {1.0, -1.0})
                    for (double s3 : {1.0, -1.0}) add(s1 * v, s2 * v, s3 * v);
            break;
        }
        case 4: {  // (a,a,b) 24 points, b = sqrt(1 - 2a^2)
            const double c = std::sqrt(1.0 - 2.0 * a * a);
            for (double s1 : {1.0, -1.0})
                for (double s2 : {1.0, -1.0})
                    for (double s3 : {1.0, -1.0}) {
                        add(s1 * a, s2 * a, s3 * c);
                        add(s1 * a, s2 * c, s3 * a);
                        add(s1 * c, s2 * a, s3 * a);
                    }
            break;
        }
        case 5: {  // (a,b,0) 24 points
            for (double s1 : {1.0, -1.0})
                for (double s2 : {1.0, -1.0}) {
                    add(s1 * a, s2 * b, 0);
                    add(s1 * b, s2 * a, 0);
                    add(s1 * a, 0, s2 * b);
                    add(s1 * b, 0, s2 * a);
                    add(0, s1 * a, s2 * b);
                    add(0, s1 * b, s2 * a);
                }
            break;
        }
        default:
            break;
    }
}

}  // namespace detail

/// Lebedev rules with 6, 14, 26, 38 or 50 points.
inline SphereRule lebedev(int npts) {
    SphereRule r;
    using detail::lebedev_orbit;
    switch (npts) {
        case 6:
            lebedev_orbit(r, 1, 1.0 / 6.0);
            r.degree = 3;
            break;
        case 14:
            lebedev_orbit(r, 1, 1.0 / 15.0);
            lebedev_orbit(r, 3, 3.0 / 40.0);
            r.degree = 5;
            break;
        case 26:
            lebedev_orbit(r, 1, 1.0 / 21.0);
            lebedev_orbit(r, 2, 4.0 / 105.0);
            lebedev_orbit(r, 3, 9.0 / 280.0);
            r.degree = 7;
            break;
        case 38:
            lebedev_orbit(r, 1, 1.0 / 105.0);
            lebedev_orbit(r, 3, 9.0 / 280.0);
            lebedev_orbit(r, 5, 1.0 / 35.0, 0.4597008433809831, 0.8880738339771153);
            r.degree = 9;
            break;
        case 50:
            lebedev_orbit(r, 1, 4.0 / 315.0);
            lebedev_orbit(r, 2, 64.0 / 2835.0);
            lebedev_orbit(r, 3, 27.0 / 1280.0);
            lebedev_orbit(r, 4, 14641.0 / 725760.0, 1.0 / std::sqrt(11.0));
            r.degree = 11;
            break;
        default:
            throw InvalidOrder("supported Lebedev sizes are 6, 14, 26, 38, 50; got " + std::to_string(npts));
    }
    return r;
}

/// Gauss-Legendre in cos(theta) times trapezoid in phi; exact to degree 2n-1.
inline SphereRule product_sphere(int n) {
    if (n < 1) throw InvalidOrder("product sphere rule needs n >= 1");
    SphereRule r;
    const Rule1D g = gauss_legendre(n);
    const int nphi = 2 * n;
    for (int i = 0; i < n; ++i) {
        const double ct = g.x[static_cast<size_t>(i)], st = std::sqrt(1.0 - ct * ct);
        for (int k = 0; k < nphi; ++k) {
            const double ph = 2.0 * pi * (k + 0.5) / nphi;
            r.dirs.emplace_back(st * std::cos(ph), st * std::sin(ph), ct);
            r.w.push_back(g.w[static_cast<size_t>(i)] * 2.0 * pi / nphi);
        }
    }
    r.degree = 2 * n - 1;
    return r;
}

/// Angular rule for a requested point count: Lebedev sizes map directly, larger counts use a product rule.
inline SphereRule angular_rule(int npts) {
    switch (npts) {
        case 6:
        case 14:
        case 26:
        case 38:
        case 50:
            return lebedev(npts);
        default:
            break;
    }
    if (npts < 6) throw InvalidOrder("angular order below 6 points");
    int n = std::max(2, static_cast<int>(std::lround(std::sqrt(npts / 2.0))));
    return product_sphere(n);
}

/// Adaptive Gauss-Legendre integration by interval bisection (10 vs 20 point estimates).
inline double adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                       double rel_tol = 1e-10, int max_depth = 40) {
    if (a == b) return 0.0;
    static const Rule1D g10 = gauss_legendre(10), g20 = gauss_legendre(20);
    auto est = [&](double lo, double hi, const Rule1D& g) {
        const double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
        double s = 0.0;
        for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
        return s * h;
    };
    std::function<double(double, double, double, int)> rec = [&](double lo, double hi, double tol,
                                                                  int depth) -> double {
        const double coarse = est(lo, hi, g10), fine = est(lo, hi, g20);
        if (std::abs(fine - coarse) <= std::max(tol, rel_tol * std::abs(fine)) || depth >= max_depth)
            return fine;
        const double mid = 0.5 * (lo + hi);
        return rec(lo, mid, 0.5 * tol, depth + 1) + rec(mid, hi, 0.5 * tol, depth + 1);
    };
    return rec(a, b, abs_tol, 0);
}

}  // namespace kato::quad
