#pragma once

#include "kato/potential.hpp"
#include "kato/quadrature.hpp"

#include <limits>
#include <map>

namespace kato {

struct KatoQuadrature {
    int nodes = 16;               // Gauss-Legendre points per panel
    int panels = 4;               // panels per breakpoint interval at the coarse level
    int angular_n = 32;           // product sphere parameter for the generic route
    double rel_tol = 1e-6;        // radial-reduction route
    double generic_rel_tol = 1e-3;  // direction-by-direction route (off-center or mixed sign)
};

struct KatoDiagnostics {
    double kato_norm = 0.0;
    std::map<double, double> local_modulus;
    std::map<double, double> distal_modulus;
};

/// Primitive centers plus a cubic lattice of the given step inside radius R_supp + margin.
inline std::vector<Vec3> default_probe(const Potential& p, double step = 0.5, double margin = 2.0) {
    std::vector<Vec3> out;
    for (const auto& q : p.primitives) out.push_back(q.center);
    const double R = p.support_radius() + margin;
    const int n = static_cast<int>(std::floor(R / step));
    for (int i = -n; i <= n; ++i)
        for (int j = -n; j <= n; ++j)
            for (int k = -n; k <= n; ++k) {
                Vec3 y(i * step, j * step, k * step);
                if (y.norm() <= R) out.push_back(y);
            }
    return out;
}

namespace detail {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Integrate f over [a,b] split at the sorted interior breakpoints, m panels each.
template <class F>
double panel_integral(F&& f, double a, double b, std::vector<double> bps, int m, int n) {
    bps.push_back(a);
    bps.push_back(b);
    std::sort(bps.begin(), bps.end());
    const quad::Rule1D& g = quad::gauss_legendre(n);
    double sum = 0.0;
    for (size_t k = 0; k + 1 < bps.size(); ++k) {
        const double lo = std::max(a, bps[k]), hi = std::min(b, bps[k + 1]);
        if (!(hi > lo)) continue;
        const double h = (hi - lo) / m;
        for (int j = 0; j < m; ++j) {
            const double c = lo + (j + 0.5) * h;
            double s = 0.0;
            for (size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + 0.5 * h * g.x[i]);
            sum += 0.5 * h * s;
        }
    }
    return sum;
}

template <class Eval>
double two_level(Eval&& eval, const KatoQuadrature& q, double tol, const char* what) {
    const double coarse = eval(q.panels, q.nodes);
    const double fine = eval(2 * q.panels, q.nodes);
    if (std::abs(fine - coarse) > tol * std::abs(fine) + 1e-14)
        throw NonConvergedQuadrature(std::string(what) + ": refinement levels differ (" + std::to_string(coarse) +
                                     " vs " + std::to_string(fine) + ")");
    return fine;
}

inline double integration_reach(const Primitive& q) {
    // radius beyond which |profile| < 1e-17 |A|
    Primitive t = q;
    t.amplitude = 1.0;
    return t.tail_radius(1e-17);
}

// int_{|x-y|<eps} |q(x)|/|x-y| dx with s = |y - c|, by the shell-average reduction.
inline double primitive_local(const Primitive& q, double s, double eps, int m, int n) {
    if (q.amplitude == 0.0) return 0.0;
    const double reach = integration_reach(q);
    if (s < 1e-9 * q.width) return 4.0 * pi * q.abs_first_moment(std::min(eps, reach));
    const double top = std::min(eps, s + reach);
    std::vector<double> bps{s};
    if (q.shape == Shape::square_well) {
        const double a = q.width;
        for (double b : {a - s, s - a, s + a})
            if (b > 0.0) bps.push_back(b);
    }
    auto f = [&](double rho) { return q.abs_first_moment(s + rho) - q.abs_first_moment(std::abs(s - rho)); };
    return 2.0 * pi / s * panel_integral(f, 0.0, top, bps, m, n);
}

// int_{|x-y|<=R} |q(x)| dx.
inline double primitive_mass(const Primitive& q, double s, double R, int m, int n) {
    if (q.amplitude == 0.0) return 0.0;
    std::vector<double> bps;
    if (s < 1e-9 * q.width) {
        if (q.shape == Shape::square_well) bps.push_back(q.width);
        auto f = [&](double r) { return r * r * std::abs(q.profile(r)); };
        return 4.0 * pi * panel_integral(f, 0.0, R, bps, m, n);
    }
    bps.push_back(s);
    if (q.shape == Shape::square_well) {
        const double a = q.width;
        for (double b : {a - s, s - a, s + a})
            if (b > 0.0) bps.push_back(b);
    }
    auto f = [&](double rho) {
        return rho * (q.abs_first_moment(s + rho) - q.abs_first_moment(std::abs(s - rho)));
    };
    return 2.0 * pi / s * panel_integral(f, 0.0, R, bps, m, n);
}

// Shell theorem for a centered primitive: int_{|x|>R} |q(x)|/|x-y| dx with s = |y|.
inline double primitive_distal_centered(const Primitive& q, double s, double R, int m, int n) {
    if (q.amplitude == 0.0) return 0.0;
    const double top = std::max(R, integration_reach(q));
    if (top <= R) return 0.0;
    std::vector<double> bps;
    if (s > R && s < top) bps.push_back(s);
    if (q.shape == Shape::square_well && q.width > R && q.width < top) bps.push_back(q.width);
    auto f = [&](double r) { return std::abs(q.profile(r)) * r * r / std::max(r, s); };
    return 4.0 * pi * panel_integral(f, R, top, bps, m, n);
}

// Direction-by-direction integral of weight(rho) |V(y + rho w)| over rho in [0, rho_max],
// restricted to |x| > R_out when R_out > 0. Jumps are located analytically per direction.
template <class Weight>
double generic_integral(const Potential& p, const Vec3& y, double rho_max, double R_out, Weight&& weight,
                        int angular_n, int m, int n) {
    const quad::SphereRule sph = quad::product_sphere(angular_n);
    auto sphere_hits = [](const Vec3& d, const Vec3& w, double a, std::vector<double>& out) {
        // |d + rho w| = a
        const double b = d.dot(w), c = d.squaredNorm() - a * a, disc = b * b - c;
        if (disc <= 0.0) return;
        const double sq = std::sqrt(disc);
        for (double r : {-b - sq, -b + sq})
            if (r > 0.0) out.push_back(r);
    };
    double total = 0.0;
    for (size_t k = 0; k < sph.dirs.size(); ++k) {
        const Vec3& w = sph.dirs[k];
        std::vector<double> bps;
        for (const auto& q : p.primitives)
            if (q.shape == Shape::square_well) sphere_hits(y - q.center, w, q.width, bps);
        if (R_out > 0.0) sphere_hits(y, w, R_out, bps);
        bps.erase(std::remove_if(bps.begin(), bps.end(), [&](double r) { return r >= rho_max; }), bps.end());
        std::sort(bps.begin(), bps.end());
        std::vector<double> edges{0.0};
        edges.insert(edges.end(), bps.begin(), bps.end());
        edges.push_back(rho_max);
        double line = 0.0;
        for (size_t e = 0; e + 1 < edges.size(); ++e) {
            const double lo = edges[e], hi = edges[e + 1];
            if (!(hi > lo)) continue;
            if (R_out > 0.0 && (y + 0.5 * (lo + hi) * w).norm() <= R_out) continue;
            auto f = [&](double rho) { return weight(rho) * std::abs(p.evaluate(y + rho * w)); };
            line += panel_integral(f, lo, hi, {}, m, n);
        }
        total += sph.w[k] * line;
    }
    return total;
}

// Radial potentials only depend on |y|; drop probes with repeated norms.
inline std::vector<Vec3> reduce_probe(const Potential& p, const std::vector<Vec3>& probe) {
    if (!p.is_radial()) return probe;
    std::vector<double> seen;
    std::vector<Vec3> out;
    for (const auto& y : probe) seen.push_back(y.squaredNorm());
    std::vector<size_t> idx(seen.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return seen[a] < seen[b]; });
    for (size_t k = 0; k < idx.size(); ++k)
        if (k == 0 || seen[idx[k]] != seen[idx[k - 1]]) out.push_back(probe[idx[k]]);
    return out;
}

inline double reach_from(const Potential& p, const Vec3& y) {
    double r = 0.0;
    for (const auto& q : p.primitives) r = std::max(r, (y - q.center).norm() + integration_reach(q));
    return r;
}

}  // namespace detail

/// int_{|x-y|<eps} |V(x)|/|x-y| dx at one probe point (eps may be infinite).
inline double kato_integral(const Potential& p, const Vec3& y, double eps, const KatoQuadrature& q = {}) {
    if (p.is_zero()) return 0.0;
    if (p.sign_definite()) {
        auto eval = [&](int m, int n) {
            double s = 0.0;
            for (const auto& pr : p.primitives) s += detail::primitive_local(pr, (y - pr.center).norm(), eps, m, n);
            return s;
        };
        return detail::two_level(eval, q, q.rel_tol, "kato_integral");
    }
    const double top = std::min(eps, detail::reach_from(p, y));
    auto eval = [&](int m, int n) {
        const int na = m == q.panels ? q.angular_n : (3 * q.angular_n) / 2;
        return detail::generic_integral(p, y, top, 0.0, [](double rho) { return rho; }, na, m, n);
    };
    return detail::two_level(eval, q, q.generic_rel_tol, "kato_integral");
}

/// int_{|x|>R} |V(x)|/|x-y| dx at one probe point.
inline double distal_integral(const Potential& p, const Vec3& y, double R, const KatoQuadrature& q = {}) {
    if (p.is_zero()) return 0.0;
    if (p.sign_definite() && p.is_radial()) {
        auto eval = [&](int m, int n) {
            double s = 0.0;
            for (const auto& pr : p.primitives) s += detail::primitive_distal_centered(pr, y.norm(), R, m, n);
            return s;
        };
        return detail::two_level(eval, q, q.rel_tol, "distal_integral");
    }
    const double top = detail::reach_from(p, y);
    auto eval = [&](int m, int n) {
        const int na = m == q.panels ? q.angular_n : (3 * q.angular_n) / 2;
        return detail::generic_integral(p, y, top, R, [](double rho) { return rho; }, na, m, n);
    };
    return detail::two_level(eval, q, q.generic_rel_tol, "distal_integral");
}

/// int_{|x-y|<=R} |V(x)| dx.
inline double frostman_mass(const Potential& p, const Vec3& y, double R, const KatoQuadrature& q = {}) {
    if (p.is_zero()) return 0.0;
    if (p.sign_definite()) {
        auto eval = [&](int m, int n) {
            double s = 0.0;
            for (const auto& pr : p.primitives) s += detail::primitive_mass(pr, (y - pr.center).norm(), R, m, n);
            return s;
        };
        return detail::two_level(eval, q, q.rel_tol, "frostman_mass");
    }
    const double top = std::min(R, detail::reach_from(p, y));
    auto eval = [&](int m, int n) {
        const int na = m == q.panels ? q.angular_n : (3 * q.angular_n) / 2;
        return detail::generic_integral(p, y, top, 0.0, [](double rho) { return rho * rho; }, na, m, n);
    };
    return detail::two_level(eval, q, q.generic_rel_tol, "frostman_mass");
}

inline double kato_norm(const Potential& p, const std::vector<Vec3>& probe, const KatoQuadrature& q = {}) {
    if (probe.empty()) throw InvalidArgument("kato_norm needs a nonempty probe set");
    double best = 0.0;
    for (const auto& y : detail::reduce_probe(p, probe)) best = std::max(best, kato_integral(p, y, detail::inf, q));
    return best;
}

inline double kato_norm(const Potential& p) { return kato_norm(p, default_probe(p)); }

inline double local_kato_modulus(const Potential& p, double eps, const std::vector<Vec3>& probe,
                                 const KatoQuadrature& q = {}) {
    if (!(eps > 0.0)) throw InvalidArgument("local modulus needs eps > 0");
    if (probe.empty()) throw InvalidArgument("local modulus needs a nonempty probe set");
    double best = 0.0;
    for (const auto& y : detail::reduce_probe(p, probe)) best = std::max(best, kato_integral(p, y, eps, q));
    return best;
}

inline double distal_kato_modulus(const Potential& p, double R, const std::vector<Vec3>& probe,
                                  const KatoQuadrature& q = {}) {
    if (R < 0.0) throw InvalidArgument("distal modulus needs R >= 0");
    if (probe.empty()) throw InvalidArgument("distal modulus needs a nonempty probe set");
    double best = 0.0;
    for (const auto& y : detail::reduce_probe(p, probe)) best = std::max(best, distal_integral(p, y, R, q));
    return best;
}

inline KatoDiagnostics kato_diagnostics(const Potential& p, const std::vector<double>& eps_list,
                                        const std::vector<double>& R_list, const std::vector<Vec3>& probe,
                                        const KatoQuadrature& q = {}) {
    KatoDiagnostics d;
    d.kato_norm = kato_norm(p, probe, q);
    for (double e : eps_list) d.local_modulus[e] = local_kato_modulus(p, e, probe, q);
    for (double R : R_list) d.distal_modulus[R] = distal_kato_modulus(p, R, probe, q);
    return d;
}

}  // namespace kato
