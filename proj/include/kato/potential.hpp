#pragma once

#include "kato/core.hpp"

#include <algorithm>
#include <string>

namespace kato {

enum class Shape { gaussian, square_well, exp_decay };

inline std::string to_string(Shape s) {
    switch (s) {
        case Shape::gaussian: return "gaussian";
        case Shape::square_well: return "square_well";
        case Shape::exp_decay: return "exp_decay";
    }
    return "unknown";
}

inline Shape shape_from_string(const std::string& s) {
    if (s == "gaussian") return Shape::gaussian;
    if (s == "square_well") return Shape::square_well;
    if (s == "exp_decay") return Shape::exp_decay;
    throw InvalidArgument("unknown primitive shape '" + s + "'");
}

/**
 * @brief One analytic bump.
 *
 * gaussian:    A exp(-|x-c|^2 / w^2)
 * square_well: A for |x-c| <= w, else 0
 * exp_decay:   A exp(-|x-c| / w)
 */
struct Primitive {
    Shape shape = Shape::gaussian;
    Vec3 center = Vec3::Zero();
    double amplitude = 0.0;
    double width = 1.0;

    /// Profile as a function of the distance to the center.
    double profile(double r) const {
        switch (shape) {
            case Shape::gaussian: return amplitude * std::exp(-(r * r) / (width * width));
            case Shape::square_well: return r <= width ? amplitude : 0.0;
            case Shape::exp_decay: return amplitude * std::exp(-r / width);
        }
        return 0.0;
    }

    /// F(r) = int_0^r |profile(u)| u du, closed form.
    double abs_first_moment(double r) const {
        const double a = std::abs(amplitude), w = width;
        switch (shape) {
            case Shape::gaussian: return 0.5 * a * w * w * -std::expm1(-(r * r) / (w * w));
            case Shape::square_well: {
                const double m = std::min(r, w);
                return 0.5 * a * m * m;
            }
            case Shape::exp_decay: {
                const double u = r / w;
                // 1 - e^{-u}(1+u), written to avoid cancellation for small u
                const double v = u < 1e-3 ? u * u * (0.5 - u / 3.0 + u * u / 8.0) : 1.0 - std::exp(-u) * (1.0 + u);
                return a * w * w * v;
            }
        }
        return 0.0;
    }

    /// Radius beyond which |profile| stays below tol.
    double tail_radius(double tol) const {
        const double a = std::abs(amplitude);
        if (a == 0.0) return 0.0;
        switch (shape) {
            case Shape::gaussian: return a > tol ? width * std::sqrt(std::log(a / tol)) : 0.0;
            case Shape::square_well: return width;
            case Shape::exp_decay: return a > tol ? width * std::log(a / tol) : 0.0;
        }
        return 0.0;
    }
};

/// Real potential on R^3 given as a finite sum of primitives.
struct Potential {
    std::vector<Primitive> primitives;
    double tail_tol = 1e-10;

    static Potential zero() { return {}; }
    static Potential gaussian(double amplitude, double width = 1.0, const Vec3& c = Vec3::Zero()) {
        return single(Shape::gaussian, amplitude, width, c);
    }
    static Potential square_well(double amplitude, double radius = 1.0, const Vec3& c = Vec3::Zero()) {
        return single(Shape::square_well, amplitude, radius, c);
    }
    static Potential exp_decay(double amplitude, double width = 1.0, const Vec3& c = Vec3::Zero()) {
        return single(Shape::exp_decay, amplitude, width, c);
    }
    static Potential single(Shape s, double amplitude, double width, const Vec3& c) {
        if (!(width > 0.0) || !std::isfinite(width) || !std::isfinite(amplitude))
            throw InvalidArgument("primitive needs finite amplitude and positive width");
        Potential p;
        p.primitives.push_back({s, c, amplitude, width});
        return p;
    }

    bool is_zero() const {
        return std::all_of(primitives.begin(), primitives.end(),
                           [](const Primitive& q) { return q.amplitude == 0.0; });
    }

    /// True when every primitive is centered at the origin.
    bool is_radial() const {
        return std::all_of(primitives.begin(), primitives.end(),
                           [](const Primitive& q) { return q.center.norm() == 0.0; });
    }

    /// True when all nonzero amplitudes share one sign.
    bool sign_definite() const {
        bool pos = false, neg = false;
        for (const auto& q : primitives) {
            if (q.amplitude > 0) pos = true;
            if (q.amplitude < 0) neg = true;
        }
        return !(pos && neg);
    }

    double evaluate(const Vec3& x) const {
        double v = 0.0;
        for (const auto& q : primitives) v += q.profile((x - q.center).norm());
        return v;
    }

    /// V(r) for radial potentials.
    double radial(double r) const {
        double v = 0.0;
        for (const auto& q : primitives) v += q.profile(r);
        return v;
    }

    /// Effective support radius; 1 for the zero potential so that grids stay nondegenerate.
    double support_radius() const {
        if (is_zero()) return 1.0;
        const double tol = tail_tol / static_cast<double>(std::max<size_t>(1, primitives.size()));
        double r = 0.0;
        for (const auto& q : primitives)
            if (q.amplitude != 0.0) r = std::max(r, q.center.norm() + q.tail_radius(tol));
        return r > 0.0 ? r : 1.0;
    }

    /// Radii where a centered square well jumps; used as panel breakpoints.
    std::vector<double> radial_breakpoints() const {
        std::vector<double> b;
        for (const auto& q : primitives)
            if (q.shape == Shape::square_well && q.amplitude != 0.0 && q.center.norm() == 0.0) b.push_back(q.width);
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& q : primitives) m += std::abs(q.amplitude);
        return m;
    }

    Potential scaled(double c) const {
        Potential p = *this;
        for (auto& q : p.primitives) q.amplitude *= c;
        return p;
    }

    /// V(alpha x).
    Potential dilated(double alpha) const {
        Potential p = *this;
        for (auto& q : p.primitives) {
            q.width /= alpha;
            q.center /= alpha;
        }
        return p;
    }
};

}  // namespace kato
