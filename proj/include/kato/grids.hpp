#pragma once

#include "kato/channel.hpp"
#include "kato/potential.hpp"

#include <iomanip>
#include <ostream>

namespace kato {

/// radial_order is the Gauss-Legendre order per radial panel; panels end at potential breakpoints
/// and are at most panel_length long.
struct GridSpec {
    int radial_order = 16;
    int angular_order = 26;
    double panel_length = 1.0;

    GridSpec refined(double factor) const {
        GridSpec g = *this;
        g.radial_order = static_cast<int>(std::ceil(radial_order * factor));
        return g;
    }
};

struct SupportGrid {
    GridSpec spec;
    double radius = 0.0;
    bool radial = true;  // potential is centered; channel routes apply
    channel::Panels panels;
    quad::SphereRule sphere;
    std::vector<Vec3> nodes;
    std::vector<double> weights;           // include r^2
    std::vector<double> potential_values;  // V at nodes
    std::vector<double> radial_values;     // V at radial nodes (radial potentials)

    int size() const { return static_cast<int>(nodes.size()); }
    int n_radial() const { return panels.size(); }
    int n_angular() const { return static_cast<int>(sphere.dirs.size()); }
    int index(int ir, int ia) const { return ir * n_angular() + ia; }

    void write_csv(std::ostream& os) const {
        os << "x,y,z,w,V\n" << std::setprecision(17);
        for (int i = 0; i < size(); ++i) {
            const Vec3& x = nodes[static_cast<size_t>(i)];
            os << x.x() << ',' << x.y() << ',' << x.z() << ',' << weights[static_cast<size_t>(i)] << ','
               << potential_values[static_cast<size_t>(i)] << '\n';
        }
    }
};

inline SupportGrid build_support_grid(const Potential& p, const GridSpec& spec) {
    if (spec.radial_order < 2 || spec.angular_order < 2) throw InvalidOrder("grid orders must be >= 2");
    if (!(spec.panel_length > 0.0)) throw InvalidArgument("panel_length must be positive");
    SupportGrid g;
    g.spec = spec;
    g.radius = p.support_radius();
    g.radial = p.is_radial();
    g.panels = channel::make_panels(channel::split_edges(g.radius, p.radial_breakpoints(), spec.panel_length),
                                    spec.radial_order);
    g.sphere = quad::angular_rule(std::max(6, spec.angular_order));
    for (int ir = 0; ir < g.panels.size(); ++ir) {
        const double r = g.panels.r[static_cast<size_t>(ir)];
        g.radial_values.push_back(g.radial ? p.radial(r) : 0.0);
        for (size_t ia = 0; ia < g.sphere.dirs.size(); ++ia) {
            const Vec3 x = r * g.sphere.dirs[ia];
            g.nodes.push_back(x);
            g.weights.push_back(g.panels.measure(ir) * g.sphere.w[ia]);
            g.potential_values.push_back(g.radial ? g.radial_values.back() : p.evaluate(x));
        }
    }
    return g;
}

inline SupportGrid build_support_grid(const Potential& p, int radial_order, int angular_order) {
    GridSpec s;
    s.radial_order = radial_order;
    s.angular_order = angular_order;
    return build_support_grid(p, s);
}

struct EvalPair {
    Vec3 x, y;
    bool diagonal = false;
    double sep() const { return (x - y).norm(); }
};

struct EvalSpec {
    double sep_min = 1.0;
    double sep_max = 1.0;
    int count = 1;
    bool diagonal = false;               // append x = y pairs at the same midpoints
    Vec3 direction{1.0, 0.0, 0.0};       // pair axis
    Vec3 offset{0.0, 0.0, 0.0};          // pair midpoint
};

struct EvalGrid {
    std::vector<Vec3> points;
    std::vector<EvalPair> pairs;
};

/// Pairs symmetric about the offset along a fixed axis with log-spaced separations.
inline EvalGrid build_eval_grid(const EvalSpec& spec, double box) {
    if (spec.count < 1) throw InvalidArgument("eval grid needs count >= 1");
    if (!(spec.sep_min > 0.0) && !spec.diagonal) throw InvalidArgument("separations must be positive");
    if (spec.sep_max < spec.sep_min) throw InvalidArgument("sep_max < sep_min");
    const Vec3 u = spec.direction.normalized();
    EvalGrid g;
    if (spec.sep_min > 0.0) {
        for (double s : logspace(spec.sep_min, spec.sep_max, spec.count)) {
            EvalPair pr{spec.offset - 0.5 * s * u, spec.offset + 0.5 * s * u, false};
            if (pr.x.norm() > box || pr.y.norm() > box) throw InvalidArgument("pair leaves the evaluation box");
            g.points.push_back(pr.x);
            g.points.push_back(pr.y);
            g.pairs.push_back(pr);
        }
    }
    if (spec.diagonal) {
        g.points.push_back(spec.offset);
        g.pairs.push_back({spec.offset, spec.offset, true});
    }
    return g;
}

}  // namespace kato
