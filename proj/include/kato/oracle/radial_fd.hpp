#pragma once

// Independent radial finite-difference eigensolver used as a test oracle.
// Second-order three-point scheme for -u'' + (l(l+1)/r^2 + V) u = E u on (0, r_max),
// u(0) = u(r_max) = 0, eigenvalues by Sturm counts and bisection, then one Richardson step.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace kato::oracle {

struct FdLevel {
    int l = 0;
    double energy = 0.0;
    int multiplicity = 1;
};

struct FdOptions {
    double r_max = 50.0;
    double h = 2e-3;          // coarse step; the fine step is h/2
    int l_max = 12;
    double e_floor = -1e4;    // lower bound for bisection
    double bisect_tol = 1e-13;
};

class RadialFd {
public:
    /// V is the radial profile; jumps lists radii where V is discontinuous (grid nodes are put there).
    RadialFd(std::function<double(double)> V, std::vector<double> jumps, FdOptions opt = {})
        : V_(std::move(V)), jumps_(std::move(jumps)), opt_(opt) {}

    /// Negative levels for one angular momentum, Richardson-extrapolated, ascending.
    std::vector<double> levels(int l) const {
        const double h = step();
        auto coarse = raw_levels(l, h), fine = raw_levels(l, 0.5 * h);
        const size_t n = std::min(coarse.size(), fine.size());
        std::vector<double> out;
        for (size_t k = 0; k < n; ++k) out.push_back((4.0 * fine[k] - coarse[k]) / 3.0);
        // keep only levels that stay negative after extrapolation
        out.erase(std::remove_if(out.begin(), out.end(), [](double e) { return e >= 0.0; }), out.end());
        return out;
    }

    /// All negative levels, l = 0.. until two consecutive channels are empty.
    std::vector<FdLevel> all_levels() const {
        std::vector<FdLevel> out;
        int empty = 0;
        for (int l = 0; l <= opt_.l_max && empty < 2; ++l) {
            auto e = levels(l);
            empty = e.empty() ? empty + 1 : 0;
            for (double x : e) out.push_back({l, x, 2 * l + 1});
        }
        std::sort(out.begin(), out.end(), [](const FdLevel& a, const FdLevel& b) { return a.energy > b.energy; });
        return out;
    }

    /// Number of negative eigenvalues counted with multiplicity.
    int count() const {
        int n = 0;
        for (const auto& lv : all_levels()) n += lv.multiplicity;
        return n;
    }

private:
    // Step that puts every jump radius on a node.
    double step() const {
        double h = opt_.h;
        for (double a : jumps_) {
            if (a <= 0.0) continue;
            const double m = std::ceil(a / h - 1e-9);
            h = std::min(h, a / m);
        }
        return h;
    }

    double node_value(double r, double h) const {
        for (double a : jumps_)
            if (std::abs(r - a) < 1e-9 * h) return 0.5 * (V_(a * (1 - 1e-12)) + V_(a * (1 + 1e-12)));
        return V_(r);
    }

    // Number of eigenvalues of the tridiagonal matrix below E (Sturm sequence via LDL^T pivots).
    static int sturm(const std::vector<double>& d, double off, double E) {
        int neg = 0;
        double q = d[0] - E;
        if (q < 0) ++neg;
        for (size_t i = 1; i < d.size(); ++i) {
            if (q == 0.0) q = 1e-300;
            q = d[i] - E - off * off / q;
            if (q < 0) ++neg;
        }
        return neg;
    }

    std::vector<double> raw_levels(int l, double h) const {
        const int n = static_cast<int>(std::floor(opt_.r_max / h)) - 1;
        std::vector<double> d(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double r = (i + 1) * h;
            d[static_cast<size_t>(i)] = 2.0 / (h * h) + l * (l + 1) / (r * r) + node_value(r, h);
        }
        const double off = -1.0 / (h * h);
        const int nneg = sturm(d, off, 0.0);
        std::vector<double> out;
        for (int k = 0; k < nneg; ++k) {
            double lo = opt_.e_floor, hi = 0.0;
            while (hi - lo > opt_.bisect_tol * std::max(1.0, std::abs(lo))) {
                const double mid = 0.5 * (lo + hi);
                if (sturm(d, off, mid) > k)
                    hi = mid;
                else
                    lo = mid;
            }
            out.push_back(0.5 * (lo + hi));
        }
        return out;
    }

    std::function<double(double)> V_;
    std::vector<double> jumps_;
    FdOptions opt_;
};

}  // namespace kato::oracle
