#pragma once

// Partial-wave (channel) discretisation of the free resolvent on a radial panel grid.
//
// For each angular momentum l the free resolvent has the radial kernel
//   g_l(r, s) = pref * reg_l(min(r,s)) * irr_l(max(r,s)),
// with pref = i eta, reg = j_l(eta .), irr = h_l(eta .) for eta != 0 and
// pref = 1, reg = r^l, irr = r^{-l-1}/(2l+1) at eta = 0. Product integration
// against the Lagrange basis of each panel gives weights W_l(rho, j) with
//   int g_l(rho, s) f(s) s^2 ds  ~  sum_j W_l(rho, j) f(s_j),
// exact up to the sub-quadrature error, because the kink at s = rho is split out.

#include "kato/quadrature.hpp"
#include "kato/spherical_bessel.hpp"

#include <algorithm>

namespace kato::channel {

struct Panels {
    std::vector<double> edges;
    int order = 0;
    std::vector<double> r;  // nodes
    std::vector<double> w;  // plain Gauss-Legendre weights (no r^2)

    int size() const { return static_cast<int>(r.size()); }
    int npanels() const { return static_cast<int>(edges.size()) - 1; }
    /// Measure weights w_i r_i^2.
    double measure(int i) const { return w[static_cast<size_t>(i)] * r[static_cast<size_t>(i)] * r[static_cast<size_t>(i)]; }
};

/// Edges of [0, R] including the given breakpoints, each interval cut into pieces no longer than max_len.
inline std::vector<double> split_edges(double R, std::vector<double> breaks, double max_len) {
    breaks.push_back(0.0);
    breaks.push_back(R);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [R](double b) { return b < 0.0 || b > R; }),
                 breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<double> edges{breaks.front()};
    for (size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k], b = breaks[k + 1];
        const int m = std::max(1, static_cast<int>(std::ceil((b - a) / max_len - 1e-12)));
        for (int i = 1; i <= m; ++i) edges.push_back(i == m ? b : a + (b - a) * i / m);
    }
    return edges;
}

inline Panels make_panels(const std::vector<double>& edges, int order) {
    if (order < 2) throw InvalidOrder("radial panels need order >= 2");
    if (edges.size() < 2) throw InvalidArgument("radial panels need at least one interval");
    Panels p;
    p.edges = edges;
    p.order = order;
    const quad::Rule1D& g = quad::gauss_legendre(order);
    for (size_t k = 0; k + 1 < edges.size(); ++k) {
        const double a = edges[k], b = edges[k + 1], h = 0.5 * (b - a), c = 0.5 * (a + b);
        for (int i = 0; i < order; ++i) {
            p.r.push_back(c + h * g.x[static_cast<size_t>(i)]);
            p.w.push_back(h * g.w[static_cast<size_t>(i)]);
        }
    }
    return p;
}

/// reg_l and irr_l at one radius, l = 0..L.
inline void radial_pair(cplx eta, int L, double rho, cplxl* reg, cplxl* irr) {
    if (rho == 0.0) {
        for (int l = 0; l <= L; ++l) {
            reg[l] = l == 0 ? 1.0L : 0.0L;
            irr[l] = 0.0L;
        }
        return;
    }
    if (eta == cplx(0.0, 0.0)) {
        const long double r = rho;
        long double p = 1.0L, q = 1.0L / r;
        for (int l = 0; l <= L; ++l) {
            reg[l] = p;
            irr[l] = q / static_cast<long double>(2 * l + 1);
            p *= r;
            q /= r;
        }
        return;
    }
    const cplxl z = cplxl(eta.real(), eta.imag()) * static_cast<long double>(rho);
    sph_bessel_jh(z, L, reg, irr);
}

inline cplxl radial_prefactor(cplx eta) {
    if (eta == cplx(0.0, 0.0)) return 1.0L;
    return cplxl(0.0L, 1.0L) * cplxl(eta.real(), eta.imag());
}

/**
 * @brief Product-integration weights of all channels l <= L at one spectral parameter.
 *
 * Rows are the grid nodes followed by any extra evaluation radii; columns are the grid nodes.
 */
class Operator {
public:
    /// With node_rows = false only the evaluation radii get rows (off-grid extension).
    Operator(const Panels& panels, cplx eta, int L, std::vector<double> eval_radii = {}, bool node_rows = true,
             int subq = 0)
        : panels_(&panels), eta_(eta), L_(L), pref_(radial_prefactor(eta)), node_rows_(node_rows) {
        if (L < 0) throw InvalidArgument("channel operator needs L >= 0");
        const int p = panels.order;
        q_ = subq > 0 ? subq : p + 8;
        const int np = panels.npanels();
        ref_ = quad::gauss_legendre(p).x;
        lam_ = quad::barycentric_weights(ref_);
        const quad::Rule1D& gq = quad::gauss_legendre(q_);
        // Whole-panel moments for rows outside the panel.
        Jint_.assign(static_cast<size_t>(np), std::vector<cplxl>(static_cast<size_t>((L + 1) * p), 0.0L));
        Hint_ = Jint_;
        std::vector<cplxl> reg(static_cast<size_t>(L + 1)), irr(static_cast<size_t>(L + 1));
        std::vector<double> basis(static_cast<size_t>(p));
        for (int k = 0; k < np; ++k) {
            const double a = panels.edges[static_cast<size_t>(k)], b = panels.edges[static_cast<size_t>(k + 1)];
            for (int i = 0; i < q_; ++i) {
                const double s = 0.5 * (a + b) + 0.5 * (b - a) * gq.x[static_cast<size_t>(i)];
                const double ws = 0.5 * (b - a) * gq.w[static_cast<size_t>(i)] * s * s;
                radial_pair(eta, L, s, reg.data(), irr.data());
                quad::lagrange_basis(ref_, lam_, gq.x[static_cast<size_t>(i)], basis.data());
                for (int l = 0; l <= L; ++l)
                    for (int j = 0; j < p; ++j) {
                        const long double f = static_cast<long double>(ws * basis[static_cast<size_t>(j)]);
                        Jint_[static_cast<size_t>(k)][static_cast<size_t>(l * p + j)] += reg[static_cast<size_t>(l)] * f;
                        Hint_[static_cast<size_t>(k)][static_cast<size_t>(l * p + j)] += irr[static_cast<size_t>(l)] * f;
                    }
            }
        }
        if (node_rows)
            for (int i = 0; i < panels.size(); ++i) add_row(panels.r[static_cast<size_t>(i)]);
        for (double rho : eval_radii) add_row(rho);
    }

    int L() const { return L_; }
    int n() const { return panels_->size(); }
    int rows() const { return static_cast<int>(rows_.size()); }
    /// Row index of the first evaluation radius.
    int eval_offset() const { return node_rows_ ? n() : 0; }
    cplx prefactor() const { return {static_cast<double>(pref_.real()), static_cast<double>(pref_.imag())}; }
    cplx eta() const { return eta_; }
    const Panels& panels() const { return *panels_; }

    /// reg_l at the radius of a row (j_l(eta rho), or rho^l at eta = 0).
    cplx reg(int l, int row) const {
        const cplxl v = rows_[static_cast<size_t>(row)].reg[static_cast<size_t>(l)];
        return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }

    /// irr_l at the radius of a row (zero at rho = 0).
    cplx irr(int l, int row) const {
        const cplxl v = rows_[static_cast<size_t>(row)].irr[static_cast<size_t>(l)];
        return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }

    /// Free channel kernel g_l between the radii of two rows.
    cplx kernel(int l, int row_a, int row_b) const {
        const Row &A = rows_[static_cast<size_t>(row_a)], &B = rows_[static_cast<size_t>(row_b)];
        const Row &lo = A.rho <= B.rho ? A : B, &hi = A.rho <= B.rho ? B : A;
        const cplxl v = pref_ * lo.reg[static_cast<size_t>(l)] * hi.irr[static_cast<size_t>(l)];
        return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
    }

    /// W_l for all rows: (node rows + eval rows) x n.
    Eigen::MatrixXcd weights(int l) const {
        if (l < 0 || l > L_) throw InvalidArgument("channel index out of range");
        const int p = panels_->order, np = panels_->npanels(), N = n();
        Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(rows(), N);
        for (int row = 0; row < rows(); ++row) {
            const Row& R = rows_[static_cast<size_t>(row)];
            const cplxl rg = pref_ * R.reg[static_cast<size_t>(l)], ir = pref_ * R.irr[static_cast<size_t>(l)];
            for (int k = 0; k < np; ++k) {
                const double a = panels_->edges[static_cast<size_t>(k)], b = panels_->edges[static_cast<size_t>(k + 1)];
                if (k == R.panel) {
                    // split panel: s < rho uses reg(s) irr(rho), s > rho uses reg(rho) irr(s)
                    for (int i = 0; i < 2 * q_; ++i) {
                        const size_t si = static_cast<size_t>(i);
                        const cplxl g = i < q_ ? ir * R.sub_reg[si * static_cast<size_t>(L_ + 1) + static_cast<size_t>(l)]
                                               : rg * R.sub_irr[si * static_cast<size_t>(L_ + 1) + static_cast<size_t>(l)];
                        const cplx gd(static_cast<double>(g.real()), static_cast<double>(g.imag()));
                        const double* bs = &R.sub_basis[si * static_cast<size_t>(p)];
                        for (int j = 0; j < p; ++j) W(row, k * p + j) += gd * (R.sub_w[si] * bs[j]);
                    }
                } else if (b <= R.rho) {
                    for (int j = 0; j < p; ++j) {
                        const cplxl v = ir * Jint_[static_cast<size_t>(k)][static_cast<size_t>(l * p + j)];
                        W(row, k * p + j) = cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
                    }
                } else if (a >= R.rho) {
                    for (int j = 0; j < p; ++j) {
                        const cplxl v = rg * Hint_[static_cast<size_t>(k)][static_cast<size_t>(l * p + j)];
                        W(row, k * p + j) = cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
                    }
                }
            }
        }
        return W;
    }

private:
    struct Row {
        double rho = 0.0;
        int panel = -1;  // panel strictly containing rho, -1 if none
        std::vector<cplxl> reg, irr;
        std::vector<double> sub_w, sub_basis;
        std::vector<cplxl> sub_reg, sub_irr;
    };

    void add_row(double rho) {
        Row R;
        R.rho = rho;
        R.reg.resize(static_cast<size_t>(L_ + 1));
        R.irr.resize(static_cast<size_t>(L_ + 1));
        radial_pair(eta_, L_, rho, R.reg.data(), R.irr.data());
        const auto& e = panels_->edges;
        for (int k = 0; k + 1 < static_cast<int>(e.size()); ++k)
            if (rho > e[static_cast<size_t>(k)] && rho < e[static_cast<size_t>(k + 1)]) R.panel = k;
        if (R.panel >= 0) {
            const int p = panels_->order;
            const double a = e[static_cast<size_t>(R.panel)], b = e[static_cast<size_t>(R.panel + 1)];
            const quad::Rule1D& gq = quad::gauss_legendre(q_);
            R.sub_w.resize(static_cast<size_t>(2 * q_));
            R.sub_basis.resize(static_cast<size_t>(2 * q_ * p));
            R.sub_reg.resize(static_cast<size_t>(2 * q_ * (L_ + 1)));
            R.sub_irr.resize(static_cast<size_t>(2 * q_ * (L_ + 1)));
            for (int half = 0; half < 2; ++half) {
                const double lo = half == 0 ? a : rho, hi = half == 0 ? rho : b;
                for (int i = 0; i < q_; ++i) {
                    const size_t si = static_cast<size_t>(half * q_ + i);
                    const double s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gq.x[static_cast<size_t>(i)];
                    R.sub_w[si] = 0.5 * (hi - lo) * gq.w[static_cast<size_t>(i)] * s * s;
                    quad::lagrange_basis(ref_, lam_, (2.0 * s - a - b) / (b - a), &R.sub_basis[si * static_cast<size_t>(p)]);
                    radial_pair(eta_, L_, s, &R.sub_reg[si * static_cast<size_t>(L_ + 1)],
                                &R.sub_irr[si * static_cast<size_t>(L_ + 1)]);
                }
            }
        }
        rows_.push_back(std::move(R));
    }

    const Panels* panels_;
    cplx eta_;
    int L_;
    cplxl pref_;
    bool node_rows_ = true;
    int q_ = 0;
    std::vector<double> ref_, lam_;
    std::vector<std::vector<cplxl>> Jint_, Hint_;
    std::vector<Row> rows_;
};

}  // namespace kato::channel
