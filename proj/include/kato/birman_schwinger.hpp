#pragma once

// Discretised Birman-Schwinger operator A(eta) = V R0(eta) on the support grid.
//
// Centered potentials decouple into angular-momentum channels; every channel
// is an n x n matrix diag(V) W_l on the radial nodes and contributes with
// multiplicity 2l + 1. Off-center potentials use the full tensor grid with the
// free kernel expanded in Legendre polynomials up to the angular rule's degree.

#include "kato/free_kernels.hpp"
#include "kato/grids.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace kato {

struct BSOptions {
    double count_tol = 1e-3;
    double reg_tol = 1e-2;
    double complex_tol = 1e-6;  // |Im mu| > complex_tol |Re mu| counts as complex
    double stability = 0.25;    // allowed relative change of sigma_min under refinement
    double refine = 1.5;        // radial order factor for the refinement check
    int l_max = 40;
};

namespace detail {

/// Largest channel index worth tabulating at a spectral parameter.
inline int channel_cap(cplx eta, double R, int l_max) {
    const double z = std::abs(eta) * R;
    return std::min(l_max, static_cast<int>(std::ceil(z + 3.0 * std::cbrt(z) + 12.0)));
}

/// Nodes with V != 0 (the symmetrised operator lives there).
inline std::vector<int> active_nodes(const std::vector<double>& V) {
    std::vector<int> a;
    for (size_t i = 0; i < V.size(); ++i)
        if (V[i] != 0.0) a.push_back(static_cast<int>(i));
    return a;
}

}  // namespace detail

/// Channel matrices of a centered potential at one spectral parameter.
class ChannelBS {
public:
    ChannelBS(const SupportGrid& g, cplx eta, int L)
        : g_(&g), op_(g.panels, eta, L), active_(detail::active_nodes(g.radial_values)) {}

    int L() const { return op_.L(); }
    int n() const { return op_.n(); }
    const channel::Operator& op() const { return op_; }

    /// diag(V) W_l.
    Eigen::MatrixXcd A(int l) const {
        Eigen::MatrixXcd W = op_.weights(l);
        for (int i = 0; i < n(); ++i) W.row(i) *= g_->radial_values[static_cast<size_t>(i)];
        return W;
    }

    /// sgn V |V|^{1/2} R0 |V|^{1/2} in the L2(r^2 dr) inner product, on nodes with V != 0.
    Eigen::MatrixXcd S(int l) const {
        const Eigen::MatrixXcd W = op_.weights(l);
        const int m = static_cast<int>(active_.size());
        Eigen::MatrixXcd out(m, m);
        for (int a = 0; a < m; ++a) {
            const int i = active_[static_cast<size_t>(a)];
            const double vi = g_->radial_values[static_cast<size_t>(i)];
            const double si = (vi > 0 ? 1.0 : -1.0) * std::sqrt(std::abs(vi) * g_->panels.measure(i));
            for (int b = 0; b < m; ++b) {
                const int j = active_[static_cast<size_t>(b)];
                const double vj = g_->radial_values[static_cast<size_t>(j)];
                const double wj = g_->panels.measure(j);
                out(a, b) = si * W(i, j) / wj * std::sqrt(std::abs(vj) * wj);
            }
        }
        return out;
    }

    const std::vector<int>& active() const { return active_; }

private:
    const SupportGrid* g_;
    channel::Operator op_;
    std::vector<int> active_;
};

struct BSOperator {
    SpectralParameter eta;
    Eigen::MatrixXcd matrix;
    Eigen::MatrixXcd symmetrized;
    int angular_l = 0;  // Legendre truncation of the tensor-grid kernel
};

/// Tensor-grid kernel matrix K(x_i, x_j) w_j (without V).
inline Eigen::MatrixXcd tensor_kernel(const SupportGrid& g, cplx eta, int* angular_l = nullptr) {
    const int N = g.size();
    if (N == 0) throw InvalidArgument("empty support grid");
    if (N > 6000) throw InvalidArgument("tensor grid too large for a dense operator; lower the orders");
    const int L = std::max(0, g.sphere.degree / 2);
    if (angular_l) *angular_l = L;
    channel::Operator op(g.panels, eta, L);
    std::vector<Eigen::MatrixXcd> W;
    for (int l = 0; l <= L; ++l) W.push_back(op.weights(l));
    const int na = g.n_angular(), nr = g.n_radial();
    // angular factors sum_l (2l+1)/(4 pi) P_l(d_a . d_b) per channel
    std::vector<double> P;
    Eigen::MatrixXcd K(N, N);
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < na; ++b) {
            legendre_table(g.sphere.dirs[static_cast<size_t>(a)].dot(g.sphere.dirs[static_cast<size_t>(b)]), L, P);
            const double wb = g.sphere.w[static_cast<size_t>(b)];
            for (int i = 0; i < nr; ++i)
                for (int j = 0; j < nr; ++j) {
                    cplx v = 0.0;
                    for (int l = 0; l <= L; ++l) v += (2.0 * l + 1.0) / (4.0 * pi) * P[static_cast<size_t>(l)] * W[static_cast<size_t>(l)](i, j);
                    K(g.index(i, a), g.index(j, b)) = v * wb;
                }
        }
    return K;
}

/// A = V R0(eta) on the tensor grid, plus the symmetrised form when requested.
inline BSOperator assemble(const Potential& p, const SupportGrid& g, SpectralParameter eta, bool symmetrized = false) {
    (void)p;
    BSOperator op;
    op.eta = eta;
    const Eigen::MatrixXcd K = tensor_kernel(g, eta.eta(), &op.angular_l);
    const int N = g.size();
    op.matrix = K;
    for (int i = 0; i < N; ++i) op.matrix.row(i) *= g.potential_values[static_cast<size_t>(i)];
    if (symmetrized) {
        op.symmetrized = Eigen::MatrixXcd::Zero(N, N);
        for (int i = 0; i < N; ++i) {
            const double vi = g.potential_values[static_cast<size_t>(i)];
            const double si = (vi >= 0 ? 1.0 : -1.0) * std::sqrt(std::abs(vi) * g.weights[static_cast<size_t>(i)]);
            for (int j = 0; j < N; ++j) {
                const double vj = g.potential_values[static_cast<size_t>(j)], wj = g.weights[static_cast<size_t>(j)];
                op.symmetrized(i, j) = si * K(i, j) / wj * std::sqrt(std::abs(vj) * wj);
            }
        }
    }
    return op;
}

inline double spectral_radius(const Eigen::MatrixXcd& M) {
    if (M.size() == 0) return 0.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Spectral radius of V R0(eta): max over channels for centered V, tensor grid otherwise.
inline double bs_spectral_radius(const Potential& p, const SupportGrid& g, SpectralParameter eta,
                                 const BSOptions& opt = {}) {
    if (p.is_zero()) return 0.0;
    if (!g.radial) return spectral_radius(assemble(p, g, eta).matrix);
    ChannelBS ch(g, eta.eta(), detail::channel_cap(eta.eta(), g.radius, opt.l_max));
    double rho = 0.0;
    for (int l = 0; l <= ch.L(); ++l) {
        const double r = spectral_radius(ch.A(l));
        rho = std::max(rho, r);
        if (l > 2 && r < 1e-3 * rho) break;
    }
    return rho;
}

struct ChannelEigenvalue {
    int l = -1;  // -1 for the tensor-grid route
    cplx mu;
    int multiplicity = 1;
};

struct CountResult {
    int count = 0;
    std::vector<ChannelEigenvalue> below;       // counted eigenvalues (< -1 - count_tol)
    std::vector<ChannelEigenvalue> borderline;  // within count_tol of -1
    std::vector<ChannelEigenvalue> complex_excluded;
    int channels = 0;
};

namespace detail {

inline void classify(const Eigen::VectorXcd& ev, int l, int mult, const BSOptions& opt, CountResult& out) {
    for (int k = 0; k < ev.size(); ++k) {
        const cplx mu = ev[k];
        if (std::abs(mu.imag()) > opt.complex_tol * std::abs(mu.real())) {
            if (mu.real() < -0.5) out.complex_excluded.push_back({l, mu, mult});
            continue;
        }
        if (std::abs(mu.real() + 1.0) <= opt.count_tol)
            out.borderline.push_back({l, mu, mult});
        else if (mu.real() < -1.0) {
            out.below.push_back({l, mu, mult});
            out.count += mult;
        }
    }
}

inline Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& M) {
    if (M.size() == 0) return {};
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    return es.eigenvalues();
}

// Real-matrix eigenvalues (zero energy and imaginary eta give real channel matrices).
inline Eigen::VectorXcd eigenvalues_real(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return {};
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    return es.eigenvalues();
}

}  // namespace detail

/// Number of eigenvalues of the discretised V(-Delta)^{-1} below -1 - count_tol, with multiplicity.
inline CountResult count_negative_bound_states(const Potential& p, const SupportGrid& g, const BSOptions& opt = {}) {
    CountResult out;
    if (p.is_zero()) return out;
    if (!g.radial) {
        detail::classify(detail::eigenvalues(assemble(p, g, SpectralParameter()).matrix), -1, 1, opt, out);
        out.channels = 1;
        return out;
    }
    ChannelBS ch(g, 0.0, opt.l_max);
    for (int l = 0; l <= ch.L(); ++l) {
        const Eigen::VectorXcd ev = detail::eigenvalues_real(ch.A(l).real());
        detail::classify(ev, l, 2 * l + 1, opt, out);
        out.channels = l + 1;
        double lowest = 0.0;
        for (int k = 0; k < ev.size(); ++k) lowest = std::min(lowest, ev[k].real());
        if (lowest > -0.5) break;  // channel eigenvalues shrink with l
    }
    return out;
}

namespace detail {

inline double sigma_min(const Eigen::MatrixXcd& S) {
    if (S.size() == 0) return 1.0;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(S.rows(), S.cols()) + S;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues().minCoeff();
}

/// sigma_min of I + symmetrised V R0(eta), minimised over channels.
inline double sigma_min_at(const Potential& p, const SupportGrid& g, cplx eta, const BSOptions& opt) {
    if (p.is_zero()) return 1.0;
    if (!g.radial) return sigma_min(assemble(p, g, SpectralParameter(eta), true).symmetrized);
    ChannelBS ch(g, eta, channel_cap(eta, g.radius, opt.l_max));
    double best = 1.0;
    for (int l = 0; l <= ch.L(); ++l) {
        const Eigen::MatrixXcd S = ch.S(l);
        best = std::min(best, sigma_min(S));
        // sigma_min(I + S) >= 1 - |S|_2 >= 1 - |S|_F; later channels are weaker
        if (1.0 - S.norm() >= best) break;
    }
    return best;
}

}  // namespace detail

struct Regularity {
    double sigma_min = 1.0;
    double sigma_min_refined = 1.0;
    bool regular = true;
};

/// Zero is regular when sigma_min(I + V R0(0)) exceeds reg_tol and is stable under one refinement.
inline Regularity regular_at_zero(const Potential& p, const SupportGrid& g, const BSOptions& opt = {}) {
    Regularity r;
    r.sigma_min = detail::sigma_min_at(p, g, 0.0, opt);
    const SupportGrid fine = build_support_grid(p, g.spec.refined(opt.refine));
    r.sigma_min_refined = detail::sigma_min_at(p, fine, 0.0, opt);
    const double change = std::abs(r.sigma_min_refined - r.sigma_min) / std::max(r.sigma_min, 1e-300);
    r.regular = r.sigma_min > opt.reg_tol && r.sigma_min_refined > opt.reg_tol && change < opt.stability;
    return r;
}

struct ScanPoint {
    double lambda = 0.0;
    double sigma_min = 1.0;
};

/// sigma_min(I + V R0(lambda + i0)) on lambda_k = lambda_max k / n, k = 1..n.
inline std::vector<ScanPoint> embedded_scan(const Potential& p, const SupportGrid& g, double lambda_max, int n_points,
                                            const BSOptions& opt = {}) {
    if (!(lambda_max > 0.0) || n_points < 1) throw InvalidArgument("embedded_scan needs lambda_max > 0 and n >= 1");
    std::vector<ScanPoint> out;
    for (int k = 1; k <= n_points; ++k) {
        const double lam = lambda_max * k / n_points;
        out.push_back({lam, detail::sigma_min_at(p, g, std::sqrt(lam), opt)});
    }
    return out;
}

inline double scan_minimum(const std::vector<ScanPoint>& s) {
    double m = 1.0;
    for (const auto& q : s) m = std::min(m, q.sigma_min);
    return m;
}

struct HomotopyResult {
    std::vector<double> crossings;                  // t_n, ascending, with multiplicity
    std::vector<std::pair<double, int>> counts;     // (t, number of crossings <= t) on the scan grid
};

/// Couplings t in (0, 1] at which H_t = -Delta + t V gains a zero-energy state: t = -1/mu for mu < -1.
inline HomotopyResult homotopy_scan(const Potential& p, const SupportGrid& g, int n_t, const BSOptions& opt = {}) {
    if (n_t < 2) throw InvalidArgument("homotopy_scan needs n_t >= 2");
    HomotopyResult h;
    const CountResult c = count_negative_bound_states(p, g, opt);
    for (const auto& e : c.below)
        for (int k = 0; k < e.multiplicity; ++k) h.crossings.push_back(-1.0 / e.mu.real());
    std::sort(h.crossings.begin(), h.crossings.end());
    for (double t : linspace(1.0 / n_t, 1.0, n_t)) {
        const int n = static_cast<int>(std::count_if(h.crossings.begin(), h.crossings.end(),
                                                     [t](double x) { return x <= t; }));
        h.counts.emplace_back(t, n);
    }
    return h;
}

}  // namespace kato
