#pragma once

// Perturbed resolvent R_V = R0 - R0 (I + V R0)^{-1} V R0 and the continuous-spectrum density
// D(eta; x, y) = (1/pi) Im R_V(eta^2 + i0)(x, y).
//
// Centered potentials: per channel the outgoing distorted wave phi_l = (I + g_l V)^{-1} j_l gives
//   D - D0 = eta / (4 pi^2) sum_l (2l+1) P_l(cos gamma) Re[phi_l(r) conj(phi_l(r')) - j_l(eta r) j_l(eta r')],
// whose l-sum converges like j_l(eta R)^2. Above eta_born the density correction is replaced by the
// first Born term, evaluated in prolate spheroidal coordinates around the pair (see BornTail).

#include "kato/birman_schwinger.hpp"

#include <Eigen/LU>

#include <memory>

namespace kato {

struct ResolventOptions {
    double solver_tol = 1e-10;  // rcond below this marks a near-singular solve
    double l_tol = 1e-15;       // absolute channel contribution treated as converged
    int l_run = 3;              // consecutive small channels before stopping
    int l_max = 2000;
    double ppw = 6.0;           // radial nodes per wavelength
    int green_l_min = 60;       // channel cap floor for the (slowly converging) full Green's function
};

namespace detail {

/// Panels of the support grid, split further so that every wavelength 2 pi / |eta| gets ppw nodes.
inline channel::Panels wave_panels(const SupportGrid& g, double k, double ppw, const std::vector<double>& breaks) {
    double len = g.spec.panel_length;
    if (k > 0.0) len = std::min(len, 2.0 * pi * g.spec.radial_order / (ppw * k));
    return channel::make_panels(channel::split_edges(g.radius, breaks, len), g.spec.radial_order);
}

inline std::vector<double> radial_values(const Potential& p, const channel::Panels& P) {
    std::vector<double> v;
    v.reserve(P.r.size());
    for (double r : P.r) v.push_back(p.radial(r));
    return v;
}

}  // namespace detail

/**
 * @brief Factorisation of I + V R0(eta) on the support grid, reused for all point pairs.
 *
 * Centered potentials keep one LU per channel (built lazily); off-center potentials one LU of the
 * tensor-grid matrix.
 */
class ResolventSolve {
public:
    ResolventSolve(const Potential& p, const SupportGrid& g, SpectralParameter eta, ResolventOptions o = {})
        : p_(p), g_(&g), eta_(eta), o_(o) {
        if (p.is_zero()) return;
        if (g.radial) {
            panels_ = std::make_shared<channel::Panels>(
                detail::wave_panels(g, std::abs(eta.eta()), o.ppw, p.radial_breakpoints()));
            V_ = detail::radial_values(p, *panels_);
            L_ = std::max(o.green_l_min, detail::channel_cap(eta.eta(), g.radius, o.l_max));
            op_ = std::make_shared<channel::Operator>(*panels_, eta.eta(), L_);
        } else {
            const int N = g.size();
            K_ = tensor_kernel(g, eta.eta());
            Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(N, N);
            for (int i = 0; i < N; ++i) M.row(i) += g.potential_values[static_cast<size_t>(i)] * K_.row(i);
            lu3_ = Eigen::PartialPivLU<Eigen::MatrixXcd>(M);
            cond_ = lu3_.rcond();
            if (cond_ < o.solver_tol) throw NearSingularSolve("I + V R0 is numerically singular");
        }
    }

    SpectralParameter eta() const { return eta_; }
    /// Smallest reciprocal condition number over the factorisations used so far.
    double condition_estimate() const { return cond_; }
    int channels_used() const { return used_; }

    /// R_V(eta^2)(x, y) for x != y.
    cplx operator()(const Vec3& x, const Vec3& y) const {
        const cplx r0 = resolvent0(eta_, x, y);
        if (p_.is_zero()) return r0;
        if (!g_->radial) return r0 + tensor_correction(x, y);
        return r0 + channel_correction(x, y);
    }

private:
    const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu(int l) const {
        while (static_cast<int>(lu_.size()) <= l) {
            const int k = static_cast<int>(lu_.size());
            Eigen::MatrixXcd W = op_->weights(k);
            const int n = op_->n();
            for (int j = 0; j < n; ++j) W.col(j) *= V_[static_cast<size_t>(j)];
            W += Eigen::MatrixXcd::Identity(n, n);  // I + W diag(V)
            lu_.emplace_back(W);
            cond_ = std::min(cond_, lu_.back().rcond());
            if (lu_.back().rcond() < o_.solver_tol)
                throw NearSingularSolve("I + g_l V is numerically singular in channel " + std::to_string(k));
        }
        return lu_[static_cast<size_t>(l)];
    }

    cplx channel_correction(const Vec3& x, const Vec3& y) const {
        const double r = x.norm(), rp = y.norm();
        const double ct = (r > 0 && rp > 0) ? std::clamp(x.dot(y) / (r * rp), -1.0, 1.0) : 1.0;
        channel::Operator ev(*panels_, eta_.eta(), L_, {r, rp}, false);
        const int n = op_->n();
        std::vector<double> P;
        legendre_table(ct, L_, P);
        cplx sum = 0.0;
        int small = 0;
        for (int l = 0; l <= L_; ++l) {
            const Eigen::MatrixXcd We = ev.weights(l);
            // G_l(., r') solves (I + W V) G = g(., r'); then G_l - g_l = -W_l(r, .) V G
            Eigen::VectorXcd b(n);
            for (int i = 0; i < n; ++i) {
                const double ri = panels_->r[static_cast<size_t>(i)];
                b[i] = ri <= rp ? op_->prefactor() * op_->reg(l, i) * ev.irr(l, 1)
                                : op_->prefactor() * ev.reg(l, 1) * op_->irr(l, i);
            }
            const Eigen::VectorXcd phi = lu(l).solve(b);
            cplx c = 0.0;
            for (int i = 0; i < n; ++i) c -= We(0, i) * V_[static_cast<size_t>(i)] * phi[i];
            const cplx term = (2.0 * l + 1.0) / (4.0 * pi) * P[static_cast<size_t>(l)] * c;
            sum += term;
            used_ = std::max(used_, l + 1);
            small = std::abs(term) < 1e-15 * std::abs(sum) + 1e-300 ? small + 1 : 0;
            if (small >= o_.l_run) break;
        }
        return sum;
    }

    cplx tensor_correction(const Vec3& x, const Vec3& y) const {
        const int N = g_->size();
        Eigen::VectorXcd b(N);
        for (int j = 0; j < N; ++j) {
            const Vec3& z = g_->nodes[static_cast<size_t>(j)];
            b[j] = g_->potential_values[static_cast<size_t>(j)] * resolvent0_r(eta_.eta(), (z - y).norm());
        }
        const Eigen::VectorXcd c = lu3_.solve(b);
        cplx s = 0.0;
        for (int j = 0; j < N; ++j)
            s -= resolvent0_r(eta_.eta(), (x - g_->nodes[static_cast<size_t>(j)]).norm()) * c[j] *
                 g_->weights[static_cast<size_t>(j)];
        return s;
    }

    Potential p_;
    const SupportGrid* g_;
    SpectralParameter eta_;
    ResolventOptions o_;
    std::shared_ptr<channel::Panels> panels_;
    std::vector<double> V_;
    int L_ = 0;
    std::shared_ptr<channel::Operator> op_;
    mutable std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
    Eigen::MatrixXcd K_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu3_;
    mutable double cond_ = 1.0;
    mutable int used_ = 0;
};

/// R_V(eta^2)(x, y); throws NearSingularSolve at eigenvalues and resonances.
inline cplx resolvent_v(const Potential& p, const SupportGrid& g, SpectralParameter eta, const Vec3& x, const Vec3& y,
                        const ResolventOptions& o = {}) {
    return ResolventSolve(p, g, eta, o)(x, y);
}

/// Pair geometry shared by all spectral nodes: unique radii and angle cosines.
struct PairGeometry {
    std::vector<EvalPair> pairs;
    std::vector<double> radii;           // unique |x|, |y|
    std::vector<std::pair<int, int>> idx;  // radii index of x and y per pair
    std::vector<double> cosg;

    explicit PairGeometry(std::vector<EvalPair> prs) : pairs(std::move(prs)) {
        for (const auto& pr : pairs) {
            const double a = pr.x.norm(), b = pr.y.norm();
            const int ia = index_of(a), ib = index_of(b);
            idx.emplace_back(ia, ib);
            cosg.push_back(a > 0 && b > 0 ? std::clamp(pr.x.dot(pr.y) / (a * b), -1.0, 1.0) : 1.0);
        }
    }
    int size() const { return static_cast<int>(pairs.size()); }

private:
    int index_of(double r) {
        for (size_t k = 0; k < radii.size(); ++k)
            if (radii[k] == r) return static_cast<int>(k);
        radii.push_back(r);
        return static_cast<int>(radii.size()) - 1;
    }
};

/// Free density sin(eta s) / (4 pi^2 s), with the limit eta / (4 pi^2) at s = 0.
inline double free_density(double eta, double s) {
    if (s == 0.0) return eta / (4.0 * pi * pi);
    return std::sin(eta * s) / (4.0 * pi * pi * s);
}

struct DensitySample {
    std::vector<double> re;  // D - D0 per pair
    std::vector<double> im;  // imaginary residual of the channel sum
    bool skipped = false;
    double rcond = 1.0;
    int channels = 0;
};

/// D - D0 at real eta > 0 for all pairs.
inline DensitySample density_correction(const Potential& p, const SupportGrid& g, double eta, const PairGeometry& geo,
                                        const ResolventOptions& o = {}) {
    DensitySample out;
    const int np = geo.size();
    out.re.assign(static_cast<size_t>(np), 0.0);
    out.im.assign(static_cast<size_t>(np), 0.0);
    if (p.is_zero()) return out;
    if (!g.radial) {
        // tensor route: (1/pi) Im of the Born-subtracted resolvent
        try {
            ResolventSolve rs(p, g, SpectralParameter(eta, 0.0), o);
            for (int k = 0; k < np; ++k) {
                const auto& pr = geo.pairs[static_cast<size_t>(k)];
                const cplx full = pr.diagonal ? cplx(0.0) : rs(pr.x, pr.y) - resolvent0_r(eta, pr.sep());
                out.re[static_cast<size_t>(k)] = full.imag() / pi;
            }
            out.rcond = rs.condition_estimate();
        } catch (const NearSingularSolve&) {
            out.skipped = true;
        }
        return out;
    }
    const channel::Panels P = detail::wave_panels(g, eta, o.ppw, p.radial_breakpoints());
    const std::vector<double> V = detail::radial_values(p, P);
    // beyond eta R the coupling int j_l V phi is negligible even for eval radii outside the support
    const int L = detail::channel_cap(eta, g.radius, o.l_max);
    channel::Operator op(P, eta, L, geo.radii);
    const int n = op.n(), m = static_cast<int>(geo.radii.size());
    std::vector<double> Pm(static_cast<size_t>(np), 1.0), Pl(static_cast<size_t>(np)), Pn(static_cast<size_t>(np));
    for (int k = 0; k < np; ++k) Pl[static_cast<size_t>(k)] = 1.0;
    int small = 0;
    Eigen::VectorXcd jn(n), je(m);
    for (int l = 0; l <= L; ++l) {
        // Legendre P_l(cos gamma) per pair by recurrence
        for (int k = 0; k < np; ++k) {
            const double x = geo.cosg[static_cast<size_t>(k)];
            if (l == 0)
                Pl[static_cast<size_t>(k)] = 1.0;
            else if (l == 1) {
                Pm[static_cast<size_t>(k)] = 1.0;
                Pl[static_cast<size_t>(k)] = x;
            } else {
                Pn[static_cast<size_t>(k)] =
                    ((2 * l - 1) * x * Pl[static_cast<size_t>(k)] - (l - 1) * Pm[static_cast<size_t>(k)]) / l;
                Pm[static_cast<size_t>(k)] = Pl[static_cast<size_t>(k)];
                Pl[static_cast<size_t>(k)] = Pn[static_cast<size_t>(k)];
            }
        }
        const Eigen::MatrixXcd W = op.weights(l);
        Eigen::MatrixXcd M = W.topRows(n);
        for (int j = 0; j < n; ++j) M.col(j) *= V[static_cast<size_t>(j)];
        M += Eigen::MatrixXcd::Identity(n, n);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
        const double rc = lu.rcond();
        out.rcond = std::min(out.rcond, rc);
        if (rc < o.solver_tol) {
            out.skipped = true;
            return out;
        }
        for (int i = 0; i < n; ++i) jn[i] = op.reg(l, i);
        for (int a = 0; a < m; ++a) je[a] = op.reg(l, n + a);
        const Eigen::VectorXcd phi = lu.solve(jn);
        Eigen::VectorXcd Vphi(n);
        for (int i = 0; i < n; ++i) Vphi[i] = V[static_cast<size_t>(i)] * phi[i];
        const Eigen::VectorXcd diff = -(W.bottomRows(m) * Vphi);  // phi - j at the eval radii
        double mag = 0.0;
        for (int a = 0; a < m; ++a) mag = std::max(mag, std::abs(diff[a]) * (std::abs(je[a]) + std::abs(diff[a])));
        const double f = 2.0 * l + 1.0;
        for (int k = 0; k < np; ++k) {
            const auto [ia, ib] = geo.idx[static_cast<size_t>(k)];
            const cplx pa = je[ia] + diff[ia], pb = je[ib] + diff[ib];
            const cplx term = pa * std::conj(pb) - je[ia] * std::conj(je[ib]);
            out.re[static_cast<size_t>(k)] += f * Pl[static_cast<size_t>(k)] * term.real();
            out.im[static_cast<size_t>(k)] += f * Pl[static_cast<size_t>(k)] * term.imag();
        }
        out.channels = l + 1;
        small = f * mag < o.l_tol ? small + 1 : 0;
        if (small >= o.l_run) break;
    }
    const double c = eta / (4.0 * pi * pi);
    for (int k = 0; k < np; ++k) {
        out.re[static_cast<size_t>(k)] *= c;
        out.im[static_cast<size_t>(k)] *= c;
    }
    return out;
}

/// Outgoing distorted waves phi_l(r) = ((I + g_l V)^{-1} j_l)(r) at the given radii for l <= L (radial potentials).
/// The channel density is (eta / pi) Re[phi_l(r) conj(phi_l(r'))] per unit lambda.
inline std::vector<Eigen::VectorXcd> distorted_waves(const Potential& p, const SupportGrid& g, double eta, int L,
                                                    const std::vector<double>& radii, const ResolventOptions& o = {}) {
    if (!g.radial) throw InvalidArgument("distorted waves need a centered potential");
    const channel::Panels P = detail::wave_panels(g, eta, o.ppw, p.radial_breakpoints());
    const std::vector<double> V = detail::radial_values(p, P);
    channel::Operator op(P, eta, L, radii);
    const int n = op.n(), m = static_cast<int>(radii.size());
    std::vector<Eigen::VectorXcd> out;
    for (int l = 0; l <= L; ++l) {
        Eigen::VectorXcd je(m);
        for (int a = 0; a < m; ++a) je[a] = op.reg(l, n + a);
        if (p.is_zero()) {
            out.push_back(je);
            continue;
        }
        const Eigen::MatrixXcd W = op.weights(l);
        Eigen::MatrixXcd M = W.topRows(n);
        for (int j = 0; j < n; ++j) M.col(j) *= V[static_cast<size_t>(j)];
        M += Eigen::MatrixXcd::Identity(n, n);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
        if (lu.rcond() < o.solver_tol) throw NearSingularSolve("channel solve is near singular at eta = " + std::to_string(eta));
        Eigen::VectorXcd jn(n);
        for (int i = 0; i < n; ++i) jn[i] = op.reg(l, i);
        Eigen::VectorXcd Vphi = lu.solve(jn);
        for (int i = 0; i < n; ++i) Vphi[i] *= V[static_cast<size_t>(i)];
        out.push_back(je - W.bottomRows(m) * Vphi);
    }
    return out;
}

/// (1/pi) Im R_V(lambda + i0)(x, y), the Stone density per unit lambda.
inline double spectral_density(const Potential& p, const SupportGrid& g, double lambda, const Vec3& x, const Vec3& y,
                               const ResolventOptions& o = {}) {
    if (!(lambda > 0.0)) throw InvalidArgument("spectral_density needs lambda > 0");
    const double eta = std::sqrt(lambda);
    PairGeometry geo({EvalPair{x, y, x == y}});
    const DensitySample d = density_correction(p, g, eta, geo, o);
    if (d.skipped) throw NearSingularSolve("density solve is near singular at lambda = " + std::to_string(lambda));
    return free_density(eta, (x - y).norm()) + d.re[0];
}

struct BornOptions {
    int zeta_order = 48;
    int phi_points = 32;
    int L_order = 8;
    double L_panel = 0.25;
};

/**
 * @brief First Born term of the density, D1(eta) = -(1/pi) Im (R0 V R0)(x, y).
 *
 * In prolate spheroidal coordinates with foci x, y and L = |x - z| + |z - y|,
 *   dz / (|x - z| |z - y|) = (1/2) dL dzeta dphi,
 * so D1(eta) = -1/(32 pi^3) int sin(eta L) G(L) dL with G(L) = int int V dzeta dphi.
 * G is tabulated once per pair; any multiplier then costs one sum over L nodes.
 */
class BornTail {
public:
    BornTail() = default;
    BornTail(const Potential& p, const std::vector<EvalPair>& pairs, double eta_hi, BornOptions o = {})
        : o_(o), p_(p), pairs_(pairs), eta_hi_(eta_hi) {
        const double R = p.support_radius();
        const double h = std::min(o.L_panel, 2.0 * pi / std::max(eta_hi, 1.0));
        for (const auto& pr : pairs) {
            Table t;
            const double s = pr.sep();
            double Lmax = 0.0;
            for (const auto& q : p.primitives) {
                Primitive unit = q;
                unit.amplitude = 1.0;
                const double reach = unit.tail_radius(p.tail_tol / std::max(1.0, std::abs(q.amplitude)));
                Lmax = std::max(Lmax, (pr.x - q.center).norm() + (pr.y - q.center).norm() + 2.0 * std::min(reach, R + q.center.norm()));
            }
            t.Lmax = Lmax;
            if (p.is_zero() || Lmax <= s) {
                tables_.push_back(t);
                continue;
            }
            const int npan = std::max(1, static_cast<int>(std::ceil((Lmax - s) / h)));
            const quad::Rule1D rule = quad::composite_gl(linspace(s, Lmax, npan + 1), o.L_order);
            t.L = rule.x;
            t.w = rule.w;
            for (double L : t.L) t.G.push_back(shell_integral(p, pr, L));
            tables_.push_back(std::move(t));
        }
    }

    /// D1(eta) per pair.
    std::vector<double> density(double eta) const {
        std::vector<double> out;
        for (const auto& t : tables_) {
            double s = 0.0;
            for (size_t k = 0; k < t.L.size(); ++k) s += t.w[k] * std::sin(eta * t.L[k]) * t.G[k];
            out.push_back(-s / (32.0 * pi * pi * pi));
        }
        return out;
    }

    /// -1/(32 pi^3) int G(L) F(L) dL per pair for a kernel F(L) = int w(eta) sin(eta L) d eta.
    std::vector<double> apply(const std::function<double(double)>& F) const {
        std::vector<double> out;
        for (const auto& t : tables_) {
            double s = 0.0;
            for (size_t k = 0; k < t.L.size(); ++k) s += t.w[k] * F(t.L[k]) * t.G[k];
            out.push_back(-s / (32.0 * pi * pi * pi));
        }
        return out;
    }

    int size() const { return static_cast<int>(tables_.size()); }
    double eta_hi() const { return eta_hi_; }

    /// G(L) for pair k, zero beyond the reach of the potential.
    double shell(int k, double L) const {
        const auto& pr = pairs_[static_cast<size_t>(k)];
        if (L < pr.sep() || L > tables_[static_cast<size_t>(k)].Lmax) return 0.0;
        return shell_integral(p_, pr, L);
    }

private:
    struct Table {
        std::vector<double> L, w, G;
        double Lmax = 0.0;
    };

    // int_{-1}^{1} dzeta int_0^{2 pi} dphi V(z(L, zeta, phi)).
    double shell_integral(const Potential& p, const EvalPair& pr, double L) const {
        const double s = pr.sep();
        const Vec3 c = 0.5 * (pr.x + pr.y);
        Vec3 e = s > 0.0 ? Vec3((pr.y - pr.x) / s) : Vec3(0.0, 0.0, 1.0);
        const double rho_l = 0.5 * std::sqrt(std::max(0.0, L * L - s * s));
        const quad::Rule1D& gz = quad::gauss_legendre(o_.zeta_order);
        double total = 0.0;
        for (const auto& q : p.primitives) {
            if (q.amplitude == 0.0) continue;
            const Vec3 d = c - q.center;
            const double de = d.dot(e);
            const double dperp = std::sqrt(std::max(0.0, d.squaredNorm() - de * de));
            double acc = 0.0;
            for (size_t i = 0; i < gz.x.size(); ++i) {
                const double z = gz.x[i];
                const double along = de + 0.5 * L * z;
                const double rp = rho_l * std::sqrt(std::max(0.0, 1.0 - z * z));
                // |z - center|^2 = A + B cos(psi)
                const double A = along * along + dperp * dperp + rp * rp, B = 2.0 * rp * dperp;
                double ring;
                if (q.shape == Shape::square_well) {
                    const double R2 = q.width * q.width;
                    if (B <= 1e-300)
                        ring = A <= R2 ? 2.0 * pi : 0.0;
                    else {
                        const double c0 = (R2 - A) / B;
                        ring = c0 >= 1.0 ? 2.0 * pi : (c0 <= -1.0 ? 0.0 : 2.0 * pi - 2.0 * std::acos(c0));
                    }
                    ring *= q.amplitude;
                } else {
                    ring = 0.0;
                    const int n = o_.phi_points;
                    for (int k = 0; k < n; ++k) {
                        const double psi = pi * (k + 0.5) / n;
                        ring += q.profile(std::sqrt(std::max(0.0, A + B * std::cos(psi))));
                    }
                    ring *= 2.0 * pi / n;
                }
                acc += gz.w[i] * ring;
            }
            total += acc;
        }
        return total;
    }

    BornOptions o_;
    Potential p_;
    std::vector<EvalPair> pairs_;
    double eta_hi_ = 0.0;
    std::vector<Table> tables_;
};

}  // namespace kato
