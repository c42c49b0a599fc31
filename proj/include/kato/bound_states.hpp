#pragma once

// Negative eigenvalues -kappa^2 of H = -Delta + V via the Birman-Schwinger count:
// the number of real eigenvalues of V R0(-kappa^2) below -1 drops by one at every
// bound state, so each state is bracketed by a count change and bisected.

#include "kato/birman_schwinger.hpp"
#include "kato/harmonics.hpp"

namespace kato {

struct BoundStateOptions {
    double kappa_tol = 1e-8;
    int kappa_steps = 48;      // initial scan steps on (0, kappa_max]
    double min_step = 1e-7;    // step halving gives up below this width
    double resid_tol = 1e-6;
    int tail_order = 40;       // Gauss-Laguerre points for the exterior norm
    BSOptions bs{};
};

struct BoundState {
    double lambda_k = 0.0;
    double kappa = 0.0;
    int l = -1;  // channel; -1 on the tensor-grid route
    int m = 0;
    std::vector<cplx> psi_support;  // psi at the support-grid nodes
    double norm = 1.0;
    double residual = 0.0;
    // channel route: radial profile u and source f = V u on the radial nodes (psi = u Y_lm)
    std::vector<double> u, source;
    // tensor route: V psi at the tensor nodes
    std::vector<cplx> source3d;
};

namespace detail {

/// Real channel matrix diag(V) W_l at eta = i kappa.
inline Eigen::MatrixXd channel_A_real(const SupportGrid& g, double kappa, int l) {
    ChannelBS ch(g, cplx(0.0, kappa), l);
    return ch.A(l).real();
}

inline int real_count_below(const Eigen::VectorXcd& ev, double complex_tol) {
    int n = 0;
    for (int k = 0; k < ev.size(); ++k)
        if (std::abs(ev[k].imag()) <= complex_tol * std::abs(ev[k].real()) && ev[k].real() < -1.0) ++n;
    return n;
}

/// Count change points of a nonincreasing step function on (0, kmax], refined to width tol.
/// Returns (kappa, jump) with jump = number of states lost there.
template <class Count>
std::vector<std::pair<double, int>> count_crossings(Count&& count, int c0, double kmax, const BoundStateOptions& o) {
    std::vector<std::pair<double, int>> out;
    if (c0 == 0) return out;
    std::vector<double> ks{0.0};
    std::vector<int> cs{c0};
    for (int k = 1; k <= o.kappa_steps; ++k) {
        ks.push_back(kmax * k / o.kappa_steps);
        cs.push_back(count(ks.back()));
    }
    if (cs.back() != 0) throw TrackingLost("states remain below -kappa_max^2; raise kappa_max");
    std::function<void(double, int, double, int)> refine = [&](double a, int ca, double b, int cb) {
        if (ca == cb) return;
        if (cb > ca) throw TrackingLost("Birman-Schwinger count increased with kappa");
        if (b - a <= o.kappa_tol) {
            out.emplace_back(0.5 * (a + b), ca - cb);
            return;
        }
        // a single jump is bisected; several jumps are split by halving until they separate
        const double mid = 0.5 * (a + b);
        const int cm = count(mid);
        if (ca - cb > 1 && b - a < o.min_step) {
            // degenerate cluster
            double lo = a, hi = b;
            while (hi - lo > o.kappa_tol) {
                const double c = 0.5 * (lo + hi);
                (count(c) == ca ? lo : hi) = c;
            }
            out.emplace_back(0.5 * (lo + hi), ca - cb);
            return;
        }
        refine(a, ca, mid, cm);
        refine(mid, cm, b, cb);
    };
    for (size_t k = 0; k + 1 < ks.size(); ++k) refine(ks[k], cs[k], ks[k + 1], cs[k + 1]);
    return out;
}

/// Exterior integral int_R^inf f(r) r^2 dr for f decaying like e^{-rate r}, by Gauss-Laguerre.
template <class F>
double exterior_integral(F&& f, double R, double rate, int order) {
    const quad::Rule1D& gl = quad::gauss_laguerre(order);
    double s = 0.0;
    for (size_t k = 0; k < gl.x.size(); ++k) {
        const double r = R + gl.x[k] / rate;
        s += gl.w[k] * std::exp(gl.x[k]) * f(r) * r * r;
    }
    return s / rate;
}

/// u(rho) = -sum_j W_l(rho, j) f_j at arbitrary radii for a channel state.
inline std::vector<double> channel_profile(const SupportGrid& g, double kappa, int l, const std::vector<double>& f,
                                           const std::vector<double>& radii) {
    if (radii.empty()) return {};
    channel::Operator op(g.panels, cplx(0.0, kappa), l, radii, false);
    const Eigen::MatrixXcd W = op.weights(l);
    Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    const Eigen::VectorXd u = -(W.real() * fv);
    return {u.data(), u.data() + u.size()};
}

inline double channel_exterior_norm2(const SupportGrid& g, double kappa, int l, const std::vector<double>& f,
                                     int order) {
    const double R = g.radius;
    const double uR = channel_profile(g, kappa, l, f, {R})[0];
    std::vector<cplxl> jv(static_cast<size_t>(l + 1)), hR(static_cast<size_t>(l + 1)), h(static_cast<size_t>(l + 1));
    sph_bessel_jh(cplxl(0.0L, kappa * R), l, nullptr, hR.data());
    // beyond the support u is proportional to h_l(i kappa r)
    auto u2 = [&](double r) {
        sph_bessel_jh(cplxl(0.0L, kappa * r), l, nullptr, h.data());
        const double ratio = static_cast<double>((h[static_cast<size_t>(l)] / hR[static_cast<size_t>(l)]).real());
        return uR * uR * ratio * ratio;
    };
    return exterior_integral(u2, R, 2.0 * kappa, order);
}

}  // namespace detail

/// Bound states with lambda_k >= -kappa_max^2, sorted lambda_1 >= ... >= lambda_N.
inline std::vector<BoundState> find_bound_states(const Potential& p, const SupportGrid& g, double kappa_max,
                                                 const BoundStateOptions& o = {}) {
    if (!(kappa_max > 0.0)) throw InvalidArgument("kappa_max must be positive");
    std::vector<BoundState> out;
    if (p.is_zero()) return out;
    const CountResult zero = count_negative_bound_states(p, g, o.bs);
    const double ctol = o.bs.complex_tol;
    if (g.radial) {
        std::map<int, int> per_l;
        for (const auto& e : zero.below) ++per_l[e.l];
        for (const auto& [l, c0] : per_l) {
            auto count = [&](double kappa) {
                return detail::real_count_below(detail::eigenvalues_real(detail::channel_A_real(g, kappa, l)), ctol);
            };
            for (const auto& [kappa, jump] : detail::count_crossings(count, c0, kappa_max, o)) {
                // null vector of I + A_l(i kappa): the source f = V u
                const Eigen::MatrixXd A = detail::channel_A_real(g, kappa, l);
                const int n = static_cast<int>(A.rows());
                Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd::Identity(n, n) + A, Eigen::ComputeFullV);
                for (int c = 0; c < jump; ++c) {
                    Eigen::VectorXd f = svd.matrixV().col(n - 1 - c);
                    ChannelBS ch(g, cplx(0.0, kappa), l);
                    const Eigen::MatrixXd W = ch.op().weights(l).real();
                    Eigen::VectorXd u = -(W * f);
                    double in2 = 0.0;
                    for (int i = 0; i < n; ++i) in2 += g.panels.measure(i) * u[i] * u[i];
                    std::vector<double> fv(f.data(), f.data() + n);
                    const double nrm = std::sqrt(in2 + detail::channel_exterior_norm2(g, kappa, l, fv, o.tail_order));
                    // deterministic sign: largest |u| positive
                    Eigen::Index imax;
                    u.cwiseAbs().maxCoeff(&imax);
                    const double sgn = u[imax] < 0 ? -1.0 : 1.0;
                    u *= sgn / nrm;
                    f *= sgn / nrm;
                    Eigen::VectorXd Vu(n);
                    for (int i = 0; i < n; ++i) Vu[i] = g.radial_values[static_cast<size_t>(i)] * u[i];
                    const Eigen::VectorXd res = u + W * Vu;
                    double r2 = 0.0, u2 = 0.0;
                    for (int i = 0; i < n; ++i) {
                        r2 += g.panels.measure(i) * res[i] * res[i];
                        u2 += g.panels.measure(i) * u[i] * u[i];
                    }
                    for (int m = -l; m <= l; ++m) {
                        BoundState b;
                        b.kappa = kappa;
                        b.lambda_k = -kappa * kappa;
                        b.l = l;
                        b.m = m;
                        b.u.assign(u.data(), u.data() + n);
                        b.source.assign(f.data(), f.data() + n);
                        b.residual = std::sqrt(r2 / u2);
                        for (int ir = 0; ir < g.n_radial(); ++ir)
                            for (int ia = 0; ia < g.n_angular(); ++ia)
                                b.psi_support.emplace_back(u[ir] * real_ylm(l, m, g.sphere.dirs[static_cast<size_t>(ia)]));
                        out.push_back(std::move(b));
                    }
                }
            }
        }
    } else {
        auto count = [&](double kappa) {
            return detail::real_count_below(
                detail::eigenvalues(assemble(p, g, SpectralParameter::imaginary(kappa)).matrix), ctol);
        };
        const int N = g.size();
        for (const auto& [kappa, jump] : detail::count_crossings(count, zero.count, kappa_max, o)) {
            const BSOperator A = assemble(p, g, SpectralParameter::imaginary(kappa));
            const Eigen::MatrixXcd K = tensor_kernel(g, cplx(0.0, kappa));
            Eigen::BDCSVD<Eigen::MatrixXcd> svd(Eigen::MatrixXcd::Identity(N, N) + A.matrix, Eigen::ComputeFullV);
            for (int c = 0; c < jump; ++c) {
                Eigen::VectorXcd f = svd.matrixV().col(N - 1 - c);
                Eigen::VectorXcd psi = -(K * f);
                BoundState b;
                b.kappa = kappa;
                b.lambda_k = -kappa * kappa;
                b.psi_support.assign(psi.data(), psi.data() + N);
                b.source3d.assign(f.data(), f.data() + N);
                out.push_back(std::move(b));
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const BoundState& a, const BoundState& b) { return a.lambda_k > b.lambda_k; });
    return out;
}

/// psi(x) = -(R0(i kappa) V psi)(x) at arbitrary points.
inline std::vector<cplx> extend_eigenfunction(const BoundState& bs, const Potential& p, const SupportGrid& g,
                                              const std::vector<Vec3>& xs) {
    (void)p;
    std::vector<cplx> out;
    out.reserve(xs.size());
    if (bs.l >= 0) {
        std::vector<double> radii;
        for (const auto& x : xs) radii.push_back(x.norm());
        const auto u = detail::channel_profile(g, bs.kappa, bs.l, bs.source, radii);
        for (size_t k = 0; k < xs.size(); ++k) out.emplace_back(u[k] * real_ylm(bs.l, bs.m, xs[k]));
        return out;
    }
    for (const auto& x : xs) {
        cplx v = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            const double d = (x - g.nodes[static_cast<size_t>(j)]).norm();
            if (d == 0.0) {
                v = bs.psi_support[static_cast<size_t>(j)];
                break;
            }
            v -= std::exp(-bs.kappa * d) / (4.0 * pi * d) * bs.source3d[static_cast<size_t>(j)] *
                 g.weights[static_cast<size_t>(j)];
        }
        out.push_back(v);
    }
    return out;
}

inline cplx extend_eigenfunction(const BoundState& bs, const Potential& p, const SupportGrid& g, const Vec3& x) {
    return extend_eigenfunction(bs, p, g, std::vector<Vec3>{x})[0];
}

namespace detail {

/// Inner product of two tensor-route states: support quadrature plus an exterior shell integral.
inline cplx tensor_inner(const BoundState& a, const BoundState& b, const Potential& p, const SupportGrid& g, int order) {
    cplx s = 0.0;
    for (int i = 0; i < g.size(); ++i)
        s += std::conj(a.psi_support[static_cast<size_t>(i)]) * b.psi_support[static_cast<size_t>(i)] *
             g.weights[static_cast<size_t>(i)];
    const quad::Rule1D& gl = quad::gauss_laguerre(order);
    const double rate = a.kappa + b.kappa;
    std::vector<Vec3> pts;
    for (size_t k = 0; k < gl.x.size(); ++k)
        for (const auto& d : g.sphere.dirs) pts.push_back((g.radius + gl.x[k] / rate) * d);
    const auto pa = extend_eigenfunction(a, p, g, pts), pb = extend_eigenfunction(b, p, g, pts);
    size_t idx = 0;
    for (size_t k = 0; k < gl.x.size(); ++k) {
        const double r = g.radius + gl.x[k] / rate;
        for (size_t d = 0; d < g.sphere.dirs.size(); ++d, ++idx)
            s += std::conj(pa[idx]) * pb[idx] * g.sphere.w[d] * gl.w[k] * std::exp(gl.x[k]) * r * r / rate;
    }
    return s;
}

/// Radial overlap int_0^inf u_a u_b r^2 dr of two channel states.
inline double channel_radial_inner(const BoundState& a, const BoundState& b, const SupportGrid& g, int order) {
    double s = 0.0;
    for (int i = 0; i < g.n_radial(); ++i)
        s += g.panels.measure(i) * a.u[static_cast<size_t>(i)] * b.u[static_cast<size_t>(i)];
    const quad::Rule1D& gl = quad::gauss_laguerre(order);
    const double rate = a.kappa + b.kappa;
    std::vector<double> radii;
    for (double x : gl.x) radii.push_back(g.radius + x / rate);
    const auto ua = channel_profile(g, a.kappa, a.l, a.source, radii);
    const auto ub = channel_profile(g, b.kappa, b.l, b.source, radii);
    for (size_t k = 0; k < gl.x.size(); ++k)
        s += gl.w[k] * std::exp(gl.x[k]) * ua[k] * ub[k] * radii[k] * radii[k] / rate;
    return s;
}

}  // namespace detail

/// Normalise tensor-route states (support quadrature plus exterior tail) and record residuals.
inline void finalize_tensor_states(std::vector<BoundState>& states, const Potential& p, const SupportGrid& g,
                                   const BoundStateOptions& o = {}) {
    for (auto& b : states) {
        if (b.l >= 0) continue;
        const double nrm = std::sqrt(std::abs(detail::tensor_inner(b, b, p, g, o.tail_order)));
        // deterministic phase: largest component real positive
        size_t imax = 0;
        for (size_t i = 0; i < b.psi_support.size(); ++i)
            if (std::abs(b.psi_support[i]) > std::abs(b.psi_support[imax])) imax = i;
        const cplx ph = std::abs(b.psi_support[imax]) > 0 ? std::conj(b.psi_support[imax]) / std::abs(b.psi_support[imax]) : 1.0;
        for (auto& v : b.psi_support) v *= ph / nrm;
        for (auto& v : b.source3d) v *= ph / nrm;
        const Eigen::MatrixXcd K = tensor_kernel(g, cplx(0.0, b.kappa));
        const int N = g.size();
        Eigen::VectorXcd psi = Eigen::Map<Eigen::VectorXcd>(b.psi_support.data(), N), Vpsi(N);
        for (int i = 0; i < N; ++i) Vpsi[i] = g.potential_values[static_cast<size_t>(i)] * psi[i];
        const Eigen::VectorXcd res = psi + K * Vpsi;
        double r2 = 0.0, u2 = 0.0;
        for (int i = 0; i < N; ++i) {
            r2 += g.weights[static_cast<size_t>(i)] * std::norm(res[i]);
            u2 += g.weights[static_cast<size_t>(i)] * std::norm(psi[i]);
        }
        b.residual = std::sqrt(r2 / u2);
    }
}

/// Bound states with tensor-route normalisation applied.
inline std::vector<BoundState> bound_states(const Potential& p, const SupportGrid& g, double kappa_max,
                                            const BoundStateOptions& o = {}) {
    auto s = find_bound_states(p, g, kappa_max, o);
    finalize_tensor_states(s, p, g, o);
    return s;
}

/// Default scan range: no state lies below -max|V|.
inline double default_kappa_max(const Potential& p) { return std::sqrt(p.max_abs()) + 0.5; }

/// <psi_a, psi_b> in L2(R^3) under quadrature.
inline cplx state_inner(const BoundState& a, const BoundState& b, const Potential& p, const SupportGrid& g,
                        const BoundStateOptions& o = {}) {
    if (a.l >= 0 && b.l >= 0) {
        // angular factor by a product rule exact for Y_la Y_lb
        const quad::SphereRule s = quad::product_sphere(std::max(2, (a.l + b.l) / 2 + 2));
        double ang = 0.0;
        for (size_t k = 0; k < s.dirs.size(); ++k)
            ang += s.w[k] * real_ylm(a.l, a.m, s.dirs[k]) * real_ylm(b.l, b.m, s.dirs[k]);
        if (std::abs(ang) < 1e-15) return 0.0;
        return ang * detail::channel_radial_inner(a, b, g, o.tail_order);
    }
    return detail::tensor_inner(a, b, p, g, o.tail_order);
}

/// max |<psi_j, psi_k>| over j != k and max | |psi_j| - 1 |.
inline std::pair<double, double> orthonormality(const std::vector<BoundState>& s, const Potential& p,
                                                const SupportGrid& g, const BoundStateOptions& o = {}) {
    double off = 0.0, diag = 0.0;
    for (size_t j = 0; j < s.size(); ++j)
        for (size_t k = j; k < s.size(); ++k) {
            const double v = std::abs(state_inner(s[j], s[k], p, g, o));
            if (j == k)
                diag = std::max(diag, std::abs(std::sqrt(v) - 1.0));
            else
                off = std::max(off, v);
        }
    return {off, diag};
}

/// sup over sampled points at the given radii of |psi(x)| <x> e^{kappa |x|}.
inline double agmon_ratio(const BoundState& bs, const Potential& p, const SupportGrid& g,
                          const std::vector<double>& radii) {
    std::vector<Vec3> pts;
    for (double r : radii) {
        if (!(r > g.radius)) throw InvalidArgument("agmon radii must lie outside the support");
        for (const auto& d : g.sphere.dirs) pts.push_back(r * d);
    }
    const auto v = extend_eigenfunction(bs, p, g, pts);
    double sup = 0.0;
    for (size_t k = 0; k < pts.size(); ++k)
        sup = std::max(sup, std::abs(v[k]) * bracket(pts[k]) * std::exp(bs.kappa * pts[k].norm()));
    return sup;
}

}  // namespace kato
