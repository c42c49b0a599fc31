#pragma once

// Domination checks. A bound |K| <~ C F over all (t, x, y) is spot-checked as: the sup of |K| / F over
// a sampled grid is finite, and it moves by less than drift_tol when the support grid and the eta
// quadrature are refined together.

#include "kato/propagators.hpp"

#include <Eigen/Eigenvalues>

namespace kato {

struct RatioPoint {
    double param = 0.0;
    int pair = 0;
    double ratio = 0.0;
};

struct DominationReport {
    std::string theorem_id;
    std::vector<RatioPoint> ratio_grid;
    double fitted_constant = 0.0;
    double refinement_drift = 0.0;
    bool pass = false;
    // check-specific numbers (slope and target for br_decay, norm for l2_br, ...)
    std::vector<std::pair<std::string, double>> extra;
    std::string note;

    double get(const std::string& key, double fallback = std::numeric_limits<double>::quiet_NaN()) const {
        for (const auto& [k, v] : extra)
            if (k == key) return v;
        return fallback;
    }
};

struct HarnessOptions {
    double floor_rel = 1e-4;  // free kernel floored at this fraction of its diagonal value
    double drift_tol = 0.25;
    double refine = 1.5;
    double delta = 0.5;       // cone split for K2
    int br_samples = 240;
    double disc_tol = 1e-3;
};

namespace detail {

inline double drift(double a, double b) {
    if (a == b) return 0.0;
    const double d = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) / d;
}

inline void finish(DominationReport& r, double coarse, double fine, double drift_tol) {
    r.fitted_constant = coarse;
    r.refinement_drift = drift(coarse, fine);
    r.pass = std::isfinite(coarse) && std::isfinite(fine) && r.refinement_drift < drift_tol;
    r.extra.emplace_back("fitted_constant_refined", fine);
}

inline double sup_ratio(const std::vector<RatioPoint>& g) {
    double m = 0.0;
    for (const auto& r : g) m = std::isfinite(r.ratio) ? std::max(m, r.ratio) : std::numeric_limits<double>::infinity();
    return m;
}

}  // namespace detail

/**
 * @brief A sampler on the given grid and one on the refined grid, plus the bound states of each.
 *
 * All checks over the same pair set share it, so each density node is solved once per level.
 */
class Refinement {
public:
    Refinement(const Potential& p, const SupportGrid& g, const SpectralSpec& sq, std::vector<EvalPair> pairs,
               const HarnessOptions& o = {})
        : p_(p),
          o_(o),
          fine_grid_(build_support_grid(p, g.spec.refined(o.refine))),
          coarse_(p, g, pairs, sq),
          fine_(p, fine_grid_, std::move(pairs), sq.refined(o.refine)) {}

    const Potential& potential() const { return p_; }
    const HarnessOptions& options() const { return o_; }
    SpectralSampler& level(int k) { return k == 0 ? coarse_ : fine_; }
    const std::vector<EvalPair>& pairs() const { return coarse_.pairs(); }

    const BoundSpectrum& states(int k) {
        auto& slot = states_[static_cast<size_t>(k)];
        if (!slot) {
            const SupportGrid& g = level(k).grid();
            slot = std::make_unique<BoundSpectrum>(p_, g, bound_states(p_, g, default_kappa_max(p_)));
        }
        return *slot;
    }
    int bound_state_count() {
        if (p_.is_zero()) return 0;
        return count_negative_bound_states(p_, coarse_.grid()).count;
    }

private:
    Potential p_;
    HarnessOptions o_;
    SupportGrid fine_grid_;
    SpectralSampler coarse_, fine_;
    std::array<std::unique_ptr<BoundSpectrum>, 2> states_;
};

enum class PoissonBound { bound1, bound3, bound4 };
enum class HeatBound { gauss1, total };

inline const char* to_string(PoissonBound b) {
    return b == PoissonBound::bound1 ? "bound1" : (b == PoissonBound::bound3 ? "bound3" : "bound4");
}

/// Ratios |kernel| / poisson0. bound1: no bound states, any t. bound3: total kernel, t <= 1.
/// bound4: continuous part, t >= 1.
inline DominationReport check_poisson_domination(Refinement& R, const std::vector<double>& t_list, PoissonBound mode) {
    DominationReport rep;
    rep.theorem_id = to_string(mode);
    if (t_list.empty()) throw InvalidArgument("t_list is empty");
    for (double t : t_list) {
        if (!(t > 0.0)) throw NonPositiveTime("Poisson check needs t > 0");
        if (mode == PoissonBound::bound3 && t > 1.0) throw InvalidArgument("bound3 covers t <= 1");
        if (mode == PoissonBound::bound4 && t < 1.0) throw InvalidArgument("bound4 covers t >= 1");
    }
    if (mode == PoissonBound::bound1 && R.bound_state_count() > 0)
        throw PreconditionViolated("bound1 needs H without bound states");
    const double fl = R.options().floor_rel;
    double sup[2];
    for (int lev = 0; lev < 2; ++lev) {
        std::vector<RatioPoint> grid;
        for (double t : t_list) {
            const KernelSlice sl = poisson_pc(R.level(lev), t);
            for (int k = 0; k < static_cast<int>(sl.samples.size()); ++k) {
                const EvalPair& pr = sl.samples[static_cast<size_t>(k)].pair;
                cplx K = sl.samples[static_cast<size_t>(k)].value;
                if (mode == PoissonBound::bound3) {
                    // e^{-t sqrt(lambda_k)} with the principal root sqrt(lambda_k) = i kappa_k
                    const BoundSpectrum& B = R.states(lev);
                    const auto prod = B.products(pr.x, pr.y);
                    for (int j = 0; j < B.size(); ++j) K += std::exp(cplx(0.0, -t * B[j].kappa)) * prod[static_cast<size_t>(j)];
                }
                const double F = std::max(poisson0_r(t, pr.sep()), fl * poisson0_r(t, 0.0));
                grid.push_back({t, k, std::abs(K) / F});
            }
        }
        sup[lev] = detail::sup_ratio(grid);
        if (lev == 0) rep.ratio_grid = std::move(grid);
    }
    detail::finish(rep, sup[0], sup[1], R.options().drift_tol);
    return rep;
}

/// Ratios against the free heat kernel (gauss1, no bound states) or, for the total kernel with
/// bound states, against max(t^{-3/2}, e^{-lambda_N t}) e^{-s^2 / 4t}.
inline DominationReport check_heat_domination(Refinement& R, const std::vector<double>& t_list, HeatBound mode) {
    DominationReport rep;
    rep.theorem_id = "gauss1";
    if (t_list.empty()) throw InvalidArgument("t_list is empty");
    if (mode == HeatBound::gauss1 && R.bound_state_count() > 0)
        throw PreconditionViolated("gauss1 needs H without bound states");
    if (mode == HeatBound::total) rep.note = "total kernel with e^{-lambda_N t} growth";
    const double fl = R.options().floor_rel;
    double sup[2];
    for (int lev = 0; lev < 2; ++lev) {
        std::vector<RatioPoint> grid;
        for (double t : t_list) {
            const KernelSlice sl = heat_pc(R.level(lev), t);
            double lamN = 0.0;
            if (mode == HeatBound::total)
                for (const auto& b : R.states(lev).states()) lamN = std::min(lamN, b.lambda_k);
            auto env = [&](double s) {
                if (mode == HeatBound::gauss1) return heat0_r(t, s);
                return std::max(std::pow(t, -1.5), std::exp(-lamN * t)) * std::exp(-s * s / (4.0 * t));
            };
            for (int k = 0; k < static_cast<int>(sl.samples.size()); ++k) {
                const EvalPair& pr = sl.samples[static_cast<size_t>(k)].pair;
                double K = sl.samples[static_cast<size_t>(k)].value;
                if (mode == HeatBound::total)
                    K += point_spectrum_kernel(R.states(lev), [t](double l) { return std::exp(-l * t); }, pr.x, pr.y);
                const double F = std::max(env(pr.sep()), fl * env(0.0));
                grid.push_back({t, k, std::abs(K) / F});
            }
        }
        sup[lev] = detail::sup_ratio(grid);
        if (lev == 0) rep.ratio_grid = std::move(grid);
    }
    detail::finish(rep, sup[0], sup[1], R.options().drift_tol);
    return rep;
}

enum class K2Mode { poisson, heat };

/**
 * @brief Fits C in |K2(t)(x, y)| <= C envelope(t) K20(x, y).
 *
 * poisson: envelope <t>^{-1}. heat: t^{-1} e^{-(kappa_1 / 2 - eps) t} with kappa_1 the smallest kappa.
 * Without bound states K2 vanishes and the check passes vacuously.
 */
inline DominationReport check_k2_decay(const Potential& p, const SupportGrid& g, K2Mode mode, double eps,
                                       const std::vector<double>& t_list, const std::vector<EvalPair>& pairs,
                                       const HarnessOptions& o = {}) {
    DominationReport rep;
    rep.theorem_id = mode == K2Mode::poisson ? "bound2" : "gauss2";
    if (t_list.empty() || pairs.empty()) throw InvalidArgument("k2 check needs times and pairs");
    if (!(eps > 0.0)) throw InvalidArgument("k2 check needs eps > 0");
    double sup[2];
    for (int lev = 0; lev < 2; ++lev) {
        const SupportGrid gl = lev == 0 ? g : build_support_grid(p, g.spec.refined(o.refine));
        const BoundSpectrum B(p, gl, p.is_zero() ? std::vector<BoundState>{} : bound_states(p, gl, default_kappa_max(p)));
        std::vector<RatioPoint> grid;
        if (B.empty()) {
            rep.note = "no bound states: K2 vanishes";
            for (double t : t_list)
                for (int k = 0; k < static_cast<int>(pairs.size()); ++k) grid.push_back({t, k, 0.0});
        } else {
            double k1 = std::numeric_limits<double>::infinity();
            for (const auto& b : B.states()) k1 = std::min(k1, b.kappa);
            for (double t : t_list) {
                const double env = mode == K2Mode::poisson ? 1.0 / std::sqrt(1.0 + t * t)
                                                           : std::exp(-(0.5 * k1 - eps) * t) / t;
                const auto w = mode == K2Mode::poisson ? poisson_tau_density(t) : heat_tau_density(t);
                const double scale = mode == K2Mode::poisson ? t : std::sqrt(t);
                for (int k = 0; k < static_cast<int>(pairs.size()); ++k) {
                    const auto& pr = pairs[static_cast<size_t>(k)];
                    const K2Split sp = k2_split(B, w, o.delta, pr.x, pr.y, scale);
                    grid.push_back({t, k, std::abs(sp.K2) / (env * sp.K20_bound)});
                }
            }
            rep.extra.emplace_back(lev == 0 ? "kappa_1" : "kappa_1_refined", k1);
        }
        sup[lev] = detail::sup_ratio(grid);
        if (lev == 0) rep.ratio_grid = std::move(grid);
    }
    detail::finish(rep, sup[0], sup[1], o.drift_tol);
    rep.extra.emplace_back("delta", o.delta);
    rep.extra.emplace_back("eps", eps);
    return rep;
}

namespace detail {

/// Pairs (x0, x0 + s e) along the x-axis from a fixed base point.
inline std::vector<EvalPair> ray_pairs(const std::vector<double>& seps, const Vec3& x0 = Vec3::Zero()) {
    std::vector<EvalPair> out;
    for (double s : seps) out.push_back({x0, x0 + Vec3(s, 0.0, 0.0), false});
    return out;
}

/// Least-squares slope of log RMS(K) against log(sep). The RMS is taken over consecutive windows
/// spanning whole oscillation periods and growing roughly dyadically, which averages the oscillation.
/// Each window sits at the point where sep^{2p} equals its window mean; p is the fitted slope, so a
/// few fixed-point passes remove the bias the arithmetic mean gives for steep envelopes.
inline double envelope_slope(const std::vector<double>& sep, const std::vector<double>& val, double period,
                             std::vector<std::pair<double, double>>* bins = nullptr) {
    std::vector<std::pair<size_t, size_t>> win;
    std::vector<double> ly;
    size_t i = 0;
    while (i < sep.size()) {
        const double span = period * std::max(1.0, std::floor((std::sqrt(2.0) - 1.0) * sep[i] / period));
        const double hi = sep[i] + span;
        if (sep.back() < hi - 1e-9 * span) break;  // incomplete window
        size_t j = i;
        double ss = 0.0;
        while (j < sep.size() && sep[j] < hi) {
            ss += val[j] * val[j];
            ++j;
        }
        if (ss > 0.0) {
            win.emplace_back(i, j);
            ly.push_back(0.5 * std::log(ss / static_cast<double>(j - i)));
        }
        i = j;
    }
    if (win.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    auto fit = [&](const std::vector<double>& lx) {
        double mx = 0.0, my = 0.0;
        for (size_t k = 0; k < lx.size(); ++k) {
            mx += lx[k];
            my += ly[k];
        }
        mx /= static_cast<double>(lx.size());
        my /= static_cast<double>(lx.size());
        double sxy = 0.0, sxx = 0.0;
        for (size_t k = 0; k < lx.size(); ++k) {
            sxy += (lx[k] - mx) * (ly[k] - my);
            sxx += (lx[k] - mx) * (lx[k] - mx);
        }
        return sxy / sxx;
    };
    auto place = [&](double p) {
        std::vector<double> lx;
        for (const auto& [a, b] : win) {
            double m = 0.0, lm = 0.0;
            for (size_t k = a; k < b; ++k) {
                m += std::pow(sep[k], 2.0 * p);
                lm += std::log(sep[k]);
            }
            const double n = static_cast<double>(b - a);
            lx.push_back(p == 0.0 ? lm / n : std::log(m / n) / (2.0 * p));
        }
        return lx;
    };
    std::vector<double> lx = place(0.0);
    double p = fit(lx);
    for (int it = 0; it < 6 && std::isfinite(p); ++it) {
        lx = place(p);
        p = fit(lx);
    }
    if (bins)
        for (size_t k = 0; k < win.size(); ++k) bins->emplace_back(std::exp(lx[k]), std::exp(ly[k]));
    return p;
}

}  // namespace detail

/// Decay exponent of the BR kernel (continuous part) over |x - y| in [5, 50] / sqrt(lambda0), with x at
/// twice the support radius and y moving radially outward.
inline DominationReport br_decay_slope(const Potential& p, const SupportGrid& g, const SpectralSpec& sq, double alpha,
                                       double lambda0, const HarnessOptions& o = {}) {
    if (!(alpha > -1.0 && alpha < 1.0)) throw InvalidArgument("br_decay_slope needs alpha in (-1, 1)");
    if (!(lambda0 > 0.0)) throw InvalidArgument("br_decay_slope needs lambda0 > 0");
    DominationReport rep;
    rep.theorem_id = "br_decay";
    const double k0 = std::sqrt(lambda0);
    const std::vector<double> seps = linspace(5.0 / k0, 50.0 / k0, o.br_samples);
    const auto pairs = detail::ray_pairs(seps, Vec3(2.0 * g.radius, 0.0, 0.0));
    double slope[2];
    for (int lev = 0; lev < 2; ++lev) {
        const SupportGrid gl = lev == 0 ? g : build_support_grid(p, g.spec.refined(o.refine));
        SpectralSampler S(p, gl, pairs, lev == 0 ? sq : sq.refined(o.refine));
        const KernelSlice sl = bochner_riesz_pc(S, alpha, lambda0);
        std::vector<std::pair<double, double>> peaks;
        slope[lev] = detail::envelope_slope(seps, sl.values(), 2.0 * pi / k0, &peaks);
        if (lev == 0)
            for (const auto& [s, v] : peaks) rep.ratio_grid.push_back({s, -1, v});
    }
    const double target = -(2.0 + alpha);
    detail::finish(rep, slope[0], slope[1], o.drift_tol);
    rep.extra.emplace_back("slope", slope[0]);
    rep.extra.emplace_back("target", target);
    rep.pass = rep.pass && std::abs(slope[0] - target) <= 0.3;
    rep.note = "fitted_constant is the log-log slope of the windowed RMS envelope";
    return rep;
}

/**
 * @brief Largest singular value of (1 - H/lambda0)_+^alpha P_c restricted to the support ball.
 *
 * Centered potentials split into channels; per channel the kernel
 *   K_l(r, r') = int 2 eta m(eta^2) (eta / pi) Re[phi_l(r) conj(phi_l(r'))] d eta
 * is discretised on the radial nodes with the weights w r^2 and symmetrised.
 */
inline double l2_multiplier_norm(const Potential& p, const SupportGrid& g, const SpectralSpec& sq, double alpha,
                                 double lambda0) {
    if (!g.radial) throw InvalidArgument("l2_br_norm needs a centered potential");
    const double k0 = std::sqrt(lambda0);
    const int L = detail::channel_cap(k0, g.radius, sq.resolvent.l_max);
    const int n = g.n_radial();
    const std::vector<double>& r = g.panels.r;
    const int panels = std::max(4, static_cast<int>(std::ceil(1.5 * k0 * 2.0 * g.radius / (2.0 * pi) + k0 / sq.panel)));
    const SpectralQuadrature th = make_spectral_quadrature(0.0, 0.5 * pi, 0.5 * pi / panels, sq.order);
    std::vector<Eigen::MatrixXd> K(static_cast<size_t>(L + 1), Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < th.size(); ++i) {
        const double t = th.eta_nodes[static_cast<size_t>(i)];
        const double eta = k0 * std::sin(t);
        const double m = alpha == 0.0 ? 1.0 : std::pow(std::max(0.0, 1.0 - eta * eta / lambda0), alpha);
        const double w = th.weights[static_cast<size_t>(i)] * k0 * std::cos(t) * 2.0 * eta * m * eta / pi;
        const auto phi = distorted_waves(p, g, eta, L, r, sq.resolvent);
        for (int l = 0; l <= L; ++l) {
            const Eigen::VectorXcd& f = phi[static_cast<size_t>(l)];
            K[static_cast<size_t>(l)] += w * (f * f.adjoint()).real();
        }
    }
    double best = 0.0;
    Eigen::VectorXd sw(n);
    for (int a = 0; a < n; ++a) sw[a] = std::sqrt(g.panels.measure(a));
    for (int l = 0; l <= L; ++l) {
        const Eigen::MatrixXd A = sw.asDiagonal() * K[static_cast<size_t>(l)] * sw.asDiagonal();
        const Eigen::MatrixXd S = 0.5 * (A + A.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
        best = std::max(best, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return best;
}

inline DominationReport l2_br_norm(const Potential& p, const SupportGrid& g, const SpectralSpec& sq, double alpha,
                                   double lambda0, const HarnessOptions& o = {}) {
    if (!(alpha >= 0.0)) throw InvalidArgument("l2_br_norm needs alpha >= 0");
    if (!(lambda0 > 0.0)) throw InvalidArgument("l2_br_norm needs lambda0 > 0");
    DominationReport rep;
    rep.theorem_id = "l2_br";
    const double a = l2_multiplier_norm(p, g, sq, alpha, lambda0);
    const double b = l2_multiplier_norm(p, build_support_grid(p, g.spec.refined(o.refine)), sq.refined(o.refine), alpha, lambda0);
    rep.ratio_grid.push_back({alpha, -1, a});
    detail::finish(rep, a, b, o.drift_tol);
    rep.extra.emplace_back("norm", a);
    rep.extra.emplace_back("disc_tol", o.disc_tol);
    rep.pass = rep.pass && a <= 1.0 + o.disc_tol;
    rep.note = "continuous part on the support ball";
    return rep;
}

/// Per pair int_0^tau_max |tau T(tau)| d tau and |x - y| int |T| d tau of the absolutely continuous part.
inline DominationReport tau_T_mass(Refinement& R, double tau_max) {
    if (!(tau_max > 0.0)) throw InvalidArgument("tau_T_mass needs tau_max > 0");
    DominationReport rep;
    rep.theorem_id = "tauT_mass";
    double sup[2];
    for (int lev = 0; lev < 2; ++lev) {
        SpectralSampler& S = R.level(lev);
        const double dt = pi / (4.0 * S.spec().eta_born);
        const int n = std::max(8, static_cast<int>(std::ceil(tau_max / dt)));
        std::vector<double> m1(static_cast<size_t>(S.size()), 0.0), m2(m1);
        for (int i = 0; i <= n; ++i) {
            const double tau = tau_max * i / n;
            const double w = (i == 0 || i == n ? 0.5 : 1.0) * tau_max / n;
            const KernelSlice sl = wave_T(S, tau);
            for (int k = 0; k < S.size(); ++k) {
                const double T = sl.samples[static_cast<size_t>(k)].value;
                m1[static_cast<size_t>(k)] += w * std::abs(tau * T);
                m2[static_cast<size_t>(k)] += w * std::abs(T) * S.pairs()[static_cast<size_t>(k)].sep();
            }
        }
        std::vector<RatioPoint> grid;
        for (int k = 0; k < S.size(); ++k) grid.push_back({tau_max, k, m1[static_cast<size_t>(k)]});
        sup[lev] = detail::sup_ratio(grid);
        if (lev == 0) {
            rep.ratio_grid = std::move(grid);
            double s2 = 0.0;
            for (double v : m2) s2 = std::max(s2, v);
            rep.extra.emplace_back("sep_mass", s2);
        }
    }
    detail::finish(rep, sup[0], sup[1], R.options().drift_tol);
    rep.note = "absolutely continuous part; the free delta ridge is excluded";
    return rep;
}

// Signature-level wrappers building their own refinement pair.
inline DominationReport check_poisson_domination(const Potential& p, const SupportGrid& g, const SpectralSpec& sq,
                                                 const std::vector<double>& t_list, const std::vector<EvalPair>& pairs,
                                                 PoissonBound mode, const HarnessOptions& o = {}) {
    Refinement R(p, g, sq, pairs, o);
    return check_poisson_domination(R, t_list, mode);
}
inline DominationReport check_heat_domination(const Potential& p, const SupportGrid& g, const SpectralSpec& sq,
                                              const std::vector<double>& t_list, const std::vector<EvalPair>& pairs,
                                              HeatBound mode, const HarnessOptions& o = {}) {
    Refinement R(p, g, sq, pairs, o);
    return check_heat_domination(R, t_list, mode);
}
inline DominationReport tau_T_mass(const Potential& p, const SupportGrid& g, const SpectralSpec& sq,
                                   const std::vector<EvalPair>& pairs, double tau_max, const HarnessOptions& o = {}) {
    Refinement R(p, g, sq, pairs, o);
    return tau_T_mass(R, tau_max);
}

}  // namespace kato
