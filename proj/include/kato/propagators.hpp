#pragma once

// Spectral reconstruction of functions of H from the Stone density,
//   m(H) P_c (x, y) = int_0^inf m(eta^2) D(eta; x, y) 2 eta d eta,
// and the point-spectrum parts built from the bound states.
//
// Two modes. free_subtracted: closed-form free kernel + exact D - D0 on [0, eta_born] + first Born
// term above eta_born. raw: the free density is integrated numerically as well (truncated at
// eta_max), which is what the V = 0 identity checks exercise.

#include "kato/bound_states.hpp"
#include "kato/resolvent.hpp"

#include <map>
#include <sstream>

namespace kato {

enum class StoneMode { free_subtracted, raw };

inline const char* to_string(StoneMode m) { return m == StoneMode::raw ? "raw" : "free_subtracted"; }

struct SpectralSpec {
    double eta_born = 12.0;          // exact density below, first Born term above
    double panel = 0.5;              // eta panel length
    int order = 10;                  // Gauss-Legendre nodes per eta panel
    double eta_max = 30.0;           // raw-mode truncation of the wave integral
    double taper = 0.1;              // cosine taper on this trailing fraction of eta_max (raw wave only)
    double weight_tail_tol = 1e-10;  // multiplier weight allowed at the truncation point
    double eta_cap = 400.0;          // largest truncation accepted
    double born_eta_hi = 40.0;       // resolution of the tabulated Born term
    double skip_limit = 0.01;        // fraction of dropped nodes that marks a slice unreliable
    int nodes_per_period = 8;
    StoneMode mode = StoneMode::free_subtracted;
    ResolventOptions resolvent{};
    BornOptions born{};

    SpectralSpec refined(double factor) const {
        SpectralSpec s = *this;
        s.order = static_cast<int>(std::ceil(order * factor));
        s.eta_born = eta_born * factor;
        return s;
    }
};

/// Nodes in eta (lambda = eta^2) with their weights; panel index kept for reweighting.
struct SpectralQuadrature {
    std::vector<double> eta_nodes, weights;
    std::vector<int> panel;
    double eta_max = 0.0;
    std::vector<double> skipped_nodes;

    int size() const { return static_cast<int>(eta_nodes.size()); }
    double spacing() const { return eta_nodes.empty() ? 0.0 : eta_max / static_cast<double>(eta_nodes.size()); }
};

inline SpectralQuadrature make_spectral_quadrature(double a, double b, double panel, int order) {
    if (!(b > a)) throw InvalidArgument("spectral quadrature needs a nonempty interval");
    if (order < 2 || !(panel > 0.0)) throw InvalidOrder("spectral quadrature needs order >= 2 and panel > 0");
    SpectralQuadrature q;
    const int np = std::max(1, static_cast<int>(std::ceil((b - a) / panel - 1e-12)));
    const quad::Rule1D& gl = quad::gauss_legendre(order);
    for (int k = 0; k < np; ++k) {
        const double lo = a + (b - a) * k / np, hi = a + (b - a) * (k + 1) / np;
        for (size_t i = 0; i < gl.x.size(); ++i) {
            q.eta_nodes.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.x[i]);
            q.weights.push_back(0.5 * (hi - lo) * gl.w[i]);
            q.panel.push_back(k);
        }
    }
    q.eta_max = b;
    return q;
}

/// Nodes of the default grid on [0, eta_born].
inline SpectralQuadrature make_spectral_quadrature(const SpectralSpec& s) {
    return make_spectral_quadrature(0.0, s.eta_born, s.panel, s.order);
}

/**
 * @brief Density samples D - D0 for a fixed pair set, cached per eta node.
 *
 * Every slice (any t, tau, alpha) over the same pairs reuses the cache, so one sweep over the eta
 * grid serves a whole parameter list.
 */
class SpectralSampler {
public:
    SpectralSampler(const Potential& p, const SupportGrid& g, std::vector<EvalPair> pairs, SpectralSpec spec = {})
        : p_(p), g_(g), spec_(spec), geo_(std::move(pairs)) {
        if (geo_.size() == 0) throw InvalidArgument("spectral sampler needs at least one pair");
    }

    const Potential& potential() const { return p_; }
    const SupportGrid& grid() const { return g_; }
    const SpectralSpec& spec() const { return spec_; }
    const std::vector<EvalPair>& pairs() const { return geo_.pairs; }
    int size() const { return geo_.size(); }
    int solves() const { return static_cast<int>(cache_.size()); }

    const DensitySample& correction(double eta) {
        auto it = cache_.find(eta);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(eta, density_correction(p_, g_, eta, geo_, spec_.resolvent)).first->second;
    }

    /// First Born tables resolving eta up to eta_hi (rebuilt only when a finer table is needed).
    const BornTail& born(double eta_hi) {
        if (!born_ || born_->eta_hi() < eta_hi)
            born_ = std::make_unique<BornTail>(p_, geo_.pairs, std::max(eta_hi, spec_.born_eta_hi), spec_.born);
        return *born_;
    }

    /// Largest frequency of D - D0 in eta over the pairs, |x| + |y| + 2 R.
    double max_frequency() const {
        double f = 0.0;
        for (const auto& pr : geo_.pairs) f = std::max(f, pr.x.norm() + pr.y.norm() + 2.0 * g_.radius);
        return f;
    }

private:
    Potential p_;
    SupportGrid g_;
    SpectralSpec spec_;
    PairGeometry geo_;
    std::map<double, DensitySample> cache_;
    std::unique_ptr<BornTail> born_;
};

enum class KernelKind { heat_pc, poisson_pc, wave_T, br_pc, point_spectrum, total };

inline const char* to_string(KernelKind k) {
    switch (k) {
        case KernelKind::heat_pc: return "heat_pc";
        case KernelKind::poisson_pc: return "poisson_pc";
        case KernelKind::wave_T: return "wave_T";
        case KernelKind::br_pc: return "br_pc";
        case KernelKind::point_spectrum: return "point_spectrum";
        case KernelKind::total: return "total";
    }
    return "?";
}

struct KernelSample {
    EvalPair pair;
    double value = 0.0;
    double im_residual = 0.0;
};

struct KernelSlice {
    KernelKind kind = KernelKind::total;
    std::vector<std::pair<std::string, double>> param;
    std::vector<KernelSample> samples;
    // quadrature metadata
    StoneMode mode = StoneMode::free_subtracted;
    int nodes = 0;
    int skipped = 0;
    double eta_max = 0.0;  // infinity when the Born tail is summed analytically
    double eta_born = 0.0;
    bool tapered = false;
    bool reliable = true;

    std::string param_string() const {
        std::ostringstream os;
        os << std::setprecision(12);
        for (size_t k = 0; k < param.size(); ++k) os << (k ? ";" : "") << param[k].first << '=' << param[k].second;
        return os.str();
    }
    std::vector<double> values() const {
        std::vector<double> v;
        for (const auto& s : samples) v.push_back(s.value);
        return v;
    }

    void write_csv(std::ostream& os, bool header = true) const {
        if (header) os << "sep,|x|,|y|,value,im_residual,kind,param\n";
        os << std::setprecision(17);
        const std::string ps = param_string();
        for (const auto& s : samples)
            os << s.pair.sep() << ',' << s.pair.x.norm() << ',' << s.pair.y.norm() << ',' << s.value << ','
               << s.im_residual << ',' << to_string(kind) << ',' << ps << '\n';
    }
};

namespace detail {

struct StoneSum {
    std::vector<double> re, im;
    int nodes = 0, skipped = 0;
};

/// sum_i w_i omega(eta_i) (D - D0)(eta_i) per pair. Near-singular nodes are dropped and the
/// remaining weights of their panel rescaled to the panel length.
inline StoneSum correction_sum(SpectralSampler& S, SpectralQuadrature& q, const std::function<double(double)>& omega) {
    StoneSum out;
    const int np = S.size();
    out.re.assign(static_cast<size_t>(np), 0.0);
    out.im.assign(static_cast<size_t>(np), 0.0);
    out.nodes = q.size();
    if (S.potential().is_zero()) return out;
    q.skipped_nodes.clear();
    int i = 0;
    while (i < q.size()) {
        int j = i;
        while (j < q.size() && q.panel[static_cast<size_t>(j)] == q.panel[static_cast<size_t>(i)]) ++j;
        double wall = 0.0, wkeep = 0.0;
        std::vector<double> re(static_cast<size_t>(np), 0.0), im(static_cast<size_t>(np), 0.0);
        for (int k = i; k < j; ++k) {
            const double eta = q.eta_nodes[static_cast<size_t>(k)], w = q.weights[static_cast<size_t>(k)];
            wall += w;
            const DensitySample& d = S.correction(eta);
            if (d.skipped) {
                q.skipped_nodes.push_back(eta);
                ++out.skipped;
                continue;
            }
            wkeep += w;
            const double f = w * omega(eta);
            for (int a = 0; a < np; ++a) {
                re[static_cast<size_t>(a)] += f * d.re[static_cast<size_t>(a)];
                im[static_cast<size_t>(a)] += f * d.im[static_cast<size_t>(a)];
            }
        }
        const double scale = wkeep > 0.0 ? wall / wkeep : 0.0;
        for (int a = 0; a < np; ++a) {
            out.re[static_cast<size_t>(a)] += scale * re[static_cast<size_t>(a)];
            out.im[static_cast<size_t>(a)] += scale * im[static_cast<size_t>(a)];
        }
        i = j;
    }
    return out;
}

/// int_a^b omega(eta) D0(eta, s) d eta on a grid resolving sin(eta s).
inline double free_sum(const std::function<double(double)>& omega, double a, double b, double s, double panel, int order) {
    const double len = s > 0.0 ? std::min(panel, pi / s) : panel;
    const auto q = make_spectral_quadrature(a, b, len, std::max(order, 10));
    double acc = 0.0;
    for (int i = 0; i < q.size(); ++i)
        acc += q.weights[static_cast<size_t>(i)] * omega(q.eta_nodes[static_cast<size_t>(i)]) *
               free_density(q.eta_nodes[static_cast<size_t>(i)], s);
    return acc;
}

/// Smallest eta >= eta0 with |omega| below tol on a unit step scan, for decaying weights.
inline double truncation(const std::function<double(double)>& omega, double eta0, double tol, double cap) {
    double eta = std::max(eta0, 1.0);
    while (std::abs(omega(eta)) >= tol) {
        eta += 1.0;
        if (eta > cap) throw TruncationTooTight("multiplier weight still above " + std::to_string(tol) + " at eta = " + std::to_string(cap));
    }
    return eta;
}

/// Born tail int_a^b omega D1 by tabulating D1.
inline std::vector<double> born_tabulated(SpectralSampler& S, const std::function<double(double)>& omega, double a,
                                          double b) {
    std::vector<double> out(static_cast<size_t>(S.size()), 0.0);
    if (S.potential().is_zero() || !(b > a)) return out;
    const BornTail& bt = S.born(b);
    const auto q = make_spectral_quadrature(a, b, S.spec().panel, std::max(S.spec().order, 10));
    for (int i = 0; i < q.size(); ++i) {
        const double eta = q.eta_nodes[static_cast<size_t>(i)];
        const double f = q.weights[static_cast<size_t>(i)] * omega(eta);
        const auto d = bt.density(eta);
        for (int k = 0; k < S.size(); ++k) out[static_cast<size_t>(k)] += f * d[static_cast<size_t>(k)];
    }
    return out;
}

inline KernelSlice make_slice(KernelKind kind, const SpectralSampler& S, const StoneSum& c,
                              const std::vector<double>& value) {
    KernelSlice sl;
    sl.kind = kind;
    sl.mode = S.spec().mode;
    sl.nodes = c.nodes;
    sl.skipped = c.skipped;
    sl.eta_born = S.spec().eta_born;
    sl.reliable = c.nodes == 0 || c.skipped <= S.spec().skip_limit * c.nodes;
    for (int k = 0; k < S.size(); ++k)
        sl.samples.push_back({S.pairs()[static_cast<size_t>(k)], value[static_cast<size_t>(k)], c.im[static_cast<size_t>(k)]});
    return sl;
}

inline void check_time(double t) {
    if (!(t > 0.0)) throw NonPositiveTime("kernel needs t > 0");
}

}  // namespace detail

/// e^{-tH} P_c (x, y).
inline KernelSlice heat_pc(SpectralSampler& S, double t) {
    detail::check_time(t);
    const SpectralSpec& sp = S.spec();
    auto omega = [t](double eta) { return 2.0 * eta * std::exp(-t * eta * eta); };
    SpectralQuadrature q = make_spectral_quadrature(sp);
    const detail::StoneSum c = detail::correction_sum(S, q, omega);
    std::vector<double> v = c.re;
    double eta_max = std::numeric_limits<double>::infinity();
    if (!S.potential().is_zero()) {
        const double hi = detail::truncation(omega, sp.eta_born, sp.weight_tail_tol, sp.eta_cap);
        const auto tail = detail::born_tabulated(S, omega, sp.eta_born, hi);
        for (int k = 0; k < S.size(); ++k) v[static_cast<size_t>(k)] += tail[static_cast<size_t>(k)];
    }
    if (sp.mode == StoneMode::raw) eta_max = detail::truncation(omega, 1.0, sp.weight_tail_tol, sp.eta_cap);
    for (int k = 0; k < S.size(); ++k) {
        const double s = S.pairs()[static_cast<size_t>(k)].sep();
        v[static_cast<size_t>(k)] +=
            sp.mode == StoneMode::raw ? detail::free_sum(omega, 0.0, eta_max, s, sp.panel, sp.order) : heat0_r(t, s);
    }
    KernelSlice sl = detail::make_slice(KernelKind::heat_pc, S, c, v);
    sl.param = {{"t", t}};
    sl.eta_max = eta_max;
    return sl;
}

/// e^{-t sqrt(H)} P_c (x, y).
inline KernelSlice poisson_pc(SpectralSampler& S, double t) {
    detail::check_time(t);
    const SpectralSpec& sp = S.spec();
    auto omega = [t](double eta) { return 2.0 * eta * std::exp(-t * eta); };
    SpectralQuadrature q = make_spectral_quadrature(sp);
    const detail::StoneSum c = detail::correction_sum(S, q, omega);
    std::vector<double> v = c.re;
    double eta_max = std::numeric_limits<double>::infinity();
    if (!S.potential().is_zero()) {
        // int_a^inf 2 eta e^{-t eta} sin(eta L) d eta = 2 Im[e^{-c a} (a / c + 1 / c^2)], c = t - i L
        const double a = sp.eta_born;
        const BornTail& bt = S.born(sp.born_eta_hi);
        const auto tail = bt.apply([t, a](double L) {
            const cplx cc(t, -L);
            return 2.0 * (std::exp(-cc * a) * (a / cc + 1.0 / (cc * cc))).imag();
        });
        for (int k = 0; k < S.size(); ++k) v[static_cast<size_t>(k)] += tail[static_cast<size_t>(k)];
    }
    if (sp.mode == StoneMode::raw) eta_max = detail::truncation(omega, 1.0, sp.weight_tail_tol, sp.eta_cap);
    for (int k = 0; k < S.size(); ++k) {
        const double s = S.pairs()[static_cast<size_t>(k)].sep();
        v[static_cast<size_t>(k)] +=
            sp.mode == StoneMode::raw ? detail::free_sum(omega, 0.0, eta_max, s, sp.panel, sp.order) : poisson0_r(t, s);
    }
    KernelSlice sl = detail::make_slice(KernelKind::poisson_pc, S, c, v);
    sl.param = {{"t", t}};
    sl.eta_max = eta_max;
    return sl;
}

/**
 * @brief Absolutely continuous part of the forward wave propagator sin(tau sqrt H) P_c / sqrt H.
 *
 * The free delta ridge on |x - y| = tau is not a function and is left out. Above eta_born the first
 * Born term is summed to infinity in closed form; it vanishes outside the cone and contributes
 * -G(tau) / (32 pi^2) inside. Raw mode truncates at eta_max with a cosine taper.
 */
inline KernelSlice wave_T(SpectralSampler& S, double tau) {
    if (!(tau >= 0.0)) throw InvalidArgument("wave_T needs tau >= 0");
    const SpectralSpec& sp = S.spec();
    SpectralQuadrature q = make_spectral_quadrature(sp);
    const double h = sp.panel / sp.order;
    if (tau > 0.0 && 2.0 * pi / tau < sp.nodes_per_period * h)
        throw UnderresolvedOscillation("sin(tau eta) has fewer than " + std::to_string(sp.nodes_per_period) +
                                       " nodes per period at tau = " + std::to_string(tau));
    auto omega = [tau](double eta) { return 2.0 * std::sin(tau * eta); };
    const detail::StoneSum c = detail::correction_sum(S, q, omega);
    std::vector<double> v = c.re;
    if (!S.potential().is_zero() && tau > 0.0) {
        const double a = sp.eta_born;
        const BornTail& bt = S.born(sp.born_eta_hi);
        // minus the [0, a] part of int_0^inf 2 sin(tau eta) sin(L eta) d eta
        const auto tail = bt.apply([tau, a](double L) {
            const double dm = L - tau, dp = L + tau;
            const double fm = std::abs(dm) < 1e-12 ? a : std::sin(dm * a) / dm;
            return -(fm - std::sin(dp * a) / dp);
        });
        for (int k = 0; k < S.size(); ++k) {
            v[static_cast<size_t>(k)] += tail[static_cast<size_t>(k)];
            if (tau > S.pairs()[static_cast<size_t>(k)].sep()) v[static_cast<size_t>(k)] -= bt.shell(k, tau) / (32.0 * pi * pi);
        }
    }
    KernelSlice sl;
    if (sp.mode == StoneMode::raw) {
        const double em = sp.eta_max, e0 = (1.0 - sp.taper) * em;
        auto tapered = [&](double eta) {
            const double tp = eta <= e0 ? 1.0 : 0.5 * (1.0 + std::cos(pi * (eta - e0) / (em - e0)));
            return omega(eta) * tp;
        };
        for (int k = 0; k < S.size(); ++k) {
            const double s = S.pairs()[static_cast<size_t>(k)].sep();
            v[static_cast<size_t>(k)] += detail::free_sum(tapered, 0.0, em, s, sp.panel, sp.order);
        }
        sl = detail::make_slice(KernelKind::wave_T, S, c, v);
        sl.eta_max = em;
        sl.tapered = true;
    } else {
        sl = detail::make_slice(KernelKind::wave_T, S, c, v);
        sl.eta_max = std::numeric_limits<double>::infinity();
    }
    sl.param = {{"tau", tau}};
    return sl;
}

/// (1 - H / lambda0)_+^alpha P_c on eta = sqrt(lambda0) sin(theta), which removes the endpoint singularity.
inline KernelSlice bochner_riesz_pc(SpectralSampler& S, double alpha, double lambda0) {
    if (!(alpha > -1.0)) throw InvalidArgument("Bochner-Riesz needs alpha > -1");
    if (!(lambda0 > 0.0)) throw InvalidArgument("Bochner-Riesz needs lambda0 > 0");
    const SpectralSpec& sp = S.spec();
    const double k0 = std::sqrt(lambda0);
    double fmax = S.max_frequency();
    for (const auto& pr : S.pairs()) fmax = std::max(fmax, pr.sep());
    const int per = std::max(4, static_cast<int>(std::ceil(1.5 * k0 * fmax / (2.0 * pi))));
    const int panels = std::max(per, static_cast<int>(std::ceil(k0 / sp.panel)));
    const SpectralQuadrature th = make_spectral_quadrature(0.0, 0.5 * pi, 0.5 * pi / panels, sp.order);
    // eta nodes with the Jacobian folded into the weights; the multiplier becomes cos(theta)^{2 alpha}
    SpectralQuadrature q;
    for (int i = 0; i < th.size(); ++i) {
        const double t = th.eta_nodes[static_cast<size_t>(i)];
        q.eta_nodes.push_back(k0 * std::sin(t));
        q.weights.push_back(th.weights[static_cast<size_t>(i)] * k0 * std::cos(t));
        q.panel.push_back(th.panel[static_cast<size_t>(i)]);
    }
    q.eta_max = k0;
    auto omega = [alpha, lambda0](double eta) {
        const double m = std::max(0.0, 1.0 - eta * eta / lambda0);
        return 2.0 * eta * (alpha == 0.0 ? 1.0 : std::pow(m, alpha));
    };
    const detail::StoneSum c = detail::correction_sum(S, q, omega);
    std::vector<double> v = c.re;
    for (int k = 0; k < S.size(); ++k) {
        const double s = S.pairs()[static_cast<size_t>(k)].sep();
        if (sp.mode == StoneMode::raw) {
            double acc = 0.0;
            for (int i = 0; i < q.size(); ++i)
                acc += q.weights[static_cast<size_t>(i)] * omega(q.eta_nodes[static_cast<size_t>(i)]) *
                       free_density(q.eta_nodes[static_cast<size_t>(i)], s);
            v[static_cast<size_t>(k)] += acc;
        } else {
            v[static_cast<size_t>(k)] += br0_r(alpha, lambda0, s);
        }
    }
    KernelSlice sl = detail::make_slice(KernelKind::br_pc, S, c, v);
    sl.param = {{"alpha", alpha}, {"lambda0", lambda0}};
    sl.eta_max = k0;
    return sl;
}

inline KernelSlice heat_pc(const Potential& p, const SupportGrid& g, const SpectralSpec& sp, double t,
                           const std::vector<EvalPair>& pairs) {
    SpectralSampler S(p, g, pairs, sp);
    return heat_pc(S, t);
}
inline KernelSlice poisson_pc(const Potential& p, const SupportGrid& g, const SpectralSpec& sp, double t,
                              const std::vector<EvalPair>& pairs) {
    SpectralSampler S(p, g, pairs, sp);
    return poisson_pc(S, t);
}
inline KernelSlice wave_T(const Potential& p, const SupportGrid& g, const SpectralSpec& sp, double tau,
                          const std::vector<EvalPair>& pairs) {
    SpectralSampler S(p, g, pairs, sp);
    return wave_T(S, tau);
}
inline KernelSlice bochner_riesz_pc(const Potential& p, const SupportGrid& g, const SpectralSpec& sp, double alpha,
                                    double lambda0, const std::vector<EvalPair>& pairs) {
    SpectralSampler S(p, g, pairs, sp);
    return bochner_riesz_pc(S, alpha, lambda0);
}

/**
 * @brief Bound states together with the potential and grid needed to extend them off the grid.
 */
class BoundSpectrum {
public:
    BoundSpectrum(const Potential& p, const SupportGrid& g, std::vector<BoundState> states)
        : p_(p), g_(g), states_(std::move(states)) {}

    int size() const { return static_cast<int>(states_.size()); }
    bool empty() const { return states_.empty(); }
    const BoundState& operator[](int k) const { return states_[static_cast<size_t>(k)]; }
    const std::vector<BoundState>& states() const { return states_; }
    const Potential& potential() const { return p_; }
    const SupportGrid& grid() const { return g_; }

    cplx psi(int k, const Vec3& x) const { return extend_eigenfunction(states_[static_cast<size_t>(k)], p_, g_, x); }

    /// Re psi_k(x) conj(psi_k(y)) for every state.
    std::vector<double> products(const Vec3& x, const Vec3& y) const {
        std::vector<double> out;
        for (int k = 0; k < size(); ++k) out.push_back((psi(k, x) * std::conj(psi(k, y))).real());
        return out;
    }

private:
    Potential p_;
    SupportGrid g_;
    std::vector<BoundState> states_;
};

/// sum_k weight(lambda_k) psi_k(x) conj(psi_k(y)).
inline double point_spectrum_kernel(const BoundSpectrum& B, const std::function<double(double)>& weight, const Vec3& x,
                                    const Vec3& y) {
    const auto pr = B.products(x, y);
    double s = 0.0;
    for (int k = 0; k < B.size(); ++k) {
        const double w = weight(B[k].lambda_k);
        if (!std::isfinite(w)) throw InvalidArgument("point-spectrum weight is not finite");
        s += w * pr[static_cast<size_t>(k)];
    }
    return s;
}

/// T(tau)(x, y) outside the light cone: -sum_k sinh(tau kappa_k) / kappa_k psi_k(x) conj(psi_k(y)).
inline double outside_cone_formula(const BoundSpectrum& B, double tau, const Vec3& x, const Vec3& y) {
    if (!((x - y).norm() > tau)) throw InsideCone("outside_cone_formula needs |x - y| > tau");
    const auto pr = B.products(x, y);
    double s = 0.0;
    for (int k = 0; k < B.size(); ++k) s -= std::sinh(tau * B[k].kappa) / B[k].kappa * pr[static_cast<size_t>(k)];
    return s;
}

/// tau-densities w(tau) with m(H) P_c = int_0^inf w(tau) T(tau) d tau.
inline std::function<double(double)> poisson_tau_density(double t) {
    return [t](double tau) {
        const double d = t * t + tau * tau;
        return 4.0 / pi * t * tau / (d * d);
    };
}
inline std::function<double(double)> heat_tau_density(double t) {
    return [t](double tau) { return tau * std::exp(-tau * tau / (4.0 * t)) / (2.0 * std::sqrt(pi) * std::pow(t, 1.5)); };
}

struct K2Split {
    double K2 = 0.0;
    double K20_bound = 0.0;
};

/**
 * @brief Outside-the-cone part of a tau-integral representation.
 *
 * K2 = -sum_k [int_0^{delta |x-y|} w(tau) sinh(tau kappa_k) / kappa_k d tau] psi_k(x) conj(psi_k(y)),
 * K20 = sum_k e^{-(1 - delta) kappa_k (|x| + |y|)}. scale hints where w peaks (t for Poisson,
 * sqrt(t) for heat); the tau-range is split geometrically from there.
 */
inline K2Split k2_split(const BoundSpectrum& B, const std::function<double(double)>& w, double delta, const Vec3& x,
                        const Vec3& y, double scale = 0.0) {
    const double s = (x - y).norm();
    if (!(s > 0.0)) throw CoincidentPoints("k2_split needs |x - y| > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("k2_split needs delta in (0, 1)");
    K2Split out;
    if (B.empty()) return out;
    const double top = delta * s;
    std::vector<double> br{0.0};
    if (scale > 0.0)
        for (double b = scale / 8.0; b < top; b *= 2.0) br.push_back(b);
    br.push_back(top);
    const auto pr = B.products(x, y);
    for (int k = 0; k < B.size(); ++k) {
        const double kap = B[k].kappa;
        auto f = [&](double tau) { return w(tau) * std::sinh(tau * kap) / kap; };
        double I = 0.0;
        for (size_t i = 0; i + 1 < br.size(); ++i) I += quad::adaptive(f, br[i], br[i + 1], 1e-14, 1e-11);
        out.K2 -= I * pr[static_cast<size_t>(k)];
        out.K20_bound += std::exp(-(1.0 - delta) * kap * (x.norm() + y.norm()));
    }
    return out;
}

}  // namespace kato
