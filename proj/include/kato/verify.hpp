#pragma once

// Acceptance suite shared by `katoctl verify` and the acceptance test binary.
// Output is a pure function of the settings: no timings, no addresses, fixed number formatting.

#include "kato/io.hpp"
#include "kato/oracle/radial_fd.hpp"

#include <functional>

namespace kato::verify {

struct Criterion {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string summary;  // one line of key=value pairs
    Json detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<Criterion> criteria;

    bool pass() const {
        return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
    }
    std::string lines() const {
        std::string out;
        for (const auto& c : criteria)
            out += "criterion " + std::to_string(c.id) + " " + c.name + ": " + (c.pass ? "PASS" : "FAIL") + "  " +
                   c.summary + "\n";
        return out;
    }
    Json to_json(const Settings& s) const {
        Json j;
        j["suite"] = suite;
        j["pass"] = pass();
        j["criteria"] = Json::array();
        for (const auto& c : criteria)
            j["criteria"].push_back(Json{{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        j["defaults"] = kato::to_json(s);
        return j;
    }
};

namespace detail {

inline std::string num(double v, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

inline double rel(double a, double ref) { return std::abs(a - ref) / std::abs(ref); }

struct Fixture {
    std::string name;
    Potential p;
};

// Pairs of the domination suite: symmetric about the origin along e_x, and off-center along (0, .6, .8).
inline std::vector<EvalPair> domination_pairs() {
    std::vector<EvalPair> out;
    for (double s : logspace(0.25, 6.0, 6)) {
        out.push_back({Vec3(-0.5 * s, 0, 0), Vec3(0.5 * s, 0, 0)});
        out.push_back({Vec3(0.5, 0.5, 0), Vec3(0.5, 0.5, 0) + s * Vec3(0, 0.6, 0.8)});
    }
    return out;
}

inline Criterion report_from(int id, std::string name, const std::vector<DominationReport>& reps) {
    Criterion c{id, std::move(name), true, "", Json::array()};
    for (const auto& r : reps) {
        c.pass = c.pass && r.pass;
        c.summary += (c.summary.empty() ? "" : " ") + r.theorem_id + ":C=" + num(r.fitted_constant, 4) +
                     ",drift=" + num(r.refinement_drift, 3);
        Json j = kato::to_json(r);
        j.erase("ratio_grid");
        c.detail.push_back(j);
    }
    return c;
}

}  // namespace detail

/// V = 0 in raw mode against the closed-form free kernels.
inline Criterion free_identity(const Settings& s) {
    using detail::num;
    Criterion c{1, "free_identity", true, "", Json::array()};
    const Potential p = Potential::zero();
    const SupportGrid g = build_support_grid(p, s.grid);
    SpectralSpec raw = s.spectral;
    raw.mode = StoneMode::raw;
    double eh = 0.0, eb = 0.0;
    auto add = [&](const char* kind, double param, const KernelSample& k, double ref, double& worst) {
        const double e = detail::rel(k.value, ref);
        worst = std::max(worst, e);
        c.detail.push_back(Json{{"kind", kind}, {"param", param}, {"sep", k.pair.sep()}, {"rel_err", e}});
    };
    std::vector<EvalPair> hp;
    for (double d : {0.5, 2.0}) hp.push_back({Vec3(-0.5 * d, 0, 0), Vec3(0.5 * d, 0, 0)});
    SpectralSampler S(p, g, hp, raw);
    for (double t : {0.25, 1.0})
        for (const auto& k : heat_pc(S, t).samples) add("heat", t, k, heat0(t, k.pair.x, k.pair.y), eh);
    for (double t : {0.5, 1.0})
        for (const auto& k : poisson_pc(S, t).samples) add("poisson", t, k, poisson0(t, k.pair.x, k.pair.y), eh);
    std::vector<EvalPair> bp{{Vec3(-0.65, 0, 0), Vec3(0.65, 0, 0)}, {Vec3(-1, 0.5, 0), Vec3(2.3, 0.5, 0)}};
    SpectralSampler Sb(p, g, bp, raw);
    for (double a : {0.0, 0.5})
        for (const auto& k : bochner_riesz_pc(Sb, a, 4.0).samples)
            add("br", a, k, br0_kernel(a, 4.0, k.pair.x, k.pair.y), eb);
    c.pass = eh <= 1e-3 && eb <= 1e-2 && c.detail.size() == 12;
    c.summary = "samples=" + std::to_string(c.detail.size()) + " heat_poisson_max=" + num(eh, 3) +
                " br_max=" + num(eb, 3);
    return c;
}

/// Bound-state counts and energies against the finite-difference radial oracle.
inline Criterion bound_state_oracle(const Settings& s) {
    using detail::num;
    Criterion c{2, "bound_state_oracle", true, "", Json::array()};
    const std::vector<detail::Fixture> fx{{"square_well_1", Potential::square_well(-1.0)},
                                          {"square_well_4", Potential::square_well(-4.0)},
                                          {"square_well_10", Potential::square_well(-10.0)},
                                          {"gaussian_-1", Potential::gaussian(-1.0)},
                                          {"gaussian_-8", Potential::gaussian(-8.0)}};
    double worst = 0.0;
    for (const auto& f : fx) {
        const SupportGrid g = build_support_grid(f.p, s.grid);
        const int bs_count = count_negative_bound_states(f.p, g, s.bs).count;
        const auto states = bound_states(f.p, g, default_kappa_max(f.p), s.bound);
        oracle::FdOptions fo;
        fo.r_max = f.p.radial_breakpoints().empty() ? 40.0 : 50.0;
        const Potential p = f.p;
        const oracle::RadialFd fd([p](double r) { return p.radial(r); }, p.radial_breakpoints(), fo);
        std::vector<double> ref, got;
        for (const auto& lv : fd.all_levels())
            for (int m = 0; m < lv.multiplicity; ++m) ref.push_back(lv.energy);
        for (const auto& b : states) got.push_back(b.lambda_k);
        std::sort(ref.begin(), ref.end());
        std::sort(got.begin(), got.end());
        double e = 0.0;
        const bool counts = bs_count == static_cast<int>(ref.size()) && got.size() == ref.size();
        if (counts)
            for (size_t k = 0; k < ref.size(); ++k) e = std::max(e, detail::rel(got[k], ref[k]));
        worst = std::max(worst, e);
        c.pass = c.pass && counts && e <= 1e-3;
        Json lev = Json::array();
        for (const auto& lv : fd.all_levels())
            lev.push_back(Json{{"l", lv.l}, {"energy", lv.energy}, {"multiplicity", lv.multiplicity}});
        c.detail.push_back(Json{{"fixture", f.name},
                                {"bs_count", bs_count},
                                {"states", got.size()},
                                {"oracle_count", ref.size()},
                                {"oracle_levels", lev},
                                {"max_rel_err", e}});
        c.summary += (c.summary.empty() ? "" : " ") + f.name + ":" + std::to_string(bs_count) + "/" +
                     std::to_string(ref.size());
    }
    c.summary += " max_rel=" + num(worst, 3);
    return c;
}

/// Wave kernel of the square well outside the cone against the bound-state formula; Gaussian cone check.
inline Criterion flagship(const Settings& s, bool with_gaussian) {
    using detail::num;
    Criterion c{3, "flagship_wave", true, "", Json::array()};
    const Potential p = Potential::square_well(-4.0);
    const SupportGrid g = build_support_grid(p, s.grid);
    const BoundSpectrum B(p, g, bound_states(p, g, default_kappa_max(p), s.bound));
    struct Pt {
        double tau, rho, deg;
    };
    const std::vector<Pt> pts{{0.5, 1.5, 180}, {1.0, 1.5, 180}, {1.5, 1.5, 180},
                              {0.5, 1.2, 90},  {1.0, 2.0, 120}, {2.0, 2.0, 180}};
    std::vector<EvalPair> prs;
    for (const auto& q : pts) {
        const double a = q.deg * pi / 180.0;
        prs.push_back({Vec3(q.rho, 0, 0), Vec3(q.rho * std::cos(a), q.rho * std::sin(a), 0)});
    }
    SpectralSampler S(p, g, prs, s.spectral);
    double worst = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const double w = wave_T(S, pts[i].tau).samples[i].value;
        const double f = outside_cone_formula(B, pts[i].tau, prs[i].x, prs[i].y);
        const double e = detail::rel(w, f);
        worst = std::max(worst, e);
        c.detail.push_back(
            Json{{"tau", pts[i].tau}, {"sep", prs[i].sep()}, {"wave_T", w}, {"formula", f}, {"rel_err", e}});
    }
    c.pass = worst <= 0.10;
    c.summary = "square_well_4 max_rel=" + num(worst, 3);
    if (!with_gaussian) return c;

    const Potential q = Potential::gaussian(-1.0);
    const SupportGrid gq = build_support_grid(q, s.grid);
    const std::vector<EvalPair> gp{{Vec3(-0.5, 0, 0), Vec3(0.5, 0, 0)},
                                   {Vec3(-1, 0, 0), Vec3(1, 0, 0)},
                                   {Vec3(0, 0, 0), Vec3(1.5, 1, 0)},
                                   {Vec3(-1, 0.5, 0), Vec3(1.5, 0, 0)}};
    SpectralSampler Sg(q, gq, gp, s.spectral);
    std::vector<double> peak(gp.size(), 0.0), out(gp.size(), 0.0);
    for (int k = 1; k <= 80; ++k) {
        const double tau = 0.05 * k;
        const KernelSlice sl = wave_T(Sg, tau);
        for (size_t i = 0; i < gp.size(); ++i) {
            const double v = std::abs(sl.samples[i].value), d = gp[i].sep();
            if (tau > d) peak[i] = std::max(peak[i], v);
            if (tau < d) out[i] = std::max(out[i], v);
        }
    }
    double ratio = 0.0;
    for (size_t i = 0; i < gp.size(); ++i) {
        const double r = out[i] / peak[i];
        ratio = std::max(ratio, r);
        c.detail.push_back(Json{{"fixture", "gaussian_-1"}, {"sep", gp[i].sep()}, {"inside_peak", peak[i]},
                                {"outside_max", out[i]}, {"ratio", r}});
    }
    c.pass = c.pass && ratio <= 0.05;
    c.summary += " gaussian_-1 outside/peak=" + num(ratio, 3);
    return c;
}

/// Domination checks on the Gaussian without bound states and on the square well.
inline Criterion domination(const Settings& s) {
    const auto pairs = detail::domination_pairs();
    std::vector<DominationReport> reps;
    {
        const Potential p = Potential::gaussian(-1.0);
        Refinement R(p, build_support_grid(p, s.grid), s.spectral, pairs, s.harness);
        const std::vector<double> ts{0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
        reps.push_back(check_poisson_domination(R, ts, PoissonBound::bound1));
        reps.push_back(check_heat_domination(R, ts, HeatBound::gauss1));
    }
    const Potential p = Potential::square_well(-4.0);
    const SupportGrid g = build_support_grid(p, s.grid);
    {
        Refinement R(p, g, s.spectral, pairs, s.harness);
        reps.push_back(check_poisson_domination(R, {0.1, 0.25, 0.5, 1.0}, PoissonBound::bound3));
        reps.push_back(check_poisson_domination(R, {1.0, 2.0, 4.0, 8.0}, PoissonBound::bound4));
    }
    const auto states = bound_states(p, g, default_kappa_max(p), s.bound);
    double kappa1 = states.empty() ? 1.0 : states.front().kappa;
    for (const auto& b : states) kappa1 = std::min(kappa1, b.kappa);
    reps.push_back(check_k2_decay(p, g, K2Mode::heat, 0.25 * kappa1, {1.0, 2.0, 4.0, 7.0, 10.0}, pairs, s.harness));
    reps.push_back(check_k2_decay(p, g, K2Mode::poisson, 0.1, {0.1, 0.3, 1.0, 3.0, 10.0}, pairs, s.harness));
    return detail::report_from(4, "domination", reps);
}

/// Outside-cone part of the Poisson kernel at small t tends to minus the bound-state projector.
inline Criterion k2_small_t(const Settings& s) {
    using detail::num;
    Criterion c{5, "k2_small_t", true, "", Json::array()};
    const Potential p = Potential::square_well(-4.0);
    const SupportGrid g = build_support_grid(p, s.grid);
    const BoundSpectrum B(p, g, bound_states(p, g, default_kappa_max(p), s.bound));
    const double t = 1e-3;
    const std::vector<EvalPair> prs{{Vec3(-0.5, 0, 0), Vec3(0.5, 0, 0)},
                                    {Vec3(0.2, 0.1, 0), Vec3(-0.6, 0.4, 0.3)},
                                    {Vec3(1.5, 0, 0), Vec3(-1.5, 0, 0)},
                                    {Vec3(0, 0, 0.3), Vec3(2.0, 1.0, 0)}};
    double worst = 0.0;
    for (const auto& pr : prs) {
        const double k2 = k2_split(B, poisson_tau_density(t), s.harness.delta, pr.x, pr.y, t).K2;
        const double ref = -point_spectrum_kernel(B, [](double) { return 1.0; }, pr.x, pr.y);
        const double e = detail::rel(k2, ref);
        worst = std::max(worst, e);
        c.detail.push_back(Json{{"sep", pr.sep()}, {"K2", k2}, {"minus_P_p", ref}, {"rel_err", e}});
    }
    c.pass = !B.empty() && worst <= 0.02;
    c.summary = "t=0.001 max_rel=" + num(worst, 3);
    return c;
}

/// Homotopy crossings, regularity at zero and the embedded scan on the fixture set.
inline Criterion birman_schwinger_structure(const Settings& s) {
    using detail::num;
    Criterion c{6, "birman_schwinger_structure", true, "", Json::array()};
    const std::vector<detail::Fixture> fx{{"square_well_1", Potential::square_well(-1.0)},
                                          {"square_well_4", Potential::square_well(-4.0)},
                                          {"square_well_10", Potential::square_well(-10.0)},
                                          {"tuned_well", Potential::square_well(-1.005 * pi * pi / 4.0)},
                                          {"gaussian_-1", Potential::gaussian(-1.0)},
                                          {"gaussian_-8", Potential::gaussian(-8.0)}};
    double scan_min = 1.0;
    for (const auto& f : fx) {
        const SupportGrid g = build_support_grid(f.p, s.grid);
        const auto h = homotopy_scan(f.p, g, 20, s.bs);
        const auto n = bound_states(f.p, g, default_kappa_max(f.p), s.bound).size();
        const Regularity r = regular_at_zero(f.p, g, s.bs);
        const double m = scan_minimum(embedded_scan(f.p, g, 25.0, 50, s.bs));
        const bool expect_regular = f.name != "tuned_well";
        const bool ok = h.crossings.size() == n && r.regular == expect_regular && m > 1e-2;
        c.pass = c.pass && ok;
        scan_min = std::min(scan_min, m);
        c.detail.push_back(Json{{"fixture", f.name},
                                {"crossings", h.crossings.size()},
                                {"bound_states", n},
                                {"sigma_min_zero", r.sigma_min},
                                {"regular", r.regular},
                                {"embedded_min", m}});
        c.summary += (c.summary.empty() ? "" : " ") + f.name + ":" + std::to_string(h.crossings.size()) + "/" +
                     std::to_string(n) + (r.regular ? ",reg" : ",nonreg");
    }
    c.summary += " scan_min=" + num(scan_min, 3);
    return c;
}

/// Bochner-Riesz decay exponents and L2 bounds.
inline Criterion bochner_riesz(const Settings& s) {
    std::vector<DominationReport> reps;
    const Potential p0 = Potential::zero();
    const SupportGrid g0 = build_support_grid(p0, s.grid);
    SpectralSpec raw = s.spectral;
    raw.mode = StoneMode::raw;
    const Potential sw = Potential::square_well(-4.0);
    const SupportGrid gs = build_support_grid(sw, s.grid);
    for (double a : {0.0, 0.5}) {
        reps.push_back(br_decay_slope(p0, g0, raw, a, 4.0, s.harness));
        reps.push_back(br_decay_slope(sw, gs, s.spectral, a, 4.0, s.harness));
    }
    for (double a : {0.0, 0.5, 1.0}) {
        reps.push_back(l2_br_norm(p0, g0, s.spectral, a, 36.0, s.harness));
        reps.push_back(l2_br_norm(sw, gs, s.spectral, a, 36.0, s.harness));
    }
    Criterion c = detail::report_from(7, "bochner_riesz", reps);
    c.summary.clear();
    for (size_t k = 0; k < reps.size(); ++k) {
        const auto& r = reps[k];
        const char* who = k % 2 == 0 ? "free" : "well";
        if (r.theorem_id == "l2_br")
            c.summary += std::string(c.summary.empty() ? "" : " ") + "l2[" + who + "]=" + detail::num(r.get("norm"), 4);
        else
            c.summary += std::string(c.summary.empty() ? "" : " ") + "slope[" + who + "]=" +
                         detail::num(r.get("slope"), 4);
    }
    return c;
}

/// Kato norms with closed forms, the Frostman bound and the dilation law.
inline Criterion kato_checks(const Settings& s) {
    using detail::num;
    Criterion c{8, "kato", true, "", Json::array()};
    const std::vector<detail::Fixture> fx{{"gaussian", Potential::gaussian(1.0)},
                                          {"unit_ball", Potential::square_well(1.0)}};
    double worst = 0.0;
    bool frostman = true, scaling = true;
    for (const auto& f : fx) {
        const auto probe = default_probe(f.p);
        const double K = kato_norm(f.p, probe, s.kato);
        const double e = std::abs(K - 2.0 * pi);
        worst = std::max(worst, e);
        Json j{{"fixture", f.name}, {"kato_norm", K}, {"abs_err", e}};
        for (const Vec3& y : {Vec3(0, 0, 0), Vec3(0.7, 0, 0), Vec3(0.3, -0.9, 0.4)})
            for (double R : {0.1, 0.5, 1.0, 3.0}) frostman = frostman && frostman_mass(f.p, y, R, s.kato) <= R * K;
        for (double a : {0.5, 2.0}) {
            const Potential d = f.p.dilated(a);
            const double Kd = kato_norm(d, default_probe(d), s.kato);
            scaling = scaling && detail::rel(Kd, K / (a * a)) <= 1e-3;
            j["kato_norm_dilated_" + num(a, 2)] = Kd;
        }
        c.detail.push_back(j);
    }
    c.pass = worst <= 1e-3 && frostman && scaling;
    c.summary = "max_abs_err=" + num(worst, 3) + " frostman=" + (frostman ? "ok" : "violated") +
                " scaling=" + (scaling ? "ok" : "violated");
    return c;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> n{"small", "full"};
    return n;
}

/**
 * @brief Runs a suite. small: criteria 1, 2, 3 (square well only), 5, 6, 7, 8.
 * full: all of 1-8 including the Gaussian cone check and the domination suite.
 * Determinism (criterion 9) compares two runs and is done by the caller.
 */
inline SuiteResult run_suite(const std::string& suite, const Settings& s,
                             const std::function<void(const Criterion&)>& on_done = {}) {
    if (suite != "small" && suite != "full") throw InvalidArgument("unknown suite '" + suite + "' (small, full)");
    const bool full = suite == "full";
    SuiteResult out{suite, {}};
    auto run = [&](const std::function<Criterion()>& f) {
        out.criteria.push_back(f());
        if (on_done) on_done(out.criteria.back());
    };
    run([&] { return free_identity(s); });
    run([&] { return bound_state_oracle(s); });
    run([&] { return flagship(s, full); });
    if (full) run([&] { return domination(s); });
    run([&] { return k2_small_t(s); });
    run([&] { return birman_schwinger_structure(s); });
    run([&] { return bochner_riesz(s); });
    run([&] { return kato_checks(s); });
    return out;
}

}  // namespace kato::verify
