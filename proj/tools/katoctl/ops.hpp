#pragma once

#include "config.hpp"

#include "kato/verify.hpp"

#include <filesystem>
#include <iostream>

namespace katoctl {

struct Outcome {
    Json result;
    bool gated = false;  // counts toward the exit code
    bool pass = true;
    std::string csv;     // written next to the JSON when nonempty
    std::string line;    // short human summary
};

inline std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

inline std::vector<EvalPair> pairs_or_default(const ExperimentConfig& c) {
    return c.pairs.empty() ? verify::detail::domination_pairs() : c.pairs;
}

inline std::vector<EvalPair> separated(std::vector<EvalPair> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](const EvalPair& p) { return !(p.sep() > 0.0); }), v.end());
    return v;
}

// Groups degenerate states (same channel, same energy) into levels.
struct Level {
    const BoundState* first;
    int multiplicity;
};
inline std::vector<Level> levels(const std::vector<BoundState>& s) {
    std::vector<Level> out;
    for (const auto& b : s) {
        if (!out.empty() && out.back().first->l == b.l && b.l >= 0 &&
            std::abs(out.back().first->lambda_k - b.lambda_k) <= 1e-9 * std::abs(b.lambda_k))
            ++out.back().multiplicity;
        else
            out.push_back({&b, 1});
    }
    return out;
}

inline Outcome op_kato(const ExperimentConfig& c, const YAML::Node& prm) {
    const auto eps = get_list(prm, "eps", {0.1, 0.5, 1.0});
    const auto R = get_list(prm, "R", {1.0, 2.0, 4.0});
    const Potential& p = c.potential;
    Outcome o;
    o.result = to_json(kato_diagnostics(p, eps, R, default_probe(p), c.settings.kato));
    o.line = "kato_norm=" + fmt(o.result["kato_norm"].get<double>());
    return o;
}

inline Outcome op_spectrum(const ExperimentConfig& c, const YAML::Node& prm) {
    const Potential& p = c.potential;
    const SupportGrid g = build_support_grid(p, c.settings.grid);
    const auto states = p.is_zero() ? std::vector<BoundState>{} : bound_states(p, g, default_kappa_max(p), c.settings.bound);
    Outcome o;
    o.result["count"] = states.size();
    o.result["states"] = Json::array();
    std::ostringstream line, csv;
    line << "count=" << states.size();
    const std::vector<double> radii{2.0 * g.radius, 4.0 * g.radius};
    int k = 0;
    for (const auto& lv : levels(states)) {
        const BoundState& b = *lv.first;
        Json j = to_json(b, agmon_ratio(b, p, g, radii));
        j["multiplicity"] = lv.multiplicity;
        o.result["states"].push_back(j);
        line << "\nlambda_" << ++k << '=' << std::setprecision(10) << b.lambda_k << " l=" << b.l
             << " multiplicity=" << lv.multiplicity;
    }
    if (!states.empty()) {
        const double h = get(prm, "step", 0.25);
        const double extent = get(prm, "extent", 2.0 * g.radius);
        std::vector<Vec3> xs;
        for (double x = 0.0; x <= extent + 1e-12; x += h) xs.emplace_back(x, 0.0, 0.0);
        write_bound_state_csv(csv, states.front(), p, g, xs);
    }
    o.csv = csv.str();
    o.line = line.str();
    return o;
}

inline Outcome op_assume(const ExperimentConfig& c, const YAML::Node& prm) {
    const Potential& p = c.potential;
    const SupportGrid g = build_support_grid(p, c.settings.grid);
    const auto& bs = c.settings.bs;
    const CountResult cr = count_negative_bound_states(p, g, bs);
    const Regularity r = regular_at_zero(p, g, bs);
    const auto scan = embedded_scan(p, g, get(prm, "lambda_max", 25.0), get(prm, "scan_points", 50), bs);
    const auto h = homotopy_scan(p, g, get(prm, "homotopy_points", 20), bs);
    Outcome o;
    o.result = bs_report(cr, r, scan, h);
    o.line = "sigma_min=" + fmt(r.sigma_min) + "\nregular=" + (r.regular ? "true" : "false") +
             "\ncount=" + std::to_string(cr.count) + "\nembedded_min=" + fmt(scan_minimum(scan));
    if (prm && prm["expect_regular"]) {
        o.gated = true;
        o.pass = r.regular == prm["expect_regular"].as<bool>();
    }
    return o;
}

/// heat | poisson | wave | br slices on the configured pairs.
inline Outcome op_kernel(const ExperimentConfig& c, const std::string& kind, const YAML::Node& prm) {
    const Potential& p = c.potential;
    const SupportGrid g = build_support_grid(p, c.settings.grid);
    if (c.pairs.empty()) throw InvalidArgument(kind + " needs pairs or an eval block");
    SpectralSampler S(p, g, c.pairs, c.settings.spectral);
    std::vector<KernelSlice> slices;
    if (kind == "heat")
        for (double t : get_list(prm, "t", {1.0})) slices.push_back(heat_pc(S, t));
    else if (kind == "poisson")
        for (double t : get_list(prm, "t", {1.0})) slices.push_back(poisson_pc(S, t));
    else if (kind == "wave")
        for (double tau : get_list(prm, "tau", {1.0})) slices.push_back(wave_T(S, tau));
    else
        for (double a : get_list(prm, "alpha", {0.0})) slices.push_back(bochner_riesz_pc(S, a, get(prm, "lambda0", 4.0)));
    Outcome o;
    std::ostringstream csv;
    o.result["slices"] = Json::array();
    bool reliable = true;
    for (size_t k = 0; k < slices.size(); ++k) {
        slices[k].write_csv(csv, k == 0);
        o.result["slices"].push_back(to_json(slices[k]));
        reliable = reliable && slices[k].reliable;
    }
    o.result["reliable"] = reliable;
    o.csv = csv.str();
    o.line = kind + ": " + std::to_string(slices.size()) + " slice(s) x " + std::to_string(S.size()) + " pair(s)" +
             (reliable ? "" : " [unreliable]");
    return o;
}

/// Outside the cone the wave kernel must reproduce the bound-state formula.
inline Outcome op_flagship(const ExperimentConfig& c, const YAML::Node& prm) {
    const Potential& p = c.potential;
    const SupportGrid g = build_support_grid(p, c.settings.grid);
    const BoundSpectrum B(p, g, bound_states(p, g, default_kappa_max(p), c.settings.bound));
    const YAML::Node pts = prm["points"];
    if (!pts || !pts.IsSequence()) throw ConfigParse("flagship needs points: [{tau, x, y}, ...]");
    std::vector<EvalPair> prs;
    std::vector<double> taus;
    for (const auto& q : pts) {
        check_keys(q, "flagship point", {"tau", "x", "y"});
        taus.push_back(get(q, "tau", 1.0));
        prs.push_back({to_vec3(q["x"], "point x"), to_vec3(q["y"], "point y")});
    }
    const double tol = get(prm, "rel_tol", 0.10);
    SpectralSampler S(p, g, prs, c.settings.spectral);
    Outcome o;
    o.gated = true;
    o.result["points"] = Json::array();
    double worst = 0.0;
    std::ostringstream csv;
    csv << "tau,sep,wave_T,formula,rel_err\n" << std::setprecision(17);
    for (size_t i = 0; i < prs.size(); ++i) {
        const double w = wave_T(S, taus[i]).samples[i].value;
        const double f = outside_cone_formula(B, taus[i], prs[i].x, prs[i].y);
        const double e = std::abs(w - f) / std::abs(f);
        worst = std::max(worst, e);
        o.result["points"].push_back(
            Json{{"tau", taus[i]}, {"sep", prs[i].sep()}, {"wave_T", w}, {"formula", f}, {"rel_err", e}});
        csv << taus[i] << ',' << prs[i].sep() << ',' << w << ',' << f << ',' << e << '\n';
    }
    o.result["max_rel_err"] = worst;
    o.result["rel_tol"] = tol;
    o.pass = worst <= tol;
    o.result["pass"] = o.pass;
    o.csv = csv.str();
    o.line = "flagship max_rel_err=" + fmt(worst, 4);
    return o;
}

inline Outcome from_report(const DominationReport& r) {
    Outcome o;
    o.gated = true;
    o.pass = r.pass;
    o.result = to_json(r);
    std::ostringstream csv;
    write_ratio_csv(csv, r);
    o.csv = csv.str();
    o.line = r.theorem_id + " C=" + fmt(r.fitted_constant, 5) + " drift=" + fmt(r.refinement_drift, 3);
    for (const auto& [k, v] : r.extra)
        if (k != "fitted_constant_refined") o.line += " " + k + "=" + fmt(v, 5);
    return o;
}

inline Outcome op_harness(const ExperimentConfig& c, const std::string& op, const YAML::Node& prm) {
    const Potential& p = c.potential;
    const SupportGrid g = build_support_grid(p, c.settings.grid);
    const auto& s = c.settings;
    if (op == "bound1" || op == "bound3" || op == "bound4") {
        const PoissonBound m = op == "bound1" ? PoissonBound::bound1 : op == "bound3" ? PoissonBound::bound3 : PoissonBound::bound4;
        const std::vector<double> def = op == "bound4" ? std::vector<double>{1, 2, 4, 8} : std::vector<double>{0.1, 0.25, 0.5, 1};
        return from_report(check_poisson_domination(p, g, s.spectral, get_list(prm, "t", def), pairs_or_default(c), m, s.harness));
    }
    if (op == "gauss1" || op == "heat_total") {
        const HeatBound m = op == "gauss1" ? HeatBound::gauss1 : HeatBound::total;
        return from_report(check_heat_domination(p, g, s.spectral, get_list(prm, "t", {0.1, 0.5, 1, 2, 4}),
                                                 pairs_or_default(c), m, s.harness));
    }
    if (op == "bound2" || op == "gauss2") {
        const K2Mode m = op == "bound2" ? K2Mode::poisson : K2Mode::heat;
        double eps = get(prm, "eps", 0.0);
        if (!(eps > 0.0)) {
            // default: a quarter of the smallest decay rate
            double k1 = 1.0;
            const auto st = bound_states(p, g, default_kappa_max(p), s.bound);
            if (!st.empty()) {
                k1 = st.front().kappa;
                for (const auto& b : st) k1 = std::min(k1, b.kappa);
            }
            eps = 0.25 * k1;
        }
        const std::vector<double> def = m == K2Mode::poisson ? std::vector<double>{0.1, 0.3, 1, 3, 10}
                                                              : std::vector<double>{1, 2, 4, 7, 10};
        return from_report(check_k2_decay(p, g, m, eps, get_list(prm, "t", def), separated(pairs_or_default(c)), s.harness));
    }
    if (op == "tauT") return from_report(tau_T_mass(p, g, s.spectral, pairs_or_default(c), get(prm, "tau_max", 6.0), s.harness));
    if (op == "br_slope") {
        SpectralSpec sp = s.spectral;
        if (p.is_zero()) sp.mode = StoneMode::raw;
        return from_report(br_decay_slope(p, g, sp, get(prm, "alpha", 0.0), get(prm, "lambda0", 4.0), s.harness));
    }
    return from_report(l2_br_norm(p, g, s.spectral, get(prm, "alpha", 0.0), get(prm, "lambda0", 36.0), s.harness));
}

inline Outcome op_verify(const ExperimentConfig& c, const YAML::Node& prm) {
    const auto r = verify::run_suite(get<std::string>(prm, "suite", "small"), c.settings);
    Outcome o;
    o.gated = true;
    o.pass = r.pass();
    o.result = r.to_json(c.settings);
    o.line = r.lines();
    if (!o.line.empty()) o.line.pop_back();
    return o;
}

inline const std::set<std::string>& known_ops() {
    static const std::set<std::string> ops{"kato",   "kato_norm", "spectrum", "assume", "heat",       "poisson",
                                           "wave",   "br",        "flagship", "bound1", "bound3",     "bound4",
                                           "gauss1", "heat_total", "bound2",  "gauss2", "tauT",       "br_slope",
                                           "l2_br",  "verify"};
    return ops;
}

inline Outcome run_op(const ExperimentConfig& c, const std::string& op, const YAML::Node& prm) {
    if (op == "kato" || op == "kato_norm") return op_kato(c, prm);
    if (op == "spectrum") return op_spectrum(c, prm);
    if (op == "assume") return op_assume(c, prm);
    if (op == "heat" || op == "poisson" || op == "wave" || op == "br") return op_kernel(c, op, prm);
    if (op == "flagship") return op_flagship(c, prm);
    if (op == "verify") return op_verify(c, prm);
    if (known_ops().count(op)) return op_harness(c, op, prm);
    throw ConfigParse("unknown operation '" + op + "'");
}

/// Adds provenance to a result object and writes <stem>.json (and <stem>.csv).
inline void write_outcome(const std::filesystem::path& dir, const std::string& stem, const ExperimentConfig& c,
                          const std::string& op, Outcome& o, int threads) {
    std::filesystem::create_directories(dir);
    Json j = o.result;
    j["experiment"] = op;
    if (o.gated) j["gate_pass"] = o.pass;
    j["potential"] = to_json(c.potential);
    j["defaults"] = to_json(c.settings);
    j["defaults"]["threads"] = threads;
    write_json((dir / (stem + ".json")).string(), j);
    if (!o.csv.empty()) {
        auto f = open_output((dir / (stem + ".csv")).string());
        f << o.csv;
    }
}

/// Runs every experiment in order. Errors abort with their own exit code and the experiment named.
inline int run_config(const ExperimentConfig& c, const std::filesystem::path& out, int threads, std::ostream& log) {
    for (const auto& e : c.experiments)
        if (!known_ops().count(e.op)) throw ConfigParse("unknown operation '" + e.op + "'");
    bool ok = true;
    Json summary;
    summary["name"] = c.name;
    summary["experiments"] = Json::array();
    for (size_t k = 0; k < c.experiments.size(); ++k) {
        const auto& e = c.experiments[k];
        Outcome o;
        try {
            o = run_op(c, e.op, e.params);
        } catch (const Error& err) {
            throw Error(err.name(), "experiment " + std::to_string(k + 1) + " (" + e.op + "): " +
                                        std::string(err.what()).substr(err.name().size() + 2),
                        err.code());
        }
        write_outcome(out, e.out, c, e.op, o, threads);
        log << "[" << (k + 1) << "] " << e.op << (o.gated ? (o.pass ? " PASS " : " FAIL ") : " done ") << o.line
            << '\n';
        ok = ok && (!o.gated || o.pass);
        summary["experiments"].push_back(
            Json{{"op", e.op}, {"out", e.out}, {"gated", o.gated}, {"pass", o.pass}});
    }
    summary["pass"] = ok;
    summary["defaults"] = to_json(c.settings);
    summary["defaults"]["threads"] = threads;
    write_json((out / "summary.json").string(), summary);
    return ok ? 0 : 1;
}

}  // namespace katoctl
