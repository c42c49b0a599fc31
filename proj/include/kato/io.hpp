#pragma once

// Report serialisation. JSON goes through ordered_json so keys come out in insertion order;
// CSV is comma separated with a header row and LF endings.

#include "kato/bounds_harness.hpp"
#include "kato/kato.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>

namespace kato {

using Json = nlohmann::ordered_json;

/// Every tunable in one place, so reports can echo what they ran with.
struct Settings {
    std::string profile = "default";
    GridSpec grid;
    SpectralSpec spectral;
    BSOptions bs;
    BoundStateOptions bound;
    HarnessOptions harness;
    KatoQuadrature kato;

    static Settings from_profile(const std::string& name) {
        Settings s;
        s.profile = name;
        if (name == "fast") {
            s.grid.radial_order = 12;
            s.spectral.order = 8;
            s.kato.nodes = 12;
        } else if (name == "strict") {
            s.grid.radial_order = 24;
            s.spectral.order = 14;
            s.spectral.eta_born = 16.0;
            s.bound.kappa_tol = 1e-10;
            s.kato.nodes = 24;
        } else if (name != "default") {
            throw InvalidArgument("unknown tolerance profile '" + name + "' (fast, default, strict)");
        }
        return s;
    }
};

inline Json to_json(const GridSpec& g) {
    return Json{{"radial_order", g.radial_order}, {"angular_order", g.angular_order}, {"panel_length", g.panel_length}};
}

inline Json to_json(const SpectralSpec& s) {
    return Json{{"mode", to_string(s.mode)},
                {"eta_born", s.eta_born},
                {"panel", s.panel},
                {"order", s.order},
                {"eta_max", s.eta_max},
                {"taper", s.taper},
                {"weight_tail_tol", s.weight_tail_tol},
                {"eta_cap", s.eta_cap},
                {"born_eta_hi", s.born_eta_hi},
                {"skip_limit", s.skip_limit},
                {"nodes_per_period", s.nodes_per_period}};
}

inline Json to_json(const Settings& s) {
    Json j;
    j["profile"] = s.profile;
    j["grid"] = to_json(s.grid);
    j["spectral"] = to_json(s.spectral);
    j["birman_schwinger"] = Json{{"count_tol", s.bs.count_tol},     {"reg_tol", s.bs.reg_tol},
                                 {"complex_tol", s.bs.complex_tol}, {"stability", s.bs.stability},
                                 {"refine", s.bs.refine},           {"l_max", s.bs.l_max}};
    j["bound_states"] = Json{{"kappa_tol", s.bound.kappa_tol},
                             {"kappa_steps", s.bound.kappa_steps},
                             {"resid_tol", s.bound.resid_tol},
                             {"tail_order", s.bound.tail_order}};
    j["harness"] = Json{{"floor_rel", s.harness.floor_rel}, {"drift_tol", s.harness.drift_tol},
                        {"refine", s.harness.refine},       {"delta", s.harness.delta},
                        {"br_samples", s.harness.br_samples}, {"disc_tol", s.harness.disc_tol}};
    j["kato"] = Json{{"nodes", s.kato.nodes},
                     {"panels", s.kato.panels},
                     {"angular_n", s.kato.angular_n},
                     {"rel_tol", s.kato.rel_tol},
                     {"generic_rel_tol", s.kato.generic_rel_tol}};
    return j;
}

inline Json to_json(const Potential& p) {
    Json a = Json::array();
    for (const auto& q : p.primitives)
        a.push_back(Json{{"shape", to_string(q.shape)},
                         {"amplitude", q.amplitude},
                         {"width", q.width},
                         {"center", {q.center.x(), q.center.y(), q.center.z()}}});
    return a;
}

inline Json to_json(const KatoDiagnostics& d) {
    Json j;
    j["kato_norm"] = d.kato_norm;
    j["local"] = Json::array();
    for (const auto& [e, v] : d.local_modulus) j["local"].push_back(Json{{"eps", e}, {"val", v}});
    j["distal"] = Json::array();
    for (const auto& [R, v] : d.distal_modulus) j["distal"].push_back(Json{{"R", R}, {"val", v}});
    return j;
}

/// Birman-Schwinger summary: count, borderline eigenvalues, sigma_min at zero, scan and crossings.
inline Json bs_report(const CountResult& c, const Regularity& r, const std::vector<ScanPoint>& scan,
                      const HomotopyResult& h) {
    Json j;
    j["count"] = c.count;
    j["borderline"] = Json::array();
    for (const auto& e : c.borderline)
        j["borderline"].push_back(Json{{"l", e.l}, {"mu", e.mu.real()}, {"multiplicity", e.multiplicity}});
    j["sigma_min_zero"] = r.sigma_min;
    j["sigma_min_zero_refined"] = r.sigma_min_refined;
    j["regular"] = r.regular;
    j["embedded_scan"] = Json::array();
    for (const auto& s : scan) j["embedded_scan"].push_back(Json{{"lambda", s.lambda}, {"sigma_min", s.sigma_min}});
    j["embedded_min"] = scan_minimum(scan);
    j["crossings"] = h.crossings;
    return j;
}

inline Json to_json(const BoundState& b, double agmon) {
    return Json{{"lambda_k", b.lambda_k}, {"kappa", b.kappa}, {"l", b.l},
                {"m", b.m},               {"agmon_ratio", agmon}, {"residual", b.residual}};
}

/// psi on the given points: x,y,z,re_psi,im_psi.
inline void write_bound_state_csv(std::ostream& os, const BoundState& b, const Potential& p, const SupportGrid& g,
                                  const std::vector<Vec3>& xs) {
    os << "x,y,z,re_psi,im_psi\n" << std::setprecision(17);
    const auto v = extend_eigenfunction(b, p, g, xs);
    for (size_t i = 0; i < xs.size(); ++i)
        os << xs[i].x() << ',' << xs[i].y() << ',' << xs[i].z() << ',' << v[i].real() << ',' << v[i].imag() << '\n';
}

inline Json to_json(const KernelSlice& s) {
    Json j;
    j["kind"] = to_string(s.kind);
    for (const auto& [k, v] : s.param) j[k] = v;
    j["mode"] = to_string(s.mode);
    j["nodes"] = s.nodes;
    j["skipped"] = s.skipped;
    if (std::isfinite(s.eta_max))
        j["eta_max"] = s.eta_max;
    else
        j["eta_max"] = "inf";
    j["eta_born"] = s.eta_born;
    j["tapered"] = s.tapered;
    j["reliable"] = s.reliable;
    return j;
}

inline Json to_json(const DominationReport& r) {
    Json j;
    j["theorem_id"] = r.theorem_id;
    j["ratio_grid"] = Json::array();
    for (const auto& q : r.ratio_grid)
        j["ratio_grid"].push_back(Json{{"param", q.param}, {"pair", q.pair}, {"ratio", q.ratio}});
    j["fitted_constant"] = r.fitted_constant;
    j["refinement_drift"] = r.refinement_drift;
    j["pass"] = r.pass;
    for (const auto& [k, v] : r.extra) j[k] = v;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline void write_ratio_csv(std::ostream& os, const DominationReport& r) {
    os << "theorem_id,param,pair,ratio\n" << std::setprecision(17);
    for (const auto& q : r.ratio_grid) os << r.theorem_id << ',' << q.param << ',' << q.pair << ',' << q.ratio << '\n';
}

/// Binary mode so no platform ever rewrites the LF endings.
inline std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Io("cannot open '" + path + "' for writing");
    return f;
}

inline void write_json(const std::string& path, const Json& j) {
    auto f = open_output(path);
    f << j.dump(2) << '\n';
    if (!f) throw Io("write failed for '" + path + "'");
}

}  // namespace kato
