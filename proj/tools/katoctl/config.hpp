#pragma once

// YAML experiment configs. JSON files parse too since the loader accepts flow style.

#include "kato/io.hpp"

#include <yaml-cpp/yaml.h>

#include <set>

namespace katoctl {

using namespace kato;

struct Experiment {
    std::string op;
    YAML::Node params;
    std::string out;  // file stem inside the output directory
};

struct ExperimentConfig {
    std::string name = "experiment";
    Potential potential;
    Settings settings;
    std::vector<EvalPair> pairs;  // empty: each op picks its own default
    std::vector<Experiment> experiments;
};

inline void check_keys(const YAML::Node& n, const std::string& where, const std::set<std::string>& allowed) {
    if (!n.IsMap()) throw ConfigParse(where + " must be a mapping");
    for (const auto& kv : n) {
        const std::string k = kv.first.as<std::string>();
        if (!allowed.count(k)) throw ConfigParse("unknown key '" + k + "' in " + where);
    }
}

template <class T>
T get(const YAML::Node& n, const std::string& key, const T& fallback) {
    if (!n || !n[key]) return fallback;
    try {
        return n[key].as<T>();
    } catch (const YAML::Exception& e) {
        throw ConfigParse("bad value for '" + key + "': " + e.what());
    }
}

/// Scalar or list, returned as a list.
inline std::vector<double> get_list(const YAML::Node& n, const std::string& key, std::vector<double> fallback) {
    if (!n || !n[key]) return fallback;
    const YAML::Node v = n[key];
    try {
        if (v.IsScalar()) return {v.as<double>()};
        return v.as<std::vector<double>>();
    } catch (const YAML::Exception& e) {
        throw ConfigParse("bad list for '" + key + "': " + e.what());
    }
}

inline Vec3 to_vec3(const YAML::Node& n, const std::string& what) {
    std::vector<double> v;
    try {
        v = n.as<std::vector<double>>();
    } catch (const YAML::Exception&) {
        throw ConfigParse(what + " must be a list of three numbers");
    }
    if (v.size() != 3) throw ConfigParse(what + " must have three components");
    return Vec3(v[0], v[1], v[2]);
}

inline Primitive parse_primitive(const YAML::Node& n) {
    check_keys(n, "potential entry", {"shape", "amplitude", "width", "center"});
    if (!n["shape"]) throw ConfigParse("potential entry needs a shape");
    const Vec3 c = n["center"] ? to_vec3(n["center"], "center") : Vec3::Zero();
    try {
        return Potential::single(shape_from_string(n["shape"].as<std::string>()), get(n, "amplitude", 0.0),
                                 get(n, "width", 1.0), c)
            .primitives.front();
    } catch (const InvalidArgument& e) {
        throw ConfigParse(e.what());
    }
}

/// "zero", a single primitive, or a list of primitives.
inline Potential parse_potential(const YAML::Node& n) {
    Potential p;
    if (!n || (n.IsScalar() && n.as<std::string>() == "zero")) return p;
    if (n.IsMap())
        p.primitives.push_back(parse_primitive(n));
    else if (n.IsSequence())
        for (const auto& e : n) p.primitives.push_back(parse_primitive(e));
    else
        throw ConfigParse("potential must be 'zero', a mapping, or a list");
    return p;
}

inline void apply_overrides(Settings& s, const YAML::Node& root) {
    if (const auto g = root["grid"]) {
        check_keys(g, "grid", {"radial_order", "angular_order", "panel_length"});
        s.grid.radial_order = get(g, "radial_order", s.grid.radial_order);
        s.grid.angular_order = get(g, "angular_order", s.grid.angular_order);
        s.grid.panel_length = get(g, "panel_length", s.grid.panel_length);
    }
    if (const auto q = root["spectral"]) {
        check_keys(q, "spectral", {"mode", "eta_born", "panel", "order", "eta_max", "taper", "weight_tail_tol",
                                   "eta_cap", "born_eta_hi", "skip_limit", "nodes_per_period"});
        auto& sp = s.spectral;
        const std::string mode = get<std::string>(q, "mode", to_string(sp.mode));
        if (mode == "raw")
            sp.mode = StoneMode::raw;
        else if (mode == "free_subtracted")
            sp.mode = StoneMode::free_subtracted;
        else
            throw ConfigParse("spectral mode must be raw or free_subtracted");
        sp.eta_born = get(q, "eta_born", sp.eta_born);
        sp.panel = get(q, "panel", sp.panel);
        sp.order = get(q, "order", sp.order);
        sp.eta_max = get(q, "eta_max", sp.eta_max);
        sp.taper = get(q, "taper", sp.taper);
        sp.weight_tail_tol = get(q, "weight_tail_tol", sp.weight_tail_tol);
        sp.eta_cap = get(q, "eta_cap", sp.eta_cap);
        sp.born_eta_hi = get(q, "born_eta_hi", sp.born_eta_hi);
        sp.skip_limit = get(q, "skip_limit", sp.skip_limit);
        sp.nodes_per_period = get(q, "nodes_per_period", sp.nodes_per_period);
    }
    if (const auto t = root["tolerances"]) {
        check_keys(t, "tolerances", {"floor_rel", "drift_tol", "refine", "delta", "disc_tol", "reg_tol", "count_tol",
                                     "kappa_tol", "kato_rel_tol"});
        s.harness.floor_rel = get(t, "floor_rel", s.harness.floor_rel);
        s.harness.drift_tol = get(t, "drift_tol", s.harness.drift_tol);
        s.harness.refine = get(t, "refine", s.harness.refine);
        s.harness.delta = get(t, "delta", s.harness.delta);
        s.harness.disc_tol = get(t, "disc_tol", s.harness.disc_tol);
        s.bs.reg_tol = get(t, "reg_tol", s.bs.reg_tol);
        s.bs.count_tol = get(t, "count_tol", s.bs.count_tol);
        s.bound.kappa_tol = get(t, "kappa_tol", s.bound.kappa_tol);
        s.kato.rel_tol = get(t, "kato_rel_tol", s.kato.rel_tol);
    }
}

inline std::vector<EvalPair> parse_pairs(const YAML::Node& root) {
    std::vector<EvalPair> out;
    if (const auto p = root["pairs"]) {
        if (!p.IsSequence()) throw ConfigParse("pairs must be a list of {x, y}");
        for (const auto& e : p) {
            check_keys(e, "pair", {"x", "y"});
            if (!e["x"] || !e["y"]) throw ConfigParse("pair needs x and y");
            out.push_back({to_vec3(e["x"], "pair x"), to_vec3(e["y"], "pair y")});
        }
    }
    if (const auto e = root["eval"]) {
        check_keys(e, "eval", {"sep_min", "sep_max", "count", "offset", "direction", "box"});
        EvalSpec es;
        es.sep_min = get(e, "sep_min", es.sep_min);
        es.sep_max = get(e, "sep_max", es.sep_max);
        es.count = get(e, "count", es.count);
        if (e["offset"]) es.offset = to_vec3(e["offset"], "eval offset");
        if (e["direction"]) es.direction = to_vec3(e["direction"], "eval direction");
        for (const auto& pr : build_eval_grid(es, get(e, "box", 100.0)).pairs) out.push_back(pr);
    }
    return out;
}

inline ExperimentConfig parse_config(const YAML::Node& root, const std::string& profile_override = "") {
    check_keys(root, "config",
               {"name", "potential", "grid", "spectral", "tolerances", "tol_profile", "pairs", "eval", "experiments"});
    ExperimentConfig c;
    c.name = get<std::string>(root, "name", c.name);
    c.potential = parse_potential(root["potential"]);
    const std::string prof =
        profile_override.empty() ? get<std::string>(root, "tol_profile", "default") : profile_override;
    try {
        c.settings = Settings::from_profile(prof);
    } catch (const InvalidArgument& e) {
        throw ConfigParse(e.what());
    }
    apply_overrides(c.settings, root);
    c.pairs = parse_pairs(root);
    const auto ex = root["experiments"];
    if (!ex || !ex.IsSequence() || ex.size() == 0) throw ConfigParse("config needs a nonempty experiments list");
    std::set<std::string> stems;
    for (const YAML::Node e : ex) {
        if (!e.IsMap() || !e["op"]) throw ConfigParse("each experiment needs an op");
        Experiment x;
        x.op = e["op"].as<std::string>();
        x.params = e;
        x.out = get<std::string>(e, "out", x.op);
        if (!stems.insert(x.out).second) throw ConfigParse("duplicate output name '" + x.out + "'");
        c.experiments.push_back(x);
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path, const std::string& profile_override = "") {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw Io("cannot read config '" + path + "'");
    } catch (const YAML::Exception& e) {
        throw ConfigParse(std::string("config '") + path + "': " + e.what());
    }
    return parse_config(root, profile_override);
}

}  // namespace katoctl
