// katoctl: command line front end for the kato library.

#include "ops.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace katoctl;

namespace {

struct Common {
    std::string config;
    std::string out;
    int threads = 1;
    std::string profile;
    // potential and pairs from flags, used when no config is given
    std::string shape = "zero";
    double amplitude = 0.0;
    double width = 1.0;
    std::vector<double> center{0.0, 0.0, 0.0};
    std::vector<double> x, y;
    double sep_min = 0.0, sep_max = 0.0;
    int count = 0;
    std::string mode;
};

ExperimentConfig base_config(const Common& c) {
    ExperimentConfig cfg;
    if (!c.config.empty()) {
        YAML::Node root;
        try {
            root = YAML::LoadFile(c.config);
        } catch (const YAML::BadFile&) {
            throw Io("cannot read config '" + c.config + "'");
        } catch (const YAML::Exception& e) {
            throw ConfigParse(e.what());
        }
        if (!root["experiments"]) root["experiments"] = YAML::Load("[{op: kato}]");
        cfg = parse_config(root, c.profile);
    } else {
        cfg.settings = Settings::from_profile(c.profile.empty() ? "default" : c.profile);
        if (c.shape != "zero") {
            if (c.center.size() != 3) throw InvalidArgument("--center needs three components");
            cfg.potential = Potential::single(shape_from_string(c.shape), c.amplitude, c.width,
                                              Vec3(c.center[0], c.center[1], c.center[2]));
        }
    }
    if (!c.x.empty() || !c.y.empty()) {
        if (c.x.size() != 3 || c.y.size() != 3) throw InvalidArgument("--x and --y need three components each");
        cfg.pairs.push_back({Vec3(c.x[0], c.x[1], c.x[2]), Vec3(c.y[0], c.y[1], c.y[2])});
    }
    if (c.count > 0) {
        EvalSpec es;
        es.sep_min = c.sep_min;
        es.sep_max = c.sep_max > 0.0 ? c.sep_max : c.sep_min;
        es.count = c.count;
        for (const auto& pr : build_eval_grid(es, 1e6).pairs) cfg.pairs.push_back(pr);
    }
    if (c.mode == "raw")
        cfg.settings.spectral.mode = StoneMode::raw;
    else if (c.mode == "free_subtracted")
        cfg.settings.spectral.mode = StoneMode::free_subtracted;
    else if (!c.mode.empty())
        throw InvalidArgument("--mode must be raw or free_subtracted");
    return cfg;
}

void add_potential_flags(CLI::App* s, Common& c) {
    s->add_option("--shape", c.shape, "zero | gaussian | square_well | exp_decay")->capture_default_str();
    s->add_option("--amplitude", c.amplitude, "primitive amplitude")->capture_default_str();
    s->add_option("--width", c.width, "primitive width or radius")->capture_default_str();
    s->add_option("--center", c.center, "primitive center x y z")->expected(3);
}

void add_pair_flags(CLI::App* s, Common& c) {
    s->add_option("--x", c.x, "first point")->expected(3);
    s->add_option("--y", c.y, "second point")->expected(3);
    s->add_option("--sep-min", c.sep_min, "smallest separation of a log-spaced pair set");
    s->add_option("--sep-max", c.sep_max, "largest separation");
    s->add_option("--count", c.count, "number of log-spaced pairs");
    s->add_option("--mode", c.mode, "raw | free_subtracted");
}

// Prints the outcome; with --out the artifacts also go to disk.
int emit(const Common& c, const ExperimentConfig& cfg, const std::string& op, Outcome o, bool csv_to_stdout) {
    if (!c.out.empty()) write_outcome(c.out, op, cfg, op, o, c.threads);
    if (csv_to_stdout && c.out.empty())
        std::cout << o.csv;
    else
        std::cout << o.line << '\n';
    return o.gated && !o.pass ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"katoctl: spectral kernels of -Laplace + V in three dimensions"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--config", c.config, "experiment config (YAML or JSON)");
    app.add_option("--out", c.out, "output directory");
    app.add_option("--threads", c.threads, "worker cap")->check(CLI::PositiveNumber);
    app.add_option("--tol-profile", c.profile, "tolerance profile")->check(CLI::IsMember({"fast", "default", "strict"}));

    auto* kato_cmd = app.add_subcommand("kato", "Kato norm and moduli");
    std::vector<double> eps{0.1, 0.5, 1.0}, Rs{1.0, 2.0, 4.0};
    add_potential_flags(kato_cmd, c);
    kato_cmd->add_option("--eps", eps, "local radii");
    kato_cmd->add_option("--R", Rs, "distal radii");

    auto* spec_cmd = app.add_subcommand("spectrum", "negative eigenvalues and eigenfunctions");
    add_potential_flags(spec_cmd, c);

    auto* assume_cmd = app.add_subcommand("assume", "regularity at zero, embedded scan, homotopy crossings");
    add_potential_flags(assume_cmd, c);
    double lambda_max = 25.0;
    assume_cmd->add_option("--lambda-max", lambda_max, "embedded scan range")->capture_default_str();

    std::vector<double> times{1.0}, taus{1.0}, alphas{0.0};
    double lambda0 = 4.0;
    auto* heat_cmd = app.add_subcommand("heat", "heat kernel, continuous part");
    auto* pois_cmd = app.add_subcommand("poisson", "Poisson kernel, continuous part");
    auto* wave_cmd = app.add_subcommand("wave", "sin(tau sqrt H)/sqrt H, continuous part");
    auto* br_cmd = app.add_subcommand("br", "Bochner-Riesz kernel, continuous part");
    for (auto* s : {heat_cmd, pois_cmd, wave_cmd, br_cmd}) {
        add_potential_flags(s, c);
        add_pair_flags(s, c);
    }
    heat_cmd->add_option("--t", times, "times");
    pois_cmd->add_option("--t", times, "times");
    wave_cmd->add_option("--tau", taus, "wave times");
    br_cmd->add_option("--alpha", alphas, "Riesz exponents");
    br_cmd->add_option("--lambda0", lambda0, "spectral cutoff")->capture_default_str();

    auto* verify_cmd = app.add_subcommand("verify", "acceptance suite");
    std::string suite = "small";
    verify_cmd->add_option("--suite", suite, "small | full")->check(CLI::IsMember({"small", "full"}))->capture_default_str();

    auto* run_cmd = app.add_subcommand("run", "run every experiment of a config");
    std::string run_path;
    run_cmd->add_option("config", run_path, "config path (alternative to --config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    try {
        if (*run_cmd) {
            const std::string path = run_path.empty() ? c.config : run_path;
            if (path.empty()) throw InvalidArgument("run needs a config path");
            const ExperimentConfig cfg = load_config(path, c.profile);
            return run_config(cfg, c.out.empty() ? std::filesystem::path("out") / cfg.name : std::filesystem::path(c.out), c.threads,
                              std::cout);
        }
        ExperimentConfig cfg = base_config(c);
        YAML::Node prm;
        if (*kato_cmd) {
            prm["eps"] = eps;
            prm["R"] = Rs;
            Outcome o = op_kato(cfg, prm);
            if (!c.out.empty()) write_outcome(c.out, "kato", cfg, "kato", o, c.threads);
            std::cout << o.result.dump(2) << '\n';
            return 0;
        }
        if (*spec_cmd) return emit(c, cfg, "spectrum", op_spectrum(cfg, prm), false);
        if (*assume_cmd) {
            prm["lambda_max"] = lambda_max;
            return emit(c, cfg, "assume", op_assume(cfg, prm), false);
        }
        if (*heat_cmd || *pois_cmd) {
            prm["t"] = times;
            return emit(c, cfg, *heat_cmd ? "heat" : "poisson", op_kernel(cfg, *heat_cmd ? "heat" : "poisson", prm), true);
        }
        if (*wave_cmd) {
            prm["tau"] = taus;
            return emit(c, cfg, "wave", op_kernel(cfg, "wave", prm), true);
        }
        if (*br_cmd) {
            prm["alpha"] = alphas;
            prm["lambda0"] = lambda0;
            return emit(c, cfg, "br", op_kernel(cfg, "br", prm), true);
        }
        if (*verify_cmd) {
            prm["suite"] = suite;
            return emit(c, cfg, "verify", op_verify(cfg, prm), false);
        }
    } catch (const Error& e) {
        std::cerr << "katoctl: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "katoctl: Io: " << e.what() << '\n';
        return static_cast<int>(ExitCode::usage);
    }
    return static_cast<int>(ExitCode::usage);
}
