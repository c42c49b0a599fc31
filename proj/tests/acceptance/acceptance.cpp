// Acceptance run: the full verify suite with wall-clock limits, then the determinism check.
// Usage: acceptance [path/to/katoctl]. Without katoctl, determinism is checked in-process.

#include "kato/verify.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace kato;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct Run {
    int rc = -1;
    std::string out;
};

Run capture(const std::string& cmd) {
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int st = pclose(pipe);
    r.rc = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

// Byte comparison of two `verify --suite small` runs, stdout and the JSON report.
verify::Criterion determinism(const std::string& katoctl) {
    verify::Criterion c;
    c.id = 9;
    c.name = "determinism";
    if (katoctl.empty()) {
        const auto s = Settings::from_profile("default");
        const auto a = verify::run_suite("small", s), b = verify::run_suite("small", s);
        c.pass = a.lines() == b.lines() && a.to_json(s).dump(2) == b.to_json(s).dump(2);
        c.summary = std::string("in-process identical=") + (c.pass ? "yes" : "no");
        return c;
    }
    const fs::path base = fs::temp_directory_path() / "kato_acceptance_determinism";
    fs::remove_all(base);
    std::string bytes[2], json[2];
    int rc[2];
    for (int k = 0; k < 2; ++k) {
        const fs::path dir = base / ("run" + std::to_string(k));
        const Run r = capture("\"" + katoctl + "\" --out \"" + dir.string() + "\" verify --suite small");
        rc[k] = r.rc;
        bytes[k] = r.out;
        json[k] = slurp(dir / "verify.json");
    }
    const bool same_out = bytes[0] == bytes[1], same_json = !json[0].empty() && json[0] == json[1];
    c.pass = rc[0] == 0 && rc[1] == 0 && same_out && same_json;
    c.summary = "rc=" + std::to_string(rc[0]) + "," + std::to_string(rc[1]) + " stdout_identical=" +
                (same_out ? "yes" : "no") + " json_identical=" + (same_json ? "yes" : "no") +
                " json_bytes=" + std::to_string(json[0].size());
    fs::remove_all(base);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string katoctl = argc > 1 ? argv[1] : "";
    // wall-clock limits in seconds; criteria without an entry have none
    const std::map<int, double> limit{{1, 120.0}, {2, 120.0}, {3, 600.0}, {4, 900.0}};
    const auto s = Settings::from_profile("default");
    bool ok = true;
    auto report = [&](const verify::Criterion& c, double secs) {
        const auto it = limit.find(c.id);
        const bool in_time = it == limit.end() || secs <= it->second;
        const bool pass = c.pass && in_time;
        ok = ok && pass;
        std::printf("criterion %d %s: %s  %s  [%.1f s%s]\n", c.id, c.name.c_str(), pass ? "PASS" : "FAIL",
                    c.summary.c_str(), secs,
                    it == limit.end() ? "" : (in_time ? " within limit" : " OVER LIMIT"));
        std::fflush(stdout);
    };

    auto t0 = Clock::now();
    verify::run_suite("full", s, [&](const verify::Criterion& c) {
        const auto now = Clock::now();
        report(c, std::chrono::duration<double>(now - t0).count());
        t0 = now;
    });
    t0 = Clock::now();
    const auto d = determinism(katoctl);
    report(d, std::chrono::duration<double>(Clock::now() - t0).count());
    std::printf("acceptance: %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}
