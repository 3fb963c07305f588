// Acceptance gate: runs the thirteen statistical criteria at the pinned seed,
// checks the determinism contract through the command-line tool, and prints
// one verdict line per criterion. Exit status 0 means every criterion either
// passed or is a documented failure with a quantified cause.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "polyasim/crp.hpp"
#include "polyasim/experiments.hpp"

namespace {

constexpr std::uint64_t kSeed = 42;

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return {};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs the tool with `args`, capturing nothing; returns the exit status or
// -1 if the process could not be started.
int run_cli(const std::string& cli, const std::string& args) {
    std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

bool oracle_checks(std::string& message) {
    using namespace polyasim;
    // Frozen spot values guarding the analytic machinery the criteria lean
    // on; a drift here would silently distort every verdict downstream.
    struct Probe {
        const char* what;
        double got;
        double want;
        double tol;
    };
    const Probe probes[] = {
        {"expected_tables(1,7)", expected_tables(1.0, 7), 2.5928571428571425, 1e-12},
        {"ks_critical_d(20000)", ks_critical_d(20000), 0.013773, 5e-5},
        {"poisson_normal_ks_floor(90)", poisson_normal_ks_floor(90.0), 0.0265, 0.006},
        {"poisson_normal_ks_floor(10000)", poisson_normal_ks_floor(10000.0), 0.002, 0.0008},
    };
    for (const auto& p : probes) {
        if (std::abs(p.got - p.want) > p.tol) {
            message += std::string("oracle mismatch: ") + p.what + " = " +
                       std::to_string(p.got) + ", expected about " + std::to_string(p.want) +
                       "; ";
            return false;
        }
    }
    // The lattice-floor waiver threshold must actually bind at the pinned
    // CLT design point (lambda = 90, n = 20000) and must NOT bind at the
    // easiest design point (lambda = 6000): the waiver is narrow by design.
    const double d_crit = ks_critical_d(20000);
    if (!(poisson_normal_ks_floor(90.0) >= 0.7 * d_crit)) {
        message += "waiver policy: floor(90) unexpectedly below 0.7 * critical D; ";
        return false;
    }
    if (!(poisson_normal_ks_floor(6000.0) < 0.7 * d_crit)) {
        message += "waiver policy: floor(6000) unexpectedly above 0.7 * critical D; ";
        return false;
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
    }

    unsigned threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    if (threads > 8) threads = 8;

    bool all_ok = true;

    std::string oracle_msg;
    if (!oracle_checks(oracle_msg)) {
        std::printf("oracle checks: FAIL (%s)\n", oracle_msg.c_str());
        all_ok = false;
    } else {
        std::printf("oracle checks: PASS\n");
    }

    auto criteria = polyasim::run_verify_suite(kSeed, threads);
    for (const auto& c : criteria) {
        const char* verdict = c.passed ? "PASS" : (c.waived ? "FAIL (documented)" : "FAIL");
        std::printf("criterion %02d %s: %s\n", c.index, c.name.c_str(), verdict);
        if (!c.passed) {
            if (!c.note.empty()) std::printf("    note: %s\n", c.note.c_str());
            for (const auto& r : c.reports) {
                if (!r.passed) {
                    std::printf("    failing report %s: statistic=%.6g p=%.3g n=%lld %s\n",
                                r.name.c_str(), r.statistic, r.p_value,
                                static_cast<long long>(r.n), r.details.c_str());
                }
            }
        }
        if (!c.acceptable()) all_ok = false;
    }

    // Criterion 14: the verification run is a pure function of the seed.
    // Two tool invocations with different worker counts and output
    // directories must produce byte-identical manifests and equal exit
    // statuses. The exit status itself may be nonzero (the tool is strict
    // about documented failures); only cross-run equality matters here.
    bool determinism_ok = false;
    std::string determinism_note;
    if (cli.empty()) {
        determinism_note = "no --cli path provided";
    } else {
        namespace fs = std::filesystem;
        fs::path base = fs::temp_directory_path() / "polyasim-acceptance";
        fs::path dir_a = base / "run-a";
        fs::path dir_b = base / "run-b";
        std::error_code ec;
        fs::remove_all(base, ec);
        int rc_a = run_cli(cli, "verify --seed 42 --threads 1 --out \"" + dir_a.string() + "\"");
        int rc_b = run_cli(cli, "verify --seed 42 --threads 2 --out \"" + dir_b.string() + "\"");
        std::string man_a = read_file(dir_a / "manifest.json");
        std::string man_b = read_file(dir_b / "manifest.json");
        if (rc_a < 0 || rc_b < 0) {
            determinism_note = "tool invocation failed";
        } else if (man_a.empty() || man_b.empty()) {
            determinism_note = "manifest missing";
        } else if (man_a != man_b) {
            determinism_note = "manifests differ between worker counts";
        } else if (rc_a != rc_b) {
            determinism_note = "exit statuses differ between worker counts";
        } else {
            determinism_ok = true;
        }
    }
    std::printf("criterion 14 determinism: %s\n", determinism_ok ? "PASS" : "FAIL");
    if (!determinism_ok) {
        std::printf("    note: %s\n", determinism_note.c_str());
        all_ok = false;
    }

    std::printf("acceptance: %s\n", all_ok ? "OK" : "NOT OK");
    return all_ok ? 0 : 1;
}
