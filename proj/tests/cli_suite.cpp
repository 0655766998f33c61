// Drives the fmplab binary end to end: exit codes, emitted files, the
// threshold arithmetic surface, and the manifest rerun round-trip.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok) ++g_failures;
}

int run(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

int exit_code(int system_rc) { return WEXITSTATUS(system_rc); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_suite <fmplab-path>\n");
        return 1;
    }
    const std::string fmplab = fs::absolute(argv[1]).string();
    const fs::path dir = fs::temp_directory_path() / "fmplab-cli-suite";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // exit code 2 on missing/broken configuration
    check(exit_code(run(fmplab + " seminorm --config " + (dir / "absent.ini").string())) == 2,
          "missing config file exits 2");
    write(dir / "bad.ini", "[grid]\ndim = 1\n[problem]\ns = 0.6\np = 2.0\nq = 1.2\n");
    check(exit_code(run(fmplab + " seminorm --config " + (dir / "bad.ini").string())) == 2,
          "sp >= N config exits 2");
    check(exit_code(run(fmplab + " bogus-command")) != 0, "unknown subcommand fails");

    // verify on the built-in default config exits 0
    check(exit_code(run("cd " + dir.string() + " && " + fmplab + " verify")) == 0,
          "verify with default config exits 0");

    // thresholds: the pinned N = 3 unit-norm arithmetic through the CLI
    write(dir / "th.ini", R"([grid]
dim = 3
nodes = 4
half_width = 0.5

[problem]
s = 0.5
p = 2.0
q = 1.5
lambda = 0.1

[sobolev]
S_est = 1.0
)");
    const fs::path th_out = dir / "th";
    check(exit_code(run(fmplab + " thresholds --config " + (dir / "th.ini").string() + " --out " +
                        th_out.string())) == 0,
          "thresholds run exits 0");
    {
        const json summary = json::parse(slurp(th_out / "summary.json"));
        const double l1 = summary.at("lambda_star_1").get<double>();
        const double cps = summary.at("c_ps").get<double>();
        check(std::abs(l1 - 0.25) < 1e-12, "lambda*_1 = 0.25 through the CLI");
        check(std::abs(cps - 1.0 / 6.0) < 1e-12, "c_PS = 1/6 through the CLI");
    }

    // seminorm emits the field csv and a manifest that reruns identically
    write(dir / "semi.ini", R"([grid]
dim = 2
nodes = 10
half_width = 1.0

[problem]
s = 0.5
p = 2.0
q = 3.0
lambda = 1.0

[potential]
kind = linear
rotation = 1.0

[field]
kind = gaussian
width = 0.4
wave = 1.0 0.5
)");
    const fs::path s_out = dir / "semi";
    check(exit_code(run(fmplab + " seminorm --config " + (dir / "semi.ini").string() + " --out " +
                        s_out.string())) == 0,
          "seminorm run exits 0");
    check(fs::exists(s_out / "field.csv"), "field csv emitted");
    check(fs::exists(s_out / "manifest.json"), "manifest emitted");

    const fs::path rerun_out = dir / "semi-rerun";
    check(exit_code(run(fmplab + " rerun " + (s_out / "manifest.json").string() + " --out " +
                        rerun_out.string())) == 0,
          "rerun from manifest exits 0");
    check(slurp(s_out / "summary.json") == slurp(rerun_out / "summary.json"),
          "rerun reproduces summary.json byte for byte");

    // density command reports the seminorm identity
    const fs::path d_out = dir / "dens";
    check(exit_code(run(fmplab + " density --config " + (dir / "semi.ini").string() + " --out " +
                        d_out.string())) == 0,
          "density run exits 0");
    {
        const json summary = json::parse(slurp(d_out / "summary.json"));
        const double total = summary.at("density_integral").get<double>();
        const double snp = summary.at("seminorm_p").get<double>();
        check(std::abs(total - snp) <= 1e-12 * snp, "density integral equals seminorm^p");
    }

    // diagnose: bubble generator emits atoms and densities
    write(dir / "diag.ini", R"([grid]
dim = 1
nodes = 128
half_width = 1.0

[problem]
s = 0.4
p = 2.0
q = 1.5

[field]
kind = gaussian
width = 0.15

[sobolev]
S_est = 3.6

[diagnose]
mode = bubbles
sigmas = 1.0 0.5 0.25
eps = 0.0625 0.2
radii = 0.4 0.6
)");
    const fs::path g_out = dir / "diag";
    check(exit_code(run(fmplab + " diagnose --config " + (dir / "diag.ini").string() + " --out " +
                        g_out.string())) == 0,
          "diagnose run exits 0");
    {
        const json summary = json::parse(slurp(g_out / "summary.json"));
        check(summary.at("atoms").size() == 1, "diagnose reports one atom");
        check(fs::exists(g_out / "nu_density.csv") && fs::exists(g_out / "mu_density.csv"),
              "diagnose emits density csvs");
    }

    // diagnose: translating mode walks the bump outward
    write(dir / "walk.ini", R"([grid]
dim = 1
nodes = 128
half_width = 1.0

[problem]
s = 0.4
p = 2.0
q = 1.5

[field]
kind = gaussian
width = 0.08

[sobolev]
S_est = 3.6

[diagnose]
mode = translating
centers = 0 | 0.3 | 0.6 | 0.8
eps = 0.0625 0.2
radii = 0.3 0.5
)");
    const fs::path w_out = dir / "walk";
    check(exit_code(run(fmplab + " diagnose --config " + (dir / "walk.ini").string() + " --out " +
                        w_out.string())) == 0,
          "translating diagnose exits 0");
    {
        const json summary = json::parse(slurp(w_out / "summary.json"));
        check(summary.at("nu_infinity").get<double>() > 0.0, "translating mass flagged at infinity");
    }

    // solve-multistart smoke run with the threshold lambda rule
    write(dir / "ms.ini", R"([grid]
dim = 2
nodes = 10
half_width = 1.0

[problem]
s = 0.5
p = 2.0
q = 1.5

[weight_H]
kind = bumps
width = 0.25
centers = 0.45 0.45 | -0.45 0.45 | -0.45 -0.45 | 0.45 -0.45

[weight_K]
kind = constant
value = 300.0

[potential]
kind = linear
rotation = 1.0

[field]
kind = gaussian
width = 0.4

[solver]
starts = 4
symmetry_order = 4
lambda_fraction_of_star = 0.5
max_iters = 30000
residual_tol = 1e-6
seed = 11
)");
    const fs::path m_out = dir / "ms";
    check(exit_code(run(fmplab + " solve-multistart --config " + (dir / "ms.ini").string() +
                        " --out " + m_out.string())) == 0,
          "solve-multistart run exits 0");
    {
        const json summary = json::parse(slurp(m_out / "summary.json"));
        check(summary.at("solutions").size() >= 1, "multistart keeps at least one solution");
        check(summary.at("lambda").get<double>() > 0.0, "threshold lambda rule applied");
        check(fs::exists(m_out / "solution_0.csv"), "solution csv emitted");
    }

    // numerical failure (no truncation window at huge lambda) exits 3
    write(dir / "ms-bad.ini", R"([grid]
dim = 2
nodes = 8
half_width = 1.0

[problem]
s = 0.5
p = 2.0
q = 1.5
lambda = 1e6

[sobolev]
S_est = 1.0
)");
    check(exit_code(run(fmplab + " solve-multistart --config " + (dir / "ms-bad.ini").string() +
                        " --out " + (dir / "ms-bad").string())) == 3,
          "numerical failure exits 3");

    fs::remove_all(dir);
    if (g_failures > 0) {
        std::printf("%d CLI check(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all CLI checks passed\n");
    return 0;
}
