#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmpl/problem.hpp"

namespace fmpl {

/// Raised for malformed or inconsistent configuration; the CLI maps it to
/// exit code 2 (numerical failures exit with 3).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sectioned key-value document, INI-style:
///   [section]
///   key = value        ; comments with ';' or '#'
/// Keys are validated against the known schema; unknown sections or keys are
/// rejected with their line number.
class IniDoc {
public:
    static IniDoc parse(const std::string& text);
    static IniDoc parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const;
    std::vector<int> get_ints(const std::string& section, const std::string& key,
                              const std::vector<int>& fallback) const;
    /// '|'-separated list of space-separated points.
    std::vector<Point> get_points(const std::string& section, const std::string& key,
                                  const std::vector<Point>& fallback) const;

    const std::string& text() const { return text_; }

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    const Entry* find(const std::string& section, const std::string& key) const;
    void check_known(const std::string& section, const std::string& key, int line) const;

    std::string text_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

struct WeightSpec {
    std::string kind = "constant";  // constant | gaussian | bumps | csv
    double value = 1.0;
    double width = 0.4;
    std::vector<Point> centers{{0.0, 0.0, 0.0}};
    std::string path;
};

struct PotentialSpec {
    std::string kind = "zero";  // zero | constant | linear
    Point value{0.0, 0.0, 0.0};
    double rotation = 0.0;
    std::vector<double> matrix;  // row-major N x N
};

struct FieldSpec {
    std::string kind = "gaussian";  // gaussian | constant | one_hot | random | csv
    double amplitude = 1.0;
    double width = 0.4;
    Point center{0.0, 0.0, 0.0};
    Point wave{0.0, 0.0, 0.0};  // plane-phase factor e^{i k.x}
    std::uint64_t seed = 7;
    std::string path;
};

/// Typed view of a run configuration document.
struct RunConfig {
    IniDoc doc;

    int dim = 2;
    int nodes = 16;
    double half_width = 1.0;

    double s = 0.5;
    double p = 2.0;
    double q = 3.0;
    double lambda = 0.0;
    bool tail_correction = false;

    WeightSpec weight_H;
    WeightSpec weight_K;
    PotentialSpec potential;
    FieldSpec field;

    // solver block
    int solver_max_iters = 5000;
    double solver_residual_tol = 1e-6;
    double solver_step0 = 0.0;
    int path_points = 33;
    int refine_iters = 5000;
    int starts = 6;
    std::uint64_t seed = 1;
    double dedup_delta = 1e-3;
    double mp_residual_tol = 1e-5;

    // sobolev block
    int sobolev_max_iters = 300;
    double sobolev_step = 0.5;
    double sobolev_tol = 1e-10;

    // curve blocks
    std::vector<double> sigmas{1.0, 0.5, 0.25, 0.125};
    int sigma_refine = 2;
    std::vector<int> mollifier_m{2, 3, 4, 6};
    std::vector<double> cutoff_radii{0.2, 0.4, 0.6, 0.8, 1.0};

    // diagnose block
    std::string diagnose_mode = "bubbles";  // bubbles | translating | dir
    std::vector<double> diagnose_sigmas{1.0, 0.5, 0.25, 0.125};
    std::vector<Point> diagnose_centers;
    std::vector<double> diagnose_eps;
    std::vector<double> diagnose_radii;
    std::string diagnose_dir;

    static RunConfig from_text(const std::string& text);
    static RunConfig from_file(const std::string& path);
};

GridPtr build_grid(const RunConfig& cfg);
RealField build_weight(const WeightSpec& spec, GridPtr grid);
MagneticPotential build_potential(const PotentialSpec& spec, int dim);
ComplexField build_field(const FieldSpec& spec, GridPtr grid);
ProblemSpec build_problem(const RunConfig& cfg);

}  // namespace fmpl
