#include "fmpl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fmpl/io.hpp"
#include "fmpl/rng.hpp"

namespace fmpl {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"grid", {"dim", "nodes", "half_width"}},
        {"problem", {"s", "p", "q", "lambda", "tail_correction"}},
        {"weight_H", {"kind", "value", "width", "centers", "path"}},
        {"weight_K", {"kind", "value", "width", "centers", "path"}},
        {"potential", {"kind", "value", "rotation", "matrix"}},
        {"field", {"kind", "amplitude", "width", "center", "wave", "seed", "path"}},
        {"solver",
         {"max_iters", "residual_tol", "step0", "path_points", "refine_iters", "starts", "seed",
          "dedup_delta", "mp_residual_tol", "symmetry_order", "lambda_fraction_of_star"}},
        {"sobolev", {"max_iters", "step", "tol", "S_est"}},
        {"sigma_curve", {"sigmas", "refine"}},
        {"mollifier", {"m_list"}},
        {"cutoff", {"radii"}},
        {"diagnose", {"mode", "sigmas", "centers", "eps", "radii", "dir"}},
    };
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key, int line,
                            const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": [" + section + "] " + key + ": " +
                      what);
}

}  // namespace

void IniDoc::check_known(const std::string& section, const std::string& key, int line) const {
    const auto& sch = schema();
    const auto it = sch.find(section);
    if (it == sch.end())
        throw ConfigError("config line " + std::to_string(line) + ": unknown section [" + section +
                          "]");
    if (!it->second.count(key))
        throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key +
                          "' in section [" + section + "]");
}

IniDoc IniDoc::parse(const std::string& text) {
    IniDoc doc;
    doc.text_ = text;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        // strip comments (';' or '#') outside of nothing fancy
        const auto cpos = line.find_first_of(";#");
        if (cpos != std::string::npos) line = line.substr(0, cpos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value, got '" +
                              line + "'");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key before any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        doc.check_known(section, key, lineno);
        if (doc.sections_[section].count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in [" + section + "]");
        doc.sections_[section][key] = Entry{value, lineno};
    }
    return doc;
}

IniDoc IniDoc::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const IniDoc::Entry* IniDoc::find(const std::string& section, const std::string& key) const {
    const auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    const auto kit = sit->second.find(key);
    return kit == sit->second.end() ? nullptr : &kit->second;
}

bool IniDoc::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

bool IniDoc::has_section(const std::string& section) const { return sections_.count(section) > 0; }

std::string IniDoc::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double IniDoc::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        bad_value(section, key, e->line, "expected a number, got '" + e->value + "'");
    }
}

int IniDoc::get_int(const std::string& section, const std::string& key, int fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        std::size_t pos = 0;
        const int v = std::stoi(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        bad_value(section, key, e->line, "expected an integer, got '" + e->value + "'");
    }
}

std::uint64_t IniDoc::get_u64(const std::string& section, const std::string& key,
                              std::uint64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        bad_value(section, key, e->line, "expected an unsigned integer, got '" + e->value + "'");
    }
}

bool IniDoc::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::string v = e->value;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    bad_value(section, key, e->line, "expected true/false, got '" + e->value + "'");
}

std::vector<double> IniDoc::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::vector<double> out;
    for (const auto& tok : split_ws(e->value)) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            bad_value(section, key, e->line, "expected numbers, got '" + tok + "'");
        }
    }
    if (out.empty()) bad_value(section, key, e->line, "empty list");
    return out;
}

std::vector<int> IniDoc::get_ints(const std::string& section, const std::string& key,
                                  const std::vector<int>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::vector<int> out;
    for (const auto& tok : split_ws(e->value)) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            bad_value(section, key, e->line, "expected integers, got '" + tok + "'");
        }
    }
    if (out.empty()) bad_value(section, key, e->line, "empty list");
    return out;
}

std::vector<Point> IniDoc::get_points(const std::string& section, const std::string& key,
                                      const std::vector<Point>& fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    std::vector<Point> out;
    std::stringstream ss(e->value);
    std::string group;
    while (std::getline(ss, group, '|')) {
        const auto toks = split_ws(group);
        if (toks.empty()) continue;
        if (toks.size() > 3)
            bad_value(section, key, e->line, "a point has at most 3 coordinates");
        Point pt{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < toks.size(); ++i) {
            try {
                pt[i] = std::stod(toks[i]);
            } catch (const std::exception&) {
                bad_value(section, key, e->line, "expected coordinates, got '" + toks[i] + "'");
            }
        }
        out.push_back(pt);
    }
    if (out.empty()) bad_value(section, key, e->line, "empty point list");
    return out;
}

RunConfig RunConfig::from_text(const std::string& text) {
    RunConfig cfg;
    cfg.doc = IniDoc::parse(text);
    const IniDoc& d = cfg.doc;

    cfg.dim = d.get_int("grid", "dim", cfg.dim);
    cfg.nodes = d.get_int("grid", "nodes", cfg.nodes);
    cfg.half_width = d.get_double("grid", "half_width", cfg.half_width);

    cfg.s = d.get_double("problem", "s", cfg.s);
    cfg.p = d.get_double("problem", "p", cfg.p);
    cfg.q = d.get_double("problem", "q", cfg.q);
    cfg.lambda = d.get_double("problem", "lambda", cfg.lambda);
    cfg.tail_correction = d.get_bool("problem", "tail_correction", cfg.tail_correction);

    auto read_weight = [&](const char* section, WeightSpec& w) {
        w.kind = d.get_string(section, "kind", w.kind);
        w.value = d.get_double(section, "value", w.value);
        w.width = d.get_double(section, "width", w.width);
        w.centers = d.get_points(section, "centers", w.centers);
        w.path = d.get_string(section, "path", w.path);
    };
    read_weight("weight_H", cfg.weight_H);
    read_weight("weight_K", cfg.weight_K);

    cfg.potential.kind = d.get_string("potential", "kind", cfg.potential.kind);
    {
        const auto v = d.get_doubles("potential", "value", {0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < std::min<std::size_t>(3, v.size()); ++i)
            cfg.potential.value[i] = v[i];
    }
    cfg.potential.rotation = d.get_double("potential", "rotation", cfg.potential.rotation);
    cfg.potential.matrix = d.get_doubles("potential", "matrix", cfg.potential.matrix);

    cfg.field.kind = d.get_string("field", "kind", cfg.field.kind);
    cfg.field.amplitude = d.get_double("field", "amplitude", cfg.field.amplitude);
    cfg.field.width = d.get_double("field", "width", cfg.field.width);
    {
        const auto c = d.get_doubles("field", "center", {0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < std::min<std::size_t>(3, c.size()); ++i) cfg.field.center[i] = c[i];
        const auto w = d.get_doubles("field", "wave", {0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < std::min<std::size_t>(3, w.size()); ++i) cfg.field.wave[i] = w[i];
    }
    cfg.field.seed = d.get_u64("field", "seed", cfg.field.seed);
    cfg.field.path = d.get_string("field", "path", cfg.field.path);

    cfg.solver_max_iters = d.get_int("solver", "max_iters", cfg.solver_max_iters);
    cfg.solver_residual_tol = d.get_double("solver", "residual_tol", cfg.solver_residual_tol);
    cfg.solver_step0 = d.get_double("solver", "step0", cfg.solver_step0);
    cfg.path_points = d.get_int("solver", "path_points", cfg.path_points);
    cfg.refine_iters = d.get_int("solver", "refine_iters", cfg.refine_iters);
    cfg.starts = d.get_int("solver", "starts", cfg.starts);
    cfg.seed = d.get_u64("solver", "seed", cfg.seed);
    cfg.dedup_delta = d.get_double("solver", "dedup_delta", cfg.dedup_delta);
    cfg.mp_residual_tol = d.get_double("solver", "mp_residual_tol", cfg.mp_residual_tol);

    cfg.sobolev_max_iters = d.get_int("sobolev", "max_iters", cfg.sobolev_max_iters);
    cfg.sobolev_step = d.get_double("sobolev", "step", cfg.sobolev_step);
    cfg.sobolev_tol = d.get_double("sobolev", "tol", cfg.sobolev_tol);

    cfg.sigmas = d.get_doubles("sigma_curve", "sigmas", cfg.sigmas);
    cfg.sigma_refine = d.get_int("sigma_curve", "refine", cfg.sigma_refine);
    cfg.mollifier_m = d.get_ints("mollifier", "m_list", cfg.mollifier_m);
    cfg.cutoff_radii = d.get_doubles("cutoff", "radii", cfg.cutoff_radii);

    cfg.diagnose_mode = d.get_string("diagnose", "mode", cfg.diagnose_mode);
    cfg.diagnose_sigmas = d.get_doubles("diagnose", "sigmas", cfg.diagnose_sigmas);
    cfg.diagnose_centers = d.get_points("diagnose", "centers", cfg.diagnose_centers);
    cfg.diagnose_eps = d.get_doubles("diagnose", "eps", cfg.diagnose_eps);
    cfg.diagnose_radii = d.get_doubles("diagnose", "radii", cfg.diagnose_radii);
    cfg.diagnose_dir = d.get_string("diagnose", "dir", cfg.diagnose_dir);

    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

GridPtr build_grid(const RunConfig& cfg) {
    try {
        return make_grid(cfg.dim, cfg.nodes, cfg.half_width);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[grid] ") + e.what());
    }
}

RealField build_weight(const WeightSpec& spec, GridPtr grid) {
    if (spec.kind == "constant") {
        const double v = spec.value;
        if (v < 0.0) throw ConfigError("weight: constant value must be nonnegative");
        return sample_real_field([v](const Point&) { return v; }, grid);
    }
    if (spec.kind == "gaussian" || spec.kind == "bumps") {
        const double w2 = spec.width * spec.width;
        if (!(w2 > 0.0)) throw ConfigError("weight: width must be positive");
        const auto centers = spec.centers;
        const double amp = spec.value;
        if (amp < 0.0) throw ConfigError("weight: amplitude must be nonnegative");
        return sample_real_field(
            [w2, centers, amp](const Point& x) {
                double acc = 0.0;
                for (const Point& c : centers) {
                    const Point diff{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
                    acc += std::exp(-norm2(diff) / w2);
                }
                return amp * acc;
            },
            grid);
    }
    if (spec.kind == "csv") {
        if (spec.path.empty()) throw ConfigError("weight: kind csv requires a path");
        const ComplexField f = read_field_csv(spec.path);
        if (f.grid() != *grid) throw ConfigError("weight csv grid does not match [grid]");
        RealField w(grid);
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (f[k].imag() != 0.0) throw ConfigError("weight csv must be real");
            w[k] = f[k].real();
        }
        return w;
    }
    throw ConfigError("weight: unknown kind '" + spec.kind + "'");
}

MagneticPotential build_potential(const PotentialSpec& spec, int dim) {
    if (spec.kind == "zero") return MagneticPotential::zero();
    if (spec.kind == "constant") return MagneticPotential::constant(spec.value);
    if (spec.kind == "linear") {
        if (!spec.matrix.empty()) {
            const std::size_t n = static_cast<std::size_t>(dim);
            if (spec.matrix.size() != n * n)
                throw ConfigError("potential: matrix needs " + std::to_string(n * n) +
                                  " row-major entries for dim " + std::to_string(dim));
            std::array<std::array<double, 3>, 3> m{
                {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}};
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m[i][j] = spec.matrix[i * n + j];
            return MagneticPotential::linear(m);
        }
        if (spec.rotation != 0.0) {
            if (dim < 2) throw ConfigError("potential: rotation needs dim >= 2");
            return MagneticPotential::rotation(spec.rotation);
        }
        throw ConfigError("potential: linear kind needs 'matrix' or 'rotation'");
    }
    throw ConfigError("potential: unknown kind '" + spec.kind + "'");
}

ComplexField build_field(const FieldSpec& spec, GridPtr grid) {
    if (spec.kind == "constant") {
        const double a = spec.amplitude;
        return sample_field([a](const Point&) { return cplx{a, 0.0}; }, grid);
    }
    if (spec.kind == "gaussian") {
        const double w2 = spec.width * spec.width;
        if (!(w2 > 0.0)) throw ConfigError("field: width must be positive");
        const Point c = spec.center;
        const Point k = spec.wave;
        const double a = spec.amplitude;
        return sample_field(
            [w2, c, k, a](const Point& x) {
                const Point diff{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
                const double mag = a * std::exp(-norm2(diff) / w2);
                const double phase = dot(k, x);
                return cplx{mag * std::cos(phase), mag * std::sin(phase)};
            },
            grid);
    }
    if (spec.kind == "one_hot") {
        ComplexField u(grid);
        // hot node nearest to the requested center
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < u.size(); ++k) {
            const Point x = grid->coord(k);
            const Point diff{x[0] - spec.center[0], x[1] - spec.center[1], x[2] - spec.center[2]};
            if (norm2(diff) < best_d) {
                best_d = norm2(diff);
                best = k;
            }
        }
        u[best] = cplx{spec.amplitude, 0.0};
        return u;
    }
    if (spec.kind == "random") {
        Rng rng(spec.seed);
        ComplexField u = random_field(grid, rng);
        for (std::size_t k = 0; k < u.size(); ++k) u[k] *= spec.amplitude;
        return u;
    }
    if (spec.kind == "csv") {
        if (spec.path.empty()) throw ConfigError("field: kind csv requires a path");
        ComplexField u = read_field_csv(spec.path);
        if (u.grid() != *grid) throw ConfigError("field csv grid does not match [grid]");
        return u;
    }
    throw ConfigError("field: unknown kind '" + spec.kind + "'");
}

ProblemSpec build_problem(const RunConfig& cfg) {
    GridPtr grid = build_grid(cfg);
    ProblemSpec spec;
    spec.grid = grid;
    spec.s = cfg.s;
    spec.p = cfg.p;
    spec.q = cfg.q;
    spec.lambda = cfg.lambda;
    spec.tail_correction = cfg.tail_correction;
    spec.H = build_weight(cfg.weight_H, grid);
    spec.K = build_weight(cfg.weight_K, grid);
    spec.A = build_potential(cfg.potential, cfg.dim);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

}  // namespace fmpl
