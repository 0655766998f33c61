#include "fmpl/kernel.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "fmpl/parallel.hpp"

namespace fmpl {

double unit_sphere_area(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        default: throw std::invalid_argument("unit_sphere_area: dimension must be 1, 2 or 3");
    }
}

KernelTable::KernelTable(GridPtr grid, double s, double p)
    : grid_(std::move(grid)), s_(s), p_(p) {
    const Grid& g = *grid_;
    const double N = static_cast<double>(g.dim());
    // Pure tabulation of |d|^{-(N+sp)}; the summability hypothesis sp < N is
    // enforced on ProblemSpec, where the pair sums live.
    if (!(s > 0.0 && s < 1.0) || !(p > 1.0))
        throw std::invalid_argument("KernelTable: need 0 < s < 1 < p");

    const int n = g.nodes_per_axis();
    span_ = 2 * n - 1;
    const double h = g.spacing();
    const double expo = N + s * p;

    std::size_t count = 1;
    for (int a = 0; a < g.dim(); ++a) count *= static_cast<std::size_t>(span_);
    values_.assign(count, 0.0);

    window_sum_ = 0.0;
    for (std::size_t f = 0; f < count; ++f) {
        std::size_t rem = f;
        double r2 = 0.0;
        bool origin = true;
        for (int a = 0; a < g.dim(); ++a) {
            const int d = static_cast<int>(rem % static_cast<std::size_t>(span_)) - (n - 1);
            rem /= static_cast<std::size_t>(span_);
            if (d != 0) origin = false;
            r2 += static_cast<double>(d) * static_cast<double>(d);
        }
        if (origin) continue;
        const double v = std::pow(h * std::sqrt(r2), -expo);
        values_[f] = v;
        window_sum_ += v;
    }

    box_sum_.assign(g.size(), 0.0);
    std::vector<double>& bs = box_sum_;
    const KernelTable* self = this;
    parallel_for(g.size(), [self, &g, &bs](std::size_t k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (j == k) continue;
            acc += self->between(k, j);
        }
        bs[k] = acc;
    });

    // Radial remainder beyond the displacement window, omega * int_R^inf
    // r^{-1-sp} dr with R half a cell past the window reach.
    const double window_radius = (static_cast<double>(n) - 0.5) * h;
    tail_coefficient_ =
        unit_sphere_area(g.dim()) / (s * p) * std::pow(window_radius, -s * p);
}

std::size_t KernelTable::disp_flat(const std::array<int, 3>& disp) const {
    const int n = grid_->nodes_per_axis();
    std::size_t f = 0;
    for (int a = grid_->dim() - 1; a >= 0; --a) {
        const int d = disp[static_cast<std::size_t>(a)];
        f = f * static_cast<std::size_t>(span_) + static_cast<std::size_t>(d + n - 1);
    }
    return f;
}

double KernelTable::between(std::size_t k, std::size_t j) const {
    const auto ik = grid_->unflatten(k);
    const auto ij = grid_->unflatten(j);
    std::array<int, 3> d{0, 0, 0};
    for (int a = 0; a < grid_->dim(); ++a)
        d[static_cast<std::size_t>(a)] =
            ik[static_cast<std::size_t>(a)] - ij[static_cast<std::size_t>(a)];
    return values_[disp_flat(d)];
}

std::shared_ptr<const KernelTable> KernelTable::make(GridPtr grid, double s, double p) {
    using Key = std::tuple<int, int, double, double, double>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const KernelTable>> cache;
    const Key key{grid->dim(), grid->nodes_per_axis(), grid->half_width(), s, p};
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto table = std::make_shared<const KernelTable>(grid, s, p);
    if (cache.size() > 16) cache.clear();
    cache.emplace(key, table);
    return table;
}

void KernelTable::save(std::ostream& out) const {
    // Lexicographic in the displacement tuple, first axis major; f64 LE.
    const Grid& g = *grid_;
    const int n = g.nodes_per_axis();
    std::array<int, 3> d{0, 0, 0};
    std::function<void(int)> rec = [&](int axis) {
        for (int v = -(n - 1); v <= n - 1; ++v) {
            d[static_cast<std::size_t>(axis)] = v;
            if (axis == g.dim() - 1) {
                const double val = values_[disp_flat(d)];
                char buf[sizeof(double)];
                std::memcpy(buf, &val, sizeof(double));
                out.write(buf, sizeof(double));
            } else {
                rec(axis + 1);
            }
        }
    };
    rec(0);
}

void KernelTable::load_values(std::istream& in) {
    const Grid& g = *grid_;
    const int n = g.nodes_per_axis();
    std::array<int, 3> d{0, 0, 0};
    std::function<void(int)> rec = [&](int axis) {
        for (int v = -(n - 1); v <= n - 1; ++v) {
            d[static_cast<std::size_t>(axis)] = v;
            if (axis == g.dim() - 1) {
                char buf[sizeof(double)];
                in.read(buf, sizeof(double));
                if (!in) throw std::runtime_error("KernelTable: truncated cache stream");
                double val;
                std::memcpy(&val, buf, sizeof(double));
                values_[disp_flat(d)] = val;
            } else {
                rec(axis + 1);
            }
        }
    };
    rec(0);
}

std::string KernelTable::cache_name(int dim, int nodes, double half_width, double s, double p) {
    std::ostringstream name;
    name.precision(17);
    name << "kernel-N" << dim << "-n" << nodes << "-L" << half_width << "-s" << s << "-p" << p
         << ".f64le";
    return name.str();
}

void KernelTable::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("KernelTable: cannot open " + path + " for writing");
    save(out);
    if (!out) throw std::runtime_error("KernelTable: write failed for " + path);
}

KernelTable KernelTable::load_file(const std::string& path, GridPtr grid, double s, double p) {
    KernelTable table(std::move(grid), s, p);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("KernelTable: cannot open " + path);
    table.load_values(in);
    return table;
}

cplx pair_phase(const MagneticPotential& A, const Point& x, const Point& y) {
    if (A.is_zero()) return {1.0, 0.0};
    const Point mid{0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1]), 0.5 * (x[2] + y[2])};
    const Point a = A.eval(mid);
    const double theta = -((x[0] - y[0]) * a[0] + (x[1] - y[1]) * a[1] + (x[2] - y[2]) * a[2]);
    return {std::cos(theta), std::sin(theta)};
}

cplx phi_p(cplx z, double p) {
    const double m = std::abs(z);
    if (m == 0.0) return {0.0, 0.0};
    if (p == 2.0) return z;
    return std::pow(m, p - 2.0) * z;
}

namespace {

double pow_p(double m, double p) { return p == 2.0 ? m * m : std::pow(m, p); }

/// Shared precomputed geometry for the O(M^2) pair loops.
struct PairContext {
    const Grid* g;
    std::shared_ptr<const KernelTable> table;
    std::vector<Point> coords;
    std::vector<long> flat_tuple;  // precombined stride offset per node
    const double* kernel = nullptr;
    long origin_flat = 0;

    explicit PairContext(const ProblemSpec& spec) {
        g = spec.grid.get();
        table = KernelTable::make(spec.grid, spec.s, spec.p);
        kernel = table->raw_values().data();
        const std::size_t M = g->size();
        const int n = g->nodes_per_axis();
        const long span = table->displacement_span();
        coords.resize(M);
        flat_tuple.resize(M);
        long origin = 0;
        {
            long st = 1;
            for (int a = 0; a < g->dim(); ++a) {
                origin += st * static_cast<long>(n - 1);
                st *= span;
            }
        }
        origin_flat = origin;
        for (std::size_t k = 0; k < M; ++k) {
            coords[k] = g->coord(k);
            const auto t = g->unflatten(k);
            long f = 0;
            long st = 1;
            for (int a = 0; a < g->dim(); ++a) {
                f += st * static_cast<long>(t[static_cast<std::size_t>(a)]);
                st *= span;
            }
            flat_tuple[k] = f;
        }
    }

    /// Kernel between nodes k and j; the displacement flat index is the
    /// difference of node stride offsets shifted to the window origin.
    double kval(std::size_t k, std::size_t j) const {
        return kernel[origin_flat + flat_tuple[k] - flat_tuple[j]];
    }
};

void check_field(const ComplexField& u, const ProblemSpec& spec, const char* who) {
    if (!u.compatible_with(*spec.grid))
        throw std::invalid_argument(std::string(who) + ": field grid does not match problem grid");
}

}  // namespace

double seminorm_p(const ComplexField& u, const ProblemSpec& spec) {
    check_field(u, spec, "seminorm");
    PairContext ctx(spec);
    const Grid& g = *ctx.g;
    const std::size_t M = g.size();
    const double p = spec.p;
    const KernelTable& table = *ctx.table;
    const MagneticPotential& A = spec.A;

    const double pair_part = deterministic_sum(M, [&](std::size_t k) {
        const cplx uk = u[k];
        const Point& xk = ctx.coords[k];
        double acc = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            if (j == k) continue;
            const cplx d = pair_phase(A, xk, ctx.coords[j]) * uk - u[j];
            acc += pow_p(std::abs(d), p) * ctx.kval(k, j);
        }
        acc += 2.0 * pow_p(std::abs(uk), p) * table.exterior_sum(k);
        return acc;
    });

    const double h2n = g.cell_volume() * g.cell_volume();
    double total = pair_part * h2n;
    if (spec.tail_correction) {
        double mass = 0.0;
        for (std::size_t k = 0; k < M; ++k) mass += pow_p(std::abs(u[k]), p);
        total += 2.0 * table.tail_coefficient() * mass * g.cell_volume();
    }
    return total;
}

double seminorm(const ComplexField& u, const ProblemSpec& spec) {
    return std::pow(seminorm_p(u, spec), 1.0 / spec.p);
}

RealField sp_gradient_density(const ComplexField& u, const ProblemSpec& spec) {
    check_field(u, spec, "sp_gradient_density");
    PairContext ctx(spec);
    const Grid& g = *ctx.g;
    const std::size_t M = g.size();
    const double p = spec.p;
    const KernelTable& table = *ctx.table;
    const MagneticPotential& A = spec.A;
    const double hn = g.cell_volume();

    RealField density(u.grid_ptr());
    auto& out = density.values();
    parallel_for(M, [&](std::size_t k) {
        const cplx uk = u[k];
        const Point& xk = ctx.coords[k];
        double acc = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            if (j == k) continue;
            const cplx d = pair_phase(A, xk, ctx.coords[j]) * uk - u[j];
            acc += pow_p(std::abs(d), p) * ctx.kval(k, j);
        }
        acc += 2.0 * pow_p(std::abs(uk), p) * table.exterior_sum(k);
        double val = acc * hn;
        if (spec.tail_correction) val += 2.0 * table.tail_coefficient() * pow_p(std::abs(uk), p);
        out[k] = val;
    });
    return density;
}

ComplexField apply_operator(const ComplexField& u, const ProblemSpec& spec) {
    check_field(u, spec, "apply_operator");
    PairContext ctx(spec);
    const Grid& g = *ctx.g;
    const std::size_t M = g.size();
    const double p = spec.p;
    const KernelTable& table = *ctx.table;
    const MagneticPotential& A = spec.A;
    const double hn = g.cell_volume();

    ComplexField result(u.grid_ptr());
    auto& out = result.values();
    parallel_for(M, [&](std::size_t k) {
        const cplx uk = u[k];
        const Point& xk = ctx.coords[k];
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < M; ++j) {
            if (j == k) continue;
            // Operator phase convention: u(x) - e^{i(x-y).A(mid)} u(y).
            const cplx delta = uk - std::conj(pair_phase(A, xk, ctx.coords[j])) * u[j];
            acc += phi_p(delta, p) * ctx.kval(k, j);
        }
        acc += phi_p(uk, p) * table.exterior_sum(k);
        cplx val = acc * hn;
        if (spec.tail_correction) val += phi_p(uk, p) * table.tail_coefficient();
        out[k] = val;
    });
    return result;
}

double pairing(const ComplexField& u, const ComplexField& v, const ProblemSpec& spec) {
    check_field(u, spec, "pairing");
    check_field(v, spec, "pairing");
    PairContext ctx(spec);
    const Grid& g = *ctx.g;
    const std::size_t M = g.size();
    const double p = spec.p;
    const KernelTable& table = *ctx.table;
    const MagneticPotential& A = spec.A;

    const double pair_part = deterministic_sum(M, [&](std::size_t k) {
        const cplx uk = u[k];
        const cplx vk = v[k];
        const Point& xk = ctx.coords[k];
        double acc = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            if (j == k) continue;
            const cplx ph = pair_phase(A, xk, ctx.coords[j]);
            const cplx du = ph * uk - u[j];
            const cplx dv = ph * vk - v[j];
            acc += (phi_p(du, p) * std::conj(dv)).real() * ctx.kval(k, j);
        }
        acc += 2.0 * (phi_p(uk, p) * std::conj(vk)).real() * table.exterior_sum(k);
        return acc;
    });

    const double h2n = g.cell_volume() * g.cell_volume();
    double total = pair_part * h2n;
    if (spec.tail_correction) {
        double cross = 0.0;
        for (std::size_t k = 0; k < M; ++k) cross += (phi_p(u[k], p) * std::conj(v[k])).real();
        total += 2.0 * table.tail_coefficient() * cross * g.cell_volume();
    }
    return total;
}

DiamagneticDefect diamagnetic_defect(const ComplexField& u, const ProblemSpec& spec) {
    check_field(u, spec, "diamagnetic_defect");
    PairContext ctx(spec);
    const Grid& g = *ctx.g;
    const std::size_t M = g.size();
    const MagneticPotential& A = spec.A;

    std::vector<double> block_max((M + detail::kBlockSize - 1) / detail::kBlockSize,
                                  -std::numeric_limits<double>::infinity());
    parallel_for(M, [&](std::size_t k) {
        const cplx uk = u[k];
        const double mk = std::abs(uk);
        const Point& xk = ctx.coords[k];
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < M; ++j) {
            if (j == k) continue;
            const cplx d = pair_phase(A, xk, ctx.coords[j]) * uk - u[j];
            const double lhs = std::abs(mk - std::abs(u[j]));
            worst = std::max(worst, lhs - std::abs(d));
        }
        auto& slot = block_max[k / detail::kBlockSize];
        slot = std::max(slot, worst);
    });
    double violation = -std::numeric_limits<double>::infinity();
    for (double b : block_max) violation = std::max(violation, b);

    ProblemSpec plain = spec.with_potential(MagneticPotential::zero());
    const double gap = seminorm_p(u, spec) - seminorm_p(modulus_field(u), plain);
    return {violation, gap};
}

GaugeTransformResult gauge_transform(const ComplexField& u, const MagneticPotential& A,
                                     const Point& xi, const Point& eta) {
    const Grid& g = u.grid();
    const auto steps = lattice_steps(g, xi);

    // Every support node must survive the shift x -> x - xi.
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k] == cplx{0.0, 0.0}) continue;
        auto idx = g.unflatten(k);
        for (int a = 0; a < g.dim(); ++a) idx[static_cast<std::size_t>(a)] -= steps[static_cast<std::size_t>(a)];
        if (!g.index_in_range(idx))
            throw std::invalid_argument(
                "gauge_transform: shifted support leaves the box at node " + std::to_string(k) +
                "; the discrete isometry would break");
    }

    ComplexField v(u.grid_ptr());
    for (std::size_t k = 0; k < v.size(); ++k) {
        auto idx = g.unflatten(k);
        for (int a = 0; a < g.dim(); ++a) idx[static_cast<std::size_t>(a)] += steps[static_cast<std::size_t>(a)];
        if (!g.index_in_range(idx)) {
            v[k] = cplx{0.0, 0.0};
            continue;
        }
        const Point x = g.coord(k);
        const double theta = dot(eta, x);
        v[k] = cplx{std::cos(theta), std::sin(theta)} * u[g.flatten(idx)];
    }
    return {std::move(v), A.gauge_shifted(xi, eta)};
}

ComplexField rescale(const ComplexField& u, double sigma, double s, double p, GridPtr target_grid) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("rescale: sigma must be positive, got " + std::to_string(sigma));
    const Grid& src = u.grid();
    const Grid& dst = *target_grid;
    if (src.dim() != dst.dim())
        throw std::invalid_argument("rescale: source and target dimension differ");

    const double N = static_cast<double>(src.dim());
    const double amp = std::pow(sigma, -(N - p * s) / p);
    const double h = src.spacing();
    const double x0 = src.axis_coord(0);
    const int n = src.nodes_per_axis();

    ComplexField out(target_grid);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Point xq = dst.coord(k);
        // Multilinear interpolation of u at xq / sigma, zero outside the box.
        std::array<int, 3> base{0, 0, 0};
        std::array<double, 3> frac{0.0, 0.0, 0.0};
        for (int a = 0; a < src.dim(); ++a) {
            const double t = (xq[static_cast<std::size_t>(a)] / sigma - x0) / h;
            const double fl = std::floor(t);
            base[static_cast<std::size_t>(a)] = static_cast<int>(fl);
            frac[static_cast<std::size_t>(a)] = t - fl;
        }
        cplx acc{0.0, 0.0};
        const int corners = 1 << src.dim();
        for (int c = 0; c < corners; ++c) {
            double w = 1.0;
            std::array<int, 3> idx = base;
            for (int a = 0; a < src.dim(); ++a) {
                const bool hi = (c >> a) & 1;
                w *= hi ? frac[static_cast<std::size_t>(a)] : 1.0 - frac[static_cast<std::size_t>(a)];
                idx[static_cast<std::size_t>(a)] += hi ? 1 : 0;
            }
            if (w == 0.0) continue;
            bool inside = true;
            for (int a = 0; a < src.dim(); ++a) {
                const int i = idx[static_cast<std::size_t>(a)];
                if (i < 0 || i >= n) { inside = false; break; }
            }
            if (inside) acc += w * u[src.flatten(idx)];
        }
        out[k] = amp * acc;
    }
    return out;
}

}  // namespace fmpl
