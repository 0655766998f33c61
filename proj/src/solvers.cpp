#include "fmpl/solvers.hpp"

#include "fmpl/analysis.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "fmpl/rng.hpp"

namespace fmpl {

namespace {

ComplexField axpy(const ComplexField& u, double a, const ComplexField& g) {
    ComplexField out = u;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] -= a * g[k];
    return out;
}

ComplexField scaled(const ComplexField& u, cplx a) {
    ComplexField out = u;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] *= a;
    return out;
}

using EnergyFn = std::function<double(const ComplexField&)>;
using GradientFn = std::function<ComplexField(const ComplexField&)>;

SolveResult descend_impl(const ComplexField& u_init, const ProblemSpec& spec,
                         const DescendSettings& settings, const EnergyFn& energy_fn,
                         const GradientFn& gradient_fn, const char* tag) {
    SolveResult result;
    ComplexField u = u_init;
    double value = energy_fn(u);
    if (!std::isfinite(value)) throw std::runtime_error("descend: non-finite initial energy");

    double gamma = settings.step0;
    if (gamma <= 0.0) {
        const double sn = seminorm(u, spec);
        gamma = 1e-2 * std::pow(1.0 + sn, 1.0 - spec.p);
    }
    const double gamma_cap = gamma * 1e3;

    int iter = 0;
    double residual = 0.0;
    bool converged = false;
    for (; iter < settings.max_iters; ++iter) {
        ComplexField grad = gradient_fn(u);
        residual = gradient_residual(grad);
        if (!std::isfinite(residual)) throw std::runtime_error("descend: non-finite gradient");
        result.trace.emplace_back(value, residual);
        if (residual < settings.residual_tol) {
            converged = true;
            break;
        }
        bool moved = false;
        for (int halving = 0; halving < settings.max_halvings; ++halving) {
            ComplexField trial = axpy(u, gamma, grad);
            const double trial_value = energy_fn(trial);
            if (!std::isfinite(trial_value))
                throw std::runtime_error("descend: non-finite energy during line search");
            if (trial_value < value) {
                u = std::move(trial);
                value = trial_value;
                moved = true;
                break;
            }
            gamma *= 0.5;
        }
        if (!moved) break;  // stalled at line-search resolution
        gamma = std::min(gamma * 1.5, gamma_cap);
    }

    if (!converged && iter < settings.max_iters) {
        // stalled: re-measure the residual at the final point
        residual = gradient_residual(gradient_fn(u));
        converged = residual < settings.residual_tol;
    }

    result.field = std::move(u);
    result.energy_value = value;
    result.residual = residual;
    result.iterations = iter;
    result.converged = converged;
    result.level = value;
    result.level_tag = tag;
    return result;
}

}  // namespace

double find_t_escape(const ComplexField& u0, const ProblemSpec& spec) {
    if (weighted_lp_norm(u0, spec.p_star()) == 0.0)
        throw std::invalid_argument("find_t_escape: u0 is identically zero");
    double t = 1.0;
    for (int step = 0; step < 200; ++step) {
        if (energy(scaled(u0, t), spec) < 0.0) return t;
        t *= 2.0;
    }
    throw std::runtime_error(
        "find_t_escape: scan cap reached; H and K both vanish on the support of u0");
}

SolveResult descend(const ComplexField& u_init, const ProblemSpec& spec,
                    const DescendSettings& settings) {
    return descend_impl(
        u_init, spec, settings, [&](const ComplexField& u) { return energy(u, spec); },
        [&](const ComplexField& u) { return energy_gradient(u, spec); }, "energy");
}

SolveResult descend_truncated(const ComplexField& u_init, const ProblemSpec& spec,
                              const TruncationProfile& profile, const DescendSettings& settings) {
    return descend_impl(
        u_init, spec, settings,
        [&](const ComplexField& u) { return truncated_energy(u, spec, profile); },
        [&](const ComplexField& u) { return truncated_energy_gradient(u, spec, profile); },
        "truncated-energy");
}

namespace {

/// Ray maximiser of t -> E(t u) for p <= q < p*: the unique positive root
/// of a t^{p-1} = lambda b t^{q-1} + c t^{p*-1} with a = [u]^p,
/// b = sum H|u|^q, c = sum K|u|^{p*}. Returns 0 when no interior maximum
/// exists (b = c = 0, or q = p with lambda b >= a).
double ray_max_scale(const ComplexField& u, const ProblemSpec& spec) {
    const double ps = spec.p_star();
    const double a = seminorm_p(u, spec);
    double b = 0.0, c = 0.0;
    const double hn = u.grid().cell_volume();
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double m = std::abs(u[k]);
        b += spec.H[k] * std::pow(m, spec.q);
        c += spec.K[k] * std::pow(m, ps);
    }
    b *= hn * spec.lambda;
    c *= hn;
    if (a <= 0.0 || (b <= 0.0 && c <= 0.0)) return 0.0;
    if (spec.q == spec.p && b >= a) return 0.0;  // ray never climbs

    // f(t) = lambda b t^{q-p} + c t^{p*-p} is increasing; solve f(t) = a.
    auto f = [&](double t) { return b * std::pow(t, spec.q - spec.p) + c * std::pow(t, ps - spec.p); };
    double lo = 1.0, hi = 1.0;
    while (f(hi) < a && hi < 1e12) hi *= 2.0;
    while (f(lo) > a && lo > 1e-12) lo *= 0.5;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (f(mid) < a)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace

MountainPassResult mountain_pass(const ProblemSpec& spec, const ComplexField& u0,
                                 const MountainPassSettings& settings) {
    if (!(spec.q >= spec.p))
        throw std::invalid_argument("mountain_pass: requires q >= p (q < p is the genus regime)");
    if (settings.path_points < 3)
        throw std::invalid_argument("mountain_pass: need at least 3 path points");

    MountainPassResult out;
    if (spec.q == spec.p)
        out.warning = "q = p runs are experimental: the pass level estimate below c_PS is not "
                      "certified and the ray maximum exists only for small lambda";
    out.t_escape = find_t_escape(u0, spec);

    // Max-energy sample on the segment path tau -> tau t_u u0.
    double best_tau = 0.0, best_energy = 0.0;
    for (int i = 1; i < settings.path_points; ++i) {
        const double tau = static_cast<double>(i) / static_cast<double>(settings.path_points - 1);
        const double e = energy(scaled(u0, tau * out.t_escape), spec);
        if (e > best_energy) {
            best_energy = e;
            best_tau = tau;
        }
    }
    out.c_m_estimate = best_energy;

    // Refine by gradient descent constrained to the ray maximum, which keeps
    // the iterate on the mountain ridge instead of sliding off the saddle.
    ComplexField u = scaled(u0, best_tau * out.t_escape);
    {
        const double t = ray_max_scale(u, spec);
        if (t > 0.0) u = scaled(u, t);
    }
    double value = energy(u, spec);
    double gamma = 1e-2 * std::pow(1.0 + seminorm(u, spec), 1.0 - spec.p);
    const double gamma_cap = gamma * 1e3;
    double residual = 0.0;
    int iter = 0;
    bool converged = false;
    SolveResult& sol = out.solution;
    for (; iter < settings.refine_iters; ++iter) {
        ComplexField grad = energy_gradient(u, spec);
        residual = gradient_residual(grad);
        sol.trace.emplace_back(value, residual);
        if (residual < settings.residual_tol) {
            converged = true;
            break;
        }
        bool moved = false;
        for (int halving = 0; halving < 40; ++halving) {
            ComplexField trial = axpy(u, gamma, grad);
            const double t = ray_max_scale(trial, spec);
            if (t <= 0.0) break;
            trial = scaled(trial, t);
            const double trial_value = energy(trial, spec);
            if (!std::isfinite(trial_value))
                throw std::runtime_error("mountain_pass: non-finite energy during refinement");
            if (trial_value < value) {
                u = std::move(trial);
                value = trial_value;
                moved = true;
                break;
            }
            gamma *= 0.5;
        }
        if (!moved) break;
        gamma = std::min(gamma * 1.5, gamma_cap);
    }

    sol.field = std::move(u);
    sol.energy_value = value;
    sol.residual = residual;
    sol.iterations = iter;
    sol.converged = converged;
    sol.level = out.c_m_estimate;
    sol.level_tag = "mountain-pass";

    double S_est = settings.S_est;
    if (S_est <= 0.0)
        S_est = estimate_sobolev_constant(spec, modulus_field(u0), {}).S_est;
    const Thresholds th = thresholds(spec, S_est);
    out.c_ps = th.c_ps;
    out.below_c_ps = out.c_m_estimate < out.c_ps;
    if (!out.below_c_ps) {
        if (!out.warning.empty()) out.warning += "; ";
        out.warning += "mountain-pass estimate is not below c_PS; the compactness range of the "
                       "critical problem is not certified at these parameters";
    }
    return out;
}

double phase_distance(const ComplexField& u, const ComplexField& v, double p, int samples) {
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < samples; ++t) {
        const double theta = 2.0 * M_PI * static_cast<double>(t) / static_cast<double>(samples);
        const cplx ph{std::cos(theta), std::sin(theta)};
        ComplexField diff = u;
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= ph * v[k];
        best = std::min(best, weighted_lp_norm(diff, p));
    }
    return best;
}

namespace {

/// Node permutation of the symmetry generator R: point reflection for
/// order 2, quarter turn in the (x1, x2) plane for order 4.
std::vector<std::size_t> symmetry_permutation(const Grid& g, int order) {
    if (order == 4 && g.dim() < 2)
        throw std::invalid_argument("multistart_negative: quarter-turn symmetry needs dim >= 2");
    const int n = g.nodes_per_axis();
    std::vector<std::size_t> perm(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto idx = g.unflatten(k);
        std::array<int, 3> src = idx;
        if (order == 2) {
            for (int a = 0; a < g.dim(); ++a)
                src[static_cast<std::size_t>(a)] = n - 1 - idx[static_cast<std::size_t>(a)];
        } else {
            // (P u)(x, y) samples u at R^{-1}(x, y) = (y, -x)
            src[0] = idx[1];
            src[1] = n - 1 - idx[0];
        }
        perm[k] = g.flatten(src);
    }
    return perm;
}

/// Projects onto the sector u(R x) = omega^m u(x), omega = e^{2 pi i/order}.
ComplexField sector_project(const ComplexField& u, const std::vector<std::size_t>& perm, int order,
                            int m) {
    const std::size_t M = u.size();
    ComplexField out(u.grid_ptr());
    std::vector<cplx> rotated(u.values());
    const double scale = 1.0 / static_cast<double>(order);
    for (int t = 0; t < order; ++t) {
        const double angle = -2.0 * M_PI * static_cast<double>(m * t) / static_cast<double>(order);
        const cplx w = std::polar(scale, angle);
        for (std::size_t k = 0; k < M; ++k) out[k] += w * rotated[k];
        if (t + 1 < order) {
            std::vector<cplx> next(M);
            for (std::size_t k = 0; k < M; ++k) next[k] = rotated[perm[k]];
            rotated.swap(next);
        }
    }
    return out;
}

/// Greedy farthest-point sample of the nodes where H > 0.
std::vector<std::size_t> bump_centers(const ProblemSpec& spec, int count) {
    const Grid& g = *spec.grid;
    std::vector<std::size_t> support;
    double hmax = 0.0;
    for (std::size_t k = 0; k < spec.H.size(); ++k) hmax = std::max(hmax, spec.H[k]);
    for (std::size_t k = 0; k < spec.H.size(); ++k)
        if (spec.H[k] > 0.05 * hmax) support.push_back(k);
    if (support.empty()) return {};

    std::vector<std::size_t> centers;
    // Start at the strongest H node.
    std::size_t first = support.front();
    for (std::size_t k : support)
        if (spec.H[k] > spec.H[first]) first = k;
    centers.push_back(first);
    while (static_cast<int>(centers.size()) < count) {
        std::size_t best = support.front();
        double best_dist = -1.0;
        for (std::size_t k : support) {
            double dmin = std::numeric_limits<double>::infinity();
            const Point xk = g.coord(k);
            for (std::size_t c : centers) {
                const Point xc = g.coord(c);
                const Point diff{xk[0] - xc[0], xk[1] - xc[1], xk[2] - xc[2]};
                dmin = std::min(dmin, norm2(diff));
            }
            if (dmin > best_dist) {
                best_dist = dmin;
                best = k;
            }
        }
        centers.push_back(best);
        if (best_dist == 0.0) break;  // support exhausted
    }
    return centers;
}

}  // namespace

MultistartOutcome multistart_negative(const ProblemSpec& spec, const TruncationProfile& profile,
                                      int k, const MultistartSettings& settings) {
    if (!(spec.q < spec.p))
        throw std::invalid_argument("multistart_negative: requires 1 < q < p");
    if (k < 1) throw std::invalid_argument("multistart_negative: need k >= 1 starts");

    MultistartOutcome out;
    if (profile.T0 <= 0.0) {
        out.diagnostic = "T0 = 0: the truncated functional has no negative well (lambda = 0?)";
        return out;
    }

    const Grid& g = *spec.grid;
    const auto centers = bump_centers(spec, k);
    if (centers.empty()) {
        out.diagnostic = "H vanishes everywhere; no admissible starts";
        return out;
    }
    const double width = 0.35 * g.half_width();
    std::vector<ComplexField> bumps;
    for (std::size_t c : centers) {
        const Point xc = g.coord(c);
        bumps.push_back(sample_field(
            [&](const Point& x) {
                const Point d{x[0] - xc[0], x[1] - xc[1], x[2] - xc[2]};
                return cplx{std::exp(-norm2(d) / (width * width)), 0.0};
            },
            spec.grid));
    }

    Rng rng(settings.seed);
    const double target = settings.start_fraction * profile.T0;

    const int order = std::max(1, settings.symmetry_order);
    std::vector<std::size_t> perm;
    if (order > 1) perm = symmetry_permutation(g, order);

    for (int j = 1; j <= k; ++j) {
        ++out.starts_tried;
        const int sector = (j - 1) % order;

        // Random point of the span of the first min(j, #bumps) bumps,
        // projected onto this start's symmetry sector.
        ComplexField start(spec.grid);
        const int jb = std::min<int>(j, static_cast<int>(bumps.size()));
        for (int i = 0; i < jb; ++i) {
            const cplx c = rng.complex_normal();
            for (std::size_t idx = 0; idx < start.size(); ++idx) start[idx] += c * bumps[static_cast<std::size_t>(i)][idx];
        }
        if (order > 1) start = sector_project(start, perm, order, sector);
        const double sn = seminorm(start, spec);
        if (sn == 0.0) continue;
        start = scaled(start, cplx{target / sn, 0.0});

        // Shrink until the truncated functional is negative at the start.
        bool negative = false;
        for (int shrink = 0; shrink < 60; ++shrink) {
            if (truncated_energy(start, spec, profile) < 0.0) {
                negative = true;
                break;
            }
            start = scaled(start, cplx{0.5, 0.0});
        }
        if (!negative) continue;
        ++out.starts_negative;

        SolveResult sol;
        if (order > 1) {
            // Sector-constrained descent: for symmetry-invariant specs the
            // sector minimiser is a genuine critical point (the full
            // gradient is sector-valued), which realises the multiplicity
            // construction over nested symmetric classes.
            DescendSettings ds = settings.descend;
            auto project = [&](const ComplexField& v) {
                return sector_project(v, perm, order, sector);
            };
            sol = descend_impl(
                start, spec, ds,
                [&](const ComplexField& v) { return truncated_energy(v, spec, profile); },
                [&](const ComplexField& v) {
                    return project(truncated_energy_gradient(v, spec, profile));
                },
                "truncated-energy");
            // honest convergence: re-measure the unprojected residual
            sol.residual = gradient_residual(truncated_energy_gradient(sol.field, spec, profile));
            sol.converged = sol.residual < ds.residual_tol;
        } else {
            sol = descend_truncated(start, spec, profile, settings.descend);
        }

        // Keep only solutions in the regime where the truncation is inert.
        const double sol_norm = seminorm(sol.field, spec);
        if (sol_norm > profile.T0) continue;
        const double e = energy(sol.field, spec);
        if (!(e < 0.0)) continue;
        sol.energy_value = e;
        sol.level = e;
        sol.level_tag = "negative";

        bool duplicate = false;
        for (const auto& kept : out.solutions) {
            if (phase_distance(sol.field, kept.field, spec.p, settings.phase_samples) <=
                settings.dedup_delta) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) out.solutions.push_back(std::move(sol));
    }

    if (out.solutions.empty() && out.starts_negative == 0)
        out.diagnostic = "no start achieved E_infty < 0; lambda may be too small for the chosen "
                         "bump scales or H is too weak";
    return out;
}

}  // namespace fmpl
