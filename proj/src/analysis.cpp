#include "fmpl/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fmpl {

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_deriv(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double rayleigh_quotient(const ComplexField& u, const ProblemSpec& spec) {
    const double denom = weighted_lp_norm(u, spec.p_star());
    if (denom == 0.0) throw std::invalid_argument("rayleigh_quotient: field is identically zero");
    return seminorm_p(u, spec) / std::pow(denom, spec.p);
}

namespace {

ComplexField normalized_p_star(const ComplexField& u, double p_star) {
    const double n = weighted_lp_norm(u, p_star);
    if (n == 0.0) throw std::invalid_argument("sobolev descent: zero iterate");
    ComplexField v = u;
    for (std::size_t k = 0; k < v.size(); ++k) v[k] /= n;
    return v;
}

ComplexField pointwise_multiply(const RealField& w, const ComplexField& u) {
    ComplexField out = u;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] *= w[k];
    return out;
}

}  // namespace

namespace {

SobolevEstimate descend_quotient(const ProblemSpec& spec, const ComplexField& init,
                                 const SobolevSettings& settings) {
    const double ps = spec.p_star();
    const double p = spec.p;

    ComplexField u = normalized_p_star(init, ps);
    double quotient = seminorm_p(u, spec);  // ||u||_{p*} = 1
    if (!std::isfinite(quotient))
        throw std::runtime_error("estimate_sobolev_constant: non-finite quotient");

    SobolevEstimate result;
    result.trace.emplace_back(0, quotient);

    double step = settings.step;
    int iter = 0;
    for (; iter < settings.max_iters; ++iter) {
        // dR[v] at ||u||_{p*}=1 is p * (2 Op(u) - R |u|^{p*-2} u) paired with v.
        ComplexField grad = apply_operator(u, spec);
        for (std::size_t k = 0; k < grad.size(); ++k)
            grad[k] = p * (2.0 * grad[k] - quotient * phi_p(u[k], ps));

        double grad_norm2 = 0.0;
        for (std::size_t k = 0; k < grad.size(); ++k) grad_norm2 += std::norm(grad[k]);
        grad_norm2 *= spec.grid->cell_volume();
        if (grad_norm2 == 0.0) break;

        // Scale-free trial step, halved until the quotient decreases.
        bool moved = false;
        double gamma = step / (1.0 + std::sqrt(grad_norm2));
        for (int halving = 0; halving < 40; ++halving) {
            ComplexField trial = u;
            for (std::size_t k = 0; k < trial.size(); ++k) trial[k] -= gamma * grad[k];
            double trial_quotient;
            try {
                trial = normalized_p_star(trial, ps);
                trial_quotient = seminorm_p(trial, spec);
            } catch (const std::invalid_argument&) {
                gamma *= 0.5;
                continue;
            }
            if (std::isfinite(trial_quotient) && trial_quotient < quotient) {
                const double drop = quotient - trial_quotient;
                u = std::move(trial);
                quotient = trial_quotient;
                result.trace.emplace_back(iter + 1, quotient);
                moved = true;
                if (drop < settings.tol) iter = settings.max_iters;  // converged
                break;
            }
            gamma *= 0.5;
        }
        if (!moved) break;
        step = std::min(step * 1.5, settings.step * 8.0);
    }

    result.minimizer = std::move(u);
    result.S_est = quotient;
    result.iterations = static_cast<int>(result.trace.size()) - 1;
    return result;
}

}  // namespace

SobolevEstimate estimate_sobolev_constant(const ProblemSpec& spec, const ComplexField& init,
                                          const SobolevSettings& settings) {
    if (!init.compatible_with(*spec.grid))
        throw std::invalid_argument("estimate_sobolev_constant: init on a different grid");

    // Rough inits can strand the descent on excited critical points of the
    // quotient (split-bump states), so run a small deterministic seed family
    // and keep the lowest run: the caller's init, its modulus (the
    // diamagnetically favoured rearrangement), a low-passed modulus, and a
    // canonical centred bump.
    std::vector<ComplexField> seeds;
    seeds.push_back(init);
    seeds.push_back(modulus_field(init));
    {
        const Grid& g = *spec.grid;
        const int m = std::max(1, static_cast<int>(std::floor(4.0 / g.half_width())));
        if (1.0 / m >= g.spacing()) seeds.push_back(mollify(seeds.back(), m));
        const double w2 = std::pow(g.half_width() / 3.0, 2.0);
        seeds.push_back(sample_field(
            [w2](const Point& x) { return cplx{std::exp(-norm2(x) / w2), 0.0}; }, spec.grid));
    }

    SobolevEstimate best;
    bool have = false;
    for (const auto& seed : seeds) {
        if (weighted_lp_norm(seed, spec.p_star()) == 0.0) {
            if (!have && &seed == &seeds.front())
                throw std::invalid_argument("estimate_sobolev_constant: init is identically zero");
            continue;
        }
        SobolevEstimate run = descend_quotient(spec, seed, settings);
        if (!have || run.S_est < best.S_est) {
            best = std::move(run);
            have = true;
        }
    }
    return best;
}

std::vector<std::pair<double, double>> sobolev_equality_curve(const ComplexField& u,
                                                              const ProblemSpec& spec,
                                                              const std::vector<double>& sigmas,
                                                              int refine) {
    if (refine < 1) throw std::invalid_argument("sobolev_equality_curve: refine must be >= 1");
    const Grid& g = u.grid();
    GridPtr fine = make_grid(g.dim(), refine * g.nodes_per_axis(), g.half_width());

    ProblemSpec fine_spec;
    fine_spec.grid = fine;
    fine_spec.s = spec.s;
    fine_spec.p = spec.p;
    fine_spec.q = spec.q;
    fine_spec.lambda = 0.0;
    fine_spec.H = sample_real_field([](const Point&) { return 1.0; }, fine);
    fine_spec.K = sample_real_field([](const Point&) { return 1.0; }, fine);
    fine_spec.A = spec.A;
    fine_spec.tail_correction = spec.tail_correction;

    const double peak = max_abs(u);
    std::vector<std::pair<double, double>> curve;
    curve.reserve(sigmas.size());
    for (double sigma : sigmas) {
        if (sigma > 1.0) {
            // Support must fit after dilation by sigma.
            const double inner = g.half_width() / sigma;
            for (std::size_t k = 0; k < u.size(); ++k) {
                const Point x = g.coord(k);
                bool outside = false;
                for (int a = 0; a < g.dim(); ++a)
                    if (std::abs(x[static_cast<std::size_t>(a)]) > inner) outside = true;
                if (outside && std::abs(u[k]) > 1e-12 * peak)
                    throw std::invalid_argument(
                        "sobolev_equality_curve: rescaled support escapes the box at sigma = " +
                        std::to_string(sigma));
            }
        }
        ComplexField us = rescale(u, sigma, spec.s, spec.p, fine);
        curve.emplace_back(sigma, seminorm_p(us, fine_spec));
    }
    return curve;
}

ComplexField mollify(const ComplexField& u, int m) {
    if (m < 1) throw std::invalid_argument("mollify: index must be >= 1");
    const Grid& g = u.grid();
    const double h = g.spacing();
    const double radius = 1.0 / static_cast<double>(m);
    if (radius < h)
        throw std::invalid_argument("mollify: mollifier radius 1/" + std::to_string(m) +
                                    " is below one cell (h = " + std::to_string(h) + ")");

    // Friedrichs bump exp(-1/(1-|mz|^2)) sampled on the lattice and
    // renormalised to unit discrete mass.
    const int reach = static_cast<int>(std::floor(radius / h));
    std::vector<std::array<int, 3>> offsets;
    std::vector<double> weights;
    const int lo = -reach, hi = reach;
    std::array<int, 3> d{0, 0, 0};
    double mass = 0.0;
    std::function<void(int)> rec = [&](int axis) {
        if (axis == g.dim()) {
            double r2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                const double z = static_cast<double>(d[static_cast<std::size_t>(a)]) * h * m;
                r2 += z * z;
            }
            if (r2 >= 1.0) return;
            const double w = std::exp(-1.0 / (1.0 - r2));
            offsets.push_back(d);
            weights.push_back(w);
            mass += w;
            return;
        }
        for (int v = lo; v <= hi; ++v) {
            d[static_cast<std::size_t>(axis)] = v;
            rec(axis + 1);
        }
    };
    rec(0);

    const double hn = g.cell_volume();
    const double scale = 1.0 / (mass * hn);  // discrete unit mass
    for (double& w : weights) w *= scale;

    ComplexField out(u.grid_ptr());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto idx = g.unflatten(k);
        cplx acc{0.0, 0.0};
        for (std::size_t t = 0; t < offsets.size(); ++t) {
            std::array<int, 3> src = idx;
            for (int a = 0; a < g.dim(); ++a)
                src[static_cast<std::size_t>(a)] -= offsets[t][static_cast<std::size_t>(a)];
            if (!g.index_in_range(src)) continue;  // zero extension
            acc += weights[t] * u[g.flatten(src)];
        }
        out[k] = acc * hn;
    }
    return out;
}

std::vector<std::pair<int, double>> mollifier_convergence_curve(const ComplexField& u,
                                                                const ProblemSpec& spec,
                                                                const std::vector<int>& m_list) {
    std::vector<std::pair<int, double>> curve;
    curve.reserve(m_list.size());
    for (int m : m_list) {
        ComplexField diff = mollify(u, m);
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= u[k];
        curve.emplace_back(m, seminorm(diff, spec));
    }
    return curve;
}

RealField cutoff_annulus(GridPtr grid, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("cutoff_annulus: radius must be positive");
    return sample_real_field(
        [r](const Point& x) {
            const double rho = std::sqrt(norm2(x));
            return smoothstep((rho - r) / r);
        },
        grid);
}

std::vector<std::pair<double, double>> cutoff_tail_curve(const ComplexField& u,
                                                         const ProblemSpec& spec,
                                                         const std::vector<double>& radii) {
    std::vector<std::pair<double, double>> curve;
    curve.reserve(radii.size());
    for (double r : radii) {
        const RealField phi = cutoff_annulus(u.grid_ptr(), r);
        curve.emplace_back(r, seminorm(pointwise_multiply(phi, u), spec));
    }
    return curve;
}

}  // namespace fmpl
