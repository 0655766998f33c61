#include "fmpl/energy.hpp"

#include "fmpl/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fmpl {

namespace {

double pow_p(double m, double p) { return p == 2.0 ? m * m : std::pow(m, p); }

/// sum w |u|^e h^N
double weighted_power_sum(const RealField& w, const ComplexField& u, double e) {
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) acc += w[k] * pow_p(std::abs(u[k]), e);
    return acc * u.grid().cell_volume();
}

}  // namespace

double energy(const ComplexField& u, const ProblemSpec& spec) {
    const double ps = spec.p_star();
    double value = seminorm_p(u, spec) / spec.p;
    value -= (spec.lambda / spec.q) * weighted_power_sum(spec.H, u, spec.q);
    value -= weighted_power_sum(spec.K, u, ps) / ps;
    return value;
}

ComplexField energy_gradient(const ComplexField& u, const ProblemSpec& spec) {
    const double ps = spec.p_star();
    ComplexField g = apply_operator(u, spec);
    for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] = 2.0 * g[k] - spec.lambda * spec.H[k] * phi_p(u[k], spec.q) -
               spec.K[k] * phi_p(u[k], ps);
    }
    return g;
}

double gradient_residual(const ComplexField& gradient) {
    double acc = 0.0;
    for (std::size_t k = 0; k < gradient.size(); ++k) acc += std::norm(gradient[k]);
    return std::sqrt(acc * gradient.grid().cell_volume());
}

double TruncationProfile::g(double t) const {
    return coeff_p * std::pow(t, exp_p) - coeff_q * std::pow(t, exp_q) -
           coeff_ps * std::pow(t, exp_ps);
}

double TruncationProfile::g_infty(double t) const {
    return coeff_p * std::pow(t, exp_p) - coeff_q * std::pow(t, exp_q) -
           coeff_ps * tau(t) * std::pow(t, exp_ps);
}

double TruncationProfile::tau(double t) const {
    if (t <= T0) return 1.0;
    if (t >= T1) return 0.0;
    return 1.0 - smoothstep((t - T0) / (T1 - T0));
}

double TruncationProfile::tau_deriv(double t) const {
    if (t <= T0 || t >= T1) return 0.0;
    return -smoothstep_deriv((t - T0) / (T1 - T0)) / (T1 - T0);
}

namespace {

double bisect_root(const TruncationProfile& prof, double lo, double hi) {
    double flo = prof.g(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = prof.g(mid);
        if (std::abs(fmid) < 1e-10 * std::max(1.0, std::abs(prof.coeff_p)) || hi - lo < 1e-15 * hi)
            return mid;
        if ((flo < 0.0) == (fmid < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TruncationProfile truncation_profile(const ProblemSpec& spec, double S_est) {
    if (!(spec.q < spec.p))
        throw std::invalid_argument("truncation_profile: requires 1 < q < p, got q = " +
                                    std::to_string(spec.q) + ", p = " + std::to_string(spec.p));
    if (!(S_est > 0.0)) throw std::invalid_argument("truncation_profile: S estimate must be positive");

    const double ps = spec.p_star();
    TruncationProfile prof;
    prof.exp_p = spec.p;
    prof.exp_q = spec.q;
    prof.exp_ps = ps;
    prof.coeff_p = 1.0 / spec.p;
    prof.coeff_q = (spec.lambda / spec.q) * spec.H_norm() * std::pow(S_est, -spec.q / spec.p);
    prof.coeff_ps = (1.0 / ps) * spec.K_sup() * std::pow(S_est, -ps / spec.p);

    if (prof.coeff_ps <= 0.0)
        throw std::invalid_argument("truncation_profile: K vanishes, g has no second root");

    // Peak of g1(t) = t^p/p - coeff_ps t^{p*}, at t^{p*-p} = S^{p*/p}/||K||.
    const double t_star = std::pow(1.0 / (ps * prof.coeff_ps), 1.0 / (ps - spec.p));

    if (prof.g(t_star) <= 0.0)
        throw std::invalid_argument(
            "truncation_profile: no truncation window (lambda too large, g(t*) = " +
            std::to_string(prof.g(t_star)) + ")");

    // T0: either 0 when lambda = 0 (g >= 0 near the origin) or the sign
    // change in (0, t*).
    if (prof.coeff_q == 0.0) {
        prof.T0 = 0.0;
    } else {
        double lo = t_star;
        while (prof.g(lo) > 0.0 && lo > 1e-300) lo *= 0.5;
        prof.T0 = bisect_root(prof, lo, t_star);
    }

    // T1: sign change beyond t*.
    double hi = t_star;
    double cap = 10.0 * t_star;
    while (prof.g(hi) > 0.0 && hi < cap) hi *= 1.25;
    if (prof.g(hi) > 0.0)
        throw std::runtime_error("truncation_profile: bracketing cap reached for T1");
    prof.T1 = bisect_root(prof, t_star, hi);
    return prof;
}

double truncated_energy(const ComplexField& u, const ProblemSpec& spec,
                        const TruncationProfile& profile) {
    const double ps = spec.p_star();
    const double sn = seminorm(u, spec);
    double value = std::pow(sn, spec.p) / spec.p;
    value -= (spec.lambda / spec.q) * weighted_power_sum(spec.H, u, spec.q);
    value -= profile.tau(sn) * weighted_power_sum(spec.K, u, ps) / ps;
    return value;
}

ComplexField truncated_energy_gradient(const ComplexField& u, const ProblemSpec& spec,
                                       const TruncationProfile& profile) {
    const double ps = spec.p_star();
    const double snp = seminorm_p(u, spec);
    const double sn = std::pow(snp, 1.0 / spec.p);
    const double tau = profile.tau(sn);
    const double dtau = profile.tau_deriv(sn);

    ComplexField op = apply_operator(u, spec);
    // d tau([u]) contributes through the seminorm derivative:
    // d[u][v] = [u]^{1-p} pairing(u, v).
    double chain = 1.0;
    if (dtau != 0.0 && sn > 0.0) {
        const double k_term = weighted_power_sum(spec.K, u, ps);
        chain = 1.0 - (dtau / ps) * k_term * std::pow(sn, 1.0 - spec.p);
    }
    ComplexField g(u.grid_ptr());
    for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] = 2.0 * chain * op[k] - spec.lambda * spec.H[k] * phi_p(u[k], spec.q) -
               tau * spec.K[k] * phi_p(u[k], ps);
    }
    return g;
}

Thresholds thresholds(const ProblemSpec& spec, double S_est) {
    if (!(S_est > 0.0)) throw std::invalid_argument("thresholds: S estimate must be positive");
    const double N = static_cast<double>(spec.grid->dim());
    const double s = spec.s, p = spec.p, q = spec.q;
    const double ps = spec.p_star();

    Thresholds th;
    th.S_est = S_est;
    th.H_norm_r = spec.H_norm();
    th.K_sup = spec.K_sup();

    th.lambda_star = th.H_norm_r > 0.0 ? S_est / th.H_norm_r : 0.0;

    th.c_ps = (s / N) * std::pow(S_est, N / (s * p)) /
              (th.K_sup > 0.0 ? std::pow(th.K_sup, N / (s * ps)) : 1.0);

    th.lambda_star_1 = th.H_norm_r > 0.0
                           ? (s * q) / (N * th.H_norm_r) *
                                 std::pow(S_est, (N + q * (s - N)) / (s * p)) *
                                 std::pow(th.K_sup, (N - s * p) * (q - 1.0) / (s * p))
                           : 0.0;

    th.lambda_star_2 =
        th.H_norm_r > 0.0
            ? std::pow(th.c_ps, (p - q) / p) /
                  (std::pow(N, q / p) * (1.0 / q - 1.0 / ps) * std::pow(S_est, -q / p) * th.H_norm_r)
            : 0.0;

    if (th.K_sup > 0.0) {
        th.t_star = std::pow(std::pow(S_est, ps / p) / th.K_sup, 1.0 / (ps - p));
        th.g1_at_t_star = (s / N) * std::pow(th.t_star, p);
    }

    // PS-sequence bound at negative levels for q < p.
    if (q < p && th.H_norm_r > 0.0) {
        const double bracket =
            N * std::pow(S_est, -q / p) * th.H_norm_r * (1.0 / q - 1.0 / ps);
        th.ps_norm_bound = std::pow(spec.lambda, 1.0 / (p - q)) * std::pow(bracket, 1.0 / (p - q));
    }
    return th;
}

}  // namespace fmpl
