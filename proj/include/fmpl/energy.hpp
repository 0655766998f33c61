#pragma once

#include "fmpl/kernel.hpp"
#include "fmpl/problem.hpp"

namespace fmpl {

/// E(u) = (1/p)[u]^p - (lambda/q) sum H|u|^q h^N - (1/p*) sum K|u|^{p*} h^N.
double energy(const ComplexField& u, const ProblemSpec& spec);

/// Field g with E'(u)[v] = Re sum g conj(v) h^N:
/// g = 2 apply_operator(u) - lambda H |u|^{q-2}u - K |u|^{p*-2}u.
ComplexField energy_gradient(const ComplexField& u, const ProblemSpec& spec);

/// L^2 norm of the gradient field scaled by the cell measure; the working
/// proxy for the dual norm of E'(u).
double gradient_residual(const ComplexField& gradient);

/// Coefficients and roots of g(t) = t^p/p - (lambda/q)||H||_r S^{-q/p} t^q
/// - (1/p*)||K||_inf S^{-p*/p} t^{p*}, plus the smooth switch tau used by the
/// truncated functional.
struct TruncationProfile {
    double T0 = 0.0;
    double T1 = 0.0;
    double coeff_p = 0.0;   // 1/p
    double coeff_q = 0.0;   // (lambda/q) ||H||_r S^{-q/p}
    double coeff_ps = 0.0;  // (1/p*) ||K||_inf S^{-p*/p}
    double exp_p = 0.0;
    double exp_q = 0.0;
    double exp_ps = 0.0;

    double g(double t) const;
    double g_infty(double t) const;
    /// 1 on [0, T0], 0 on [T1, inf), quintic smoothstep between.
    double tau(double t) const;
    double tau_deriv(double t) const;
};

/// Root-finds T0 <= T1 by bisection (tolerance 1e-10); requires 1 < q < p and
/// throws "no truncation window" when g has no positive region.
TruncationProfile truncation_profile(const ProblemSpec& spec, double S_est);

/// E_infty(u): the critical term is switched off smoothly above T1.
double truncated_energy(const ComplexField& u, const ProblemSpec& spec,
                        const TruncationProfile& profile);

ComplexField truncated_energy_gradient(const ComplexField& u, const ProblemSpec& spec,
                                       const TruncationProfile& profile);

/// Closed-form thresholds of the critical problem, dimension-generalised
/// from the N = 3 statements (3 -> N, s/3 -> s/N).
struct Thresholds {
    double H_norm_r = 0.0;
    double K_sup = 0.0;
    double S_est = 0.0;
    double lambda_star = 0.0;    // S / ||H||_r, the q = p mountain-pass bound
    double lambda_star_1 = 0.0;  // genus-geometry bound
    double lambda_star_2 = 0.0;  // PS-compactness bound for q < p
    double c_ps = 0.0;           // (s/N) S^{N/(sp)} / ||K||^{N/(s p*)}
    double t_star = 0.0;         // argmax of g1
    double g1_at_t_star = 0.0;   // equals c_ps
    double ps_norm_bound = 0.0;  // negative-level PS bound on [u] (q < p only)
};

Thresholds thresholds(const ProblemSpec& spec, double S_est);

}  // namespace fmpl
