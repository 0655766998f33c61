#pragma once

#include <utility>
#include <vector>

#include "fmpl/kernel.hpp"
#include "fmpl/problem.hpp"

namespace fmpl {

/// Quintic smoothstep: 0 at t<=0, 1 at t>=1, C^2 across the joints.
double smoothstep(double t);
double smoothstep_deriv(double t);

struct SobolevEstimate {
    double S_est = 0.0;
    ComplexField minimizer;
    std::vector<std::pair<int, double>> trace;  // (iterate, Rayleigh quotient)
    int iterations = 0;
};

struct SobolevSettings {
    int max_iters = 200;
    double step = 0.5;
    double tol = 1e-10;
};

/// Rayleigh quotient [u]_{A,s,p}^p / ||u||_{p*}^p of a nonzero field.
double rayleigh_quotient(const ComplexField& u, const ProblemSpec& spec);

/// Projected descent on the Rayleigh quotient with renormalisation
/// ||u||_{p*} = 1 each step; the quotient trace is non-increasing.
SobolevEstimate estimate_sobolev_constant(const ProblemSpec& spec, const ComplexField& init,
                                          const SobolevSettings& settings = {});

/// Magnetic seminorm^p of u_sigma for each sigma, evaluated on a refined
/// grid (refine x nodes). Decreases toward the non-magnetic value as
/// sigma -> 0 when A is linear.
std::vector<std::pair<double, double>> sobolev_equality_curve(const ComplexField& u,
                                                              const ProblemSpec& spec,
                                                              const std::vector<double>& sigmas,
                                                              int refine = 2);

/// Discrete Friedrichs mollification u * rho_m with rho supported on the
/// ball of radius 1/m and renormalised to unit discrete mass.
ComplexField mollify(const ComplexField& u, int m);

/// (m, [u*rho_m - u]_{A,s,p}) for each entry of m_list.
std::vector<std::pair<int, double>> mollifier_convergence_curve(const ComplexField& u,
                                                                const ProblemSpec& spec,
                                                                const std::vector<int>& m_list);

/// Cut-off phi_r: 0 on B_r, 1 outside B_{2r}, quintic smoothstep between.
RealField cutoff_annulus(GridPtr grid, double r);

/// (r, [phi_r u]_{A,s,p}) for each radius; exactly zero once B_r covers the
/// support of u.
std::vector<std::pair<double, double>> cutoff_tail_curve(const ComplexField& u,
                                                         const ProblemSpec& spec,
                                                         const std::vector<double>& radii);

}  // namespace fmpl
