#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmpl/energy.hpp"
#include "fmpl/problem.hpp"

namespace fmpl {

struct SolveResult {
    ComplexField field;
    double energy_value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    double level = 0.0;  // mountain-pass estimate or negative level
    std::string level_tag;
    bool converged = false;
    std::vector<std::pair<double, double>> trace;  // (energy, residual) per iterate
};

struct DescendSettings {
    int max_iters = 5000;
    double step0 = 0.0;  // <= 0: 1e-2 (1 + [u])^{1-p}
    double residual_tol = 1e-6;
    int max_halvings = 40;
};

/// Smallest t on a doubling scan from 1 with E(t u0) < 0.
double find_t_escape(const ComplexField& u0, const ProblemSpec& spec);

/// Backtracking gradient descent on E; the energy trace is non-increasing
/// and iteration stops at residual < residual_tol or max_iters.
SolveResult descend(const ComplexField& u_init, const ProblemSpec& spec,
                    const DescendSettings& settings = {});

/// Same scheme on the truncated functional E_infty.
SolveResult descend_truncated(const ComplexField& u_init, const ProblemSpec& spec,
                              const TruncationProfile& profile,
                              const DescendSettings& settings = {});

struct MountainPassSettings {
    int path_points = 33;
    int refine_iters = 5000;
    double residual_tol = 1e-5;
    double S_est = 0.0;  // <= 0: estimate internally from |u0|
};

struct MountainPassResult {
    SolveResult solution;
    double c_m_estimate = 0.0;  // max path energy before refinement
    double t_escape = 0.0;
    double c_ps = 0.0;
    bool below_c_ps = false;
    std::string warning;
};

/// Samples the segment path tau -> tau t_u u0, takes the max-energy sample
/// and refines it by descent constrained to the ray maximum (the natural
/// stand-in for the min-max level when p < q < p*).
MountainPassResult mountain_pass(const ProblemSpec& spec, const ComplexField& u0,
                                 const MountainPassSettings& settings = {});

struct MultistartSettings {
    std::uint64_t seed = 1;
    DescendSettings descend;
    double dedup_delta = 1e-3;
    int phase_samples = 32;
    double start_fraction = 0.9;  // starts scaled to seminorm T0 * fraction
    // Starts cycle through the phase-rotation symmetry sectors
    // u(R x) = omega^m u(x) when > 1 (2: point reflection, any dim;
    // 4: quarter turn, dim 2). Needs H, K and A invariant under R; sector
    // minimisers are then critical points of the full functional.
    int symmetry_order = 1;
};

struct MultistartOutcome {
    std::vector<SolveResult> solutions;
    int starts_tried = 0;
    int starts_negative = 0;  // starts that achieved E_infty < 0
    std::string diagnostic;
};

/// k starts drawn from nested spans of smooth bumps supported where H > 0,
/// scaled below T0 so E_infty < 0, descended on E_infty, deduplicated up to
/// a global phase. Every returned solution has [u] <= T0 (so E_infty = E)
/// and E < 0.
MultistartOutcome multistart_negative(const ProblemSpec& spec, const TruncationProfile& profile,
                                      int k, const MultistartSettings& settings = {});

/// min over sampled global phases of ||u - e^{i theta} v||_{L^p}.
double phase_distance(const ComplexField& u, const ComplexField& v, double p, int samples = 32);

}  // namespace fmpl
