#pragma once

#include <span>
#include <vector>

#include "fmpl/kernel.hpp"
#include "fmpl/problem.hpp"

namespace fmpl {

/// Per-index densities |u_n|^{p*} (nu) and |D^s_A u_n|^p (mu) of a sequence.
struct MeasureProfile {
    std::vector<RealField> nu;
    std::vector<RealField> mu;
};

MeasureProfile measure_profile(const std::vector<ComplexField>& sequence, const ProblemSpec& spec);

/// Mass of a density inside the closed euclidean ball B_eps(center).
double ball_mass(const RealField& density, const Point& center, double eps);

double total_mass(const RealField& density);

/// u_n = rescale(u, sigma_n) translated to centers[n] (lattice-snapped).
/// Centers are interpreted as offsets from the origin.
std::vector<ComplexField> bubble_sequence(const ComplexField& u, const std::vector<Point>& centers,
                                          const std::vector<double>& sigmas, double s, double p);

struct Atom {
    Point x{0.0, 0.0, 0.0};
    std::size_t node = 0;
    double nu = 0.0;
    double mu = 0.0;
    double relation_lhs = 0.0;  // S_est * nu^{p/p*}
    bool relation_holds = false;
};

struct AtomScanSettings {
    double dominance = 0.5;     // ball mass fraction that flags an atom
    double tolerance = 0.05;    // slack in S nu^{p/p*} <= mu (1 + tol)
    std::size_t max_atoms = 8;  // coalesced report cap
};

/// Detects concentration points of the final sequence element: nodes whose
/// smallest-radius nu ball carries at least `dominance` of the total mass.
/// Candidates closer than 2 eps coalesce into the strongest one; ball masses
/// are evaluated at the largest radius of eps_list.
std::vector<Atom> atom_scan(const std::vector<ComplexField>& sequence, const ProblemSpec& spec,
                            const std::vector<double>& eps_list, double S_est,
                            const AtomScanSettings& settings = {});

struct TailMasses {
    std::vector<std::array<double, 3>> per_radius;  // (R, nu outside, mu outside)
    double nu_infinity = 0.0;
    double mu_infinity = 0.0;
    double bookkeeping_error = 0.0;  // max |inner + tail - total| over fields
};

/// sup over the late half of the sequence of the mass outside B_R, reported
/// at the largest radius.
TailMasses tail_masses(const std::vector<ComplexField>& sequence, const ProblemSpec& spec,
                       const std::vector<double>& R_list);

struct ReverseHolderReport {
    double lhs = 0.0;        // S^{1/p} (sum |phi|^{p*} dnu)^{1/p*}
    double mu_term = 0.0;    // (sum |phi|^p dmu)^{1/p}
    double cross_term = 0.0; // ||u D^s phi||_{L^p}
    double defect = 0.0;     // lhs - mu_term - cross_term; <= 0 when it holds
};

/// Discrete reverse Hoelder inequality with the Minkowski cross-term
/// allowance ||u_n D^s phi||_p.
ReverseHolderReport reverse_holder_check(const ComplexField& u_n, const RealField& phi,
                                         const ProblemSpec& spec, double S_est);

struct SimonCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 0.0;
    bool holds = false;
};

/// Scan-calibrated constant for the complex Simon inequality at exponent p.
double simon_constant(double p);

/// Complex Simon inequality for vectors a, b:
///   p >= 2:   |a-b|^p <= C_p Re<phi_p(a) - phi_p(b), a - b>
///   1 < p < 2: |a-b|^p <= C_p (Re<...>)^{p/2} (|a|^p + |b|^p)^{(2-p)/2}.
SimonCheck simon_check(std::span<const cplx> a, std::span<const cplx> b, double p);
SimonCheck simon_check(cplx a, cplx b, double p);

}  // namespace fmpl
