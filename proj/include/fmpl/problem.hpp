#pragma once

#include "fmpl/grid.hpp"
#include "fmpl/potential.hpp"

namespace fmpl {

/// Problem data for (-Delta)^s_{p,A} u = lambda H |u|^{q-2} u + K |u|^{p*-2} u
/// on the truncated lattice: exponents, weights and potential.
struct ProblemSpec {
    GridPtr grid;
    double s = 0.5;
    double p = 2.0;
    double q = 3.0;
    double lambda = 0.0;
    RealField H;
    RealField K;
    MagneticPotential A;
    bool tail_correction = false;

    double p_star() const {
        const double N = static_cast<double>(grid->dim());
        return N * p / (N - s * p);
    }

    /// Hoelder conjugate exponent for the H weight, r = p*/(p* - q).
    double r_exponent() const {
        const double ps = p_star();
        return ps / (ps - q);
    }

    /// Discrete L^r norm of H with r = r_exponent().
    double H_norm() const { return weighted_lp_norm(H, r_exponent()); }

    /// Discrete sup norm of K.
    double K_sup() const;

    ProblemSpec with_potential(MagneticPotential pot) const {
        ProblemSpec out = *this;
        out.A = std::move(pot);
        return out;
    }

    ProblemSpec with_lambda(double lam) const {
        ProblemSpec out = *this;
        out.lambda = lam;
        return out;
    }

    /// Checks every structural hypothesis: s in (0,1), p > 1, sp < N,
    /// 1 < q < p*, lambda >= 0, H >= 0, K >= 0, matching grids.
    void validate() const;
};

/// Spec with unit weights (H = K = 1) and zero potential; handy in tests.
ProblemSpec make_unit_spec(GridPtr grid, double s, double p, double q, double lambda = 0.0);

}  // namespace fmpl
