#include "fmpl/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fmpl {

double ProblemSpec::K_sup() const {
    double m = 0.0;
    for (std::size_t k = 0; k < K.size(); ++k) m = std::max(m, K[k]);
    return m;
}

void ProblemSpec::validate() const {
    if (!grid) throw std::invalid_argument("ProblemSpec: missing grid");
    const double N = static_cast<double>(grid->dim());
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("ProblemSpec: s must lie in (0,1), got " + std::to_string(s));
    if (!(p > 1.0))
        throw std::invalid_argument("ProblemSpec: p must exceed 1, got " + std::to_string(p));
    if (!(s * p < N))
        throw std::invalid_argument("ProblemSpec: need s*p < N, got s*p = " + std::to_string(s * p) +
                                    " with N = " + std::to_string(grid->dim()));
    const double ps = p_star();
    if (!(q > 1.0 && q < ps))
        throw std::invalid_argument("ProblemSpec: q must lie in (1, p*_s) = (1, " +
                                    std::to_string(ps) + "), got " + std::to_string(q));
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("ProblemSpec: lambda must be nonnegative, got " +
                                    std::to_string(lambda));
    if (!H.compatible_with(*grid) || !K.compatible_with(*grid))
        throw std::invalid_argument("ProblemSpec: weights sampled on a different grid");
    for (std::size_t k = 0; k < H.size(); ++k) {
        if (!(H[k] >= 0.0))
            throw std::invalid_argument("ProblemSpec: H negative at node " + std::to_string(k));
        if (!(K[k] >= 0.0) || !std::isfinite(K[k]))
            throw std::invalid_argument("ProblemSpec: K invalid at node " + std::to_string(k));
    }
}

ProblemSpec make_unit_spec(GridPtr grid, double s, double p, double q, double lambda) {
    ProblemSpec spec;
    spec.grid = grid;
    spec.s = s;
    spec.p = p;
    spec.q = q;
    spec.lambda = lambda;
    spec.H = sample_real_field([](const Point&) { return 1.0; }, grid);
    spec.K = sample_real_field([](const Point&) { return 1.0; }, grid);
    spec.A = MagneticPotential::zero();
    spec.validate();
    return spec;
}

}  // namespace fmpl
