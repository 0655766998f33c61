#pragma once

#include <array>
#include <iosfwd>
#include <memory>

#include "fmpl/grid.hpp"
#include "fmpl/problem.hpp"

namespace fmpl {

/// Singular kernel |x-y|^{-(N+sp)} tabulated over every nonzero lattice
/// displacement of the doubled index range, diagonal excluded.
///
/// Pair sums treat a field as zero-extended onto the displacement window of
/// each node: partners inside the box use field values, partners in the
/// window but outside the box contribute through the closed-form exterior
/// coefficient window_sum() - box_sum(k). Keeping the per-node partner set
/// translation invariant is what makes the discrete gauge isometry exact.
/// An optional radial tail accounts for the rest of R^N beyond the window.
class KernelTable {
public:
    KernelTable(GridPtr grid, double s, double p);

    /// Cached per (N, n, L, s, p).
    static std::shared_ptr<const KernelTable> make(GridPtr grid, double s, double p);

    const Grid& grid() const { return *grid_; }
    double s() const { return s_; }
    double p() const { return p_; }

    /// Kernel value at index displacement (zero on the diagonal).
    double at(const std::array<int, 3>& disp) const { return values_[disp_flat(disp)]; }

    /// Kernel value between two flattened node indices.
    double between(std::size_t k, std::size_t j) const;

    /// W = sum of the kernel over all nonzero window displacements.
    double window_sum() const { return window_sum_; }

    /// S(x_k) = sum of the kernel from node k over the other box nodes.
    double box_sum(std::size_t k) const { return box_sum_[k]; }

    /// Window weight carried by zero-extension partners outside the box.
    double exterior_sum(std::size_t k) const { return window_sum_ - box_sum_[k]; }

    /// omega_{N-1}/(sp) * R_win^{-sp}: closed-form radial remainder beyond the
    /// displacement window (per unit |u|^p, per node).
    double tail_coefficient() const { return tail_coefficient_; }

    /// Raw little-endian doubles in lexicographic displacement order.
    void save(std::ostream& out) const;
    void load_values(std::istream& in);

    /// Canonical cache file name keyed by (N, n, L, s, p).
    static std::string cache_name(int dim, int nodes, double half_width, double s, double p);
    void save_file(const std::string& path) const;
    /// Rebuilds the table shape from the key and loads the cached values.
    static KernelTable load_file(const std::string& path, GridPtr grid, double s, double p);

    std::size_t value_count() const { return values_.size(); }
    const std::vector<double>& raw_values() const { return values_; }
    int displacement_span() const { return span_; }

private:
    std::size_t disp_flat(const std::array<int, 3>& disp) const;

    GridPtr grid_;
    double s_;
    double p_;
    int span_;  // displacements per axis: 2n - 1
    std::vector<double> values_;
    std::vector<double> box_sum_;
    double window_sum_;
    double tail_coefficient_;
};

/// Surface measure of the unit sphere S^{N-1}: 2, 2*pi, 4*pi.
double unit_sphere_area(int dim);

/// e^{-i (x-y) . A((x+y)/2)}: the unit factor multiplying u(x) in the
/// seminorm pair term. Satisfies phase(x,y) = conj(phase(y,x)).
cplx pair_phase(const MagneticPotential& A, const Point& x, const Point& y);

/// |z|^{p-2} z, with the value 0 at z = 0 (removes the p < 2 singularity).
cplx phi_p(cplx z, double p);

/// Magnetic Gagliardo seminorm [u]_{A,s,p}.
double seminorm(const ComplexField& u, const ProblemSpec& spec);
double seminorm_p(const ComplexField& u, const ProblemSpec& spec);  // p-th power

/// Per-node |D^s_A u|^p density; sums to seminorm_p against the cell volume.
/// Exterior and tail mass is folded onto the in-box partner node.
RealField sp_gradient_density(const ComplexField& u, const ProblemSpec& spec);

/// Node-wise fractional magnetic p-Laplacian.
ComplexField apply_operator(const ComplexField& u, const ProblemSpec& spec);

/// Re of the double-sum pairing built from B^A_u(v); equals
/// Re sum_x 2 apply_operator(u) conj(v) h^N and pairing(u,u) = seminorm_p(u)
/// when the tail correction is off.
double pairing(const ComplexField& u, const ComplexField& v, const ProblemSpec& spec);

struct DiamagneticDefect {
    double max_pointwise_violation;  // <= 0 up to roundoff
    double seminorm_gap;             // [u]_A^p - [|u|]^p >= 0 up to roundoff
};

DiamagneticDefect diamagnetic_defect(const ComplexField& u, const ProblemSpec& spec);

struct GaugeTransformResult {
    ComplexField field;
    MagneticPotential potential;
};

/// v(x) = e^{i eta . x} u(x + xi) with A_eta(x) = A(x + xi) + eta. Throws if
/// the shifted support leaves the box, which would break the isometry.
GaugeTransformResult gauge_transform(const ComplexField& u, const MagneticPotential& A,
                                     const Point& xi, const Point& eta);

/// u_sigma(x) = sigma^{-(N-ps)/p} u(x/sigma), resampled onto target_grid by
/// multilinear interpolation with zero extension.
ComplexField rescale(const ComplexField& u, double sigma, double s, double p, GridPtr target_grid);

}  // namespace fmpl
