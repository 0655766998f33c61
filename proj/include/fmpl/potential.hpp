#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "fmpl/grid.hpp"

namespace fmpl {

/// Magnetic potential A : R^N -> R^N, evaluable at arbitrary midpoints.
///
/// Built-in families are affine, A(x) = B x + c, which covers the zero,
/// constant and linear cases and stays closed under gauge transforms
/// A_eta(x) = A(x + xi) + eta. A tabulated family interpolates samples
/// multilinearly and clamps to the nearest sample outside its grid.
class MagneticPotential {
public:
    enum class Family { Zero, Constant, Linear, Affine, Tabulated };

    MagneticPotential();  // zero potential

    static MagneticPotential zero();
    static MagneticPotential constant(const Point& value);
    /// A(x) = B x with row-major N x N matrix B.
    static MagneticPotential linear(const std::array<std::array<double, 3>, 3>& matrix);
    /// Rotational gauge b * (-x2, x1, 0); reduces to (-x2, x1) when N = 2.
    static MagneticPotential rotation(double strength);
    static MagneticPotential affine(const std::array<std::array<double, 3>, 3>& matrix,
                                    const Point& offset);
    /// Component samples on `grid`, interpolated multilinearly.
    static MagneticPotential tabulated(GridPtr grid, std::vector<std::array<double, 3>> samples);

    Point eval(const Point& x) const;

    /// A(xi + .) + eta; exact for the affine families, lazily composed for
    /// tabulated ones.
    MagneticPotential gauge_shifted(const Point& xi, const Point& eta) const;

    Family family() const { return family_; }
    bool is_zero() const { return family_ == Family::Zero; }
    bool is_linear() const { return family_ == Family::Linear; }
    std::string describe() const;

    const std::array<std::array<double, 3>, 3>& matrix() const { return matrix_; }
    const Point& offset() const { return offset_; }

private:
    Family family_;
    std::array<std::array<double, 3>, 3> matrix_;  // affine part
    Point offset_;
    GridPtr table_grid_;
    std::shared_ptr<const std::vector<std::array<double, 3>>> table_;
    Point table_shift_{0.0, 0.0, 0.0};
};

}  // namespace fmpl
