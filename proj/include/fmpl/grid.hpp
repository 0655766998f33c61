#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace fmpl {

using cplx = std::complex<double>;
using Point = std::array<double, 3>;

inline double dot(const Point& a, const Point& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm2(const Point& a) { return dot(a, a); }

/// Truncated cell-centered lattice on [-L, L]^N, N in {1,2,3}.
///
/// Nodes sit at cell centers, so distinct nodes are separated by positive
/// multiples of the spacing h = 2L/n and none coincides with a pair midpoint.
class Grid {
public:
    Grid(int dim, int nodes_per_axis, double half_width);

    int dim() const { return dim_; }
    int nodes_per_axis() const { return n_; }
    double half_width() const { return half_width_; }
    double spacing() const { return h_; }
    double cell_volume() const { return cell_volume_; }
    std::size_t size() const { return total_; }

    double axis_coord(int i) const { return axis_[static_cast<std::size_t>(i)]; }

    std::array<int, 3> unflatten(std::size_t k) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = 0; a < dim_; ++a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(k % static_cast<std::size_t>(n_));
            k /= static_cast<std::size_t>(n_);
        }
        return idx;
    }

    std::size_t flatten(const std::array<int, 3>& idx) const {
        std::size_t k = 0;
        for (int a = dim_ - 1; a >= 0; --a)
            k = k * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
        return k;
    }

    bool index_in_range(const std::array<int, 3>& idx) const {
        for (int a = 0; a < dim_; ++a) {
            const int i = idx[static_cast<std::size_t>(a)];
            if (i < 0 || i >= n_) return false;
        }
        return true;
    }

    Point coord(std::size_t k) const {
        const auto idx = unflatten(k);
        Point x{0.0, 0.0, 0.0};
        for (int a = 0; a < dim_; ++a)
            x[static_cast<std::size_t>(a)] = axis_[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
        return x;
    }

    /// Distance from x to the nearest box face (nonnegative inside the box).
    double boundary_distance(const Point& x) const;

    bool operator==(const Grid& other) const {
        return dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_;
    }
    bool operator!=(const Grid& other) const { return !(*this == other); }

private:
    int dim_;
    int n_;
    double half_width_;
    double h_;
    double cell_volume_;
    std::size_t total_;
    std::vector<double> axis_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int dim, int nodes_per_axis, double half_width);

/// Complex field sampled at the grid nodes; implicitly zero outside the box.
template <class T>
class FieldT {
public:
    FieldT() = default;
    explicit FieldT(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), T{}) {}
    FieldT(GridPtr grid, std::vector<T> values);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    std::size_t size() const { return values_.size(); }
    T& operator[](std::size_t k) { return values_[k]; }
    const T& operator[](std::size_t k) const { return values_[k]; }

    const std::vector<T>& values() const { return values_; }
    std::vector<T>& values() { return values_; }

    bool compatible_with(const Grid& g) const { return grid_ && *grid_ == g; }

private:
    GridPtr grid_;
    std::vector<T> values_;
};

using ComplexField = FieldT<cplx>;
using RealField = FieldT<double>;

/// Pointwise evaluation of a closed-form expression at the cell centers.
/// Rejects non-finite values, naming the offending node.
ComplexField sample_field(const std::function<cplx(const Point&)>& expression, GridPtr grid);
RealField sample_real_field(const std::function<double(const Point&)>& expression, GridPtr grid);

/// (sum_k w(x_k) |u(x_k)|^r h^N)^(1/r); w == nullptr means unit weight.
double weighted_lp_norm(const ComplexField& u, const RealField* w, double r);
double weighted_lp_norm(const ComplexField& u, double r);
double weighted_lp_norm(const RealField& u, double r);

/// v(x) = u(x + xi), zero where x + xi leaves the box. xi must be a lattice
/// vector (integer multiple of h per axis).
ComplexField shift_field(const ComplexField& u, const Point& xi);

/// Nearest lattice step counts for xi; throws if xi is not lattice-aligned.
std::array<int, 3> lattice_steps(const Grid& grid, const Point& xi);

ComplexField modulus_field(const ComplexField& u);

double max_abs(const ComplexField& u);

}  // namespace fmpl
