#include "fmpl/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fmpl {

namespace {

std::string point_str(const Point& x, int dim) {
    std::string s = "(";
    for (int a = 0; a < dim; ++a) {
        if (a) s += ", ";
        s += std::to_string(x[static_cast<std::size_t>(a)]);
    }
    return s + ")";
}

}  // namespace

Grid::Grid(int dim, int nodes_per_axis, double half_width)
    : dim_(dim), n_(nodes_per_axis), half_width_(half_width) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("Grid: dimension must be 1, 2 or 3, got " + std::to_string(dim));
    if (nodes_per_axis < 4)
        throw std::invalid_argument("Grid: need at least 4 nodes per axis, got " +
                                    std::to_string(nodes_per_axis));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("Grid: half width must be positive, got " +
                                    std::to_string(half_width));
    h_ = 2.0 * half_width / static_cast<double>(n_);
    cell_volume_ = std::pow(h_, dim_);
    total_ = 1;
    for (int a = 0; a < dim_; ++a) total_ *= static_cast<std::size_t>(n_);
    axis_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
        axis_[static_cast<std::size_t>(i)] = -half_width + (static_cast<double>(i) + 0.5) * h_;
}

double Grid::boundary_distance(const Point& x) const {
    double d = half_width_;
    for (int a = 0; a < dim_; ++a)
        d = std::min(d, half_width_ - std::abs(x[static_cast<std::size_t>(a)]));
    return d;
}

GridPtr make_grid(int dim, int nodes_per_axis, double half_width) {
    return std::make_shared<const Grid>(dim, nodes_per_axis, half_width);
}

template <class T>
FieldT<T>::FieldT(GridPtr grid, std::vector<T> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size())
        throw std::invalid_argument("FieldT: value count does not match grid size");
}

template class FieldT<cplx>;
template class FieldT<double>;

ComplexField sample_field(const std::function<cplx(const Point&)>& expression, GridPtr grid) {
    ComplexField u(grid);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Point x = grid->coord(k);
        const cplx v = expression(x);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("sample_field: non-finite value at node " +
                                        point_str(x, grid->dim()));
        u[k] = v;
    }
    return u;
}

RealField sample_real_field(const std::function<double(const Point&)>& expression, GridPtr grid) {
    RealField w(grid);
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Point x = grid->coord(k);
        const double v = expression(x);
        if (!std::isfinite(v))
            throw std::invalid_argument("sample_real_field: non-finite value at node " +
                                        point_str(x, grid->dim()));
        w[k] = v;
    }
    return w;
}

double weighted_lp_norm(const ComplexField& u, const RealField* w, double r) {
    if (r < 1.0)
        throw std::invalid_argument("weighted_lp_norm: exponent must satisfy r >= 1, got " +
                                    std::to_string(r));
    if (w && !w->compatible_with(u.grid()))
        throw std::invalid_argument("weighted_lp_norm: weight sampled on a different grid");
    const double hn = u.grid().cell_volume();
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double a = std::abs(u[k]);
        const double wk = w ? (*w)[k] : 1.0;
        acc += wk * std::pow(a, r);
    }
    return std::pow(acc * hn, 1.0 / r);
}

double weighted_lp_norm(const ComplexField& u, double r) { return weighted_lp_norm(u, nullptr, r); }

double weighted_lp_norm(const RealField& u, double r) {
    if (r < 1.0)
        throw std::invalid_argument("weighted_lp_norm: exponent must satisfy r >= 1, got " +
                                    std::to_string(r));
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) acc += std::pow(std::abs(u[k]), r);
    return std::pow(acc * u.grid().cell_volume(), 1.0 / r);
}

std::array<int, 3> lattice_steps(const Grid& grid, const Point& xi) {
    std::array<int, 3> steps{0, 0, 0};
    const double h = grid.spacing();
    for (int a = 0; a < grid.dim(); ++a) {
        const double raw = xi[static_cast<std::size_t>(a)] / h;
        const double rounded = std::round(raw);
        if (std::abs(raw - rounded) > 1e-9 * std::max(1.0, std::abs(raw)))
            throw std::invalid_argument(
                "shift vector component " + std::to_string(xi[static_cast<std::size_t>(a)]) +
                " is not an integer multiple of the spacing " + std::to_string(h));
        steps[static_cast<std::size_t>(a)] = static_cast<int>(rounded);
    }
    return steps;
}

ComplexField shift_field(const ComplexField& u, const Point& xi) {
    const Grid& g = u.grid();
    const auto steps = lattice_steps(g, xi);
    ComplexField v(u.grid_ptr());
    for (std::size_t k = 0; k < v.size(); ++k) {
        auto idx = g.unflatten(k);
        for (int a = 0; a < g.dim(); ++a)
            idx[static_cast<std::size_t>(a)] += steps[static_cast<std::size_t>(a)];
        v[k] = g.index_in_range(idx) ? u[g.flatten(idx)] : cplx{0.0, 0.0};
    }
    return v;
}

ComplexField modulus_field(const ComplexField& u) {
    ComplexField m(u.grid_ptr());
    for (std::size_t k = 0; k < u.size(); ++k) m[k] = cplx{std::abs(u[k]), 0.0};
    return m;
}

double max_abs(const ComplexField& u) {
    double m = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) m = std::max(m, std::abs(u[k]));
    return m;
}

}  // namespace fmpl
