#include "fmpl/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace fmpl {

namespace {

constexpr std::array<std::array<double, 3>, 3> kZeroMatrix{
    {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}};

bool is_zero_matrix(const std::array<std::array<double, 3>, 3>& m) {
    for (const auto& row : m)
        for (double v : row)
            if (v != 0.0) return false;
    return true;
}

bool is_zero_point(const Point& c) { return c[0] == 0.0 && c[1] == 0.0 && c[2] == 0.0; }

}  // namespace

MagneticPotential::MagneticPotential()
    : family_(Family::Zero), matrix_(kZeroMatrix), offset_{0.0, 0.0, 0.0} {}

MagneticPotential MagneticPotential::zero() { return MagneticPotential{}; }

MagneticPotential MagneticPotential::constant(const Point& value) {
    MagneticPotential a;
    a.offset_ = value;
    a.family_ = is_zero_point(value) ? Family::Zero : Family::Constant;
    return a;
}

MagneticPotential MagneticPotential::linear(const std::array<std::array<double, 3>, 3>& matrix) {
    MagneticPotential a;
    a.matrix_ = matrix;
    a.family_ = is_zero_matrix(matrix) ? Family::Zero : Family::Linear;
    return a;
}

MagneticPotential MagneticPotential::rotation(double strength) {
    std::array<std::array<double, 3>, 3> m = kZeroMatrix;
    m[0][1] = -strength;
    m[1][0] = strength;
    return linear(m);
}

MagneticPotential MagneticPotential::affine(const std::array<std::array<double, 3>, 3>& matrix,
                                            const Point& offset) {
    MagneticPotential a;
    a.matrix_ = matrix;
    a.offset_ = offset;
    if (is_zero_matrix(matrix))
        a.family_ = is_zero_point(offset) ? Family::Zero : Family::Constant;
    else
        a.family_ = is_zero_point(offset) ? Family::Linear : Family::Affine;
    return a;
}

MagneticPotential MagneticPotential::tabulated(GridPtr grid,
                                               std::vector<std::array<double, 3>> samples) {
    if (!grid) throw std::invalid_argument("tabulated potential: null grid");
    if (samples.size() != grid->size())
        throw std::invalid_argument("tabulated potential: sample count does not match grid");
    MagneticPotential a;
    a.family_ = Family::Tabulated;
    a.table_grid_ = std::move(grid);
    a.table_ = std::make_shared<const std::vector<std::array<double, 3>>>(std::move(samples));
    return a;
}

Point MagneticPotential::eval(const Point& x) const {
    if (family_ == Family::Zero) return {0.0, 0.0, 0.0};
    if (family_ != Family::Tabulated) {
        Point out = offset_;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                out[static_cast<std::size_t>(i)] +=
                    matrix_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                    x[static_cast<std::size_t>(j)];
        return out;
    }

    // Tabulated: multilinear interpolation at x + table_shift, clamped to the
    // sample box, plus the stored constant offset.
    const Grid& g = *table_grid_;
    Point q = x;
    for (int a = 0; a < 3; ++a) q[static_cast<std::size_t>(a)] += table_shift_[static_cast<std::size_t>(a)];

    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) {
        const double t = (q[static_cast<std::size_t>(a)] - g.axis_coord(0)) / g.spacing();
        double f = std::floor(t);
        double fr = t - f;
        int i = static_cast<int>(f);
        if (i < 0) { i = 0; fr = 0.0; }
        if (i >= g.nodes_per_axis() - 1) { i = g.nodes_per_axis() - 2; fr = 1.0; }
        base[static_cast<std::size_t>(a)] = i;
        frac[static_cast<std::size_t>(a)] = fr;
    }

    Point out = offset_;
    const int corners = 1 << g.dim();
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::array<int, 3> idx = base;
        for (int a = 0; a < g.dim(); ++a) {
            const bool hi = (c >> a) & 1;
            w *= hi ? frac[static_cast<std::size_t>(a)] : 1.0 - frac[static_cast<std::size_t>(a)];
            idx[static_cast<std::size_t>(a)] += hi ? 1 : 0;
        }
        if (w == 0.0) continue;
        const auto& s = (*table_)[g.flatten(idx)];
        for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] += w * s[static_cast<std::size_t>(i)];
    }
    return out;
}

MagneticPotential MagneticPotential::gauge_shifted(const Point& xi, const Point& eta) const {
    MagneticPotential out = *this;
    if (family_ == Family::Tabulated) {
        for (int a = 0; a < 3; ++a) {
            out.table_shift_[static_cast<std::size_t>(a)] += xi[static_cast<std::size_t>(a)];
            out.offset_[static_cast<std::size_t>(a)] += eta[static_cast<std::size_t>(a)];
        }
        return out;
    }
    // A(x + xi) + eta = B x + (B xi + c + eta)
    Point off = offset_;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j)
            off[static_cast<std::size_t>(i)] +=
                matrix_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                xi[static_cast<std::size_t>(j)];
        off[static_cast<std::size_t>(i)] += eta[static_cast<std::size_t>(i)];
    }
    return affine(matrix_, off);
}

std::string MagneticPotential::describe() const {
    switch (family_) {
        case Family::Zero: return "zero";
        case Family::Constant: return "constant";
        case Family::Linear: return "linear";
        case Family::Affine: return "affine";
        case Family::Tabulated: return "tabulated";
    }
    return "unknown";
}

}  // namespace fmpl
