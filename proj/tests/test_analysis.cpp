#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fmpl/analysis.hpp"
#include "fmpl/rng.hpp"

using namespace fmpl;

namespace {

ComplexField gaussian(GridPtr g, double width) {
    const double w2 = width * width;
    return sample_field([w2](const Point& x) { return cplx{std::exp(-norm2(x) / w2), 0.0}; }, g);
}

}  // namespace

TEST_CASE("smoothstep is a C^2 switch with bounded slope") {
    CHECK(smoothstep(-1.0) == 0.0);
    CHECK(smoothstep(0.0) == 0.0);
    CHECK(smoothstep(1.0) == 1.0);
    CHECK(smoothstep(2.0) == 1.0);
    CHECK(smoothstep(0.5) == doctest::Approx(0.5));
    CHECK(smoothstep_deriv(0.0) == 0.0);
    CHECK(smoothstep_deriv(1.0) == 0.0);
    double max_slope = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double t = i / 100.0;
        max_slope = std::max(max_slope, smoothstep_deriv(t));
        const double fd = (smoothstep(t + 1e-6) - smoothstep(t - 1e-6)) / 2e-6;
        CHECK(smoothstep_deriv(t) == doctest::Approx(fd).epsilon(1e-4));
    }
    CHECK(max_slope == doctest::Approx(1.875));
}

TEST_CASE("sobolev descent: monotone trace, consistency, monotone in budget") {
    auto g = make_grid(1, 64, 1.0);
    auto spec = make_unit_spec(g, 0.4, 2.0, 1.5);
    auto init = gaussian(g, 0.5);

    SobolevSettings st;
    st.max_iters = 60;
    auto est = estimate_sobolev_constant(spec, init, st);

    for (std::size_t i = 1; i < est.trace.size(); ++i)
        CHECK(est.trace[i].second <= est.trace[i - 1].second);

    CHECK(est.S_est == doctest::Approx(rayleigh_quotient(est.minimizer, spec)).epsilon(1e-12));

    SobolevSettings st2 = st;
    st2.max_iters = 120;
    auto est2 = estimate_sobolev_constant(spec, init, st2);
    CHECK(est2.S_est <= est.S_est + 1e-12);

    ComplexField zero(g);
    CHECK_THROWS_AS(estimate_sobolev_constant(spec, zero, st), std::invalid_argument);
}

TEST_CASE("sobolev inequality holds for the estimated constant") {
    auto g = make_grid(2, 10, 1.0);
    auto spec = make_unit_spec(g, 0.5, 2.0, 2.5);
    auto est = estimate_sobolev_constant(spec, gaussian(g, 0.4), {});
    const double lhs = weighted_lp_norm(est.minimizer, spec.p_star());
    const double rhs = std::pow(est.S_est, -1.0 / spec.p) * seminorm(est.minimizer, spec);
    CHECK(lhs <= rhs * (1.0 + 1e-9));
}

TEST_CASE("diamagnetic ordering of the sobolev constants") {
    auto g = make_grid(2, 10, 1.0);
    auto spec_a = make_unit_spec(g, 0.5, 2.0, 2.5);
    spec_a.A = MagneticPotential::rotation(1.0);
    auto est_a = estimate_sobolev_constant(spec_a, gaussian(g, 0.4), {});

    // seed the non-magnetic run with the magnetic minimiser's modulus: the
    // diamagnetic inequality then pins S(0) <= S(A) before descent even runs
    auto spec_0 = spec_a.with_potential(MagneticPotential::zero());
    auto est_0 = estimate_sobolev_constant(spec_0, modulus_field(est_a.minimizer), {});
    CHECK(est_0.S_est <= est_a.S_est + 1e-9);
}

TEST_CASE("sobolev estimate is stable across random inits") {
    auto g = make_grid(1, 48, 1.0);
    auto spec = make_unit_spec(g, 0.4, 2.0, 1.5);
    SobolevSettings st;
    st.max_iters = 400;
    Rng rng(2024);
    auto a = estimate_sobolev_constant(spec, random_field(g, rng), st);
    auto b = estimate_sobolev_constant(spec, random_field(g, rng), st);
    CHECK(std::abs(a.S_est - b.S_est) / std::max(a.S_est, b.S_est) < 0.05);
}

TEST_CASE("sigma curve: constant without field, decreasing with linear potential") {
    auto g = make_grid(1, 128, 1.0);
    auto spec = make_unit_spec(g, 0.4, 2.0, 1.5);
    spec.tail_correction = true;  // keeps the mass beyond the shrinking support
    auto u = gaussian(g, 0.3);
    const std::vector<double> sigmas{1.0, 0.5, 0.25, 0.125};

    auto spec0 = spec.with_potential(MagneticPotential::zero());
    auto flat = sobolev_equality_curve(u, spec0, sigmas, 2);
    const double plain = seminorm_p(u, spec0);
    for (const auto& [sigma, value] : flat)
        CHECK(value == doctest::Approx(plain).epsilon(0.02));

    std::array<std::array<double, 3>, 3> m{{{16.0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
    spec.A = MagneticPotential::linear(m);
    auto curve = sobolev_equality_curve(u, spec, sigmas, 2);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].second < curve[i - 1].second);
    CHECK(curve.back().second == doctest::Approx(plain).epsilon(0.02));
}

TEST_CASE("sigma curve rejects dilations that escape the box") {
    auto g = make_grid(1, 64, 1.0);
    auto spec = make_unit_spec(g, 0.4, 2.0, 1.5);
    auto u = sample_field([](const Point& x) { return cplx{1.0 + 0.0 * x[0], 0.0}; }, g);
    CHECK_THROWS_AS(sobolev_equality_curve(u, spec, {4.0}, 2), std::invalid_argument);
}

TEST_CASE("mollifier: unit mass, zero field, constant preservation") {
    auto g = make_grid(1, 64, 1.0);

    ComplexField zero(g);
    auto mz = mollify(zero, 4);
    for (std::size_t k = 0; k < mz.size(); ++k) CHECK(mz[k] == cplx{0.0, 0.0});

    auto one = sample_field([](const Point&) { return cplx{1.0, 0.0}; }, g);
    auto smooth = mollify(one, 8);
    // away from the boundary the exact unit mass preserves constants
    CHECK(smooth[32].real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(smooth[32].imag()) < 1e-15);

    // support below one cell
    CHECK_THROWS_AS(mollify(one, 200), std::invalid_argument);
}

TEST_CASE("mollifier convergence curve decreases for a Lipschitz field") {
    auto g = make_grid(1, 128, 1.0);
    auto spec = make_unit_spec(g, 0.4, 2.0, 1.5);
    auto tent = sample_field(
        [](const Point& x) { return cplx{std::max(0.0, 1.0 - std::abs(x[0]) / 0.5), 0.0}; }, g);
    auto curve = mollifier_convergence_curve(tent, spec, {1, 2, 4, 8, 16});
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].second < curve[i - 1].second);
    CHECK(curve.back().second < 0.10 * curve.front().second);
}

TEST_CASE("cutoff annulus has the C/n slope bound") {
    auto g = make_grid(1, 256, 1.0);
    for (double r : {0.2, 0.4}) {
        auto phi = cutoff_annulus(g, r);
        double max_slope = 0.0;
        for (std::size_t k = 0; k + 1 < phi.size(); ++k)
            max_slope = std::max(max_slope, std::abs(phi[k + 1] - phi[k]) / g->spacing());
        CHECK(max_slope <= 1.875 / r * 1.05);
        CHECK(phi[0] == 1.0);  // |x| ~ 1 >= 2r: past the transition
    }
}

TEST_CASE("cutoff tail curve decays and hits exact zero") {
    auto g = make_grid(2, 24, 1.0);
    auto spec = make_unit_spec(g, 0.5, 2.0, 1.5);
    auto u = sample_field(
        [](const Point& x) { return cplx{std::exp(-norm2(x) / 0.09), 0.0}; }, g);
    const double base = seminorm(u, spec);
    auto curve = cutoff_tail_curve(u, spec, {0.15, 0.3, 0.45, 0.6, 0.8, 1.45});
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].second <= curve[i - 1].second);
    CHECK(curve[4].second < 1e-3 * base);  // 2r well past the effective support
    CHECK(curve.back().second == 0.0);     // B_r swallows the box: exact zero

    auto bump = sample_field(
        [](const Point& x) {
            const double r2 = norm2(x);
            return cplx{r2 < 0.01 ? 1.0 : 0.0, 0.0};
        },
        g);
    auto z = cutoff_tail_curve(bump, spec, {0.5});
    CHECK(z[0].second == 0.0);
}
