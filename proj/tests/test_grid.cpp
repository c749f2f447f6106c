#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "lmd/grid.hpp"

using namespace lmd;
using Catch::Approx;

namespace {

RealField sample_1d(const GridSpec& g, double (*f)(double)) {
    RealField out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.coord(0, g.axis_index(i, 0)));
    return out;
}

double max_abs_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("make_grid validates and computes spacings") {
    GridSpec g = make_grid({{-10.0, 10.0, 256}});
    CHECK(g.dx(0) == Approx(0.078125).epsilon(1e-15));
    CHECK(g.size() == 256);

    GridSpec g2 = make_grid({{-5.0, 5.0, 64}, {-5.0, 5.0, 64}});
    CHECK(g2.size() == 4096);
    CHECK(g2.ndim() == 2);

    CHECK_THROWS_AS(make_grid({{0.0, 1.0, 4}}), ConfigError);
    CHECK_THROWS_AS(make_grid({{1.0, 0.0, 64}}), ConfigError);
    CHECK_THROWS_AS(make_grid({}), ConfigError);
    CHECK_THROWS_AS(make_grid({{0, 1, 8}, {0, 1, 8}, {0, 1, 8}, {0, 1, 8}}), ConfigError);
}

TEST_CASE("derivatives of sin match the analytic oracle") {
    const double L = 10.0;
    GridSpec g = make_grid({{0.0, L, 128}});
    const double k = 2.0 * std::numbers::pi / L;
    RealField f(g.size()), df_exact(g.size()), d2f_exact(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coord(0, g.axis_index(i, 0));
        f[i] = std::sin(k * x);
        df_exact[i] = k * std::cos(k * x);
        d2f_exact[i] = -k * k * std::sin(k * x);
    }
    const double h4 = std::pow(g.dx(0), 4);
    CHECK(max_abs_diff(spatial_derivative(f, g, 0, 1), df_exact) < 10.0 * h4);
    CHECK(max_abs_diff(spatial_derivative(f, g, 0, 2), d2f_exact) < 10.0 * h4);
}

TEST_CASE("derivative annihilates constants exactly") {
    GridSpec g = make_grid({{-3.0, 3.0, 64}});
    RealField c(g.size(), 4.2);
    for (double v : spatial_derivative(c, g, 0, 1)) CHECK(v == 0.0);
    for (double v : spatial_derivative(c, g, 0, 2)) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("derivative is linear to machine precision") {
    GridSpec g = make_grid({{-5.0, 5.0, 96}});
    RealField f = sample_1d(g, [](double x) { return std::exp(-x * x / 3.0); });
    RealField h = sample_1d(g, [](double x) { return std::sin(x) + std::cos(2 * x); });
    const double alpha = 1.7, beta = -0.4;
    RealField combo(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) combo[i] = alpha * f[i] + beta * h[i];
    RealField lhs = spatial_derivative(combo, g, 0, 1);
    RealField df = spatial_derivative(f, g, 0, 1);
    RealField dh = spatial_derivative(h, g, 0, 1);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(lhs[i] == Approx(alpha * df[i] + beta * dh[i]).margin(1e-13));
}

TEST_CASE("discrete integration by parts holds for periodic fields") {
    GridSpec g = make_grid({{-4.0, 4.0, 128}});
    RealField f = sample_1d(g, [](double x) { return std::exp(-x * x); });
    RealField h = sample_1d(g, [](double x) { return std::sin(std::numbers::pi * x / 4.0); });
    RealField dh = spatial_derivative(h, g, 0, 1);
    RealField df = spatial_derivative(f, g, 0, 1);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        lhs += f[i] * dh[i];
        rhs += df[i] * h[i];
    }
    CHECK(std::abs(lhs * g.cell_volume() + rhs * g.cell_volume()) < 1e-10);
}

TEST_CASE("fourth-order convergence under grid refinement") {
    auto err_at = [](int n) {
        GridSpec g = make_grid({{0.0, 10.0, n}});
        const double k = 2.0 * std::numbers::pi / 10.0;
        RealField f(g.size()), exact(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.coord(0, g.axis_index(i, 0));
            f[i] = std::sin(k * x);
            exact[i] = k * std::cos(k * x);
        }
        return max_abs_diff(spatial_derivative(f, g, 0, 1), exact);
    };
    const double ratio = err_at(64) / err_at(128);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("2-D derivative acts on the chosen axis only") {
    GridSpec g = make_grid({{-3.0, 3.0, 48}, {-3.0, 3.0, 48}});
    RealField f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coord(0, g.axis_index(i, 0));
        const double y = g.coord(1, g.axis_index(i, 1));
        f[i] = std::exp(-x * x) * std::sin(std::numbers::pi * y / 3.0);
    }
    RealField dx = spatial_derivative(f, g, 0, 1);
    RealField dy = spatial_derivative(f, g, 1, 1);
    // Spot-check against analytic partials at an interior point.
    const std::size_t idx = 20 * g.stride(0) + 30;
    const double x = g.coord(0, 20), y = g.coord(1, 30);
    const double kpi = std::numbers::pi / 3.0;
    CHECK(dx[idx] == Approx(-2.0 * x * std::exp(-x * x) * std::sin(kpi * y)).margin(1e-3));
    CHECK(dy[idx] == Approx(kpi * std::exp(-x * x) * std::cos(kpi * y)).margin(1e-3));
}
