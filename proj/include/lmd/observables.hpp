#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "lmd/dynamics.hpp"
#include "lmd/grid.hpp"
#include "lmd/state.hpp"

namespace lmd {

struct ObservableReport {
    double t = 0.0;
    double norm = 0.0;
    double energy = 0.0;
    double axiom1_residual = 0.0;
    std::vector<double> mean_x;
    std::vector<double> delta_x;
    std::vector<double> mean_p;
    std::vector<double> delta_p;
    std::vector<double> uncertainty_product;
};

/// p_bar_i = grad_i S, including the k0 background.
inline RealField local_mean_momentum(const HydroState& st, const GridSpec& g, int axis) {
    return action_gradient(st, g, axis);
}

/// (delta p_i)^2 = kappa lambda_i^2 (grad_i rho / rho)^2, with rho floored as
/// in the dynamics.
inline RealField local_momentum_variance(const HydroState& st, const GridSpec& g, double lambda_i,
                                         double kappa, int axis, double rho_floor = 1e-12) {
    const std::size_t n = g.size();
    RealField var(n, 0.0);
    if (lambda_i == 0.0) return var;
    double rmax = 0.0;
    for (double v : st.rho) rmax = std::max(rmax, v);
    const double floor = rho_floor * rmax;
    RealField dr = spatial_derivative(st.rho, g, axis, 1);
    const double c = kappa * lambda_i * lambda_i;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::max(st.rho[i], floor);
        const double ratio = dr[i] / r;
        var[i] = c * ratio * ratio;
    }
    return var;
}

/// Local average energy density field H_bar(x) =
/// sum_i [(grad_i S)^2 + (delta p_i)^2] / 2 m_i + U(x).
inline RealField local_energy_density(const HydroState& st, const GridSpec& g,
                                      const SimulationParams& params,
                                      const RealField& potential_field) {
    const std::size_t n = g.size();
    RealField h = potential_field;
    for (int d = 0; d < g.ndim(); ++d) {
        const double inv2m = 1.0 / (2.0 * params.dofs[d].mass);
        RealField p = action_gradient(st, g, d);
        RealField var =
            local_momentum_variance(st, g, params.dofs[d].lambda, params.kappa, d, params.rho_floor);
        for (std::size_t i = 0; i < n; ++i) h[i] += inv2m * (p[i] * p[i] + var[i]);
    }
    return h;
}

/// Integral of rho (dS/dt + H_bar); dS/dt is the realized dynamics (hj_rhs).
inline double axiom1_residual(const HydroState& st, const GridSpec& g,
                              const SimulationParams& params) {
    const RealField u = evaluate_potential(params.potential, g);
    const RealField dsdt = hj_rhs(st, g, params, u);
    const RealField h = local_energy_density(st, g, params, u);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += st.rho[i] * (dsdt[i] + h[i]);
    return acc * g.cell_volume();
}

/// Circular mean of rho along one axis, mapped back to a box coordinate.
inline double circular_center(const HydroState& st, const GridSpec& g, int axis) {
    const double L = g.length(axis);
    double cs = 0.0, sn = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double th = 2.0 * std::numbers::pi * (g.coord(axis, g.axis_index(i, axis)) - g.x_min(axis)) / L;
        cs += st.rho[i] * std::cos(th);
        sn += st.rho[i] * std::sin(th);
    }
    if (std::abs(cs) < 1e-12 && std::abs(sn) < 1e-12)
        return g.x_min(axis) + 0.5 * L;  // delocalized; center is conventional
    double th0 = std::atan2(sn, cs);
    if (th0 < 0.0) th0 += 2.0 * std::numbers::pi;
    return g.x_min(axis) + th0 * L / (2.0 * std::numbers::pi);
}

inline ObservableReport global_stats(const HydroState& st, const GridSpec& g,
                                     const SimulationParams& params) {
    const int D = g.ndim();
    const std::size_t n = g.size();
    const double dv = g.cell_volume();
    ObservableReport rep;
    rep.t = st.t;
    rep.norm = integrate(st.rho, g);
    rep.mean_x.resize(D);
    rep.delta_x.resize(D);
    rep.mean_p.resize(D);
    rep.delta_p.resize(D);
    rep.uncertainty_product.resize(D);

    const RealField u = evaluate_potential(params.potential, g);
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) energy += st.rho[i] * u[i];

    for (int d = 0; d < D; ++d) {
        // Position moments with periodic-image-aware centering.
        const double L = g.length(d);
        const double xc = circular_center(st, g, d);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = g.coord(d, g.axis_index(i, d)) - xc;
            r -= L * std::round(r / L);
            m1 += st.rho[i] * r;
            m2 += st.rho[i] * r * r;
        }
        m1 *= dv;
        m2 *= dv;
        rep.mean_x[d] = xc + m1;
        rep.delta_x[d] = std::sqrt(std::max(m2 - m1 * m1, 0.0));

        RealField p = action_gradient(st, g, d);
        RealField var =
            local_momentum_variance(st, g, params.dofs[d].lambda, params.kappa, d, params.rho_floor);
        double pm = 0.0, pv = 0.0, kin = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            pm += st.rho[i] * p[i];
            pv += st.rho[i] * var[i];
            kin += st.rho[i] * (p[i] * p[i] + var[i]);
        }
        rep.mean_p[d] = pm * dv;
        rep.delta_p[d] = std::sqrt(std::max(pv * dv, 0.0));
        energy += kin / (2.0 * params.dofs[d].mass);
        rep.uncertainty_product[d] = rep.delta_x[d] * rep.delta_p[d];
    }
    rep.energy = energy * dv;
    rep.axiom1_residual = axiom1_residual(st, g, params);
    return rep;
}

struct UncertaintyResult {
    double product = 0.0;
    double bound = 0.0;
    bool satisfied = false;
};

/// Bound realized as sqrt(kappa) * lambda_i under the kappa calibration.
inline std::vector<UncertaintyResult> uncertainty_check(const ObservableReport& rep,
                                                        const std::vector<double>& lambdas,
                                                        double kappa) {
    std::vector<UncertaintyResult> out(lambdas.size());
    for (std::size_t d = 0; d < lambdas.size(); ++d) {
        out[d].product = rep.uncertainty_product[d];
        out[d].bound = std::sqrt(kappa) * lambdas[d];
        out[d].satisfied = out[d].product >= out[d].bound * (1.0 - 1e-9);
    }
    return out;
}

}  // namespace lmd
