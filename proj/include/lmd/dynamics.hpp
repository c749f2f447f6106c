#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "lmd/grid.hpp"
#include "lmd/potential.hpp"
#include "lmd/state.hpp"

namespace lmd {

struct SimulationParams {
    std::vector<DofParams> dofs;
    PotentialSpec potential = FreePotential{};
    double dt = 1e-3;
    double kappa = 0.25;      // variance coefficient, see observables
    double rho_floor = 1e-12; // relative regularization threshold

    void validate(const GridSpec& g) const {
        validate_dofs(dofs, g);
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
        if (rho_floor < 0.0) throw ConfigError("rho_floor must be non-negative");
    }
};

/// Gradient of the full action along one axis: k0 background plus residual.
inline RealField action_gradient(const HydroState& st, const GridSpec& g, int axis) {
    RealField ds = spatial_derivative(st.s_residual, g, axis, 1);
    const double k = st.k0[axis];
    for (double& v : ds) v += k;
    return ds;
}

/// Q(x) = -sum_i (lambda_i^2 / 2 m_i) (grad_i^2 sqrt(rho)) / sqrt(rho).
/// rho is floored at rho_floor * max(rho) before the square root; at floored
/// points Q is clamped to the value at the nearest unfloored neighbor.
inline RealField quantum_potential(const HydroState& st, const GridSpec& g,
                                   const std::vector<DofParams>& dofs, double rho_floor) {
    const std::size_t n = g.size();
    RealField q(n, 0.0);
    bool any = false;
    for (const auto& d : dofs)
        if (d.lambda > 0.0) any = true;
    if (!any) return q;

    double rmax = 0.0;
    for (double v : st.rho) rmax = std::max(rmax, v);
    const double floor = rho_floor * rmax;

    RealField u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = std::sqrt(std::max(st.rho[i], floor));

    for (int d = 0; d < g.ndim(); ++d) {
        const double lam = dofs[d].lambda;
        if (lam == 0.0) continue;
        const double c = lam * lam / (2.0 * dofs[d].mass);
        RealField d2u = spatial_derivative(u, g, d, 2);
        for (std::size_t i = 0; i < n; ++i) q[i] -= c * d2u[i] / u[i];
    }

    if (floor > 0.0) {
        // Propagate Q outward from the clean region (multi-source BFS). A
        // point counts as clean only if its whole stencil is unfloored and
        // log sqrt(rho) varies by at most O(1) per cell across it: at the
        // floor contour the kink of the floored sqrt(rho) leaks an O(1/dx^2)
        // artifact into Q, and where the stencil cannot resolve the density
        // profile the computed Q is O(1)-wrong; either kind of junk value
        // would seed the extension and feed back into the phase.
        std::vector<char> floored(n, 0);
        bool any_floored = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (st.rho[i] < floor) {
                floored[i] = 1;
                any_floored = true;
            }
        }
        std::vector<char> ok(n, 0);
        std::queue<std::size_t> frontier;
        for (std::size_t i = 0; i < n; ++i) {
            bool clean = !floored[i];
            for (int d = 0; clean && d < g.ndim(); ++d) {
                for (int s : {-2, -1, 1, 2})
                    if (floored[g.shifted(i, d, s)]) clean = false;
                if (!clean) break;
                const double up1 = u[g.shifted(i, d, 1)], um1 = u[g.shifted(i, d, -1)];
                const double up2 = u[g.shifted(i, d, 2)], um2 = u[g.shifted(i, d, -2)];
                if (std::abs(std::log(up1 / um1)) > 1.0 ||
                    std::abs(std::log(up2 / um2)) > 2.0)
                    clean = false;
            }
            if (clean) {
                ok[i] = 1;
                frontier.push(i);
            }
        }
        if (any_floored && !frontier.empty()) {
            while (!frontier.empty()) {
                const std::size_t i = frontier.front();
                frontier.pop();
                for (int d = 0; d < g.ndim(); ++d) {
                    for (int s : {-1, 1}) {
                        const std::size_t j = g.shifted(i, d, s);
                        if (!ok[j]) {
                            ok[j] = 1;
                            q[j] = q[i];
                            frontier.push(j);
                        }
                    }
                }
            }
        }
    }
    return q;
}

/// Right-hand side of the continuity equation:
/// -sum_i grad_i . (rho grad_i S / m_i).
inline RealField continuity_rhs(const HydroState& st, const GridSpec& g,
                                const SimulationParams& params) {
    const std::size_t n = g.size();
    RealField rhs(n, 0.0);
    for (int d = 0; d < g.ndim(); ++d) {
        RealField flux = action_gradient(st, g, d);
        const double inv_m = 1.0 / params.dofs[d].mass;
        for (std::size_t i = 0; i < n; ++i) flux[i] *= st.rho[i] * inv_m;
        RealField div = spatial_derivative(flux, g, d, 1);
        for (std::size_t i = 0; i < n; ++i) rhs[i] -= div[i];
    }
    return rhs;
}

/// Right-hand side of the generalized Hamilton-Jacobi equation:
/// -sum_i (grad_i S)^2 / 2 m_i + (lambda_i^2 / 2 m_i) grad_i^2 sqrt(rho)/sqrt(rho) - U.
inline RealField hj_rhs(const HydroState& st, const GridSpec& g, const SimulationParams& params,
                        const RealField& potential_field) {
    const std::size_t n = g.size();
    RealField rhs = quantum_potential(st, g, params.dofs, params.rho_floor);
    for (double& v : rhs) v = -v;  // Eq. of motion carries -Q
    for (int d = 0; d < g.ndim(); ++d) {
        RealField p = action_gradient(st, g, d);
        const double c = 1.0 / (2.0 * params.dofs[d].mass);
        for (std::size_t i = 0; i < n; ++i) rhs[i] -= c * p[i] * p[i];
    }
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= potential_field[i];
    return rhs;
}

inline RealField hj_rhs(const HydroState& st, const GridSpec& g, const SimulationParams& params) {
    return hj_rhs(st, g, params, evaluate_potential(params.potential, g));
}

/// Heuristic stability guard for the explicit RK4 step.
inline double cfl_limit(const GridSpec& g, const SimulationParams& params,
                        const std::vector<double>& k0) {
    double lim = std::numeric_limits<double>::infinity();
    for (int d = 0; d < g.ndim(); ++d) {
        const double m = params.dofs[d].mass;
        const double h = g.dx(d);
        const double denom = params.dofs[d].lambda + std::abs(k0[d]) * h * m + 1.0;
        lim = std::min(lim, 0.5 * m * h * h / denom);
    }
    return lim;
}

struct StepResult {
    HydroState state;
    double norm_drift = 0.0;  // |norm - 1| before any correction
    bool renormalized = false;
};

/// One classical RK4 step of the coupled (rho, s_residual) system.
class Stepper {
public:
    Stepper(const GridSpec& g, SimulationParams params)
        : grid_(g), params_(std::move(params)), u_(evaluate_potential(params_.potential, g)) {
        params_.validate(g);
    }

    const RealField& potential_field() const { return u_; }
    const SimulationParams& params() const { return params_; }

    StepResult step(const HydroState& st) const {
        if (params_.dt > cfl_limit(grid_, params_, st.k0))
            throw NumericsError("dt exceeds the stability guard dt <= 0.5 min_d m_d dx_d^2 / "
                                "(lambda_d + |k0_d| dx_d m_d + 1)");
        const double dt = params_.dt;
        const std::size_t n = grid_.size();

        auto rhs = [&](const HydroState& y, RealField& dr, RealField& ds) {
            dr = continuity_rhs(y, grid_, params_);
            ds = hj_rhs(y, grid_, params_, u_);
        };
        auto advance = [&](const HydroState& y, const RealField& dr, const RealField& ds,
                           double h) {
            HydroState out = y;
            for (std::size_t i = 0; i < n; ++i) {
                out.rho[i] = st.rho[i] + h * dr[i];
                out.s_residual[i] = st.s_residual[i] + h * ds[i];
            }
            return out;
        };

        RealField k1r, k1s, k2r, k2s, k3r, k3s, k4r, k4s;
        rhs(st, k1r, k1s);
        HydroState y2 = advance(st, k1r, k1s, 0.5 * dt);
        rhs(y2, k2r, k2s);
        HydroState y3 = advance(st, k2r, k2s, 0.5 * dt);
        rhs(y3, k3r, k3s);
        HydroState y4 = advance(st, k3r, k3s, dt);
        rhs(y4, k4r, k4s);

        HydroState out = st;
        out.t = st.t + dt;
        const double w = dt / 6.0;
        for (std::size_t i = 0; i < n; ++i) {
            out.rho[i] = st.rho[i] + w * (k1r[i] + 2.0 * (k2r[i] + k3r[i]) + k4r[i]);
            out.s_residual[i] =
                st.s_residual[i] + w * (k1s[i] + 2.0 * (k2s[i] + k3s[i]) + k4s[i]);
        }

        double rmax = 0.0, rmin = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(out.rho[i]) || !std::isfinite(out.s_residual[i]))
                throw NumericsError("non-finite field after step (unstable)");
            rmax = std::max(rmax, out.rho[i]);
            rmin = std::min(rmin, out.rho[i]);
        }
        if (rmin < -1e-10 * rmax) throw NumericsError("density went negative beyond tolerance");
        for (double& v : out.rho) v = std::max(v, 0.0);

        StepResult res;
        const double nrm = integrate(out.rho, grid_);
        res.norm_drift = std::abs(nrm - 1.0);
        if (res.norm_drift > 1e-12) {
            for (double& v : out.rho) v /= nrm;
            res.renormalized = true;
        }
        res.state = std::move(out);
        return res;
    }

private:
    GridSpec grid_;
    SimulationParams params_;
    RealField u_;
};

inline StepResult step(const HydroState& st, const GridSpec& g, const SimulationParams& params) {
    return Stepper(g, params).step(st);
}

}  // namespace lmd
