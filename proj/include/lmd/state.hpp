#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "lmd/grid.hpp"

namespace lmd {

/// Natural units, hbar = 1; lambda is a dimensionless multiple of hbar.
struct DofParams {
    double mass = 1.0;
    double lambda = 1.0;
};

inline void validate_dofs(const std::vector<DofParams>& dofs, const GridSpec& g) {
    if (static_cast<int>(dofs.size()) != g.ndim())
        throw ConfigError("dof count does not match grid dimension");
    for (const auto& d : dofs) {
        if (!(d.mass > 0.0)) throw ConfigError("mass must be positive");
        if (d.lambda < 0.0) throw ConfigError("lambda must be non-negative");
    }
}

/// Density rho plus action S(x) = sum_d k0_d x_d + s_residual(x); the linear
/// background keeps plane waves single-valued on the torus.
struct HydroState {
    double t = 0.0;
    RealField rho;
    RealField s_residual;
    std::vector<double> k0;
};

struct ComplexField {
    ComplexVec psi;
};

inline double norm(const HydroState& st, const GridSpec& g) { return integrate(st.rho, g); }

inline double norm(const ComplexField& f, const GridSpec& g) {
    double s = 0.0;
    for (const auto& z : f.psi) s += std::norm(z);
    return s * g.cell_volume();
}

/// Nearest wavevector representable as a whole number of windings per period.
inline double snap_wavevector(double k, double box_length) {
    const double unit = 2.0 * std::numbers::pi / box_length;
    return std::round(k / unit) * unit;
}

/// Normalized periodic-wrapped Gaussian with linear phase background p0.
/// Preconditions: sigma_d >= 3 dx_d and Gaussian mass outside the box < 1e-10.
inline HydroState sample_gaussian(const GridSpec& g, const std::vector<double>& center,
                                  const std::vector<double>& sigma,
                                  const std::vector<double>& p0) {
    const int D = g.ndim();
    if (static_cast<int>(center.size()) != D || static_cast<int>(sigma.size()) != D ||
        static_cast<int>(p0.size()) != D)
        throw ConfigError("sample_gaussian: per-dimension argument size mismatch");
    for (int d = 0; d < D; ++d) {
        if (!(sigma[d] > 0.0)) throw ConfigError("sample_gaussian: sigma must be positive");
        if (sigma[d] < 3.0 * g.dx(d))
            throw ConfigError("sample_gaussian: sigma under-resolved (need sigma >= 3 dx)");
        // Mass beyond half a box length from the center; the minimum-image
        // wrap aliases anything further than L/2 onto the wrong side.
        const double L = g.length(d);
        const double tail = std::erfc(0.5 * L / (std::numbers::sqrt2 * sigma[d]));
        if (tail > 1e-10)
            throw ConfigError("sample_gaussian: Gaussian tail truncation exceeds 1e-10");
    }
    HydroState st;
    st.rho.resize(g.size());
    st.s_residual.assign(g.size(), 0.0);
    st.k0.resize(D);
    for (int d = 0; d < D; ++d) st.k0[d] = snap_wavevector(p0[d], g.length(d));
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        double e = 0.0;
        for (int d = 0; d < D; ++d) {
            const double L = g.length(d);
            double r = g.coord(d, g.axis_index(idx, d)) - center[d];
            r -= L * std::round(r / L);  // minimum-image displacement
            e += r * r / (2.0 * sigma[d] * sigma[d]);
        }
        st.rho[idx] = std::exp(-e);
    }
    const double total = integrate(st.rho, g);
    for (double& v : st.rho) v /= total;
    return st;
}

/// Uniform-density plane wave; p0 is snapped to the nearest grid-commensurate
/// wavevector per dimension.
inline HydroState sample_plane_wave(const GridSpec& g, const std::vector<double>& p0) {
    const int D = g.ndim();
    if (static_cast<int>(p0.size()) != D)
        throw ConfigError("sample_plane_wave: p0 size mismatch");
    double volume = 1.0;
    for (int d = 0; d < D; ++d) volume *= g.length(d);
    HydroState st;
    st.rho.assign(g.size(), 1.0 / volume);
    st.s_residual.assign(g.size(), 0.0);
    st.k0.resize(D);
    for (int d = 0; d < D; ++d) st.k0[d] = snap_wavevector(p0[d], g.length(d));
    return st;
}

}  // namespace lmd
