#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "lmd/grid.hpp"
#include "lmd/potential.hpp"
#include "lmd/state.hpp"

namespace lmd {

inline void require_uniform_lambda(const std::vector<DofParams>& dofs, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("oracle requires lambda > 0");
    for (const auto& d : dofs)
        if (std::abs(d.lambda - lambda) > 1e-14)
            throw ConfigError("oracle requires a uniform lambda across all dofs");
}

/// psi = sqrt(rho) exp(i S / lambda), S reassembled from the k0 background
/// plus residual. k0 must carry a whole number of phase windings per period
/// at this lambda, otherwise psi is not single-valued on the torus.
inline ComplexField to_wavefunction(const HydroState& st, const GridSpec& g, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("to_wavefunction requires lambda > 0");
    for (int d = 0; d < g.ndim(); ++d) {
        const double windings = st.k0[d] * g.length(d) / (2.0 * std::numbers::pi * lambda);
        if (std::abs(windings - std::round(windings)) > 1e-9)
            throw ConfigError("k0 is not commensurate with lambda on this grid");
    }
    ComplexField f;
    f.psi.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double s = st.s_residual[i];
        for (int d = 0; d < g.ndim(); ++d) s += st.k0[d] * g.coord(d, g.axis_index(i, d));
        f.psi[i] = std::sqrt(st.rho[i]) * std::polar(1.0, s / lambda);
    }
    return f;
}

namespace detail {

inline double wrap_to_pi(double a) {
    while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
    while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

}  // namespace detail

/// Inverse of to_wavefunction for nodeless psi. The phase is unwrapped
/// dimension-by-dimension from the grid origin (axis 0 row through the origin,
/// then axis 1 columns, then axis 2); the winding per period goes into k0, the
/// periodic remainder into s_residual. k0_hint is advisory only: for a
/// nodeless field the winding, and hence k0, is unique.
inline HydroState from_wavefunction(const ComplexField& f, const GridSpec& g, double lambda,
                                    const std::vector<double>& k0_hint = {}) {
    (void)k0_hint;
    if (!(lambda > 0.0)) throw ConfigError("from_wavefunction requires lambda > 0");
    const std::size_t n = g.size();
    if (f.psi.size() != n) throw ConfigError("wavefunction size does not match grid");

    double amax = 0.0, amin = std::numeric_limits<double>::infinity();
    for (const auto& z : f.psi) {
        const double a = std::norm(z);
        amax = std::max(amax, a);
        amin = std::min(amin, a);
    }
    if (amin <= 1e-12 * amax)
        throw ConfigError("node detected: phase is undefined where |psi| vanishes");

    RealField theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = std::arg(f.psi[i]);

    RealField unwrapped(n, 0.0);
    const int D = g.ndim();
    const int n0 = g.n(0);
    unwrapped[0] = theta[0];
    // Axis-0 row through the origin.
    for (int i = 1; i < n0; ++i) {
        const std::size_t cur = static_cast<std::size_t>(i) * g.stride(0);
        const std::size_t prev = static_cast<std::size_t>(i - 1) * g.stride(0);
        unwrapped[cur] = unwrapped[prev] + detail::wrap_to_pi(theta[cur] - theta[prev]);
    }
    if (D >= 2) {
        const int n1 = g.n(1);
        for (int i0 = 0; i0 < n0; ++i0) {
            const std::size_t base = static_cast<std::size_t>(i0) * g.stride(0);
            for (int i1 = 1; i1 < n1; ++i1) {
                const std::size_t cur = base + static_cast<std::size_t>(i1) * g.stride(1);
                const std::size_t prev = base + static_cast<std::size_t>(i1 - 1) * g.stride(1);
                unwrapped[cur] = unwrapped[prev] + detail::wrap_to_pi(theta[cur] - theta[prev]);
            }
        }
    }
    if (D == 3) {
        const int n1 = g.n(1), n2 = g.n(2);
        for (int i0 = 0; i0 < n0; ++i0) {
            for (int i1 = 0; i1 < n1; ++i1) {
                const std::size_t base = static_cast<std::size_t>(i0) * g.stride(0) +
                                         static_cast<std::size_t>(i1) * g.stride(1);
                for (int i2 = 1; i2 < n2; ++i2) {
                    const std::size_t cur = base + static_cast<std::size_t>(i2);
                    const std::size_t prev = cur - 1;
                    unwrapped[cur] = unwrapped[prev] + detail::wrap_to_pi(theta[cur] - theta[prev]);
                }
            }
        }
    }

    HydroState st;
    st.rho.resize(n);
    for (std::size_t i = 0; i < n; ++i) st.rho[i] = std::norm(f.psi[i]);
    st.k0.resize(D);
    for (int d = 0; d < D; ++d) {
        // Winding along the base line of axis d.
        double total = 0.0;
        for (int i = 0; i < g.n(d); ++i) {
            const std::size_t cur = static_cast<std::size_t>(i) * g.stride(d);
            const std::size_t next = static_cast<std::size_t>((i + 1) % g.n(d)) * g.stride(d);
            total += detail::wrap_to_pi(theta[next] - theta[cur]);
        }
        const double w = std::round(total / (2.0 * std::numbers::pi));
        st.k0[d] = lambda * 2.0 * std::numbers::pi * w / g.length(d);
    }
    st.s_residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lin = 0.0;
        for (int d = 0; d < D; ++d) lin += st.k0[d] * g.coord(d, g.axis_index(i, d));
        st.s_residual[i] = lambda * unwrapped[i] - lin;
    }
    return st;
}

/// Strang-split spectral propagator for i lambda dpsi/dt =
/// -sum_i (lambda^2 / 2 m_i) grad_i^2 psi + U psi. Unitary by construction.
class SplitStepPropagator {
public:
    SplitStepPropagator(const GridSpec& g, const std::vector<DofParams>& dofs,
                        const PotentialSpec& potential, double dt, double lambda)
        : grid_(g), size_(g.size()) {
        require_uniform_lambda(dofs, lambda);
        for (int d = 0; d < g.ndim(); ++d)
            if (g.n(d) % 2 != 0) throw ConfigError("split_step requires even n_points per axis");
        const RealField u = evaluate_potential(potential, g);
        half_v_.resize(size_);
        for (std::size_t i = 0; i < size_; ++i)
            half_v_[i] = std::polar(1.0, -u[i] * dt / (2.0 * lambda));
        kinetic_.resize(size_);
        for (std::size_t i = 0; i < size_; ++i) {
            double phase = 0.0;
            for (int d = 0; d < g.ndim(); ++d) {
                int idx = g.axis_index(i, d);
                if (idx > g.n(d) / 2) idx -= g.n(d);
                const double k = 2.0 * std::numbers::pi * idx / g.length(d);
                phase += lambda * k * k / (2.0 * dofs[d].mass);
            }
            kinetic_[i] = std::polar(1.0, -phase * dt);
        }
        buf_.resize(size_);
        int dims[GridSpec::kMaxDims];
        for (int d = 0; d < g.ndim(); ++d) dims[d] = g.n(d);
        auto* ptr = reinterpret_cast<fftw_complex*>(buf_.data());
        fwd_ = fftw_plan_dft(g.ndim(), dims, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft(g.ndim(), dims, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (fwd_ == nullptr || bwd_ == nullptr) throw Error("FFTW plan creation failed");
    }

    SplitStepPropagator(const SplitStepPropagator&) = delete;
    SplitStepPropagator& operator=(const SplitStepPropagator&) = delete;
    ~SplitStepPropagator() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }

    void step(ComplexField& f) const {
        if (f.psi.size() != size_) throw ConfigError("wavefunction size does not match grid");
        for (std::size_t i = 0; i < size_; ++i) buf_[i] = f.psi[i] * half_v_[i];
        fftw_execute(fwd_);
        for (std::size_t i = 0; i < size_; ++i) buf_[i] *= kinetic_[i];
        fftw_execute(bwd_);
        const double inv_n = 1.0 / static_cast<double>(size_);
        for (std::size_t i = 0; i < size_; ++i) f.psi[i] = buf_[i] * inv_n * half_v_[i];
    }

private:
    GridSpec grid_;
    std::size_t size_;
    ComplexVec half_v_;
    ComplexVec kinetic_;
    mutable ComplexVec buf_;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

inline ComplexField split_step(const ComplexField& psi, const GridSpec& g,
                               const std::vector<DofParams>& dofs, const PotentialSpec& potential,
                               double dt, double lambda) {
    SplitStepPropagator prop(g, dofs, potential, dt, lambda);
    ComplexField out = psi;
    prop.step(out);
    return out;
}

}  // namespace lmd
