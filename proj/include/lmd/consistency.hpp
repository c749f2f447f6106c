#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "lmd/grid.hpp"
#include "lmd/observables.hpp"
#include "lmd/state.hpp"

namespace lmd {

/// Local momentum variance model mu(rho, eta), eta = (grad rho)^2.
struct FamilyMu {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct CustomMu {
    std::string name;
    std::function<double(double rho, double eta)> rule;
};

using MuModel = std::variant<FamilyMu, CustomMu>;

inline void validate_mu(const MuModel& mu) {
    if (const auto* f = std::get_if<FamilyMu>(&mu)) {
        if (f->a < 0.0) throw ConfigError("family coefficient a must be non-negative");
    } else {
        const auto& c = std::get<CustomMu>(mu);
        if (!c.rule) throw ConfigError("custom mu model has no rule");
    }
}

inline std::string mu_name(const MuModel& mu) {
    if (const auto* f = std::get_if<FamilyMu>(&mu)) {
        return "family(a=" + std::to_string(f->a) + ", b=" + std::to_string(f->b) +
               ", c=" + std::to_string(f->c) + ")";
    }
    return "custom(" + std::get<CustomMu>(mu).name + ")";
}

inline RealField eta_field(const RealField& rho, const GridSpec& g) {
    RealField eta(g.size(), 0.0);
    for (int d = 0; d < g.ndim(); ++d) {
        RealField dr = spatial_derivative(rho, g, d, 1);
        for (std::size_t i = 0; i < g.size(); ++i) eta[i] += dr[i] * dr[i];
    }
    return eta;
}

/// Euler-Lagrange expression Q0 = [d/drho - div d/d(grad rho)](rho mu).
/// Family models use the closed form -4a grad^2 sqrt(rho)/sqrt(rho) + c
/// (the b/rho term drops out of the variation); custom models are assembled
/// from finite-difference partials of mu in (rho, eta).
inline RealField q0_field(const MuModel& mu, const RealField& rho, const GridSpec& g) {
    validate_mu(mu);
    const std::size_t n = g.size();
    double rmin = std::numeric_limits<double>::infinity();
    for (double v : rho) rmin = std::min(rmin, v);
    if (!(rmin > 0.0)) throw ConfigError("q0_field: probe density touches zero");

    if (const auto* f = std::get_if<FamilyMu>(&mu)) {
        RealField u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = std::sqrt(rho[i]);
        RealField q(n, f->c);
        for (int d = 0; d < g.ndim(); ++d) {
            RealField d2u = spatial_derivative(u, g, d, 2);
            for (std::size_t i = 0; i < n; ++i) q[i] -= 4.0 * f->a * d2u[i] / u[i];
        }
        return q;
    }

    const auto& cm = std::get<CustomMu>(mu);
    const RealField eta = eta_field(rho, g);
    double rmax = 0.0, emax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rmax = std::max(rmax, rho[i]);
        emax = std::max(emax, std::abs(eta[i]));
    }
    const double hr = 1e-6 * rmax;
    const double he = 1e-6 * emax + 1e-14;

    RealField mu_val(n), mu_rho(n), mu_eta(n);
    for (std::size_t i = 0; i < n; ++i) {
        mu_val[i] = cm.rule(rho[i], eta[i]);
        mu_rho[i] = (cm.rule(rho[i] + hr, eta[i]) - cm.rule(rho[i] - hr, eta[i])) / (2.0 * hr);
        mu_eta[i] = (cm.rule(rho[i], eta[i] + he) - cm.rule(rho[i], eta[i] - he)) / (2.0 * he);
        if (!std::isfinite(mu_val[i]) || !std::isfinite(mu_rho[i]) || !std::isfinite(mu_eta[i]))
            throw ConfigError("q0_field: non-finite mu partials");
    }

    // Q0 = (mu + rho mu_rho) - sum_d D_d(2 rho mu_eta D_d rho)
    RealField q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = mu_val[i] + rho[i] * mu_rho[i];
    for (int d = 0; d < g.ndim(); ++d) {
        RealField dr = spatial_derivative(rho, g, d, 1);
        RealField flux(n);
        for (std::size_t i = 0; i < n; ++i) flux[i] = 2.0 * rho[i] * mu_eta[i] * dr[i];
        RealField div = spatial_derivative(flux, g, d, 1);
        for (std::size_t i = 0; i < n; ++i) q[i] -= div[i];
    }
    return q;
}

/// Brute-force functional gradient: component j is the centered difference of
/// the functional under a unit bump at grid point j, divided by the cell
/// volume. O(N) functional evaluations.
inline RealField gateaux_derivative(const std::function<double(const RealField&)>& functional,
                                    const RealField& rho, const GridSpec& g,
                                    double epsilon = 0.0) {
    const std::size_t n = g.size();
    double rmax = 0.0;
    for (double v : rho) rmax = std::max(rmax, v);
    // Larger than the classic sqrt(eps) choice: the functional may evaluate
    // numeric partials of mu internally, whose roundoff the division by
    // epsilon would otherwise amplify.
    if (epsilon <= 0.0) epsilon = 1e-4 * rmax;
    RealField grad(n);
    RealField probe = rho;
    for (std::size_t j = 0; j < n; ++j) {
        if (rho[j] - epsilon <= 0.0)
            throw ConfigError("gateaux_derivative: epsilon drives density negative");
        probe[j] = rho[j] + epsilon;
        const double fp = functional(probe);
        probe[j] = rho[j] - epsilon;
        const double fm = functional(probe);
        probe[j] = rho[j];
        grad[j] = (fp - fm) / (2.0 * epsilon * g.cell_volume());
    }
    return grad;
}

/// Functional derivative of F[rho] = integral of rho Q0[rho], via the
/// brute-force Gateaux route with nested Q0 evaluation.
inline RealField q1_field(const MuModel& mu, const RealField& rho, const GridSpec& g,
                          double epsilon = 0.0) {
    auto functional = [&](const RealField& r) {
        const RealField q0 = q0_field(mu, r, g);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += r[i] * q0[i];
        return acc * g.cell_volume();
    };
    return gateaux_derivative(functional, rho, g, epsilon);
}

struct ProbeDiagnostics {
    std::string name;
    double max_abs_dev = 0.0;
};

struct ConsistencyReport {
    std::string model;
    std::vector<ProbeDiagnostics> probes;
    double tolerance = 0.0;
    double max_abs_deviation = 0.0;
    bool pass = false;
};

struct NamedProbe {
    std::string name;
    RealField rho;
};

/// Nodeless probe shapes, normalized, bounded well away from zero so the
/// Gateaux bumps stay positive.
inline std::vector<NamedProbe> default_probes(const GridSpec& g) {
    const int D = g.ndim();
    const std::size_t n = g.size();
    auto normalized = [&](RealField f) {
        const double tot = integrate(f, g);
        for (double& v : f) v /= tot;
        return f;
    };
    auto wrapped = [&](int d, std::size_t i, double center) {
        double r = g.coord(d, g.axis_index(i, d)) - center;
        r -= g.length(d) * std::round(r / g.length(d));
        return r;
    };

    std::vector<NamedProbe> probes;
    {
        RealField f(n);
        for (std::size_t i = 0; i < n; ++i) {
            double e = 0.0;
            for (int d = 0; d < D; ++d) {
                const double c = 0.5 * (g.x_min(d) + g.x_max(d));
                const double r = wrapped(d, i, c);
                e += r * r / 2.0;
            }
            f[i] = std::exp(-e) + 0.2;
        }
        probes.push_back({"gaussian", normalized(std::move(f))});
    }
    {
        RealField f(n);
        for (std::size_t i = 0; i < n; ++i) {
            double e1 = 0.0, e2 = 0.0;
            for (int d = 0; d < D; ++d) {
                const double c = 0.5 * (g.x_min(d) + g.x_max(d));
                const double r1 = wrapped(d, i, c - 0.15 * g.length(d));
                const double r2 = wrapped(d, i, c + 0.15 * g.length(d));
                e1 += r1 * r1 / 2.0;
                e2 += r2 * r2 / 1.125;
            }
            f[i] = std::exp(-e1) + 0.7 * std::exp(-e2) + 0.2;
        }
        probes.push_back({"double_gaussian", normalized(std::move(f))});
    }
    {
        RealField f(n);
        for (std::size_t i = 0; i < n; ++i) {
            double v = 1.0;
            for (int d = 0; d < D; ++d) {
                const double th =
                    2.0 * std::numbers::pi * (g.coord(d, g.axis_index(i, d)) - g.x_min(d)) /
                    g.length(d);
                v *= 1.0 + 0.5 * std::cos(th);
            }
            f[i] = v + 0.1;
        }
        probes.push_back({"raised_cosine", normalized(std::move(f))});
    }
    return probes;
}

/// Tests the consistency condition Q1 = Q0 over the probe set.
inline ConsistencyReport check_consistency(const MuModel& mu, const std::vector<NamedProbe>& probes,
                                           const GridSpec& g, double tolerance = 1e-4) {
    if (probes.empty()) throw ConfigError("check_consistency needs at least one probe");
    validate_mu(mu);
    ConsistencyReport rep;
    rep.model = mu_name(mu);
    rep.tolerance = tolerance;
    for (const auto& probe : probes) {
        const RealField q0 = q0_field(mu, probe.rho, g);
        const RealField q1 = q1_field(mu, probe.rho, g);
        double dev = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) dev = std::max(dev, std::abs(q1[i] - q0[i]));
        rep.probes.push_back({probe.name, dev});
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
    }
    rep.pass = rep.max_abs_deviation <= tolerance;
    return rep;
}

struct PlaneWaveCalibration {
    double mean_p = 0.0;
    double energy_shift = 0.0;
    bool c_admissible = false;
};

/// Plane-wave check for the additive constant c: the global mean momentum of
/// a uniform-density plane wave is p0 regardless of c; c only shifts the
/// energy zero, and the stated convention admits c = 0 only.
inline PlaneWaveCalibration plane_wave_calibration(double c_value, const GridSpec& g, double p0,
                                                   double mass) {
    (void)mass;
    if (std::abs(snap_wavevector(p0, g.length(0)) - p0) > 1e-12)
        throw ConfigError("plane_wave_calibration: p0 must be grid-commensurate");
    HydroState st = sample_plane_wave(g, std::vector<double>(g.ndim(), p0));
    const RealField p = local_mean_momentum(st, g, 0);
    double mean_p = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mean_p += st.rho[i] * p[i];
    mean_p *= g.cell_volume();
    PlaneWaveCalibration cal;
    cal.mean_p = mean_p;
    cal.energy_shift = c_value * integrate(st.rho, g);
    cal.c_admissible = (c_value == 0.0);
    return cal;
}

}  // namespace lmd
