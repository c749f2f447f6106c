#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "lmd/grid.hpp"

namespace lmd {

struct FreePotential {};

struct HarmonicPotential {
    std::vector<double> stiffness;  // per dimension
    std::vector<double> center;     // per dimension
};

/// Additive per-dimension polynomial: U(x) = sum_d sum_k coeffs[d][k] * x_d^k.
struct PolynomialPotential {
    std::vector<std::vector<double>> coeffs;
};

struct GaussianBarrierPotential {
    double height;
    std::vector<double> center;
    double width;
};

using PotentialSpec =
    std::variant<FreePotential, HarmonicPotential, PolynomialPotential, GaussianBarrierPotential>;

inline RealField evaluate_potential(const PotentialSpec& spec, const GridSpec& g) {
    const int D = g.ndim();
    RealField u(g.size(), 0.0);
    if (std::holds_alternative<FreePotential>(spec)) return u;

    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        double v = 0.0;
        if (const auto* h = std::get_if<HarmonicPotential>(&spec)) {
            if (static_cast<int>(h->stiffness.size()) != D ||
                static_cast<int>(h->center.size()) != D)
                throw ConfigError("harmonic potential dimension mismatch");
            for (int d = 0; d < D; ++d) {
                const double r = g.coord(d, g.axis_index(idx, d)) - h->center[d];
                v += 0.5 * h->stiffness[d] * r * r;
            }
        } else if (const auto* p = std::get_if<PolynomialPotential>(&spec)) {
            if (static_cast<int>(p->coeffs.size()) != D)
                throw ConfigError("polynomial potential dimension mismatch");
            for (int d = 0; d < D; ++d) {
                const double x = g.coord(d, g.axis_index(idx, d));
                double acc = 0.0;
                for (auto it = p->coeffs[d].rbegin(); it != p->coeffs[d].rend(); ++it)
                    acc = acc * x + *it;
                v += acc;
            }
        } else if (const auto* b = std::get_if<GaussianBarrierPotential>(&spec)) {
            if (static_cast<int>(b->center.size()) != D)
                throw ConfigError("gaussian barrier dimension mismatch");
            if (!(b->width > 0.0)) throw ConfigError("gaussian barrier needs width > 0");
            double r2 = 0.0;
            for (int d = 0; d < D; ++d) {
                const double r = g.coord(d, g.axis_index(idx, d)) - b->center[d];
                r2 += r * r;
            }
            v = b->height * std::exp(-r2 / (2.0 * b->width * b->width));
        }
        if (!std::isfinite(v)) throw ConfigError("potential is non-finite at a grid point");
        u[idx] = v;
    }
    return u;
}

}  // namespace lmd
