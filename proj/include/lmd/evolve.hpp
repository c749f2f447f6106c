#pragma once

#include <string>
#include <vector>

#include "lmd/dynamics.hpp"
#include "lmd/observables.hpp"

namespace lmd {

struct EvolveResult {
    HydroState state;
    std::vector<ObservableReport> reports;
    std::vector<HydroState> snapshots;  // filled only when snapshot_every > 0
    double max_norm_drift = 0.0;        // worst pre-correction drift seen
    long renormalizations = 0;
};

/// Applies `step` n_steps times; a report is taken for the initial state and
/// after every report_every steps. Deterministic for identical inputs.
inline EvolveResult evolve(HydroState state, const GridSpec& g, const SimulationParams& params,
                           long n_steps, long report_every, long snapshot_every = 0) {
    if (n_steps < 0) throw ConfigError("n_steps must be non-negative");
    if (report_every <= 0) throw ConfigError("report_every must be positive");
    Stepper stepper(g, params);
    EvolveResult res;
    res.reports.push_back(global_stats(state, g, params));
    if (snapshot_every > 0) res.snapshots.push_back(state);
    for (long i = 0; i < n_steps; ++i) {
        StepResult sr;
        try {
            sr = stepper.step(state);
        } catch (const NumericsError& e) {
            throw NumericsError(std::string(e.what()) + " (at step " + std::to_string(i + 1) + ")",
                                i + 1);
        }
        state = std::move(sr.state);
        res.max_norm_drift = std::max(res.max_norm_drift, sr.norm_drift);
        if (sr.renormalized) ++res.renormalizations;
        if ((i + 1) % report_every == 0) res.reports.push_back(global_stats(state, g, params));
        if (snapshot_every > 0 && (i + 1) % snapshot_every == 0) res.snapshots.push_back(state);
    }
    res.state = std::move(state);
    return res;
}

}  // namespace lmd
