// Scenario runner and verification harness for the generalized-lambda
// Madelung hydrodynamics library. Subcommands: run, compare-oracle, sweep,
// check. Exit codes: 0 ok, 2 usage/config, 3 numerics, 4 I/O,
// 5 verification failure.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmd/consistency.hpp"
#include "lmd/dynamics.hpp"
#include "lmd/evolve.hpp"
#include "lmd/io.hpp"
#include "lmd/observables.hpp"
#include "lmd/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerics = 3;
constexpr int kExitIo = 4;
constexpr int kExitVerification = 5;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& context) {
    if (!obj.is_object()) throw lmd::ConfigError("config: " + context + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw lmd::ConfigError("config: unknown key \"" + key + "\" in " + context);
    }
}

struct InitialSpec {
    std::string type;  // gaussian | plane_wave | snapshot
    std::vector<double> center, sigma, p0;
    std::string snapshot_path;
};

struct OutputSpec {
    std::string dir = "out";
    bool write_snapshots = false;
    long snapshot_every = 0;
};

struct ScenarioConfig {
    lmd::GridSpec grid{{{0.0, 1.0, 8}}};
    lmd::SimulationParams params;
    InitialSpec initial;
    long n_steps = 0;
    long report_every = 1;
    OutputSpec outputs;
    double compare_threshold = 1e-3;
    json resolved;  // config echoed back into run.json
};

lmd::GridSpec parse_grid(const json& j) {
    require_keys(j, {"dims"}, "grid");
    std::vector<lmd::AxisSpec> axes;
    for (const auto& d : j.at("dims")) {
        require_keys(d, {"x_min", "x_max", "n_points"}, "grid.dims[]");
        axes.push_back({d.at("x_min").get<double>(), d.at("x_max").get<double>(),
                        d.at("n_points").get<int>()});
    }
    return lmd::make_grid(axes);
}

lmd::PotentialSpec parse_potential(const json& j) {
    require_keys(j, {"type", "stiffness", "center", "coeffs", "height", "width"}, "potential");
    const std::string type = j.at("type").get<std::string>();
    if (type == "free") {
        require_keys(j, {"type"}, "potential(free)");
        return lmd::FreePotential{};
    }
    if (type == "harmonic") {
        require_keys(j, {"type", "stiffness", "center"}, "potential(harmonic)");
        return lmd::HarmonicPotential{j.at("stiffness").get<std::vector<double>>(),
                                      j.at("center").get<std::vector<double>>()};
    }
    if (type == "polynomial") {
        require_keys(j, {"type", "coeffs"}, "potential(polynomial)");
        return lmd::PolynomialPotential{j.at("coeffs").get<std::vector<std::vector<double>>>()};
    }
    if (type == "gaussian_barrier") {
        require_keys(j, {"type", "height", "center", "width"}, "potential(gaussian_barrier)");
        return lmd::GaussianBarrierPotential{j.at("height").get<double>(),
                                             j.at("center").get<std::vector<double>>(),
                                             j.at("width").get<double>()};
    }
    throw lmd::ConfigError("config: unknown potential type \"" + type + "\"");
}

ScenarioConfig parse_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw lmd::IoError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw lmd::ConfigError("config: invalid JSON: " + std::string(e.what()));
    }
    require_keys(j, {"version", "grid", "dofs", "potential", "initial", "integrator", "outputs",
                     "compare"},
                 "top level");

    ScenarioConfig cfg;
    cfg.grid = parse_grid(j.at("grid"));

    cfg.params.dofs.clear();
    for (const auto& d : j.at("dofs")) {
        require_keys(d, {"mass", "lambda"}, "dofs[]");
        cfg.params.dofs.push_back({d.at("mass").get<double>(), d.at("lambda").get<double>()});
    }
    cfg.params.potential = parse_potential(j.at("potential"));

    const json& integ = j.at("integrator");
    require_keys(integ, {"dt", "n_steps", "report_every", "kappa", "rho_floor"}, "integrator");
    cfg.params.dt = integ.at("dt").get<double>();
    cfg.n_steps = integ.at("n_steps").get<long>();
    cfg.report_every = integ.value("report_every", 1L);
    cfg.params.kappa = integ.value("kappa", 0.25);
    cfg.params.rho_floor = integ.value("rho_floor", 1e-12);
    cfg.params.validate(cfg.grid);

    const json& init = j.at("initial");
    require_keys(init, {"type", "center", "sigma", "p0", "path"}, "initial");
    cfg.initial.type = init.at("type").get<std::string>();
    if (cfg.initial.type == "gaussian") {
        require_keys(init, {"type", "center", "sigma", "p0"}, "initial(gaussian)");
        cfg.initial.center = init.at("center").get<std::vector<double>>();
        cfg.initial.sigma = init.at("sigma").get<std::vector<double>>();
        cfg.initial.p0 = init.at("p0").get<std::vector<double>>();
    } else if (cfg.initial.type == "plane_wave") {
        require_keys(init, {"type", "p0"}, "initial(plane_wave)");
        cfg.initial.p0 = init.at("p0").get<std::vector<double>>();
    } else if (cfg.initial.type == "snapshot") {
        require_keys(init, {"type", "path"}, "initial(snapshot)");
        cfg.initial.snapshot_path = init.at("path").get<std::string>();
    } else {
        throw lmd::ConfigError("config: unknown initial type \"" + cfg.initial.type + "\"");
    }

    if (j.contains("outputs")) {
        const json& out = j.at("outputs");
        require_keys(out, {"dir", "write_snapshots", "snapshot_every"}, "outputs");
        cfg.outputs.dir = out.value("dir", std::string("out"));
        cfg.outputs.write_snapshots = out.value("write_snapshots", false);
        cfg.outputs.snapshot_every = out.value("snapshot_every", 0L);
    }
    if (j.contains("compare")) {
        const json& cmp = j.at("compare");
        require_keys(cmp, {"threshold"}, "compare");
        cfg.compare_threshold = cmp.value("threshold", 1e-3);
    }
    if (const char* env = std::getenv("LAMBDA_MADELUNG_OUT")) cfg.outputs.dir = env;

    // Echo the resolved configuration (defaults filled in) for run.json.
    json resolved = j;
    resolved["version"] = kVersion;
    resolved["integrator"]["report_every"] = cfg.report_every;
    resolved["integrator"]["kappa"] = cfg.params.kappa;
    resolved["integrator"]["rho_floor"] = cfg.params.rho_floor;
    resolved["outputs"] = {{"dir", cfg.outputs.dir},
                           {"write_snapshots", cfg.outputs.write_snapshots},
                           {"snapshot_every", cfg.outputs.snapshot_every}};
    cfg.resolved = resolved;
    return cfg;
}

lmd::HydroState build_initial(const ScenarioConfig& cfg) {
    if (cfg.initial.type == "gaussian")
        return lmd::sample_gaussian(cfg.grid, cfg.initial.center, cfg.initial.sigma,
                                    cfg.initial.p0);
    if (cfg.initial.type == "plane_wave") return lmd::sample_plane_wave(cfg.grid, cfg.initial.p0);
    return lmd::read_snapshot(cfg.initial.snapshot_path, cfg.grid);
}

void write_manifest(const ScenarioConfig& cfg, const fs::path& dir) {
    std::ofstream out(dir / "run.json");
    if (!out) throw lmd::IoError("cannot write run.json");
    out << cfg.resolved.dump(2) << "\n";
}

int cmd_run(const std::string& config_path) {
    ScenarioConfig cfg = parse_config(config_path);
    lmd::HydroState initial = build_initial(cfg);
    const long snap_every =
        cfg.outputs.write_snapshots ? std::max(cfg.outputs.snapshot_every, 1L) : 0;
    lmd::EvolveResult res =
        lmd::evolve(std::move(initial), cfg.grid, cfg.params, cfg.n_steps, cfg.report_every,
                    snap_every);
    const fs::path dir(cfg.outputs.dir);
    fs::create_directories(dir);
    lmd::write_observables_csv(dir / "observables.csv", res.reports, cfg.grid.ndim());
    if (snap_every > 0) {
        long step_no = 0;  // snapshots are indexed by step number
        for (const auto& snap : res.snapshots) {
            lmd::write_snapshot(dir, step_no, snap, cfg.grid);
            step_no += snap_every;
        }
    }
    write_manifest(cfg, dir);
    if (res.renormalizations > 0)
        std::cerr << "note: density renormalized " << res.renormalizations
                  << " time(s); worst drift " << res.max_norm_drift << "\n";
    return kExitOk;
}

int cmd_compare_oracle(const std::string& config_path) {
    ScenarioConfig cfg = parse_config(config_path);
    const double lambda = cfg.params.dofs[0].lambda;
    for (const auto& d : cfg.params.dofs)
        if (std::abs(d.lambda - lambda) > 1e-14 || lambda <= 0.0)
            throw lmd::ConfigError(
                "compare-oracle requires a uniform lambda > 0 (no wavefunction exists for "
                "hybrid systems)");

    lmd::HydroState state = build_initial(cfg);
    lmd::ComplexField psi = lmd::to_wavefunction(state, cfg.grid, lambda);
    lmd::Stepper stepper(cfg.grid, cfg.params);
    lmd::SplitStepPropagator prop(cfg.grid, cfg.params.dofs, cfg.params.potential, cfg.params.dt,
                                  lambda);

    std::vector<double> t_samples, linf_rho, l2_rho;
    auto sample = [&]() {
        double linf = 0.0, l2 = 0.0;
        for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
            const double diff = state.rho[i] - std::norm(psi.psi[i]);
            linf = std::max(linf, std::abs(diff));
            l2 += diff * diff;
        }
        t_samples.push_back(state.t);
        linf_rho.push_back(linf);
        l2_rho.push_back(std::sqrt(l2 * cfg.grid.cell_volume()));
    };
    sample();
    for (long i = 0; i < cfg.n_steps; ++i) {
        state = stepper.step(state).state;
        prop.step(psi);
        if ((i + 1) % cfg.report_every == 0) sample();
    }

    const fs::path dir(cfg.outputs.dir);
    fs::create_directories(dir);
    json report = {{"t_samples", t_samples},
                   {"linf_rho", linf_rho},
                   {"l2_rho", l2_rho},
                   {"threshold", cfg.compare_threshold},
                   {"final_linf", linf_rho.back()}};
    std::ofstream out(dir / "compare.json");
    if (!out) throw lmd::IoError("cannot write compare.json");
    out << report.dump(2) << "\n";
    std::cout << report.dump(2) << "\n";
    return linf_rho.back() <= cfg.compare_threshold ? kExitOk : kExitVerification;
}

int cmd_sweep(const std::string& config_path, std::vector<double> lambdas) {
    if (lambdas.empty()) throw lmd::ConfigError("sweep needs at least one lambda value");
    for (double l : lambdas)
        if (l < 0.0) throw lmd::ConfigError("sweep lambda values must be non-negative");
    std::sort(lambdas.begin(), lambdas.end());
    ScenarioConfig cfg = parse_config(config_path);

    const fs::path dir(cfg.outputs.dir);
    fs::create_directories(dir);
    std::ofstream out(dir / "sweep.csv", std::ios::binary);
    if (!out) throw lmd::IoError("cannot write sweep.csv");
    out << "lambda";
    for (int d = 1; d <= cfg.grid.ndim(); ++d)
        out << ",delta_x_" << d << ",delta_p_" << d << ",uncertainty_" << d;
    out << ",energy,error\n";

    bool all_ok = true;
    for (double l : lambdas) {
        lmd::SimulationParams params = cfg.params;
        for (auto& d : params.dofs) d.lambda = l;
        out << lmd::format_double(l);
        try {
            lmd::EvolveResult res =
                lmd::evolve(build_initial(cfg), cfg.grid, params, cfg.n_steps, cfg.report_every);
            const auto& rep = res.reports.back();
            for (int d = 0; d < cfg.grid.ndim(); ++d)
                out << "," << lmd::format_double(rep.delta_x[d]) << ","
                    << lmd::format_double(rep.delta_p[d]) << ","
                    << lmd::format_double(rep.uncertainty_product[d]);
            out << "," << lmd::format_double(rep.energy) << ",\n";
        } catch (const lmd::Error& e) {
            all_ok = false;
            for (int d = 0; d < cfg.grid.ndim(); ++d) out << ",,,";
            out << ",,\"" << e.what() << "\"\n";
        }
    }
    return all_ok ? kExitOk : kExitNumerics;
}

int cmd_check(const std::optional<std::vector<double>>& family,
              const std::optional<std::string>& custom, double tolerance) {
    if (family.has_value() == custom.has_value())
        throw lmd::ConfigError("check needs exactly one of --family or --custom");
    lmd::MuModel mu = lmd::FamilyMu{};
    if (family) {
        if (family->size() != 3)
            throw lmd::ConfigError("--family needs three values: a b c");
        if ((*family)[0] < 0.0)
            throw lmd::ConfigError("family coefficient a must be non-negative");
        mu = lmd::FamilyMu{(*family)[0], (*family)[1], (*family)[2]};
    } else {
        const std::string& name = *custom;
        if (name == "eta") {
            mu = lmd::CustomMu{"eta", [](double, double eta) { return eta; }};
        } else if (name == "rho_eta") {
            mu = lmd::CustomMu{"rho_eta", [](double rho, double eta) { return rho * eta; }};
        } else if (name == "eta_over_rho2") {
            mu = lmd::CustomMu{"eta_over_rho2",
                               [](double rho, double eta) { return 0.25 * eta / (rho * rho); }};
        } else {
            throw lmd::ConfigError("unknown custom rule \"" + name +
                                   "\" (built-ins: eta, rho_eta, eta_over_rho2)");
        }
    }
    const lmd::GridSpec grid = lmd::make_grid({{-6.4, 6.4, 128}});
    const auto probes = lmd::default_probes(grid);
    const lmd::ConsistencyReport rep = lmd::check_consistency(mu, probes, grid, tolerance);
    json jp = json::array();
    for (const auto& p : rep.probes) jp.push_back({{"name", p.name}, {"max_abs_dev", p.max_abs_dev}});
    json doc = {{"model", rep.model},
                {"probes", jp},
                {"tolerance", rep.tolerance},
                {"max_abs_deviation", rep.max_abs_deviation},
                {"verdict", rep.pass ? "pass" : "fail"}};
    std::cout << doc.dump(2) << "\n";
    return rep.pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized-lambda Madelung hydrodynamics runner"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Evolve a scenario and write observables");
    run->add_option("config", config_path, "JSON scenario config")->required();

    auto* cmp = app.add_subcommand("compare-oracle",
                                   "Run dynamics and split-step oracle side by side");
    cmp->add_option("config", config_path, "JSON scenario config")->required();

    std::vector<double> sweep_lambdas;
    auto* swp = app.add_subcommand("sweep", "Run one evolution per lambda value");
    swp->add_option("config", config_path, "JSON scenario config")->required();
    swp->add_option("--lambda", sweep_lambdas, "lambda values")->expected(-1);

    std::optional<std::vector<double>> family;
    std::optional<std::string> custom;
    double tolerance = 1e-4;
    auto* chk = app.add_subcommand("check", "Verify the consistency condition for a mu model");
    std::vector<double> family_raw;
    auto* fam_opt = chk->add_option("--family", family_raw, "family coefficients a b c")
                        ->expected(3);
    std::string custom_raw;
    auto* cus_opt = chk->add_option("--custom", custom_raw, "built-in custom rule name");
    chk->add_option("--tolerance", tolerance, "consistency tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (cmp->parsed()) return cmd_compare_oracle(config_path);
        if (swp->parsed()) return cmd_sweep(config_path, sweep_lambdas);
        if (chk->parsed()) {
            if (fam_opt->count() > 0) family = family_raw;
            if (cus_opt->count() > 0) custom = custom_raw;
            return cmd_check(family, custom, tolerance);
        }
    } catch (const lmd::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const lmd::NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerics;
    } catch (const lmd::IoError& e) {
        std::cerr << "I/O failure: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
