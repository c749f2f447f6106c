// Contract tests for the lambda-madelung executable. Invoked by ctest as
//   cli_tests <path-to-binary>
// and prints one line per check.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& label) {
    std::cout << (ok ? "PASS" : "FAIL") << " " << label << "\n";
    if (!ok) ++g_failures;
}

std::string g_binary;

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + g_binary + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    return fields;
}

// Minimal 1-D scenario: free Gaussian, 20 steps.
std::string base_config(const std::string& dir) {
    return std::string(R"({
  "grid": {"dims": [{"x_min": -10.0, "x_max": 10.0, "n_points": 64}]},
  "dofs": [{"mass": 1.0, "lambda": 1.0}],
  "potential": {"type": "free"},
  "initial": {"type": "gaussian", "center": [0.0], "sigma": [1.2], "p0": [0.0]},
  "integrator": {"dt": 0.001, "n_steps": 20, "report_every": 5},
  "outputs": {"dir": ")") +
           dir + R"("}
})";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-lambda-madelung>\n";
        return 2;
    }
    g_binary = argv[1];

    const fs::path work = fs::current_path() / "cli_work";
    fs::remove_all(work);
    fs::create_directories(work);
    const auto p = [&](const std::string& name) { return (work / name).string(); };

    // run: happy path writes observables.csv and run.json.
    write_file(p("run.cfg"), base_config(p("out_run")));
    check(run_cli("run " + p("run.cfg")) == 0, "run exits 0 on a valid config");
    {
        const auto lines = read_lines(p("out_run") + "/observables.csv");
        check(lines.size() == 6, "observables.csv has header plus 5 report rows");
        check(!lines.empty() &&
                  lines[0] == "t,norm,energy,axiom1_residual,mean_x_1,delta_x_1,mean_p_1,"
                              "delta_p_1,uncertainty_1",
              "observables.csv header matches the contract");
        const std::string manifest = read_file(p("out_run") + "/run.json");
        check(manifest.find("\"version\"") != std::string::npos,
              "run.json manifest records the resolved config");
    }

    // run.json round-trips as a valid config.
    check(run_cli("run " + p("out_run") + "/run.json") == 0, "run.json is itself a runnable config");

    // Unknown keys are rejected, not ignored.
    {
        std::string bad = base_config(p("out_bad"));
        bad.replace(bad.find("\"dofs\""), 6, "\"lamda\"");
        write_file(p("bad_key.cfg"), bad);
        check(run_cli("run " + p("bad_key.cfg")) == 2, "unknown config key exits 2");
    }
    write_file(p("bad_json.cfg"), "{not json");
    check(run_cli("run " + p("bad_json.cfg")) == 2, "malformed JSON exits 2");
    check(run_cli("run " + p("no_such_file.cfg")) == 4, "missing config file exits 4");
    check(run_cli("frobnicate") == 2, "unknown subcommand exits 2");

    // A dt beyond the stability guard is a numerics failure.
    write_file(p("cfl.cfg"), base_config(p("out_cfl")));
    {
        std::string cfg = read_file(p("cfl.cfg"));
        cfg.replace(cfg.find("\"dt\": 0.001"), 11, "\"dt\": 0.05");
        write_file(p("cfl.cfg"), cfg);
        check(run_cli("run " + p("cfl.cfg")) == 3, "unstable dt exits 3");
    }

    // compare-oracle: quantum scenario agrees; hybrid is rejected; an
    // impossible threshold is a verification failure.
    write_file(p("cmp.cfg"), base_config(p("out_cmp")));
    check(run_cli("compare-oracle " + p("cmp.cfg")) == 0, "compare-oracle exits 0 within threshold");
    check(fs::exists(p("out_cmp") + "/compare.json"), "compare-oracle writes compare.json");
    {
        std::string cfg = base_config(p("out_cmp2"));
        cfg.insert(cfg.rfind('}'), R"(, "compare": {"threshold": 1e-18})");
        write_file(p("cmp_tight.cfg"), cfg);
        check(run_cli("compare-oracle " + p("cmp_tight.cfg")) == 5,
              "compare-oracle exits 5 beyond threshold");
    }
    {
        std::string cfg = R"({
  "grid": {"dims": [{"x_min": -10.0, "x_max": 10.0, "n_points": 64},
                    {"x_min": -10.0, "x_max": 10.0, "n_points": 64}]},
  "dofs": [{"mass": 1.0, "lambda": 1.0}, {"mass": 1.0, "lambda": 0.0}],
  "potential": {"type": "free"},
  "initial": {"type": "gaussian", "center": [0.0, 0.0], "sigma": [1.2, 1.2], "p0": [0.0, 0.0]},
  "integrator": {"dt": 0.001, "n_steps": 5, "report_every": 5},
  "outputs": {"dir": ")" + p("out_hyb") + R"("}
})";
        write_file(p("hybrid.cfg"), cfg);
        check(run_cli("compare-oracle " + p("hybrid.cfg")) == 2,
              "compare-oracle rejects hybrid lambda with exit 2");
    }

    // sweep: sorted output, classical row, agreement with run.
    write_file(p("sweep.cfg"), base_config(p("out_sweep")));
    check(run_cli("sweep " + p("sweep.cfg") + " --lambda 1 0 0.5") == 0, "sweep exits 0");
    {
        const auto lines = read_lines(p("out_sweep") + "/sweep.csv");
        check(lines.size() == 4, "sweep.csv has header plus one row per lambda");
        bool sorted = lines.size() == 4 && split_csv(lines[1])[0] == "0" &&
                      split_csv(lines[2])[0] == "0.5" && split_csv(lines[3])[0] == "1";
        check(sorted, "sweep rows are sorted by lambda");
        if (lines.size() == 4) {
            const auto row0 = split_csv(lines[1]);
            const double dx = std::stod(row0[1]);
            check(std::abs(dx - 1.2) < 1e-6, "lambda = 0 row keeps the initial width");
        }
    }
    check(run_cli("sweep " + p("sweep.cfg")) == 2, "sweep without lambda values exits 2");
    {
        // A single-lambda sweep reproduces run's final report bit for bit.
        write_file(p("sweep1.cfg"), base_config(p("out_sweep1")));
        check(run_cli("sweep " + p("sweep1.cfg") + " --lambda 1") == 0, "single-lambda sweep runs");
        write_file(p("run1.cfg"), base_config(p("out_run1")));
        check(run_cli("run " + p("run1.cfg")) == 0, "reference run for sweep comparison");
        const auto sweep_lines = read_lines(p("out_sweep1") + "/sweep.csv");
        const auto run_lines = read_lines(p("out_run1") + "/observables.csv");
        bool match = false;
        if (sweep_lines.size() == 2 && run_lines.size() >= 2) {
            const auto s = split_csv(sweep_lines[1]);            // lambda,dx,dp,unc,energy,error
            const auto r = split_csv(run_lines.back());          // t,norm,E,res,mx,dx,mp,dp,unc
            match = s.size() >= 5 && r.size() == 9 && s[1] == r[5] && s[2] == r[7] &&
                    s[3] == r[8] && s[4] == r[2];
        }
        check(match, "sweep row is bit-identical to the equivalent run");
    }

    // check: verdicts and exit codes.
    check(run_cli("check --family 0.25 0 0") == 0, "check passes a family model");
    check(run_cli("check --custom eta") == 5, "check fails mu = eta with exit 5");
    check(run_cli("check --custom rho_eta") == 5, "check fails mu = rho eta with exit 5");
    check(run_cli("check --custom eta_over_rho2") == 0, "check passes the family rule given pointwise");
    check(run_cli("check --family -1 0 0") == 2, "check rejects negative a with exit 2");
    check(run_cli("check --family 0.25 0 0 --custom eta") == 2,
          "check rejects family and custom together");
    check(run_cli("check") == 2, "check with no model exits 2");

    // Determinism: identical configs give byte-identical observables.
    write_file(p("det_a.cfg"), base_config(p("out_det_a")));
    write_file(p("det_b.cfg"), base_config(p("out_det_b")));
    check(run_cli("run " + p("det_a.cfg")) == 0 && run_cli("run " + p("det_b.cfg")) == 0,
          "determinism runs complete");
    check(!read_file(p("out_det_a") + "/observables.csv").empty() &&
              read_file(p("out_det_a") + "/observables.csv") ==
                  read_file(p("out_det_b") + "/observables.csv"),
          "repeated runs produce byte-identical observables.csv");

    // Snapshots: written on request and loadable as an initial state.
    {
        std::string cfg = R"({
  "grid": {"dims": [{"x_min": -10.0, "x_max": 10.0, "n_points": 64}]},
  "dofs": [{"mass": 1.0, "lambda": 1.0}],
  "potential": {"type": "free"},
  "initial": {"type": "gaussian", "center": [0.0], "sigma": [1.2], "p0": [0.0]},
  "integrator": {"dt": 0.001, "n_steps": 20, "report_every": 5},
  "outputs": {"dir": ")" + p("out_snap") +
                          R"(", "write_snapshots": true, "snapshot_every": 10}
})";
        write_file(p("snap.cfg"), cfg);
        check(run_cli("run " + p("snap.cfg")) == 0, "run with snapshots exits 0");
        check(fs::exists(p("out_snap") + "/snapshot_000000.json") &&
                  fs::exists(p("out_snap") + "/rho_000020.f64") &&
                  fs::exists(p("out_snap") + "/s_000020.f64"),
              "snapshot triplets are written at the requested cadence");

        std::string resume = R"({
  "grid": {"dims": [{"x_min": -10.0, "x_max": 10.0, "n_points": 64}]},
  "dofs": [{"mass": 1.0, "lambda": 1.0}],
  "potential": {"type": "free"},
  "initial": {"type": "snapshot", "path": ")" + p("out_snap") + R"(/snapshot_000020.json"},
  "integrator": {"dt": 0.001, "n_steps": 0, "report_every": 1},
  "outputs": {"dir": ")" + p("out_resume") + R"("}
})";
        write_file(p("resume.cfg"), resume);
        check(run_cli("run " + p("resume.cfg")) == 0, "snapshot loads back as an initial state");
        const auto lines = read_lines(p("out_resume") + "/observables.csv");
        bool t_ok = false;
        if (lines.size() == 2) {
            const double t = std::stod(split_csv(lines[1])[0]);
            const double n = std::stod(split_csv(lines[1])[1]);
            t_ok = std::abs(t - 0.02) < 1e-12 && std::abs(n - 1.0) < 1e-9;
        }
        check(t_ok, "resumed state carries its time and norm");
    }

    // Environment override of the output directory.
    {
        write_file(p("env.cfg"), base_config(p("out_env_ignored")));
        setenv("LAMBDA_MADELUNG_OUT", p("out_env").c_str(), 1);
        check(run_cli("run " + p("env.cfg")) == 0, "run with env override exits 0");
        unsetenv("LAMBDA_MADELUNG_OUT");
        check(fs::exists(p("out_env") + "/observables.csv") &&
                  !fs::exists(p("out_env_ignored")),
              "LAMBDA_MADELUNG_OUT overrides outputs.dir");
    }

    if (g_failures) std::cout << g_failures << " contract check(s) failed\n";
    return g_failures == 0 ? 0 : 1;
}
