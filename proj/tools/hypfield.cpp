#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypfield/config.hpp"
#include "hypfield/csvio.hpp"
#include "hypfield/errors.hpp"
#include "hypfield/quadrature.hpp"
#include "hypfield/stationary.hpp"
#include "hypfield/verify.hpp"

// Command-line front end: every experiment and verification of the library,
// driven by a flat key=value configuration. Exit codes: 0 success, 1 numeric
// or runtime failure, 2 configuration error; failures print an `error:` line.

namespace {

namespace fs = std::filesystem;
using namespace hypfield;

struct CommonOpts {
    std::string preset;
    std::string config_file;
    std::vector<std::string> sets;
    std::string out_dir = ".";
};

std::string source_preset_dir() {
#ifdef HYPFIELD_SOURCE_PRESET_DIR
    return HYPFIELD_SOURCE_PRESET_DIR;
#else
    return {};
#endif
}

// Stem of every artifact this run writes: the basename key, or the command
// name with '-' flattened to '_'.
std::string artifact_stem(const std::string& command, const RunConfig& cfg) {
    std::string stem = cfg.get_string("basename");
    if (stem.empty()) {
        stem = command;
        for (char& c : stem)
            if (c == '-') c = '_';
    }
    return stem;
}

fs::path artifact_path(const CommonOpts& opts, const std::string& stem, const char* ext) {
    return fs::path(opts.out_dir) / (stem + ext);
}

void apply_thread_key(const RunConfig& cfg) {
    const long long threads = cfg.get_int("threads");
    if (threads < 0) throw config_error("threads must be >= 0");
    if (threads > 0) setenv("HYPFIELD_THREADS", std::to_string(threads).c_str(), 1);
}

double checked_alpha(const RunConfig& cfg) {
    const double alpha = cfg.get_double("alpha");
    if (!(alpha > 0.0)) throw config_error("alpha must be > 0");
    return alpha;
}

struct WallClock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

using Comments = std::vector<std::pair<std::string, std::string>>;

void write_sidecar(const fs::path& csv_path, const std::string& command, const RunConfig& cfg,
                   const WallClock& clock, Comments extra = {}) {
    Comments comments{{"command", command}};
    comments.insert(comments.end(), extra.begin(), extra.end());
    comments.emplace_back("wall_time_s", format_double(clock.seconds()));
    fs::path meta = csv_path;
    meta.replace_extension(".meta");
    write_meta(meta.string(), comments, cfg.values());
}

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

// Signed kernel mass over the disk: the drive strength of the space-clamped
// equation. The 3D Mexican hat has a closed form; the other integrable
// families are integrated directly.
double signed_kernel_mass(const RadialKernel& kernel) {
    if (kernel.family() == KernelFamily::MexicanHat3D)
        return mexican_hat_wbar(kernel.param_sigma1(), kernel.param_sigma2(),
                                kernel.param_amplitude());
    if (!kernel.integrable())
        throw config_error("the space-clamped equation needs an integrable kernel");
    return std::numbers::pi *
           adaptive_integrate([&](double r) { return kernel(r) * std::sinh(2.0 * r); }, 0.0,
                              kernel.r_max(), 1e-12);
}

int run_simulate(const RunConfig& cfg, const CommonOpts& opts) {
    WallClock clock;
    const FieldGrid grid = grid_from_config(cfg);
    const RadialKernel kernel = kernel_from_config(cfg);
    FieldProblem problem;
    problem.grid = grid;
    problem.K = assemble_kernel_matrix(grid, kernel,
                                       static_cast<int>(cfg.get_int("grid.max_nodes")));
    problem.S = firing_from_config(cfg);
    problem.input = input_from_config(cfg);
    problem.alpha = checked_alpha(cfg);
    const SimulationConfig sim = simulation_from_config(cfg, grid);

    const Trajectory traj = simulate(problem, sim);

    const std::string stem = artifact_stem("simulate", cfg);
    const fs::path csv = artifact_path(opts, stem, ".csv");
    write_trajectory_csv(csv.string(), grid, traj.times, traj.states);
    write_sidecar(csv, "simulate", cfg, clock,
                  {{"ode_steps", std::to_string(traj.stats.steps)},
                   {"ode_rejected", std::to_string(traj.stats.rejected)}});
    announce(csv);
    return 0;
}

int run_stationary(const RunConfig& cfg, const CommonOpts& opts) {
    WallClock clock;
    const FieldGrid grid = grid_from_config(cfg);
    const RadialKernel kernel = kernel_from_config(cfg);
    KernelMatrix K = assemble_kernel_matrix(grid, kernel,
                                            static_cast<int>(cfg.get_int("grid.max_nodes")));
    const FiringRate S = firing_from_config(cfg);
    const ExternalInput input = input_from_config(cfg);
    if (input.time_dependent())
        throw config_error("a stationary solve needs a static input (input.Omega0 = 0 "
                           "or input.type zero/gaussian)");
    const double alpha = checked_alpha(cfg);

    Eigen::ArrayXd I;
    input.eval(grid, 0.0, I);
    const double tol = cfg.get_double("stat.tol");
    const long long max_iter = cfg.get_int("stat.max_iter");
    if (!(tol > 0.0)) throw config_error("stat.tol must be > 0");
    if (max_iter < 1) throw config_error("stat.max_iter must be >= 1");

    // The gain sits inside the configured firing rate, so the iteration runs
    // with unit external gain.
    const PicardResult fixed =
        picard_stationary(K, S, 1.0, alpha, I, tol, static_cast<int>(max_iter));
    if (!fixed.converged)
        throw convergence_error("fixed-point iteration stalled at residual " +
                                format_double(fixed.residual) + " after " +
                                std::to_string(fixed.iterations) + " sweeps");

    const std::string stem = artifact_stem("stationary", cfg);
    const fs::path csv = artifact_path(opts, stem, ".csv");
    write_trajectory_csv(csv.string(), grid,
                         {std::numeric_limits<double>::infinity()}, {fixed.V});
    write_sidecar(csv, "stationary", cfg, clock,
                  {{"iterations", std::to_string(fixed.iterations)},
                   {"residual", format_double(fixed.residual)},
                   {"certified", fixed.certified ? "true" : "false"}});
    announce(csv);
    return 0;
}

int run_homogeneous(const RunConfig& cfg, const CommonOpts& opts) {
    WallClock clock;
    const RadialKernel kernel = kernel_from_config(cfg);
    const FiringRate S = firing_from_config(cfg);
    const double alpha = checked_alpha(cfg);
    const double wbar = signed_kernel_mass(kernel);
    const double drive =
        cfg.get_string("input.type") == "zero" ? 0.0 : cfg.get_double("input.I0");
    const double T = cfg.get_double("T");
    const long long n_samples = cfg.get_int("homo.n_samples");
    if (n_samples < 1) throw config_error("homo.n_samples must be >= 1");

    const ScalarTrajectory traj =
        solve_homogeneous(alpha, wbar, S, [drive](double) { return drive; },
                          cfg.get_double("homo.v0"), T, static_cast<int>(n_samples),
                          ode_from_config(cfg));
    const double root = scalar_stationary_root(alpha, wbar, S, drive);

    const std::string stem = artifact_stem("homogeneous", cfg);
    const fs::path csv = artifact_path(opts, stem, ".csv");
    write_scalar_csv(csv.string(), traj.t, traj.v);
    write_sidecar(csv, "homogeneous", cfg, clock,
                  {{"wbar", format_double(wbar)},
                   {"stationary_root", format_double(root)}});
    announce(csv);
    return 0;
}

int run_bump_curve(const RunConfig& cfg, const CommonOpts& opts) {
    WallClock clock;
    BumpConfig bump = bump_from_config(cfg);
    const double lo = cfg.get_double("curve.omega_min");
    const double hi = cfg.get_double("curve.omega_max");
    const long long n = cfg.get_int("curve.n");
    if (!(lo >= 0.0 && hi > lo)) throw config_error("need 0 <= curve.omega_min < curve.omega_max");
    if (n < 2) throw config_error("curve.n must be >= 2");

    std::vector<double> amplitudes = cfg.get_list("curve.amplitudes");
    if (amplitudes.empty()) amplitudes.push_back(bump.I0);
    if (amplitudes.size() > 1 && cfg.get_string("input.type") != "gaussian")
        throw config_error("curve.amplitudes sweeps the gaussian input; set input.type = gaussian");
    for (const double a : amplitudes)
        if (a < 0.0) throw config_error("curve.amplitudes entries must be >= 0");

    // The ball-mass column does not depend on the input, so it is computed
    // once and the input column is re-evaluated per amplitude.
    BumpConfig mass_only = bump;
    mass_only.I0 = 0.0;
    const std::vector<CurvePoint> base =
        existence_curve(mass_only, Eigen::ArrayXd::LinSpaced(n, lo, hi));

    const std::string stem = artifact_stem("bump-curve", cfg);
    for (const double amp : amplitudes) {
        std::vector<CurvePoint> curve = base;
        BumpConfig with_amp = bump;
        with_amp.I0 = amp;
        for (CurvePoint& p : curve) {
            p.I = with_amp.input(p.omega);
            p.N = p.M + p.I;
        }
        const std::string suffix =
            amplitudes.size() > 1 ? "_I0_" + format_double(amp) : std::string();
        const fs::path csv = artifact_path(opts, stem + suffix, ".csv");
        write_curve_csv(csv.string(), curve);
        RunConfig materialized = cfg;
        materialized.apply_override("input.I0=" + format_double(amp));
        write_sidecar(csv, "bump-curve", materialized, clock);
        announce(csv);
    }
    return 0;
}

// Width of the pulse: the bump.omega key when positive, otherwise the root of
// N(omega) = alpha kappa selected by bump.root_index.
double resolve_width(const RunConfig& cfg, const BumpConfig& bump, Comments& notes) {
    const double fixed = cfg.get_double("bump.omega");
    if (fixed > 0.0) return fixed;
    const double lo = cfg.get_double("bump.bracket_lo");
    const double hi = cfg.get_double("bump.bracket_hi");
    const long long n_scan = cfg.get_int("bump.n_scan");
    const double tol = cfg.get_double("bump.tol");
    if (!(lo > 0.0 && hi > lo)) throw config_error("need 0 < bump.bracket_lo < bump.bracket_hi");
    if (n_scan < 2) throw config_error("bump.n_scan must be >= 2");
    if (!(tol > 0.0)) throw config_error("bump.tol must be > 0");

    const std::vector<double> roots =
        solve_pulse_width(bump, lo, hi, static_cast<int>(n_scan), tol);
    std::string listed;
    for (const double r : roots) listed += (listed.empty() ? "" : " ") + format_double(r);
    notes.emplace_back("widths_found", listed);

    const long long index = cfg.get_int("bump.root_index");
    if (index < 0 || index >= static_cast<long long>(roots.size()))
        throw config_error("bump.root_index = " + std::to_string(index) + " but " +
                           std::to_string(roots.size()) + " width(s) found");
    return roots[static_cast<std::size_t>(index)];
}

int run_bump_profile(const RunConfig& cfg, const CommonOpts& opts) {
    WallClock clock;
    const BumpConfig bump = bump_from_config(cfg);
    Comments notes;
    const double omega = resolve_width(cfg, bump, notes);
    const long long n_r = cfg.get_int("bump.n_r");
    if (n_r < 50) throw config_error("bump.n_r must be >= 50");

    const BumpSolution sol = bump_profile(bump, omega, static_cast<int>(n_r));
    notes.emplace_back("omega", format_double(sol.omega));
    notes.emplace_back("boundary_slope", format_double(sol.slope_abs));

    const std::string stem = artifact_stem("bump-profile", cfg);
    const fs::path csv = artifact_path(opts, stem, ".csv");
    write_profile_csv(csv.string(), sol);
    write_sidecar(csv, "bump-profile", cfg, clock, notes);
    announce(csv);
    return 0;
}

int run_bump_stability(const RunConfig& cfg, const CommonOpts& opts) {
    WallClock clock;
    const BumpConfig bump = bump_from_config(cfg);
    Comments notes;
    const double omega = resolve_width(cfg, bump, notes);
    const long long n_r = cfg.get_int("bump.n_r");
    const long long n_max = cfg.get_int("bump.n_max");
    if (n_r < 50) throw config_error("bump.n_r must be >= 50");
    if (n_max < 0) throw config_error("bump.n_max must be >= 0");

    const BumpSolution sol = bump_profile(bump, omega, static_cast<int>(n_r));
    const Eigen::ArrayXd beta = stability_spectrum(bump, sol, static_cast<int>(n_max));
    const StabilityReport rep = stability_check(bump, sol);
    notes.emplace_back("omega", format_double(sol.omega));
    notes.emplace_back("verdict",
                       rep.indeterminate ? "indeterminate" : (rep.stable ? "stable" : "unstable"));

    const std::string stem = artifact_stem("bump-stability", cfg);
    const fs::path csv = artifact_path(opts, stem, ".csv");
    write_stability_csv(csv.string(), beta, rep);
    write_sidecar(csv, "bump-stability", cfg, clock, notes);
    announce(csv);
    return 0;
}

int run_verify(const RunConfig& cfg, const CommonOpts& opts) {
    WallClock clock;
    const std::vector<OracleCheck> table = oracle_suite();

    const std::string stem = artifact_stem("verify", cfg);
    const fs::path csv = artifact_path(opts, stem, ".csv");
    write_verify_csv(csv.string(), table);

    std::size_t failed = 0;
    for (const OracleCheck& c : table) {
        if (!c.pass) ++failed;
        std::cout << (c.pass ? "pass  " : "FAIL  ") << c.name
                  << "  rel_err=" << format_double(c.rel_err)
                  << "  tol=" << format_double(c.tol) << "\n";
    }
    write_sidecar(csv, "verify", cfg, clock,
                  {{"checks", std::to_string(table.size())},
                   {"failed", std::to_string(failed)}});
    announce(csv);
    if (failed > 0) {
        std::cerr << "error: " << failed << " of " << table.size()
                  << " oracle checks failed\n";
        return 1;
    }
    return 0;
}

int dispatch(const std::string& command, const RunConfig& cfg, const CommonOpts& opts) {
    if (command == "simulate") return run_simulate(cfg, opts);
    if (command == "stationary") return run_stationary(cfg, opts);
    if (command == "homogeneous") return run_homogeneous(cfg, opts);
    if (command == "bump-curve") return run_bump_curve(cfg, opts);
    if (command == "bump-profile") return run_bump_profile(cfg, opts);
    if (command == "bump-stability") return run_bump_stability(cfg, opts);
    if (command == "verify") return run_verify(cfg, opts);
    throw config_error("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"neural-field simulation and pulse analysis on the hyperbolic disk"};
    app.require_subcommand(1);

    CommonOpts opts;
    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "integrate the field equation and write snapshot CSVs"},
        {"stationary", "solve the fixed-point equation on the grid"},
        {"homogeneous", "integrate the space-clamped scalar equation"},
        {"bump-curve", "tabulate the pulse existence function N(omega)"},
        {"bump-profile", "construct the radial pulse profile"},
        {"bump-stability", "boundary-mode spectrum and verdict for the pulse"},
        {"verify", "run every closed form against its brute-force oracle"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--preset", opts.preset, "named parameter preset");
        sub->add_option("--config", opts.config_file, "key=value parameter file");
        sub->add_option("--set", opts.sets, "override one key (key=value), repeatable");
        sub->add_option("--out", opts.out_dir, "output directory (default: .)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg = RunConfig::defaults();
        if (!opts.preset.empty()) cfg.apply_preset(opts.preset, source_preset_dir());
        if (!opts.config_file.empty()) cfg.apply_file(opts.config_file);
        for (const std::string& kv : opts.sets) cfg.apply_override(kv);
        apply_thread_key(cfg);
        std::filesystem::create_directories(opts.out_dir);
        return dispatch(command, cfg, opts);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
