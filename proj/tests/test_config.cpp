#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "hypfield/config.hpp"
#include "hypfield/csvio.hpp"
#include "hypfield/errors.hpp"

using namespace hypfield;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test binary run.
const fs::path& scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "hypfield_config_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& body) {
    const fs::path p = scratch() / name;
    std::ofstream out(p, std::ios::binary);
    out << body;
    out.close();
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

bool message_contains(const std::exception& e, const std::string& needle) {
    return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("defaults cover the registry and parse by their declared kinds") {
    const RunConfig cfg = RunConfig::defaults();
    CHECK(cfg.values().size() == config_registry().size());
    for (const KeySpec& spec : config_registry()) {
        REQUIRE(cfg.values().count(spec.key) == 1);
        switch (spec.kind) {
            case KeyKind::Double:
                CHECK_NOTHROW(cfg.get_double(spec.key));
                break;
            case KeyKind::Int:
                CHECK_NOTHROW(cfg.get_int(spec.key));
                break;
            case KeyKind::Bool:
            case KeyKind::String:
                CHECK_NOTHROW(cfg.get_string(spec.key));
                break;
            case KeyKind::List:
                CHECK_NOTHROW(cfg.get_list(spec.key));
                break;
        }
    }
    CHECK(cfg.get_double("alpha") == 0.1);
    CHECK(cfg.get_int("grid.N") == 40);
    CHECK(cfg.get_string("kernel.family") == "exponential");
    CHECK(cfg.get_list("snapshots").empty());
}

TEST_CASE("overrides: typed checking, unknown keys, malformed input") {
    RunConfig cfg = RunConfig::defaults();
    cfg.apply_override("kernel.b=0.3");
    CHECK(cfg.get_double("kernel.b") == 0.3);
    cfg.apply_override(" snapshots = 0, 10, 20 ");
    const auto snaps = cfg.get_list("snapshots");
    REQUIRE(snaps.size() == 3);
    CHECK(snaps[1] == 10.0);

    CHECK_THROWS_AS(cfg.apply_override("kernel.width=0.3"), config_error);
    try {
        cfg.apply_override("kernel.width=0.3");
    } catch (const config_error& e) {
        CHECK(message_contains(e, "kernel.width"));
    }
    CHECK_THROWS_AS(cfg.apply_override("grid.N=forty"), config_error);
    CHECK_THROWS_AS(cfg.apply_override("no_equals_sign"), config_error);
    CHECK_THROWS_AS(cfg.apply_override("snapshots=1,,2"), config_error);
    CHECK_THROWS_AS(cfg.apply_override("kernel.allow_nonintegrable=maybe"), config_error);
}

TEST_CASE("config files: comments, whitespace, line-numbered errors") {
    const std::string path = write_file("good.cfg",
                                        "# a comment\n"
                                        "\n"
                                        "alpha = 1\n"
                                        "  kernel.family=gabor  \n"
                                        "firing.mu = 2.5\n");
    RunConfig cfg = RunConfig::defaults();
    cfg.apply_file(path);
    CHECK(cfg.get_double("alpha") == 1.0);
    CHECK(cfg.get_string("kernel.family") == "gabor");
    CHECK(cfg.get_double("firing.mu") == 2.5);

    const std::string bad = write_file("bad.cfg", "alpha = 1\n\nthis line has no equals\n");
    try {
        RunConfig c2 = RunConfig::defaults();
        c2.apply_file(bad);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(message_contains(e, ":3:"));
    }

    const std::string unknown = write_file("unknown.cfg", "nonsense.key = 1\n");
    RunConfig c3 = RunConfig::defaults();
    CHECK_THROWS_AS(c3.apply_file(unknown), config_error);
    CHECK_THROWS_AS(c3.apply_file((scratch() / "missing.cfg").string()), config_error);
}

TEST_CASE("preset lookup: environment dir wins, fallback dir works, misses listed") {
    const fs::path dir_a = scratch() / "presets_a";
    const fs::path dir_b = scratch() / "presets_b";
    fs::create_directories(dir_a);
    fs::create_directories(dir_b);
    {
        std::ofstream(dir_a / "demo.preset") << "alpha = 7\n";
        std::ofstream(dir_b / "demo.preset") << "alpha = 8\n";
    }

    unsetenv("HYPFIELD_PRESET_DIR");
    RunConfig cfg = RunConfig::defaults();
    cfg.apply_preset("demo", dir_b.string());
    CHECK(cfg.get_double("alpha") == 8.0);

    setenv("HYPFIELD_PRESET_DIR", dir_a.string().c_str(), 1);
    RunConfig cfg2 = RunConfig::defaults();
    cfg2.apply_preset("demo", dir_b.string());
    CHECK(cfg2.get_double("alpha") == 7.0);
    unsetenv("HYPFIELD_PRESET_DIR");

    CHECK_THROWS_AS(find_preset("does_not_exist", dir_b.string()), config_error);
    try {
        find_preset("does_not_exist", dir_b.string());
    } catch (const config_error& e) {
        CHECK(message_contains(e, "does_not_exist.preset"));
    }
    CHECK_THROWS_AS(find_preset("../sneaky", dir_b.string()), config_error);
    CHECK_THROWS_AS(find_preset("", dir_b.string()), config_error);
}

TEST_CASE("grid builder enforces ranges and the node cap") {
    RunConfig cfg = RunConfig::defaults();
    const FieldGrid grid = grid_from_config(cfg);
    CHECK(grid.N == 40);
    CHECK(grid.M == 40);
    CHECK(grid.a == 0.5);

    cfg.apply_override("grid.a=1.5");
    CHECK_THROWS_AS(grid_from_config(cfg), config_error);
    cfg.apply_override("grid.a=0.5");
    cfg.apply_override("grid.N=1");
    CHECK_THROWS_AS(grid_from_config(cfg), config_error);
    cfg.apply_override("grid.N=200");
    cfg.apply_override("grid.M=200");
    CHECK_THROWS_AS(grid_from_config(cfg), config_error);  // above grid.max_nodes
}

TEST_CASE("kernel builder: families, integrability gate, parameter checks") {
    RunConfig cfg = RunConfig::defaults();
    CHECK(kernel_from_config(cfg).family() == KernelFamily::Exponential);

    cfg.apply_override("kernel.b=0.9");
    CHECK_THROWS_AS(kernel_from_config(cfg), config_error);
    try {
        kernel_from_config(cfg);
    } catch (const config_error& e) {
        CHECK(message_contains(e, "kernel.b"));
    }
    cfg.apply_override("kernel.allow_nonintegrable=true");
    const RadialKernel wide = kernel_from_config(cfg);
    CHECK_FALSE(wide.integrable());

    RunConfig gab = RunConfig::defaults();
    gab.apply_override("kernel.family=gabor");
    gab.apply_override("kernel.b=0.2");
    CHECK(kernel_from_config(gab).family() == KernelFamily::Gabor);
    gab.apply_override("kernel.b=-1");
    CHECK_THROWS_AS(kernel_from_config(gab), config_error);

    RunConfig dog = RunConfig::defaults();
    dog.apply_override("kernel.family=diff_gaussians");
    CHECK(kernel_from_config(dog).family() == KernelFamily::DiffGaussians);
    dog.apply_override("kernel.family=mexican_hat_3d");
    CHECK(kernel_from_config(dog).family() == KernelFamily::MexicanHat3D);
    dog.apply_override("kernel.sigma2=0");
    CHECK_THROWS_AS(kernel_from_config(dog), config_error);
    dog.apply_override("kernel.family=wavelet");
    CHECK_THROWS_AS(kernel_from_config(dog), config_error);
}

TEST_CASE("firing and input builders") {
    RunConfig cfg = RunConfig::defaults();
    CHECK(firing_from_config(cfg).kind() == FiringRateKind::Sigmoid);
    CHECK(firing_from_config(cfg).mu() == 10.0);
    cfg.apply_override("firing.type=shifted_sigmoid");
    CHECK(firing_from_config(cfg).kind() == FiringRateKind::ShiftedSigmoid);
    cfg.apply_override("firing.type=heaviside");
    cfg.apply_override("firing.mu=-1");  // irrelevant for the step nonlinearity
    CHECK(firing_from_config(cfg).kind() == FiringRateKind::Heaviside);
    cfg.apply_override("firing.type=sigmoid");
    CHECK_THROWS_AS(firing_from_config(cfg), config_error);  // mu = -1 now matters
    cfg.apply_override("firing.type=linear");
    CHECK_THROWS_AS(firing_from_config(cfg), config_error);

    RunConfig in = RunConfig::defaults();
    CHECK_FALSE(input_from_config(in).zero_input());
    in.apply_override("input.type=zero");
    CHECK(input_from_config(in).zero_input());
    in.apply_override("input.type=rotating");
    CHECK_THROWS_AS(input_from_config(in), config_error);  // needs sigma_sq convention
    in.apply_override("input.denom=sigma_sq");
    CHECK(input_from_config(in).time_dependent());
    in.apply_override("input.type=gaussian");
    in.apply_override("input.sigma=0");
    CHECK_THROWS_AS(input_from_config(in), config_error);
    in.apply_override("input.sigma=0.05");
    in.apply_override("input.denom=half_sigma");
    CHECK_THROWS_AS(input_from_config(in), config_error);
}

TEST_CASE("simulation builder: snapshots, integrator knobs, seeded noise") {
    RunConfig cfg = RunConfig::defaults();
    cfg.apply_override("T=50");
    cfg.apply_override("snapshots=0,25,50");
    cfg.apply_override("ode.fixed_dt=0.5");
    const FieldGrid grid = grid_from_config(cfg);
    SimulationConfig sim = simulation_from_config(cfg, grid);
    CHECK(sim.T == 50.0);
    REQUIRE(sim.snapshot_times.size() == 3);
    CHECK(sim.snapshot_times[2] == 50.0);
    CHECK(sim.ode.fixed_dt == 0.5);
    CHECK(sim.V0.size() == 0);  // init.type = zero

    cfg.apply_override("snapshots=0,80");
    CHECK_THROWS_AS(simulation_from_config(cfg, grid), config_error);  // beyond T
    cfg.apply_override("snapshots=");

    cfg.apply_override("init.type=noise");
    cfg.apply_override("init.amplitude=0.01");
    cfg.apply_override("seed=7");
    sim = simulation_from_config(cfg, grid);
    REQUIRE(sim.V0.size() == grid.nodes());
    CHECK(sim.V0.abs().maxCoeff() <= 0.01);
    CHECK(sim.V0.abs().maxCoeff() > 0.0);
    for (int i = 0; i <= grid.N; ++i)  // duplicated angular column stays in sync
        CHECK(sim.V0[grid.index(i, grid.M)] == sim.V0[grid.index(i, 0)]);
    // Same seed, same noise; different seed, different noise.
    const SimulationConfig again = simulation_from_config(cfg, grid);
    CHECK((again.V0 == sim.V0).all());
    cfg.apply_override("seed=8");
    CHECK_FALSE((simulation_from_config(cfg, grid).V0 == sim.V0).all());

    cfg.apply_override("init.type=random");
    CHECK_THROWS_AS(simulation_from_config(cfg, grid), config_error);
    cfg.apply_override("init.type=zero");
    cfg.apply_override("ode.atol=0");
    CHECK_THROWS_AS(simulation_from_config(cfg, grid), config_error);
}

TEST_CASE("pulse-analysis builder maps the shared keys and rejects misfits") {
    RunConfig cfg = RunConfig::defaults();
    cfg.apply_override("alpha=1");
    cfg.apply_override("firing.kappa=0.04");
    cfg.apply_override("input.I0=0.04");
    cfg.apply_override("spectral.lambda_max=240");
    cfg.apply_override("spectral.n_lambda=1200");
    const BumpConfig bump = bump_from_config(cfg);
    CHECK(bump.alpha == 1.0);
    CHECK(bump.kappa == 0.04);
    CHECK(bump.I0 == 0.04);
    CHECK(bump.sigma == 0.05);
    CHECK(bump.spectral.nodes.size() == 1200);

    RunConfig zero = RunConfig::defaults();
    zero.apply_override("input.type=zero");
    zero.apply_override("input.I0=0.3");  // ignored: the input is off
    CHECK(bump_from_config(zero).I0 == 0.0);

    RunConfig bad = RunConfig::defaults();
    bad.apply_override("input.denom=sigma_sq");
    CHECK_THROWS_AS(bump_from_config(bad), config_error);
    bad.apply_override("input.denom=two_sigma_sq");
    bad.apply_override("input.type=rotating");
    CHECK_THROWS_AS(bump_from_config(bad), config_error);

    RunConfig wide = RunConfig::defaults();
    wide.apply_override("kernel.b=0.9");
    wide.apply_override("kernel.allow_nonintegrable=true");
    CHECK_THROWS_AS(bump_from_config(wide), config_error);

    RunConfig coarse = RunConfig::defaults();
    coarse.apply_override("spectral.n_lambda=4");
    CHECK_THROWS_AS(bump_from_config(coarse), config_error);
}

TEST_CASE("double formatting round-trips and uses the inf sentinel") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    for (const double x : {1.0 / 3.0, 0.1, 2.5e-17, -123456.789, 0.04047223}) {
        const std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}

TEST_CASE("trajectory CSV: schema, LF endings, validation, determinism") {
    const FieldGrid grid = build_grid(0.5, 2, 2);
    std::vector<double> times{0.0, 1.5};
    std::vector<Eigen::ArrayXd> states{Eigen::ArrayXd::Zero(grid.nodes()),
                                       Eigen::ArrayXd::Constant(grid.nodes(), 0.25)};
    const std::string path = (scratch() / "traj.csv").string();
    write_trajectory_csv(path, grid, times, states);
    const std::string body = slurp(path);

    CHECK(body.rfind("t,i,j,r,theta,V\n", 0) == 0);
    CHECK(body.find('\r') == std::string::npos);
    std::size_t lines = 0;
    for (const char c : body) lines += (c == '\n');
    CHECK(lines == 1 + times.size() * static_cast<std::size_t>(grid.nodes()));
    CHECK(body.find("1.5,0,0,0,0,0.25\n") != std::string::npos);

    const std::string again = (scratch() / "traj2.csv").string();
    write_trajectory_csv(again, grid, times, states);
    CHECK(slurp(again) == body);  // identical inputs, identical bytes

    states.pop_back();
    CHECK_THROWS_AS(write_trajectory_csv(path, grid, times, states), error);
    states.push_back(Eigen::ArrayXd::Zero(3));
    CHECK_THROWS_AS(write_trajectory_csv(path, grid, times, states), error);
}

TEST_CASE("stationary snapshot carries the inf time sentinel") {
    const FieldGrid grid = build_grid(0.5, 2, 2);
    const std::string path = (scratch() / "stationary.csv").string();
    write_trajectory_csv(path, grid, {std::numeric_limits<double>::infinity()},
                         {Eigen::ArrayXd::Zero(grid.nodes())});
    CHECK(slurp(path).find("\ninf,0,0,") != std::string::npos);
}

TEST_CASE("remaining artifact schemas") {
    const std::string scalar = (scratch() / "homog.csv").string();
    Eigen::ArrayXd t(2), v(2);
    t << 0.0, 1.0;
    v << 0.5, 0.25;
    write_scalar_csv(scalar, t, v);
    CHECK(slurp(scalar) == "t,v\n0,0.5\n1,0.25\n");

    const std::string curve = (scratch() / "curve.csv").string();
    write_curve_csv(curve, {{0.5, 0.375, 0.25, 0.125}});
    CHECK(slurp(curve) == "omega,N,M,I\n0.5,0.375,0.25,0.125\n");

    const std::string profile = (scratch() / "profile.csv").string();
    BumpSolution sol;
    sol.r = t;
    sol.V = v;
    write_profile_csv(profile, sol);
    CHECK(slurp(profile) == "r,V\n0,0.5\n1,0.25\n");

    const std::string stab = (scratch() / "stab.csv").string();
    Eigen::ArrayXd beta(2);
    beta << 1.5, -0.03;
    StabilityReport rep;
    rep.stable = false;
    rep.n_prime_analytic = 0.26;
    rep.essential = -1.0;
    write_stability_csv(stab, beta, rep);
    const std::string stab_body = slurp(stab);
    CHECK(stab_body.rfind("n,beta_n\n0,1.5\n1,-0.029999999999999999\n", 0) == 0);
    CHECK(stab_body.find("# verdict: unstable; n_prime = 0.26") != std::string::npos);

    const std::string ver = (scratch() / "verify.csv").string();
    OracleCheck c;
    c.name = "demo_check";
    c.main_value = 1.0;
    c.oracle_value = 1.0;
    c.rel_err = 0.0;
    c.tol = 1e-6;
    c.pass = true;
    write_verify_csv(ver, {c});
    const std::string ver_body = slurp(ver);
    CHECK(ver_body.rfind("check,main_value,oracle_value,rel_err,tol,pass\n", 0) == 0);
    CHECK(ver_body.find("demo_check,1,1,0,9.9999999999999995e-07,1\n") != std::string::npos);
}

TEST_CASE("metadata sidecar is a reusable config file") {
    RunConfig cfg = RunConfig::defaults();
    cfg.apply_override("kernel.family=gabor");
    cfg.apply_override("kernel.b=0.07");
    cfg.apply_override("seed=42");
    const std::string path = (scratch() / "run.meta").string();
    write_meta(path, {{"command", "simulate"}, {"wall_time_s", "12.5"}}, cfg.values());

    RunConfig replay = RunConfig::defaults();
    replay.apply_file(path);  // comments skipped, every key round-trips
    CHECK(replay.values() == cfg.values());

    const std::string body = slurp(path);
    CHECK(body.rfind("# command = simulate\n", 0) == 0);
    CHECK(body.find("kernel.b = 0.07\n") != std::string::npos);
}
