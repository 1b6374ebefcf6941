#include "hypfield/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "hypfield/errors.hpp"

namespace hypfield {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size();
}

bool parse_int(const std::string& s, long long& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtoll(s.c_str(), &end, 10);
    return errno == 0 && end == s.c_str() + s.size();
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        if (comma == std::string::npos) {
            parts.push_back(trim(s.substr(start)));
            break;
        }
        parts.push_back(trim(s.substr(start, comma - start)));
        start = comma + 1;
    }
    return parts;
}

const KeySpec* find_spec(const std::string& key) {
    for (const KeySpec& spec : config_registry())
        if (key == spec.key) return &spec;
    return nullptr;
}

// Syntax check for one value against its declared kind.
bool value_ok(const KeySpec& spec, const std::string& value) {
    double d;
    long long i;
    switch (spec.kind) {
        case KeyKind::Double:
            return parse_double(value, d);
        case KeyKind::Int:
            return parse_int(value, i);
        case KeyKind::Bool:
            return value == "true" || value == "false" || value == "0" || value == "1";
        case KeyKind::String:
            return true;
        case KeyKind::List: {
            if (trim(value).empty()) return true;
            for (const std::string& part : split_commas(value))
                if (!parse_double(part, d)) return false;
            return true;
        }
    }
    return false;
}

std::string executable_dir() {
    std::error_code ec;
    const auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
    if (ec) return {};
    return exe.parent_path().string();
}

[[noreturn]] void bad_enum(const char* key, const std::string& got, const char* allowed) {
    throw config_error(std::string(key) + " = '" + got + "' is not one of {" + allowed + "}");
}

void require(bool ok, const std::string& message) {
    if (!ok) throw config_error(message);
}

}  // namespace

const std::vector<KeySpec>& config_registry() {
    static const std::vector<KeySpec> registry = {
        {"alpha", "0.1", KeyKind::Double, "decay rate of the field equation"},
        {"T", "100", KeyKind::Double, "final time of a simulation"},
        {"snapshots", "", KeyKind::List, "snapshot times; empty = {0,T/4,T/2,3T/4,T}"},
        {"seed", "0", KeyKind::Int, "seed for the noise initial condition"},
        {"threads", "0", KeyKind::Int, "worker threads; 0 = HYPFIELD_THREADS or hardware"},
        {"basename", "", KeyKind::String, "output file stem; empty = per-command default"},

        {"grid.a", "0.5", KeyKind::Double, "Euclidean radius of the truncated disk"},
        {"grid.N", "40", KeyKind::Int, "radial subdivisions"},
        {"grid.M", "40", KeyKind::Int, "angular subdivisions"},
        {"grid.max_nodes", "16384", KeyKind::Int, "cap on (N+1)(M+1) for the dense matrix"},

        {"kernel.family", "exponential", KeyKind::String,
         "exponential | gabor | diff_gaussians | mexican_hat_3d"},
        {"kernel.b", "0.2", KeyKind::Double, "width of exponential/gabor"},
        {"kernel.sigma1", "0.1", KeyKind::Double, "center width (Gaussian families)"},
        {"kernel.sigma2", "0.2", KeyKind::Double, "surround width (Gaussian families)"},
        {"kernel.A", "1", KeyKind::Double, "surround amplitude (Gaussian families)"},
        {"kernel.allow_nonintegrable", "false", KeyKind::Bool,
         "admit exponential b >= 0.5 for grid-truncated simulation"},

        {"firing.type", "sigmoid", KeyKind::String, "sigmoid | shifted_sigmoid | heaviside"},
        {"firing.mu", "10", KeyKind::Double, "sigmoid gain"},
        {"firing.kappa", "0.04", KeyKind::Double, "Heaviside/pulse threshold"},

        {"input.type", "gaussian", KeyKind::String, "zero | gaussian | rotating"},
        {"input.I0", "0.1", KeyKind::Double, "input amplitude"},
        {"input.sigma", "0.05", KeyKind::Double, "input width"},
        {"input.denom", "two_sigma_sq", KeyKind::String,
         "exponent denominator: sigma_sq | two_sigma_sq"},
        {"input.r0", "0.4", KeyKind::Double, "orbit radius of the rotating input"},
        {"input.Omega0", "0.01", KeyKind::Double, "angular velocity of the rotating input"},
        {"input.phase0", "0", KeyKind::Double, "initial phase of the rotating input"},

        {"init.type", "zero", KeyKind::String, "initial condition: zero | noise"},
        {"init.amplitude", "0.01", KeyKind::Double, "noise amplitude"},

        {"ode.atol", "1e-8", KeyKind::Double, "absolute step-error tolerance"},
        {"ode.rtol", "1e-6", KeyKind::Double, "relative step-error tolerance"},
        {"ode.fixed_dt", "0", KeyKind::Double, "fixed step size; 0 = adaptive"},
        {"ode.dt_init", "0", KeyKind::Double, "initial step size; 0 = automatic"},

        {"spectral.lambda_max", "480", KeyKind::Double, "spectral grid extent"},
        {"spectral.n_lambda", "2400", KeyKind::Int, "spectral grid size"},

        {"bump.omega", "0", KeyKind::Double, "pulse width; 0 = solve N(omega) = alpha kappa"},
        {"bump.root_index", "0", KeyKind::Int, "which root to use when several exist"},
        {"bump.n_r", "400", KeyKind::Int, "radial points of the pulse profile"},
        {"bump.n_max", "16", KeyKind::Int, "highest boundary mode of the stability spectrum"},
        {"bump.bracket_lo", "0.001", KeyKind::Double, "lower end of the width scan"},
        {"bump.bracket_hi", "3", KeyKind::Double, "upper end of the width scan"},
        {"bump.n_scan", "600", KeyKind::Int, "scan samples before bisection"},
        {"bump.tol", "1e-8", KeyKind::Double, "bisection width tolerance"},

        {"curve.omega_min", "0.001", KeyKind::Double, "existence-curve start"},
        {"curve.omega_max", "1", KeyKind::Double, "existence-curve end"},
        {"curve.n", "100", KeyKind::Int, "existence-curve samples"},
        {"curve.amplitudes", "", KeyKind::List,
         "input amplitudes to sweep; empty = just input.I0"},

        {"homo.v0", "0", KeyKind::Double, "initial value of the space-clamped equation"},
        {"homo.n_samples", "256", KeyKind::Int, "output samples of the space-clamped run"},

        {"stat.tol", "1e-10", KeyKind::Double, "Picard residual tolerance"},
        {"stat.max_iter", "10000", KeyKind::Int, "Picard iteration cap"},
    };
    return registry;
}

RunConfig RunConfig::defaults() {
    RunConfig cfg;
    for (const KeySpec& spec : config_registry()) cfg.values_[spec.key] = spec.fallback;
    return cfg;
}

void RunConfig::set_checked(const std::string& key, const std::string& value,
                            const std::string& where) {
    const KeySpec* spec = find_spec(key);
    if (!spec) throw config_error(where + ": unknown key '" + key + "'");
    if (!value_ok(*spec, value))
        throw config_error(where + ": value '" + value + "' for key '" + key +
                           "' does not parse (" + spec->help + ")");
    values_[key] = value;
}

void RunConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const std::size_t eq = s.find('=');
        const std::string where = path + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw config_error(where + ": expected key = value");
        set_checked(trim(s.substr(0, eq)), trim(s.substr(eq + 1)), where);
    }
}

void RunConfig::apply_preset(const std::string& name, const std::string& fallback_dir) {
    apply_file(find_preset(name, fallback_dir));
}

void RunConfig::apply_override(const std::string& keyval) {
    const std::size_t eq = keyval.find('=');
    if (eq == std::string::npos)
        throw config_error("--set expects key=value, got '" + keyval + "'");
    set_checked(trim(keyval.substr(0, eq)), trim(keyval.substr(eq + 1)), "--set");
}

const std::string& RunConfig::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw config_error("unknown key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key) const {
    double d = 0.0;
    if (!parse_double(raw(key), d))
        throw config_error("key '" + key + "' does not hold a number");
    return d;
}

long long RunConfig::get_int(const std::string& key) const {
    long long i = 0;
    if (!parse_int(raw(key), i))
        throw config_error("key '" + key + "' does not hold an integer");
    return i;
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& v = raw(key);
    return v == "true" || v == "1";
}

const std::string& RunConfig::get_string(const std::string& key) const { return raw(key); }

std::vector<double> RunConfig::get_list(const std::string& key) const {
    const std::string v = trim(raw(key));
    std::vector<double> out;
    if (v.empty()) return out;
    for (const std::string& part : split_commas(v)) {
        double d = 0.0;
        if (!parse_double(part, d))
            throw config_error("key '" + key + "' holds a malformed list entry '" + part + "'");
        out.push_back(d);
    }
    return out;
}

std::string find_preset(const std::string& name, const std::string& fallback_dir) {
    if (name.empty() || name.find('/') != std::string::npos)
        throw config_error("preset name '" + name + "' must be a bare name");
    const std::string file = name + ".preset";
    std::vector<std::string> tried;
    const auto candidate = [&](const std::string& dir) -> std::string {
        if (dir.empty()) return {};
        const std::string path = dir + "/" + file;
        tried.push_back(path);
        std::error_code ec;
        return std::filesystem::exists(path, ec) ? path : std::string();
    };
    if (const char* env = std::getenv("HYPFIELD_PRESET_DIR"))
        if (const std::string p = candidate(env); !p.empty()) return p;
    if (const std::string dir = executable_dir(); !dir.empty())
        if (const std::string p = candidate(dir + "/presets"); !p.empty()) return p;
    if (const std::string p = candidate(fallback_dir); !p.empty()) return p;
    std::string msg = "preset '" + name + "' not found; tried:";
    for (const std::string& t : tried) msg += " " + t;
    throw config_error(msg);
}

FieldGrid grid_from_config(const RunConfig& cfg) {
    const double a = cfg.get_double("grid.a");
    const long long N = cfg.get_int("grid.N"), M = cfg.get_int("grid.M");
    const long long cap = cfg.get_int("grid.max_nodes");
    require(a > 0.0 && a < 1.0, "grid.a must lie in (0, 1)");
    require(N >= 2 && M >= 2, "grid.N and grid.M must be >= 2");
    require((N + 1) * (M + 1) <= cap,
            "grid has " + std::to_string((N + 1) * (M + 1)) +
                " nodes, above grid.max_nodes = " + std::to_string(cap));
    return build_grid(a, static_cast<int>(N), static_cast<int>(M));
}

RadialKernel kernel_from_config(const RunConfig& cfg) {
    const std::string& family = cfg.get_string("kernel.family");
    if (family == "exponential") {
        const double b = cfg.get_double("kernel.b");
        require(b > 0.0, "kernel.b must be > 0");
        const bool wide_ok = cfg.get_bool("kernel.allow_nonintegrable");
        require(b < 0.5 || wide_ok,
                "kernel.b = " + cfg.get_string("kernel.b") +
                    " is not integrable against the hyperbolic area (needs b < 1/2); set "
                    "kernel.allow_nonintegrable = true for grid-truncated simulation");
        return RadialKernel::exponential(b, wide_ok);
    }
    if (family == "gabor") {
        const double b = cfg.get_double("kernel.b");
        require(b > 0.0, "kernel.b must be > 0");
        return RadialKernel::gabor(b);
    }
    if (family == "diff_gaussians" || family == "mexican_hat_3d") {
        const double s1 = cfg.get_double("kernel.sigma1");
        const double s2 = cfg.get_double("kernel.sigma2");
        const double A = cfg.get_double("kernel.A");
        require(s1 > 0.0 && s2 > 0.0, "kernel.sigma1 and kernel.sigma2 must be > 0");
        return family == "diff_gaussians" ? RadialKernel::diff_gaussians(s1, s2, A)
                                          : RadialKernel::mexican_hat_3d(s1, s2, A);
    }
    bad_enum("kernel.family", family, "exponential, gabor, diff_gaussians, mexican_hat_3d");
}

FiringRate firing_from_config(const RunConfig& cfg) {
    const std::string& type = cfg.get_string("firing.type");
    if (type == "heaviside") return FiringRate::heaviside(cfg.get_double("firing.kappa"));
    const double mu = cfg.get_double("firing.mu");
    require(mu > 0.0, "firing.mu must be > 0");
    if (type == "sigmoid") return FiringRate::sigmoid(mu);
    if (type == "shifted_sigmoid") return FiringRate::shifted_sigmoid(mu);
    bad_enum("firing.type", type, "sigmoid, shifted_sigmoid, heaviside");
}

namespace {

GaussianDenom denom_from_config(const RunConfig& cfg) {
    const std::string& denom = cfg.get_string("input.denom");
    if (denom == "sigma_sq") return GaussianDenom::SigmaSq;
    if (denom == "two_sigma_sq") return GaussianDenom::TwoSigmaSq;
    bad_enum("input.denom", denom, "sigma_sq, two_sigma_sq");
}

}  // namespace

ExternalInput input_from_config(const RunConfig& cfg) {
    const std::string& type = cfg.get_string("input.type");
    if (type == "zero") return ExternalInput::zero();
    const double I0 = cfg.get_double("input.I0");
    const double sigma = cfg.get_double("input.sigma");
    require(sigma > 0.0, "input.sigma must be > 0");
    if (type == "gaussian")
        return ExternalInput::gaussian_bump(I0, sigma, denom_from_config(cfg));
    if (type == "rotating") {
        require(cfg.get_string("input.denom") == "sigma_sq",
                "the rotating input is defined with input.denom = sigma_sq");
        return ExternalInput::rotating_bump(I0, sigma, cfg.get_double("input.r0"),
                                            cfg.get_double("input.Omega0"),
                                            cfg.get_double("input.phase0"));
    }
    bad_enum("input.type", type, "zero, gaussian, rotating");
}

OdeOptions ode_from_config(const RunConfig& cfg) {
    OdeOptions opt;
    opt.atol = cfg.get_double("ode.atol");
    opt.rtol = cfg.get_double("ode.rtol");
    require(opt.atol > 0.0 && opt.rtol > 0.0, "ode.atol and ode.rtol must be > 0");
    const double fixed = cfg.get_double("ode.fixed_dt");
    const double dt0 = cfg.get_double("ode.dt_init");
    require(fixed >= 0.0, "ode.fixed_dt must be >= 0");
    require(dt0 >= 0.0, "ode.dt_init must be >= 0");
    if (fixed > 0.0) opt.fixed_dt = fixed;
    if (dt0 > 0.0) opt.dt_init = dt0;
    return opt;
}

SimulationConfig simulation_from_config(const RunConfig& cfg, const FieldGrid& grid) {
    SimulationConfig sim;
    sim.T = cfg.get_double("T");
    require(sim.T >= 0.0, "T must be >= 0");
    sim.ode = ode_from_config(cfg);
    for (const double t : cfg.get_list("snapshots")) {
        require(t >= 0.0 && t <= sim.T,
                "snapshots must lie in [0, T]; got " + std::to_string(t));
        sim.snapshot_times.push_back(t);
    }

    const std::string& init = cfg.get_string("init.type");
    if (init == "noise") {
        const double amp = cfg.get_double("init.amplitude");
        require(amp >= 0.0, "init.amplitude must be >= 0");
        sim.V0 = noise_initial_condition(grid, amp,
                                         static_cast<std::uint64_t>(cfg.get_int("seed")));
    } else if (init != "zero") {
        bad_enum("init.type", init, "zero, noise");
    }
    return sim;
}

BumpConfig bump_from_config(const RunConfig& cfg) {
    BumpConfig bump;
    bump.alpha = cfg.get_double("alpha");
    require(bump.alpha > 0.0, "alpha must be > 0");
    bump.kappa = cfg.get_double("firing.kappa");
    bump.kernel = kernel_from_config(cfg);
    require(bump.kernel.integrable(),
            "the pulse analysis needs an integrable kernel (kernel.b < 1/2)");

    const std::string& type = cfg.get_string("input.type");
    if (type == "zero") {
        bump.I0 = 0.0;
    } else if (type == "gaussian") {
        require(cfg.get_string("input.denom") == "two_sigma_sq",
                "the pulse analysis is derived for the r^2/(2 sigma^2) input convention; "
                "set input.denom = two_sigma_sq");
        bump.I0 = cfg.get_double("input.I0");
        bump.sigma = cfg.get_double("input.sigma");
        require(bump.sigma > 0.0, "input.sigma must be > 0");
    } else {
        throw config_error("the pulse analysis needs a static centered input "
                           "(input.type zero or gaussian), not '" + type + "'");
    }

    const double lambda_max = cfg.get_double("spectral.lambda_max");
    const long long n_lambda = cfg.get_int("spectral.n_lambda");
    require(lambda_max > 0.0, "spectral.lambda_max must be > 0");
    require(n_lambda >= 8, "spectral.n_lambda must be >= 8");
    bump.spectral = SpectralGrid::make(lambda_max, static_cast<int>(n_lambda));
    return bump;
}

}  // namespace hypfield
