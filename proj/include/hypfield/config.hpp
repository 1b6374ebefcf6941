#pragma once

#include <map>
#include <string>
#include <vector>

#include "hypfield/bumps.hpp"
#include "hypfield/field.hpp"

// Flat key=value run configuration for the command-line front end. The
// grammar is one `key = value` pair per line, `#` comments, blank lines
// ignored; sections are spelled with dotted keys (kernel.b, input.I0, ...).
// Every known key has a default, and a RunConfig always carries all of them,
// so writing the map back out yields a sidecar from which the run can be
// reproduced exactly.

namespace hypfield {

enum class KeyKind {
    Double,
    Int,    // integral (grid sizes, iteration counts, seeds)
    Bool,   // true/false/1/0
    String, // free-form or enumerated; enumerations are checked by the builders
    List,   // comma-separated doubles, possibly empty
};

struct KeySpec {
    const char* key;
    const char* fallback;  // textual default
    KeyKind kind;
    const char* help;
};

// All recognized keys with their defaults; the single source of truth for
// parsing, validation, and the metadata sidecar.
const std::vector<KeySpec>& config_registry();

class RunConfig {
public:
    // A config holding every registry key at its default value.
    static RunConfig defaults();

    // Overlays, applied in the order the CLI receives them. All of them
    // reject unknown keys and values that do not parse as the declared kind
    // (throwing config_error naming the key and, for files, the line).
    void apply_file(const std::string& path);
    void apply_preset(const std::string& name, const std::string& fallback_dir = "");
    void apply_override(const std::string& keyval);  // "key=value"

    // Typed access; the value was syntax-checked when it was set.
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    const std::string& get_string(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;

    // Full key -> value view (ordered), for the metadata sidecar.
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;

    void set_checked(const std::string& key, const std::string& value,
                     const std::string& where);
    const std::string& raw(const std::string& key) const;
};

// Resolves a preset name to a file path, trying in order:
//   $HYPFIELD_PRESET_DIR/<name>.preset
//   <directory of the running executable>/presets/<name>.preset
//   <fallback_dir>/<name>.preset           (compiled-in source location)
// Throws config_error listing the attempted paths when none exists.
std::string find_preset(const std::string& name, const std::string& fallback_dir = "");

// Builders: translate a validated key set into library objects, enforcing the
// cross-field constraints (enumeration values, integrability, ranges). All
// violations throw config_error naming the offending key.
FieldGrid grid_from_config(const RunConfig& cfg);
RadialKernel kernel_from_config(const RunConfig& cfg);
FiringRate firing_from_config(const RunConfig& cfg);
ExternalInput input_from_config(const RunConfig& cfg);
OdeOptions ode_from_config(const RunConfig& cfg);
// Needs the grid for the seeded-noise initial condition.
SimulationConfig simulation_from_config(const RunConfig& cfg, const FieldGrid& grid);
// The pulse-analysis parameter set: alpha, firing.kappa, the kernel, the
// static centered input (input.type zero or gaussian with the r^2/(2 sigma^2)
// convention), and the spectral grid.
BumpConfig bump_from_config(const RunConfig& cfg);

}  // namespace hypfield
