#pragma once

#include <stdexcept>
#include <string>

namespace hypfield {

// Base class for every error raised by this library, so callers can catch
// one type at the CLI boundary and map it to an exit code.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A value violates a mathematical precondition (point outside the disk,
// non-SPD tensor, non-positive width, ...).
struct domain_error : error {
    using error::error;
};

// A kernel fails the L1-integrability requirement against the hyperbolic
// measure (the sinh(2r) growth), or an integral truncation cannot meet its
// tail tolerance.
struct integrability_error : error {
    using error::error;
};

// An iterative numerical process failed: series did not converge, Picard
// iteration diverged, adaptive step size underflowed, ...
struct convergence_error : error {
    using error::error;
};

// A requested resolution/budget is insufficient or exceeded (spectral grid
// too coarse for the kernel tail, kernel matrix over the memory cap).
struct resolution_error : error {
    using error::error;
};

// A computed object violates a structural postcondition (a pulse profile
// that fails to cross its threshold where the root analysis said it would,
// for example) -- usually the sign of a spurious root upstream.
struct consistency_error : error {
    using error::error;
};

// Configuration problems: unknown key, malformed value, missing preset.
struct config_error : error {
    using error::error;
};

}  // namespace hypfield
