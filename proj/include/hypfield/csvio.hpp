#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hypfield/bumps.hpp"
#include "hypfield/field.hpp"
#include "hypfield/verify.hpp"

// CSV artifacts and the key=value metadata sidecar. All files are UTF-8 with
// LF line endings; doubles are printed with 17 significant digits, so values
// round-trip exactly and reruns with identical inputs are byte-identical.

namespace hypfield {

// "%.17g"; infinities print as "inf"/"-inf".
std::string format_double(double x);

// Header `t,i,j,r,theta,V`; one row per node per snapshot, nodes in flat
// (i major, j minor) order. times and states must have equal sizes and every
// state must match the grid.
void write_trajectory_csv(const std::string& path, const FieldGrid& grid,
                          const std::vector<double>& times,
                          const std::vector<Eigen::ArrayXd>& states);

// Header `t,v`: a scalar trajectory (the space-clamped equation).
void write_scalar_csv(const std::string& path, const Eigen::ArrayXd& t,
                      const Eigen::ArrayXd& v);

// Header `omega,N,M,I`: the pulse existence curve.
void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve);

// Header `r,V`: the pulse profile.
void write_profile_csv(const std::string& path, const BumpSolution& sol);

// Header `n,beta_n`, one row per boundary mode, then a trailing comment line
//   # verdict: stable|unstable|indeterminate; n_prime = ...; essential = ...
void write_stability_csv(const std::string& path, const Eigen::ArrayXd& beta,
                         const StabilityReport& rep);

// Header `check,main_value,oracle_value,rel_err,tol,pass` (pass is 1/0).
void write_verify_csv(const std::string& path, const std::vector<OracleCheck>& table);

// Sidecar: `# key = value` comment lines first (free-form run facts), then
// every config key as a plain `key = value` line, in map order. A sidecar is
// itself a valid config file, so a run can be repeated from it directly.
void write_meta(const std::string& path,
                const std::vector<std::pair<std::string, std::string>>& comments,
                const std::map<std::string, std::string>& keys);

}  // namespace hypfield
