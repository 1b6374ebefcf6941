#include "hypfield/csvio.hpp"

#include <cstdio>
#include <fstream>

#include "hypfield/errors.hpp"

namespace hypfield {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw error("write to '" + path + "' failed");
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(const std::string& path, const FieldGrid& grid,
                          const std::vector<double>& times,
                          const std::vector<Eigen::ArrayXd>& states) {
    if (times.size() != states.size())
        throw error("trajectory has " + std::to_string(times.size()) + " times but " +
                    std::to_string(states.size()) + " states");
    for (const Eigen::ArrayXd& V : states)
        if (V.size() != grid.nodes()) throw error("trajectory state does not match the grid");

    std::ofstream out = open_out(path);
    out << "t,i,j,r,theta,V\n";
    for (std::size_t s = 0; s < times.size(); ++s) {
        const std::string t = format_double(times[s]);
        for (int i = 0; i <= grid.N; ++i) {
            for (int j = 0; j <= grid.M; ++j) {
                const int n = grid.index(i, j);
                out << t << ',' << i << ',' << j << ',' << format_double(grid.r[n]) << ','
                    << format_double(grid.theta[n]) << ',' << format_double(states[s][n])
                    << '\n';
            }
        }
    }
    finish(out, path);
}

void write_scalar_csv(const std::string& path, const Eigen::ArrayXd& t,
                      const Eigen::ArrayXd& v) {
    if (t.size() != v.size()) throw error("scalar trajectory has mismatched lengths");
    std::ofstream out = open_out(path);
    out << "t,v\n";
    for (Eigen::Index k = 0; k < t.size(); ++k)
        out << format_double(t[k]) << ',' << format_double(v[k]) << '\n';
    finish(out, path);
}

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve) {
    std::ofstream out = open_out(path);
    out << "omega,N,M,I\n";
    for (const CurvePoint& p : curve)
        out << format_double(p.omega) << ',' << format_double(p.N) << ','
            << format_double(p.M) << ',' << format_double(p.I) << '\n';
    finish(out, path);
}

void write_profile_csv(const std::string& path, const BumpSolution& sol) {
    if (sol.r.size() != sol.V.size()) throw error("pulse profile has mismatched lengths");
    std::ofstream out = open_out(path);
    out << "r,V\n";
    for (Eigen::Index k = 0; k < sol.r.size(); ++k)
        out << format_double(sol.r[k]) << ',' << format_double(sol.V[k]) << '\n';
    finish(out, path);
}

void write_stability_csv(const std::string& path, const Eigen::ArrayXd& beta,
                         const StabilityReport& rep) {
    std::ofstream out = open_out(path);
    out << "n,beta_n\n";
    for (Eigen::Index n = 0; n < beta.size(); ++n)
        out << n << ',' << format_double(beta[n]) << '\n';
    const char* verdict =
        rep.indeterminate ? "indeterminate" : (rep.stable ? "stable" : "unstable");
    out << "# verdict: " << verdict << "; n_prime = " << format_double(rep.n_prime_analytic)
        << "; essential = " << format_double(rep.essential) << '\n';
    finish(out, path);
}

void write_verify_csv(const std::string& path, const std::vector<OracleCheck>& table) {
    std::ofstream out = open_out(path);
    out << "check,main_value,oracle_value,rel_err,tol,pass\n";
    for (const OracleCheck& c : table)
        out << c.name << ',' << format_double(c.main_value) << ','
            << format_double(c.oracle_value) << ',' << format_double(c.rel_err) << ','
            << format_double(c.tol) << ',' << (c.pass ? '1' : '0') << '\n';
    finish(out, path);
}

void write_meta(const std::string& path,
                const std::vector<std::pair<std::string, std::string>>& comments,
                const std::map<std::string, std::string>& keys) {
    std::ofstream out = open_out(path);
    for (const auto& [k, v] : comments) out << "# " << k << " = " << v << '\n';
    for (const auto& [k, v] : keys) out << k << " = " << v << '\n';
    finish(out, path);
}

}  // namespace hypfield
