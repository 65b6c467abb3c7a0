#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbs/graph.hpp"
#include "gibbs/instance.hpp"
#include "gibbs/oracle.hpp"
#include "gibbs/profile.hpp"

namespace gibbs {

// Bad command line or config; maps to exit code 64.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitContract = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitOracle = 70;

enum class OracleKind { exact, tv_perturbed, js_chain, external };

struct OracleSpec {
    OracleKind kind = OracleKind::exact;
    double d_tv = 0.0;
    TvMode tv_mode = TvMode::mass_shift_up;
    double mixing = 0.0;  // js chain; 0 takes the profile value
    std::string command;  // external

    nlohmann::json to_json() const;
};

// exact | tv:<d>[:up|down|pair] | js[:<C>][:<d>] | external:<command>
OracleSpec parse_oracle_spec(const std::string& s);

struct ExperimentConfig {
    std::string task;
    std::string instance_path;  // JSON instance
    std::string gen;            // generator spec, see make_instance
    std::string graph;          // count tasks: K<n>, C<n>, petersen or a file
    double eps = 0.3;
    double gamma = 0.25;
    double delta = 0.1;
    std::vector<std::uint64_t> seeds{1};
    std::string profile = "desk";
    OracleSpec oracle;
    std::string out_dir;
    bool assert_mode = false;
    int jobs = 1;
    // bench: "<axis>=v1,v2,..." with axis q, n, eps or delta; "{}" in gen
    // is replaced by each q or n value.
    std::string sweep;
    std::string bench_task = "ratio-all";
    int bootstrap = 1000;
    bool wall_time = false;

    nlohmann::json to_json() const;
};

const std::vector<std::string>& task_names();

// "a..b" or "a,b,c".
std::vector<std::uint64_t> parse_seeds(const std::string& s);

// Generator specs:
//   A                                 counts (1,2,1) on {0,1,2}, beta in [0,1]
//   counts:c0,c1,...[;bmin=..][;bmax=..|;q=..]
//   poly:m=<m>[,q=<q>]
//   family:<kind>[:k=v,...][:member=<r>]   lower-bound families
//   rescale:<spec>                    energies x/n, beta range times n
GibbsInstance make_instance(const std::string& spec);
Graph make_graph(const std::string& spec);

// Throws UsageError on a bad config.
void validate_config(const ExperimentConfig& c);

struct RunReport {
    nlohmann::json json;
    std::string pi_table_csv;
    std::string ratio_knots_csv;
    std::string counts_csv;
    int exit_code = kExitOk;

    // Canonical text of json, byte-identical for identical configs.
    std::string text() const;
};

RunReport run_experiment(const ExperimentConfig& config);
RunReport bench_scaling(const ExperimentConfig& config);
// Writes report.json and any non-empty CSV next to it.
void write_report(const RunReport& r, const std::string& dir);

// (1 - gamma) - 3 sqrt(gamma (1 - gamma) / runs)
double coverage_threshold(double gamma, std::size_t runs);

struct SlopeFit {
    double slope = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};
// Least squares of ln y on ln x with a percentile bootstrap over the
// per-point samples (95%).
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<std::vector<double>>& samples,
                    int bootstrap, std::uint64_t seed);

std::string version_string();

}  // namespace gibbs
