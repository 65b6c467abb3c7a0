#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gibbs {

// Finite Gibbs model: energies x_j with counts c_j over [beta_min, beta_max].
// Counts live in log domain (zero count = -inf) with linear values derived.
class GibbsInstance {
public:
    GibbsInstance() = default;

    static GibbsInstance from_counts(std::vector<double> support, const std::vector<double>& counts,
                                     double beta_min, double beta_max);
    static GibbsInstance from_log_counts(std::vector<double> support, std::vector<double> log_counts,
                                         double beta_min, double beta_max);
    // Integer support 0..counts.size()-1.
    static GibbsInstance from_counts(const std::vector<double>& counts, double beta_min,
                                     double beta_max);

    // Skips the {0} u [1,n] energy check; only the rescaled lower-bound
    // family needs energies inside (0,1).
    static GibbsInstance from_log_counts_unchecked(std::vector<double> support,
                                                   std::vector<double> log_counts, double beta_min,
                                                   double beta_max);

    std::size_t size() const { return support_.size(); }
    const std::vector<double>& support() const { return support_; }
    const std::vector<double>& log_counts() const { return log_counts_; }
    std::vector<double> counts() const;
    double count(std::size_t j) const;
    double beta_min() const { return beta_min_; }
    double beta_max() const { return beta_max_; }
    double n() const { return n_; }
    bool integer_setting() const { return integer_; }
    bool log_concave() const { return log_concave_; }

    // 1 + ln(n+1) in general, e when log-concave.
    double rho() const;

    // Index of energy x in the support, if present.
    std::optional<std::size_t> find(double x) const;
    // Count at energy x; 0 when x is not a support point.
    double count_at(double x) const;

    GibbsInstance with_beta_range(double beta_min, double beta_max) const;

private:
    void validate(bool check_energies);

    std::vector<double> support_;
    std::vector<double> log_counts_;
    std::vector<double> counts_;
    double beta_min_ = 0.0;
    double beta_max_ = 0.0;
    double n_ = 0.0;
    bool integer_ = false;
    bool log_concave_ = false;
};

// True iff the nonzero entries form a contiguous block with
// c_k^2 >= c_{k-1} c_{k+1} inside it (inputs in log domain, over 0..n).
bool log_concave_sequence(const std::vector<double>& log_counts);

double log_partition(const GibbsInstance& inst, double beta);
double log_ratio(const GibbsInstance& inst, double beta1, double beta2);
std::vector<double> induced_mu(const GibbsInstance& inst, double beta);
// mu_beta at support index j.
double mu_at(const GibbsInstance& inst, double beta, std::size_t j);
// mu_beta of energies in [lo, hi) / [lo, hi].
double mu_range(const GibbsInstance& inst, double beta, double lo, double hi, bool hi_closed);

struct EnergyMoments {
    double mean = 0.0;      // z'(beta)
    double variance = 0.0;  // z''(beta)
};
EnergyMoments mean_energy(const GibbsInstance& inst, double beta);

// ln(z'(beta_max) / z'(beta_min)); infinite when z'(beta_min) = 0.
double theta(const GibbsInstance& inst);

struct DeltaMax {
    double value = 0.0;
    double beta = 0.0;
};
// max over [beta_min, beta_max] of mu_beta(x), by ternary search.
DeltaMax delta_argmax(const GibbsInstance& inst, double x);
double delta_max(const GibbsInstance& inst, double x);

// beta_max with z(beta_min, beta_max) = q_target, by bisection.
double find_betamax(const GibbsInstance& base, double q_target);
double find_betamax(const std::vector<double>& counts, double beta_min, double q_target);

// JSON in/out. Accepts "counts" or "log_counts" (null = zero count).
GibbsInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const GibbsInstance& inst);
GibbsInstance load_instance(const std::string& path);

// Deterministic text: sorted keys, floats with 17 significant digits.
std::string canonical_dump(const nlohmann::json& j, int indent = -1);

}  // namespace gibbs
