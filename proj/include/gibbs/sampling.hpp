#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "gibbs/oracle.hpp"
#include "gibbs/profile.hpp"

namespace gibbs {

struct Calibration {
    double eps = 0.0;
    double gamma = 0.0;
    double p0 = 0.0;
};

// N = ceil(f * 3 e^eps ln(4/gamma) / ((1 - e^-eps)^2 p0)), f the profile factor.
std::uint64_t calibrated_sample_size(double eps, double gamma, double p0,
                                     const ConstantsProfile& profile = paper_profile());

// Frequency table of N draws at one beta, aligned with the domain support.
class EmpiricalDistribution {
public:
    EmpiricalDistribution(double beta, std::vector<double> support, std::vector<std::uint64_t> freq,
                          std::optional<Calibration> calibration = std::nullopt);

    double beta() const { return beta_; }
    std::uint64_t draws() const { return draws_; }
    const std::vector<double>& support() const { return support_; }
    const std::vector<std::uint64_t>& freq() const { return freq_; }
    const std::optional<Calibration>& calibration() const { return calibration_; }

    // mu_hat of a single energy (0 if not a support point).
    double mu(double x) const;
    double mu_index(std::size_t j) const;
    // mu_hat of energies x with lo <= x < hi (or <= hi when hi_closed).
    double mu_range(double lo, double hi, bool hi_closed) const;

    nlohmann::json to_json() const;

private:
    double beta_;
    std::vector<double> support_;
    std::vector<std::uint64_t> freq_;
    std::uint64_t draws_ = 0;
    std::optional<Calibration> calibration_;
};

EmpiricalDistribution sample_empirical(Oracle& oracle, double beta, std::uint64_t n);
EmpiricalDistribution sample_empirical(Oracle& oracle, double beta, const Calibration& c,
                                       const ConstantsProfile& profile);

// Both bounds of the calibrated-sampling lemma for one interval probability.
bool well_estimates(double p_hat, double p, double eps, double p0);

struct PiEstimate {
    double pi_hat = 0.0;
    double u = 0.0;
};

// pi_hat = Q e^{(beta_min - alpha) x} mu_hat,
// u = 0.5 Q e^{(beta_min - alpha) x} eps (delta nu + mu_hat).
PiEstimate estimate_pi(double x, double alpha, double nu, double q_hat_alpha,
                       double mu_hat_alpha_x, double beta_min, double eps, double delta);

// A nonnegative random variable, drawn in batches: source(r) returns the sum
// of r independent copies. Oracle-backed sources use one histogram per call.
using Source = std::function<double(std::uint64_t)>;

// Batches a one-draw-at-a-time variable; each draw is checked for sign.
Source per_draw(std::function<double()> draw);
// Indicator 1{x == energy} for x ~ mu_beta.
Source indicator_source(Oracle& oracle, double beta, std::size_t index);
// exp(c x) for x ~ mu_beta.
Source tilt_source(Oracle& oracle, double beta, double c);

struct ProductEstimates {
    std::vector<double> values;      // values[0] = 1
    std::vector<double> log_values;  // ln of values, kept exact in log mode
    double alpha = 0.0;
    double eps = 0.0;
    double gamma = 0.0;
    std::uint64_t r = 0;
    std::uint64_t k_trials = 0;
    std::uint64_t samples = 0;
    bool log_domain = false;
};

std::uint64_t product_draws_per_index(double alpha, double eps, const ConstantsProfile& profile);
std::uint64_t median_trial_count(double gamma, const ConstantsProfile& profile);

// Median over k trials of running products of r-sample means.
ProductEstimates estimate_products(const std::vector<Source>& sources, double alpha, double eps,
                                   double gamma, const ConstantsProfile& profile);

}  // namespace gibbs
