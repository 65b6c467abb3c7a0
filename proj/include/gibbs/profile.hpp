#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace gibbs {

// Every hard constant the estimators use. `paper` keeps the published
// values; `desk` keeps the structure and shrinks the union-bound slack so
// that coverage runs over hundreds of seeds finish on one core.
struct ConstantsProfile {
    std::string name;

    // Multiplies the calibrated sample size 3e^eps ln(4/gamma)/((1-e^-eps)^2 p0).
    double calibration_factor;
    // r = ceil(product_r * alpha / eps^2) draws per index per trial.
    double product_r;
    // k = ceil(median_trials * ln(1/gamma)), rounded up to odd.
    double median_trials;
    // k1 = ceil(hybrid_k1 / eps^2 * ln(hybrid_k1_log / gamma)).
    double hybrid_k1;
    double hybrid_k1_log;
    // Crossover point for the hybrid: beta_mid is the (hybrid_mid * k1)-th point.
    double hybrid_mid;
    // k2 = ceil(ppe_k2 * (1 + ln n) / eps^2).
    double ppe_k2;
    // N_t = ceil(pcoef_c5 * ln(50 t^2/(delta gamma)) / (delta eps^2)).
    double pcoef_c5;
    // Noisy binary search budget ceil(search_budget * ln(N+2) / nu^2) and
    // the posterior mass that stops it early.
    double search_budget;
    double search_halt_mass;
    // Covering schedule constants tau, lambda, nu and the InvWeight factor a.
    double schedule_tau;
    double schedule_lambda;
    double schedule_nu;
    double schedule_a;
    int schedule_retries;
    // Accuracy fractions used by the count estimators: the 0.01 eps of the
    // per-knot samples and the 0.1 eps of the ratio estimates.
    double fine_eps;
    double coarse_eps;
    // Draws per dovetail turn.
    std::uint64_t dovetail_slice;
    // Run-length constant for the matching chain.
    double js_mixing;
};

const ConstantsProfile& paper_profile();
const ConstantsProfile& desk_profile();
// "paper" or "desk"; anything else is a DomainError.
const ConstantsProfile& profile_by_name(const std::string& name);
// GIBBS_PROFILE when set, desk otherwise.
const ConstantsProfile& default_profile();

nlohmann::json profile_to_json(const ConstantsProfile& p);

}  // namespace gibbs
