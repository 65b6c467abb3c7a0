#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gibbs/context.hpp"

namespace gibbs {

// Union of k descents from hi down to lo, sorted ascending.
std::vector<double> tpa(Context& ctx, std::uint64_t k);
std::vector<double> tpa_range(Context& ctx, std::uint64_t k, double lo, double hi);

enum class RatioVariant { ppe, hybrid, integer };
std::string_view ratio_variant_name(RatioVariant v);

// Knots beta_0 < ... < beta_t with ln Q_hat relative to beta_0.
struct KnotEstimates {
    std::vector<double> knots;
    std::vector<double> log_q;

    // Log-linear interpolation; alpha must lie within the knots.
    double log_query(double alpha) const;
};

// Answers Q_hat(alpha) = Z(alpha)/Z(beta_min) for any alpha without sampling.
struct RatioEstimator {
    RatioVariant variant = RatioVariant::ppe;
    double beta_min = 0.0;
    double beta_max = 0.0;
    double eps = 0.0;
    double gamma = 0.0;
    std::uint64_t build_cost = 0;

    // ppe; for hybrid the PPE part on [beta_mid, beta_max]
    KnotEstimates ppe;
    // hybrid
    std::vector<double> tpa_points;
    std::uint64_t k1 = 0;
    std::uint64_t k2 = 0;
    double beta_mid = 0.0;
    // integer
    std::vector<double> support;
    std::vector<double> pi_hat;

    nlohmann::json to_json() const;
    static RatioEstimator from_json(const nlohmann::json& j);
};

double query_log_ratio(const RatioEstimator& est, double alpha);
double query_ratio(const RatioEstimator& est, double alpha);

// Paired product estimator on [lo, hi] (whole range by default).
RatioEstimator ppe(Context& ctx, std::uint64_t k, double eps, double gamma);
KnotEstimates ppe_range(Context& ctx, std::uint64_t k, double eps, double gamma, double lo,
                        double hi);

std::uint64_t hybrid_k1(double eps, double gamma, const ConstantsProfile& profile);
std::uint64_t hybrid_k2(double eps, double n, const ConstantsProfile& profile);

// TPA counts up to beta_mid, PPE above it.
RatioEstimator pratio_all(Context& ctx, double eps, double gamma);

}  // namespace gibbs
