#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbs/context.hpp"
#include "gibbs/pitable.hpp"
#include "gibbs/pratio.hpp"
#include "gibbs/sampling.hpp"
#include "gibbs/schedule.hpp"

namespace gibbs {

// ln Q_hat at the schedule temperatures.
struct ScheduleRatios {
    std::vector<double> betas;
    std::vector<double> log_q;
    std::string provenance;  // direct | ratio-all
    std::uint64_t cost = 0;

    double q(std::size_t i) const;
    nlohmann::json to_json() const;
    static ScheduleRatios from_json(const nlohmann::json& j);
};

// Combines the two product estimates with the energy correction
// exp(sum_j (beta_j - beta_{j-1}) sigma^-_j).
ScheduleRatios schedule_log_ratios(const CoveringSchedule& s, const ProductEstimates& x,
                                   const ProductEstimates& y);

ScheduleRatios pratio_covering_schedule(Context& ctx, const CoveringSchedule& s, double eps,
                                        double gamma);

struct DovetailReport {
    std::string winner;  // direct | ratio-all
    std::uint64_t direct_cost = 0;
    std::uint64_t ratio_cost = 0;
};

// Runs the schedule estimator and pratio_all in alternating slices of draws;
// the first to finish supplies the answer.
ScheduleRatios pratio_points_dovetail(Context& ctx, const CoveringSchedule& s, double eps,
                                      double gamma, DovetailReport* report = nullptr);

PiTable pcoef_integer(Context& ctx, double delta, double eps, double gamma);
PiTable pcoef_logconcave(Context& ctx, double delta, double eps, double gamma);

// Q_hat(alpha) = sum_i pi_hat(i) e^{(alpha - beta_min) i}; no sampling.
RatioEstimator pratio_all_integer(const PiTable& table, double beta_min, double beta_max);

// Relative counts c_x up to one common factor, or nullopt where the error
// bar is too wide: pi_hat(x) e^{-beta_min x} when u(x) <= 0.2 eps pi_hat(x).
std::vector<std::optional<double>> derive_ptcoef(const PiTable& table, double eps);

}  // namespace gibbs
