#pragma once

#include <climits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbs/context.hpp"
#include "gibbs/instance.hpp"
#include "gibbs/sampling.hpp"

namespace gibbs {

// Interval endpoints live in H = {0..n}, with sentinels for -inf / +inf.
inline constexpr long kMinusInf = LONG_MIN;
inline constexpr long kPlusInf = LONG_MAX;

struct Segment {
    double beta = 0.0;
    long lo = kMinusInf;  // sigma^-
    long hi = kPlusInf;   // sigma^+
    double w = 1.0;

    bool operator==(const Segment&) const = default;
};

// |H n [lo, hi]|
long span(long lo, long hi, long n);

using PreSchedule = std::vector<Segment>;
using CoveringSchedule = std::vector<Segment>;

double inv_weight(const std::vector<Segment>& segs);

nlohmann::json schedule_to_json(const std::vector<Segment>& segs);
std::vector<Segment> schedule_from_json(const nlohmann::json& j);

// I1-I4 (and I0 when complete); nullopt when they hold, else the first failure.
std::optional<std::string> pre_schedule_violation(const std::vector<Segment>& segs, double beta_min,
                                                  double beta_max, long n, bool complete);
bool covers_everything(const std::vector<Segment>& segs);

// Structural conditions (i) and (ii) of a covering schedule.
std::optional<std::string> covering_violation(const CoveringSchedule& s, double beta_min,
                                              double beta_max, long n);

// Properness against an exact model: mu_beta(k) >= w at finite endpoints.
bool segment_proper(const GibbsInstance& inst, const Segment& seg, double slack = 0.0);
bool schedule_proper(const GibbsInstance& inst, const std::vector<Segment>& segs);
// Decay bounds below sigma^- and above sigma^+ with the 1/lambda slack.
bool segment_extremal(const GibbsInstance& inst, const Segment& seg, double lambda,
                      double tol = 1e-12);

// Contiguous candidate range {first..last}; a sentinel-only set is a
// singleton {kMinusInf} or {kPlusInf}.
struct EndpointSet {
    long first = 0;
    long last = 0;
};

// The arg-max rule on a given frequency vector over H (index = energy).
Segment choose_interval(const std::vector<double>& mu_hat, double beta, EndpointSet a_minus,
                        EndpointSet a_plus, long n, double lambda, double phi);

// Empirical frequencies indexed by energy 0..n (integer setting).
std::vector<double> energy_frequencies(const Domain& dom, const EmpiricalDistribution& emp);

double schedule_phi(const ConstantsProfile& p, double rho);

Segment find_interval(Context& ctx, double beta, EndpointSet a_minus, EndpointSet a_plus);

PreSchedule build_pre_schedule(Context& ctx);
PreSchedule minimalize(const PreSchedule& pre, double beta_min, double beta_max, long n);
// Empty optional stands for the failure symbol.
std::optional<CoveringSchedule> uncross_schedule(Context& ctx, const PreSchedule& pre, double gamma);
CoveringSchedule find_covering_schedule(Context& ctx, double gamma, int* attempts = nullptr);

}  // namespace gibbs
