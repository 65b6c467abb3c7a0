#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "gibbs/context.hpp"
#include "gibbs/pitable.hpp"
#include "gibbs/pratio.hpp"

namespace gibbs {

struct PcoefStep {
    int t = 0;
    double alpha = 0.0;
    double x = 0.0;  // -inf once alpha reaches beta_min
    std::uint64_t samples = 0;
};

struct PcoefTrace {
    std::vector<PcoefStep> steps;
    std::uint64_t ratio_cost = 0;
    std::uint64_t total_cost = 0;

    nlohmann::json to_json() const;
};

// N_t = ceil(c5 ln(50 t^2/(delta gamma)) / (delta eps^2)).
std::uint64_t pcoef_samples(int t, double delta, double eps, double gamma,
                            const ConstantsProfile& profile);

// Count estimates for any support: descending searched temperatures, one
// calibrated batch per temperature.
PiTable pcoef_continuous(Context& ctx, double delta, double eps, double gamma,
                         PcoefTrace* trace = nullptr);

}  // namespace gibbs
