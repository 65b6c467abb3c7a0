#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace gibbs {

struct PiRecord {
    double x = 0.0;
    double pi_hat = 0.0;
    double u = 0.0;
};

// Estimates of pi(x) = mu_{beta_min}(x) with error bars, one row per energy.
struct PiTable {
    std::vector<PiRecord> rows;
    double delta = 0.0;
    double eps = 0.0;
    double gamma = 0.0;
    double beta_min = 0.0;
    std::string profile;
    std::string method;
    std::uint64_t cost = 0;

    const PiRecord* find(double x) const;
    nlohmann::json to_json() const;
    static PiTable from_json(const nlohmann::json& j);
    std::string to_csv() const;
};

}  // namespace gibbs
