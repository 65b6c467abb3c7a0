#include "gibbs/pitable.hpp"

#include <algorithm>
#include <cstdio>

namespace gibbs {

const PiRecord* PiTable::find(double x) const
{
    auto it = std::lower_bound(rows.begin(), rows.end(), x,
                               [](const PiRecord& r, double v) { return r.x < v; });
    if (it == rows.end() || it->x != x) return nullptr;
    return &*it;
}

nlohmann::json PiTable::to_json() const
{
    nlohmann::json r = nlohmann::json::array();
    for (const auto& row : rows) r.push_back({{"x", row.x}, {"pi_hat", row.pi_hat}, {"u", row.u}});
    return {{"rows", r},         {"delta", delta},     {"eps", eps}, {"gamma", gamma},
            {"beta_min", beta_min}, {"profile", profile}, {"method", method}, {"cost", cost}};
}

PiTable PiTable::from_json(const nlohmann::json& j)
{
    PiTable t;
    for (const auto& row : j.at("rows"))
        t.rows.push_back({row.at("x").get<double>(), row.at("pi_hat").get<double>(),
                          row.at("u").get<double>()});
    t.delta = j.value("delta", 0.0);
    t.eps = j.value("eps", 0.0);
    t.gamma = j.value("gamma", 0.0);
    t.beta_min = j.value("beta_min", 0.0);
    t.profile = j.value("profile", std::string());
    t.method = j.value("method", std::string());
    t.cost = j.value("cost", std::uint64_t{0});
    return t;
}

std::string PiTable::to_csv() const
{
    std::string out = "x,pi_hat,u\n";
    char buf[96];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", row.x, row.pi_hat, row.u);
        out += buf;
    }
    return out;
}

}  // namespace gibbs
