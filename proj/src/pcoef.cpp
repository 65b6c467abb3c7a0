#include "gibbs/pcoef.hpp"

#include <cmath>
#include <limits>

#include "gibbs/binary_search.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/sampling.hpp"

namespace gibbs {

nlohmann::json PcoefTrace::to_json() const
{
    nlohmann::json s = nlohmann::json::array();
    for (const auto& st : steps)
        s.push_back({{"t", st.t},
                     {"alpha", st.alpha},
                     {"x", std::isfinite(st.x) ? nlohmann::json(st.x) : nlohmann::json(nullptr)},
                     {"samples", st.samples}});
    return {{"steps", s}, {"ratio_cost", ratio_cost}, {"total_cost", total_cost}};
}

std::uint64_t pcoef_samples(int t, double delta, double eps, double gamma,
                            const ConstantsProfile& profile)
{
    double tt = static_cast<double>(t);
    double n = std::ceil(profile.pcoef_c5 * std::log(50.0 * tt * tt / (delta * gamma)) /
                         (delta * eps * eps));
    if (!(n < 1e18)) throw DomainError("pcoef: sample size overflows");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
}

PiTable pcoef_continuous(Context& ctx, double delta, double eps, double gamma, PcoefTrace* trace)
{
    auto in01 = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in01(delta) || !in01(eps) || !in01(gamma))
        throw DomainError("pcoef_continuous: delta, eps, gamma must lie in (0,1)");
    const Domain& dom = ctx.domain();
    const double ninf = -std::numeric_limits<double>::infinity();
    std::uint64_t c0 = ctx.oracle.cost();

    RatioEstimator D = pratio_all(ctx, eps / 10.0, gamma / 4.0);
    if (trace) trace->ratio_cost = ctx.oracle.cost() - c0;

    PiTable table;
    table.delta = delta;
    table.eps = eps;
    table.gamma = gamma;
    table.beta_min = dom.beta_min;
    table.profile = ctx.profile.name;
    table.method = "continuous";
    table.rows.resize(dom.size());
    for (std::size_t j = 0; j < dom.size(); ++j) table.rows[j].x = dom.support[j];

    double x_prev = dom.n;
    double alpha_prev = dom.beta_max;
    constexpr int kMaxSteps = 100000;
    for (int t = 1;; ++t) {
        if (t > kMaxSteps) throw GiveUpError("pcoef_continuous: no progress");
        double tt = static_cast<double>(t);
        double alpha;
        if (dom.beta_min == dom.beta_max)
            alpha = dom.beta_min;
        else
            alpha = binary_search(ctx, dom.beta_min, alpha_prev, x_prev, gamma / (100.0 * tt * tt), 0.25);
        std::uint64_t N = pcoef_samples(t, delta, eps, gamma, ctx.profile);
        auto emp = sample_empirical(ctx.oracle, alpha, N);
        double x_t = ninf;
        if (alpha > dom.beta_min) {
            std::uint64_t acc = 0;
            for (std::size_t j = 0; j < dom.size(); ++j) {
                acc += emp.freq()[j];
                if (static_cast<double>(acc) >= 0.01 * static_cast<double>(N)) {
                    x_t = dom.support[j];
                    break;
                }
            }
        }
        double q_hat = query_ratio(D, alpha);
        for (std::size_t j = 0; j < dom.size(); ++j) {
            double y = dom.support[j];
            if (y > x_t && y <= x_prev) {
                auto e = estimate_pi(y, alpha, 1.0 / 200.0, q_hat, emp.mu_index(j), dom.beta_min, eps,
                                     delta);
                table.rows[j].pi_hat = e.pi_hat;
                table.rows[j].u = e.u;
            }
        }
        if (trace) trace->steps.push_back({t, alpha, x_t, N});
        x_prev = x_t;
        alpha_prev = alpha;
        if (!(alpha > dom.beta_min)) break;
    }
    table.cost = ctx.oracle.cost() - c0;
    if (trace) trace->total_cost = table.cost;
    return table;
}

}  // namespace gibbs
