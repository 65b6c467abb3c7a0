#include "gibbs/pratio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbs/errors.hpp"
#include "gibbs/sampling.hpp"

namespace gibbs {

std::vector<double> tpa_range(Context& ctx, std::uint64_t k, double lo, double hi)
{
    if (k < 1) throw DomainError("tpa: k must be >= 1");
    std::vector<double> out;
    for (std::uint64_t run = 0; run < k; ++run) {
        double beta = hi;
        for (;;) {
            double K = ctx.oracle.draw(beta);
            double U = ctx.rng.uniform();
            if (K == 0.0) break;
            double next = beta + std::log(U) / K;
            if (next < lo) break;
            out.push_back(next);
            beta = next;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> tpa(Context& ctx, std::uint64_t k)
{
    return tpa_range(ctx, k, ctx.domain().beta_min, ctx.domain().beta_max);
}

std::string_view ratio_variant_name(RatioVariant v)
{
    switch (v) {
    case RatioVariant::ppe:
        return "ppe";
    case RatioVariant::hybrid:
        return "hybrid";
    default:
        return "integer";
    }
}

double KnotEstimates::log_query(double alpha) const
{
    if (knots.size() == 1 || alpha <= knots.front()) return log_q.front();
    if (alpha >= knots.back()) return log_q.back();
    auto it = std::lower_bound(knots.begin(), knots.end(), alpha);
    auto i = static_cast<std::size_t>(it - knots.begin());
    if (knots[i] == alpha) return log_q[i];
    double x = (alpha - knots[i - 1]) / (knots[i] - knots[i - 1]);
    return (1.0 - x) * log_q[i - 1] + x * log_q[i];
}

KnotEstimates ppe_range(Context& ctx, std::uint64_t k, double eps, double gamma, double lo,
                        double hi)
{
    if (!(eps > 0.0 && eps < 1.0) || !(gamma > 0.0 && gamma < 1.0))
        throw DomainError("ppe: eps, gamma must lie in (0,1)");
    KnotEstimates out;
    out.knots.push_back(lo);
    if (lo < hi) {
        auto d = static_cast<std::uint64_t>(std::ceil(std::log(2.0 / gamma)));
        auto all = tpa_range(ctx, k * d, lo, hi);
        std::size_t offset = ctx.rng.below(d);
        for (std::size_t i = offset; i < all.size(); i += d)
            if (all[i] > out.knots.back() && all[i] < hi) out.knots.push_back(all[i]);
        out.knots.push_back(hi);
    }
    const std::size_t t = out.knots.size() - 1;
    std::vector<Source> W, V;
    for (std::size_t i = 1; i <= t; ++i) {
        double h = 0.5 * (out.knots[i] - out.knots[i - 1]);
        W.push_back(tilt_source(ctx.oracle, out.knots[i - 1], h));
        V.push_back(tilt_source(ctx.oracle, out.knots[i], -h));
    }
    auto w = estimate_products(W, 2.0 * eps * eps, eps / 4.0, gamma / 4.0, ctx.profile);
    auto v = estimate_products(V, 2.0 * eps * eps, eps / 4.0, gamma / 4.0, ctx.profile);
    out.log_q.resize(t + 1);
    for (std::size_t i = 0; i <= t; ++i) out.log_q[i] = w.log_values[i] - v.log_values[i];
    return out;
}

RatioEstimator ppe(Context& ctx, std::uint64_t k, double eps, double gamma)
{
    if (k < 1) throw DomainError("ppe: k must be >= 1");
    std::uint64_t c0 = ctx.oracle.cost();
    RatioEstimator est;
    est.variant = RatioVariant::ppe;
    est.beta_min = ctx.domain().beta_min;
    est.beta_max = ctx.domain().beta_max;
    est.eps = eps;
    est.gamma = gamma;
    est.ppe = ppe_range(ctx, k, eps, gamma, est.beta_min, est.beta_max);
    est.build_cost = ctx.oracle.cost() - c0;
    return est;
}

std::uint64_t hybrid_k1(double eps, double gamma, const ConstantsProfile& profile)
{
    return static_cast<std::uint64_t>(
        std::ceil(profile.hybrid_k1 / (eps * eps) * std::log(profile.hybrid_k1_log / gamma)));
}

std::uint64_t hybrid_k2(double eps, double n, const ConstantsProfile& profile)
{
    return std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(
               std::ceil(profile.ppe_k2 * (1.0 + std::log(std::max(n, 1.0))) / (eps * eps))));
}

RatioEstimator pratio_all(Context& ctx, double eps, double gamma)
{
    if (!(eps > 0.0 && eps < 1.0) || !(gamma > 0.0 && gamma < 1.0))
        throw DomainError("pratio_all: eps, gamma must lie in (0,1)");
    const Domain& dom = ctx.domain();
    std::uint64_t c0 = ctx.oracle.cost();
    RatioEstimator est;
    est.variant = RatioVariant::hybrid;
    est.beta_min = dom.beta_min;
    est.beta_max = dom.beta_max;
    est.eps = eps;
    est.gamma = gamma;
    est.k1 = hybrid_k1(eps, gamma, ctx.profile);
    est.k2 = hybrid_k2(eps, dom.n, ctx.profile);
    est.tpa_points = tpa(ctx, est.k1);
    auto m = static_cast<std::size_t>(std::ceil(ctx.profile.hybrid_mid * static_cast<double>(est.k1)));
    est.beta_mid = est.tpa_points.size() >= m && m > 0 ? est.tpa_points[m - 1] : dom.beta_max;
    est.ppe = ppe_range(ctx, est.k2, eps / 2.0, gamma / 2.0, est.beta_mid, dom.beta_max);
    est.build_cost = ctx.oracle.cost() - c0;
    return est;
}

namespace {

// |B n [lo, hi)| / k1
double tpa_b(const RatioEstimator& est, double lo, double hi)
{
    auto a = std::lower_bound(est.tpa_points.begin(), est.tpa_points.end(), lo);
    auto b = std::lower_bound(est.tpa_points.begin(), est.tpa_points.end(), hi);
    return b > a ? static_cast<double>(b - a) / static_cast<double>(est.k1) : 0.0;
}

}  // namespace

double query_log_ratio(const RatioEstimator& est, double alpha)
{
    if (!(alpha >= est.beta_min && alpha <= est.beta_max))
        throw DomainError("query_ratio: alpha outside [beta_min, beta_max]");
    switch (est.variant) {
    case RatioVariant::ppe:
        return est.ppe.log_query(alpha);
    case RatioVariant::hybrid:
        if (alpha <= est.beta_mid) return tpa_b(est, est.beta_min, alpha);
        return tpa_b(est, est.beta_min, est.beta_mid) + est.ppe.log_query(alpha);
    default: {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < est.support.size(); ++j)
            if (est.pi_hat[j] > 0.0)
                m = std::max(m, std::log(est.pi_hat[j]) + (alpha - est.beta_min) * est.support[j]);
        if (!std::isfinite(m)) return m;
        double s = 0.0;
        for (std::size_t j = 0; j < est.support.size(); ++j)
            if (est.pi_hat[j] > 0.0)
                s += std::exp(std::log(est.pi_hat[j]) + (alpha - est.beta_min) * est.support[j] - m);
        return m + std::log(s);
    }
    }
}

double query_ratio(const RatioEstimator& est, double alpha)
{
    return std::exp(query_log_ratio(est, alpha));
}

nlohmann::json RatioEstimator::to_json() const
{
    nlohmann::json j{{"variant", ratio_variant_name(variant)},
                     {"beta_min", beta_min},
                     {"beta_max", beta_max},
                     {"eps", eps},
                     {"gamma", gamma},
                     {"build_cost", build_cost}};
    if (variant != RatioVariant::integer) j["ppe"] = {{"knots", ppe.knots}, {"log_q", ppe.log_q}};
    if (variant == RatioVariant::hybrid) {
        j["tpa_points"] = tpa_points;
        j["k1"] = k1;
        j["k2"] = k2;
        j["beta_mid"] = beta_mid;
    }
    if (variant == RatioVariant::integer) {
        j["support"] = support;
        j["pi_hat"] = pi_hat;
    }
    return j;
}

RatioEstimator RatioEstimator::from_json(const nlohmann::json& j)
{
    RatioEstimator e;
    auto v = j.at("variant").get<std::string>();
    if (v == "ppe")
        e.variant = RatioVariant::ppe;
    else if (v == "hybrid")
        e.variant = RatioVariant::hybrid;
    else if (v == "integer")
        e.variant = RatioVariant::integer;
    else
        throw DomainError("unknown estimator variant: " + v);
    e.beta_min = j.at("beta_min").get<double>();
    e.beta_max = j.at("beta_max").get<double>();
    e.eps = j.value("eps", 0.0);
    e.gamma = j.value("gamma", 0.0);
    e.build_cost = j.value("build_cost", std::uint64_t{0});
    if (j.contains("ppe")) {
        e.ppe.knots = j["ppe"].at("knots").get<std::vector<double>>();
        e.ppe.log_q = j["ppe"].at("log_q").get<std::vector<double>>();
    }
    if (e.variant == RatioVariant::hybrid) {
        e.tpa_points = j.at("tpa_points").get<std::vector<double>>();
        e.k1 = j.at("k1").get<std::uint64_t>();
        e.k2 = j.value("k2", std::uint64_t{0});
        e.beta_mid = j.at("beta_mid").get<double>();
    }
    if (e.variant == RatioVariant::integer) {
        e.support = j.at("support").get<std::vector<double>>();
        e.pi_hat = j.at("pi_hat").get<std::vector<double>>();
    }
    return e;
}

}  // namespace gibbs
