#include "gibbs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbs/errors.hpp"

namespace gibbs {

std::uint64_t calibrated_sample_size(double eps, double gamma, double p0,
                                     const ConstantsProfile& profile)
{
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("calibration: eps must be > 0");
    if (!(gamma > 0.0 && gamma <= 0.5)) throw DomainError("calibration: gamma must lie in (0, 1/2]");
    if (!(p0 > 0.0 && p0 <= 1.0)) throw DomainError("calibration: p0 must lie in (0, 1]");
    double d = 1.0 - std::exp(-eps);
    double n = profile.calibration_factor * 3.0 * std::exp(eps) * std::log(4.0 / gamma) / (d * d * p0);
    if (!(n < 1e18)) throw DomainError("calibration: sample size overflows");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(n)));
}

EmpiricalDistribution::EmpiricalDistribution(double beta, std::vector<double> support,
                                             std::vector<std::uint64_t> freq,
                                             std::optional<Calibration> calibration)
    : beta_(beta)
    , support_(std::move(support))
    , freq_(std::move(freq))
    , calibration_(calibration)
{
    for (auto f : freq_) draws_ += f;
}

double EmpiricalDistribution::mu_index(std::size_t j) const
{
    return draws_ ? static_cast<double>(freq_.at(j)) / static_cast<double>(draws_) : 0.0;
}

double EmpiricalDistribution::mu(double x) const
{
    auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it == support_.end() || *it != x) return 0.0;
    return mu_index(static_cast<std::size_t>(it - support_.begin()));
}

double EmpiricalDistribution::mu_range(double lo, double hi, bool hi_closed) const
{
    std::uint64_t c = 0;
    for (std::size_t j = 0; j < support_.size(); ++j) {
        double x = support_[j];
        if (x >= lo && (x < hi || (hi_closed && x == hi))) c += freq_[j];
    }
    return draws_ ? static_cast<double>(c) / static_cast<double>(draws_) : 0.0;
}

nlohmann::json EmpiricalDistribution::to_json() const
{
    nlohmann::json freq = nlohmann::json::array();
    for (std::size_t j = 0; j < support_.size(); ++j)
        if (freq_[j]) freq.push_back({support_[j], freq_[j]});
    nlohmann::json j{{"beta", beta_}, {"draws", draws_}, {"freq", freq}};
    if (calibration_)
        j["calibration"] = {{"eps", calibration_->eps},
                            {"gamma", calibration_->gamma},
                            {"p0", calibration_->p0}};
    return j;
}

EmpiricalDistribution sample_empirical(Oracle& oracle, double beta, std::uint64_t n)
{
    if (n == 0) throw DomainError("sample_empirical: N must be >= 1");
    return EmpiricalDistribution(beta, oracle.domain().support, oracle.draw_counts(beta, n));
}

EmpiricalDistribution sample_empirical(Oracle& oracle, double beta, const Calibration& c,
                                       const ConstantsProfile& profile)
{
    std::uint64_t n = calibrated_sample_size(c.eps, c.gamma, c.p0, profile);
    return EmpiricalDistribution(beta, oracle.domain().support, oracle.draw_counts(beta, n), c);
}

bool well_estimates(double p_hat, double p, double eps, double p0)
{
    if (!(std::fabs(p_hat - p) <= eps * (p + p0))) return false;
    if (p >= std::exp(-eps) * p0) return p_hat >= std::exp(-eps) * p && p_hat <= std::exp(eps) * p;
    return p_hat < p0;
}

PiEstimate estimate_pi(double x, double alpha, double nu, double q_hat_alpha,
                       double mu_hat_alpha_x, double beta_min, double eps, double delta)
{
    double eta = q_hat_alpha * std::exp((beta_min - alpha) * x);
    return {eta * mu_hat_alpha_x, 0.5 * eta * eps * (delta * nu + mu_hat_alpha_x)};
}

Source per_draw(std::function<double()> draw)
{
    return [draw = std::move(draw)](std::uint64_t r) {
        double s = 0.0;
        for (std::uint64_t d = 0; d < r; ++d) {
            double v = draw();
            if (!(v >= 0.0)) throw DomainError("estimate_products: negative sample");
            s += v;
        }
        return s;
    };
}

Source indicator_source(Oracle& oracle, double beta, std::size_t index)
{
    return [&oracle, beta, index](std::uint64_t r) {
        return static_cast<double>(oracle.draw_counts(beta, r)[index]);
    };
}

Source tilt_source(Oracle& oracle, double beta, double c)
{
    return [&oracle, beta, c](std::uint64_t r) {
        auto h = oracle.draw_counts(beta, r);
        const auto& x = oracle.domain().support;
        double s = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j)
            if (h[j]) s += static_cast<double>(h[j]) * std::exp(c * x[j]);
        return s;
    };
}

std::uint64_t product_draws_per_index(double alpha, double eps, const ConstantsProfile& profile)
{
    if (!(alpha > 0.0) || !(eps > 0.0)) throw DomainError("estimate_products: need alpha, eps > 0");
    double r = std::ceil(profile.product_r * alpha / (eps * eps));
    if (!(r < 1e15)) throw DomainError("estimate_products: r overflows");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(r));
}

std::uint64_t median_trial_count(double gamma, const ConstantsProfile& profile)
{
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("estimate_products: gamma must lie in (0,1)");
    auto k = static_cast<std::uint64_t>(std::ceil(profile.median_trials * std::log(1.0 / gamma)));
    if (k < 1) k = 1;
    if (k % 2 == 0) ++k;
    return k;
}

ProductEstimates estimate_products(const std::vector<Source>& sources, double alpha, double eps,
                                   double gamma, const ConstantsProfile& profile)
{
    ProductEstimates out;
    out.alpha = alpha;
    out.eps = eps;
    out.gamma = gamma;
    out.r = product_draws_per_index(alpha, eps, profile);
    out.k_trials = median_trial_count(gamma, profile);
    const std::size_t n = sources.size();
    const std::size_t k = out.k_trials;

    std::vector<double> means(k * n);
    bool log_mode = false;
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = sources[i](out.r);
            if (!(s >= 0.0)) throw DomainError("estimate_products: negative sample");
            double m = s / static_cast<double>(out.r);
            if (m > 1e100 || (m > 0.0 && m < 1e-100)) log_mode = true;
            means[t * n + i] = m;
        }
    }
    out.samples = static_cast<std::uint64_t>(k) * n * out.r;
    out.log_domain = log_mode;

    out.values.assign(n + 1, 1.0);
    out.log_values.assign(n + 1, 0.0);
    std::vector<double> prod(k * (n + 1));
    for (std::size_t t = 0; t < k; ++t) {
        double acc = log_mode ? 0.0 : 1.0;
        prod[t * (n + 1)] = acc;
        for (std::size_t i = 0; i < n; ++i) {
            double m = means[t * n + i];
            if (log_mode)
                acc += std::log(m);
            else
                acc *= m;
            prod[t * (n + 1) + i + 1] = acc;
        }
    }
    std::vector<double> column(k);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t t = 0; t < k; ++t) column[t] = prod[t * (n + 1) + i];
        auto mid = column.begin() + static_cast<std::ptrdiff_t>(k / 2);
        std::nth_element(column.begin(), mid, column.end());
        if (log_mode) {
            out.log_values[i] = *mid;
            out.values[i] = std::exp(*mid);
        } else {
            out.values[i] = *mid;
            out.log_values[i] = std::log(*mid);
        }
    }
    return out;
}

}  // namespace gibbs
