#include "gibbs/binary_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbs/errors.hpp"
#include "gibbs/sampling.hpp"

namespace gibbs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

nlohmann::json LambdaWitness::to_json() const
{
    return {{"beta", beta},
            {"chi", chi},
            {"tau", tau},
            {"beta_left", beta_left},
            {"beta_right", beta_right},
            {"mass_below", mass_below},
            {"mass_above", mass_above},
            {"left_ok", left_ok},
            {"right_ok", right_ok}};
}

LambdaWitness lambda_witness(const GibbsInstance& inst, double beta, double beta_left,
                             double beta_right, double chi, double tau)
{
    LambdaWitness w;
    w.beta = beta;
    w.chi = chi;
    w.tau = tau;
    w.beta_left = beta_left;
    w.beta_right = beta_right;
    w.mass_below = mu_range(inst, beta, -kInf, chi, false);
    w.mass_above = mu_range(inst, beta, chi, kInf, true);
    w.left_ok = beta == beta_left || w.mass_below >= tau;
    w.right_ok = beta == beta_right || w.mass_above >= tau;
    return w;
}

int noisy_binary_search(const CoinFamily& coin, long long n_coins_minus_one, double alpha,
                        double nu, const ConstantsProfile& profile)
{
    if (n_coins_minus_one < 0) throw DomainError("noisy_binary_search: N must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0) || !(nu > 0.0 && nu < 1.0))
        throw DomainError("noisy_binary_search: alpha, nu must lie in (0,1)");
    const auto N = static_cast<std::size_t>(n_coins_minus_one);
    const std::size_t gaps = N + 2;  // gap g stored at g + 1
    auto clampp = [](double p) { return std::clamp(p, 1e-6, 1.0 - 1e-6); };
    // Posterior over gaps, updated multiplicatively by the coin likelihoods
    // and renormalized each step.
    const double hi1 = clampp(alpha + nu), hi0 = clampp(1.0 - alpha - nu);
    const double lo1 = clampp(alpha - nu), lo0 = clampp(1.0 - alpha + nu);
    const auto budget = static_cast<std::uint64_t>(
        std::ceil(profile.search_budget * std::log(static_cast<double>(N) + 2.0) / (nu * nu)));

    std::vector<double> w(gaps, 1.0 / static_cast<double>(gaps));
    for (std::uint64_t step = 0; step < budget; ++step) {
        if (*std::max_element(w.begin(), w.end()) >= profile.search_halt_mass) break;
        // Coin i splits the gaps into {g < i} and {g >= i}; stored gap index
        // of g < i is < i + 1.
        std::size_t best = 0;
        double best_gap = kInf, below = 0.0;
        for (std::size_t i = 0; i <= N; ++i) {
            below += w[i];
            double d = std::fabs(below - 0.5);
            if (d < best_gap) {
                best_gap = d;
                best = i;
            }
        }
        bool b = coin(best);
        const double left = b ? hi1 : hi0, right = b ? lo1 : lo0;
        double s = 0.0;
        for (std::size_t g = 0; g < gaps; ++g) {
            w[g] *= g < best + 1 ? left : right;
            s += w[g];
        }
        for (auto& v : w) v /= s;
    }
    auto mode = static_cast<int>(std::max_element(w.begin(), w.end()) - w.begin());
    return mode - 1;
}

std::uint64_t quantized_grid_size(double n, double beta_left, double beta_right, double tau_prime)
{
    double t = tau_prime;
    double step = std::log((1.0 - t) * (1.0 + 2.0 * t) / (t * (3.0 - 2.0 * t)));
    double raw = std::ceil(n * (beta_right - beta_left) / (2.0 * step));
    if (!(raw < 1e8)) throw DomainError("quantized_search: grid too large");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(raw));
}

double quantized_search(Context& ctx, double beta_left, double beta_right, double chi,
                        double tau_prime)
{
    const Domain& dom = ctx.domain();
    if (!(beta_left <= beta_right) || beta_left < dom.beta_min || beta_right > dom.beta_max)
        throw DomainError("quantized_search: invalid interval");
    if (!(tau_prime > 0.0 && tau_prime < 0.5))
        throw DomainError("quantized_search: tau' must lie in (0, 1/2)");
    if (beta_left == beta_right) return beta_left;
    const std::uint64_t N = quantized_grid_size(dom.n, beta_left, beta_right, tau_prime);
    const double Nd = static_cast<double>(N);
    auto u = [&](std::size_t i) {
        if (i == N) return beta_right;
        double f = static_cast<double>(i) / Nd;
        return (1.0 - f) * beta_left + f * beta_right;
    };
    CoinFamily coin = [&](std::size_t i) { return ctx.oracle.draw(u(i)) >= chi; };
    int v = noisy_binary_search(coin, static_cast<long long>(N), 0.5, (0.5 - tau_prime) / 2.0,
                                ctx.profile);
    if (v < 0) return beta_left;
    if (static_cast<std::uint64_t>(v) >= N) return beta_right;
    auto vi = static_cast<std::size_t>(v);
    return 0.5 * (u(vi) + u(vi + 1));
}

double binary_search(Context& ctx, double beta_left, double beta_right, double chi, double gamma,
                     double tau, SearchStats* stats)
{
    const Domain& dom = ctx.domain();
    if (!(beta_left <= beta_right) || beta_left < dom.beta_min || beta_right > dom.beta_max)
        throw DomainError("binary_search: invalid interval");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("binary_search: gamma must lie in (0,1)");
    if (!(tau > 0.0 && tau < 0.5)) throw DomainError("binary_search: tau must lie in (0, 1/2)");
    if (beta_left == beta_right) return beta_left;

    const double ratio = std::max(dom.n / gamma, 2.0);
    const int i0 = std::max(0, static_cast<int>(std::ceil(std::log2(std::log2(ratio)))));
    const double tau_p = (0.5 + tau) / 2.0;
    const double thr = std::sqrt(tau * tau_p);
    const double eps = 0.5 * std::log(tau_p / tau);
    if (stats) stats->i0 = i0;

    constexpr int kMaxIterations = 200;
    for (int i = i0; i < i0 + kMaxIterations; ++i) {
        // 2^(2^i) overflows a double past i = 9; by then it spans any range.
        double width = i >= 10 ? kInf : std::ldexp(1.0, 1 << i);
        double bl = beta_right - width <= beta_left ? beta_left : beta_right - width;
        if (stats) {
            ++stats->iterations;
            stats->window_left.push_back(bl);
        }
        double beta = quantized_search(ctx, bl, beta_right, chi, tau_p);
        double g = std::ldexp(gamma, -(i - i0 + 2));
        auto emp = sample_empirical(ctx.oracle, beta, Calibration{eps, g, tau}, ctx.profile);
        double below = emp.mu_range(-kInf, chi, false);
        double above = emp.mu_range(chi, kInf, true);
        if ((beta == beta_left || below >= thr) && (beta == beta_right || above >= thr)) return beta;
    }
    throw GiveUpError("binary_search: no verified point after iteration cap");
}

}  // namespace gibbs
