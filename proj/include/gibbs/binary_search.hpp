#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "gibbs/context.hpp"
#include "gibbs/instance.hpp"

namespace gibbs {

// Membership of beta in Lambda_tau(beta_left, beta_right, chi), by exact mu.
struct LambdaWitness {
    double beta = 0.0;
    double chi = 0.0;
    double tau = 0.0;
    double beta_left = 0.0;
    double beta_right = 0.0;
    double mass_below = 0.0;  // mu_beta([0, chi))
    double mass_above = 0.0;  // mu_beta([chi, n])
    bool left_ok = false;
    bool right_ok = false;

    bool member() const { return left_ok && right_ok; }
    nlohmann::json to_json() const;
};

LambdaWitness lambda_witness(const GibbsInstance& inst, double beta, double beta_left,
                             double beta_right, double chi, double tau);

// coin(i) draws one Bernoulli from the i-th coin, i in 0..N.
using CoinFamily = std::function<bool(std::size_t)>;

// Noisy binary search over coins with nondecreasing means. Returns a gap
// index v in -1..N (gap v = [x_v, x_{v+1}], x_{-1} = 0, x_{N+1} = 1).
int noisy_binary_search(const CoinFamily& coin, long long n_coins_minus_one, double alpha,
                        double nu, const ConstantsProfile& profile);

// Grid size for the quantized search on [bl, br] with energy scale n.
std::uint64_t quantized_grid_size(double n, double beta_left, double beta_right, double tau_prime);

// One pass of noisy search on a beta grid over [bl, br]; beta in
// Lambda_tau' with probability >= 3/4 when the crossing point is inside.
double quantized_search(Context& ctx, double beta_left, double beta_right, double chi,
                        double tau_prime);

struct SearchStats {
    int iterations = 0;
    int i0 = 0;
    std::vector<double> window_left;  // beta'_left per iteration
};

// Exponential back-off search; returns beta in Lambda_tau with prob >= 1 - gamma.
double binary_search(Context& ctx, double beta_left, double beta_right, double chi, double gamma,
                     double tau, SearchStats* stats = nullptr);

}  // namespace gibbs
