#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "gibbs/context.hpp"
#include "gibbs/instance.hpp"
#include "gibbs/oracle.hpp"
#include "gibbs/profile.hpp"
#include "gibbs/rng.hpp"

namespace fx {

// counts (1,2,1) on {0,1,2}, beta in [0,1]
inline gibbs::GibbsInstance instance_a()
{
    return gibbs::GibbsInstance::from_counts({1.0, 2.0, 1.0}, 0.0, 1.0);
}

inline gibbs::GibbsInstance point_mass(double x = 0.0, double bmin = 0.0, double bmax = 1.0)
{
    return gibbs::GibbsInstance::from_counts(std::vector<double>{x}, {1.0}, bmin, bmax);
}

// Oracle, coin stream and context bundled for one seeded run.
struct Run {
    gibbs::ExactOracle oracle;
    gibbs::Rng rng;
    gibbs::Context ctx;

    Run(const gibbs::GibbsInstance& inst, std::uint64_t seed,
        const gibbs::ConstantsProfile& p = gibbs::desk_profile())
        : oracle(inst, seed), rng(seed, "coins"), ctx{oracle, rng, p}
    {
    }
};

// Random integer instance on 0..n with some zero counts, log-domain counts
// spread over several orders of magnitude.
inline gibbs::GibbsInstance random_integer_instance(gibbs::Rng& g, int n, bool allow_zero = true)
{
    std::vector<double> lc(static_cast<std::size_t>(n) + 1);
    bool any = false;
    for (auto& v : lc) {
        if (allow_zero && g.uniform() < 0.2) {
            v = -INFINITY;
        } else {
            v = 6.0 * (g.uniform() - 0.5);
            any = true;
        }
    }
    if (!any) lc[0] = 0.0;
    double a = 3.0 * (g.uniform() - 0.5);
    double b = a + 2.0 * g.uniform();
    std::vector<double> sup(lc.size());
    for (std::size_t i = 0; i < sup.size(); ++i) sup[i] = static_cast<double>(i);
    return gibbs::GibbsInstance::from_log_counts(sup, lc, a, b);
}

// Random continuous instance: 0 plus energies in [1, n].
inline gibbs::GibbsInstance random_continuous_instance(gibbs::Rng& g, int points, double n)
{
    std::vector<double> sup{0.0};
    double x = 1.0;
    for (int i = 1; i < points; ++i) {
        sup.push_back(x);
        x += (n - 1.0) / (points - 1) * (0.5 + g.uniform());
        if (x > n) break;
    }
    std::vector<double> lc(sup.size());
    for (auto& v : lc) v = 4.0 * (g.uniform() - 0.5);
    double a = 2.0 * (g.uniform() - 0.5);
    return gibbs::GibbsInstance::from_log_counts(sup, lc, a, a + 2.0 * g.uniform());
}

// P_count contract: |pi_hat - pi| <= u <= eps pi (1 + delta/Delta) for c > 0,
// pi_hat = 0 for c = 0.
template <class Table>
bool pcount_holds(const gibbs::GibbsInstance& inst, const Table& table, double delta, double eps)
{
    auto pi = gibbs::induced_mu(inst, inst.beta_min());
    for (std::size_t j = 0; j < inst.size(); ++j) {
        const auto* r = table.find(inst.support()[j]);
        if (!r) return false;
        if (inst.count(j) == 0.0) {
            if (r->pi_hat != 0.0) return false;
            continue;
        }
        double d = gibbs::delta_max(inst, inst.support()[j]);
        if (std::abs(r->pi_hat - pi[j]) > r->u) return false;
        if (r->u > eps * pi[j] * (1.0 + delta / d)) return false;
    }
    return true;
}

// Delegating oracle that records every queried beta.
class Recording : public gibbs::Oracle {
public:
    explicit Recording(std::unique_ptr<gibbs::Oracle> inner)
        : Oracle(inner->domain(), "recording"), inner_(std::move(inner))
    {
    }

    std::vector<double> betas;

    std::unique_ptr<gibbs::Oracle> fork(std::string_view label) const override
    {
        return inner_->fork(label);
    }

protected:
    std::size_t sample_index(double beta) override
    {
        betas.push_back(beta);
        return inner_->draw_index(beta);
    }
    void sample_counts(double beta, std::uint64_t n, std::vector<std::uint64_t>& out) override
    {
        betas.push_back(beta);
        auto h = inner_->draw_counts(beta, n);
        for (std::size_t j = 0; j < h.size(); ++j) out[j] += h[j];
    }

private:
    std::unique_ptr<gibbs::Oracle> inner_;
};

}  // namespace fx
