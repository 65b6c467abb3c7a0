#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "gibbs/binary_search.hpp"
#include "gibbs/errors.hpp"

using namespace gibbs;

namespace {

int search_deterministic(const std::vector<double>& means, double alpha, double nu,
                         std::uint64_t seed)
{
    Rng g(seed, "coins");
    CoinFamily coin = [&](std::size_t i) { return g.uniform() < means[i]; };
    return noisy_binary_search(coin, static_cast<long long>(means.size()) - 1, alpha, nu,
                               desk_profile());
}

}  // namespace

TEST_CASE("noisy binary search on a linear family")
{
    std::vector<double> m(11);
    for (int i = 0; i <= 10; ++i) m[i] = i / 10.0;
    int ok = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        int v = search_deterministic(m, 0.45, 0.1, s);
        ok += v >= 3 && v <= 5;
    }
    CHECK(ok >= 300);
}

TEST_CASE("noisy binary search boundary conventions")
{
    int all0 = 0, all1 = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        all0 += search_deterministic(std::vector<double>(8, 0.0), 0.5, 0.1, s) == 7;
        all1 += search_deterministic(std::vector<double>(8, 1.0), 0.5, 0.1, s) == -1;
    }
    CHECK(all0 >= 300);
    CHECK(all1 >= 300);
    CoinFamily c = [](std::size_t) { return true; };
    CHECK_THROWS_AS(noisy_binary_search(c, -2, 0.5, 0.1, desk_profile()), DomainError);
}

TEST_CASE("lambda witness")
{
    auto a = fx::instance_a();
    auto w = lambda_witness(a, 0.0, 0.0, 1.0, 1.0, 0.25);
    CHECK(w.mass_below == doctest::Approx(0.25));
    CHECK(w.mass_above == doctest::Approx(0.75));
    CHECK(w.member());
    auto c = lambda_witness(a, 0.5, 0.0, 1.0, 5.0, 0.25);
    CHECK_FALSE(c.right_ok);
}

TEST_CASE("quantized search")
{
    auto a = fx::instance_a();
    fx::Run r(a, 3);
    CHECK(quantized_search(r.ctx, 0.4, 0.4, 1.0, 0.3) == 0.4);

    // chi = 0: the lower side is empty and mu_beta([0, n]) = 1 everywhere
    double b = quantized_search(r.ctx, 0.0, 1.0, 0.0, 0.3);
    CHECK(lambda_witness(a, b, 0.0, 1.0, 0.0, 0.3).right_ok);

    int ok = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        fx::Run q(a, 100 + s);
        ok += lambda_witness(a, quantized_search(q.ctx, 0.0, 1.0, 1.0, 0.3), 0.0, 1.0, 1.0, 0.3)
                  .member();
    }
    CHECK(ok >= 280);
}

TEST_CASE("quantized grid size is positive on (0, 1/2)")
{
    for (double t : {0.05, 0.2, 0.3, 0.375, 0.45}) CHECK(quantized_grid_size(4.0, 0.0, 3.0, t) >= 1);
}

TEST_CASE("binary search clamps when chi is outside the support")
{
    auto a = GibbsInstance::from_counts(std::vector<double>{1.0, 2.0}, {1.0, 1.0}, -1.0, 2.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
        fx::Run r(a, s);
        CHECK(binary_search(r.ctx, -1.0, 2.0, 0.5, 0.2, 0.25) == -1.0);
        CHECK(binary_search(r.ctx, -1.0, 2.0, 3.0, 0.2, 0.25) == 2.0);
    }
}

TEST_CASE("binary search on instance A")
{
    auto a = fx::instance_a();
    int ok = 0;
    for (std::uint64_t s = 0; s < 400; ++s) {
        fx::Run r(a, 500 + s);
        double b = binary_search(r.ctx, 0.0, 1.0, 1.0, 0.2, 0.25);
        auto w = lambda_witness(a, b, 0.0, 1.0, 1.0, 0.25);
        ok += w.member();
        if (w.member()) CHECK(mu_at(a, b, 1) >= 0.25 * delta_max(a, 1.0) - 1e-12);
    }
    CHECK(ok >= 320);
}

TEST_CASE("binary search argument checks")
{
    fx::Run r(fx::instance_a(), 1);
    CHECK_THROWS_AS(binary_search(r.ctx, 0.8, 0.2, 1.0, 0.2, 0.25), DomainError);
    CHECK_THROWS_AS(binary_search(r.ctx, -1.0, 0.5, 1.0, 0.2, 0.25), DomainError);
    CHECK(binary_search(r.ctx, 0.3, 0.3, 1.0, 0.2, 0.25) == 0.3);
}

TEST_CASE("back-off windows only query above beta_right - 2^(2^i)")
{
    auto a = GibbsInstance::from_counts({1.0, 1.0, 1.0, 1.0, 1.0}, -40.0, 40.0);
    fx::Recording rec(std::make_unique<ExactOracle>(a, 8));
    Rng coins(8);
    Context ctx{rec, coins, desk_profile()};
    SearchStats st;
    binary_search(ctx, -40.0, 40.0, 2.5, 0.1, 0.25, &st);
    REQUIRE(!rec.betas.empty());
    double lowest = *std::min_element(rec.betas.begin(), rec.betas.end());
    CHECK(lowest >= st.window_left.back());
    REQUIRE(st.iterations == static_cast<int>(st.window_left.size()));
    for (int k = 0; k < st.iterations; ++k) {
        int i = st.i0 + k;
        double width = i >= 10 ? INFINITY : std::ldexp(1.0, 1 << i);
        CHECK(st.window_left[k] >= std::max(-40.0, 40.0 - width));
    }
}
