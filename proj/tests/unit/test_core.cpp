#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/instance.hpp"
#include "gibbs/oracle.hpp"

using namespace gibbs;

TEST_CASE("log_partition on instance A")
{
    auto a = fx::instance_a();
    CHECK(log_partition(a, 0.0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(log_partition(a, 1.0) == doctest::Approx(2.626523).epsilon(1e-6));
    CHECK(log_partition(a, 1.0) == doctest::Approx(2.0 * std::log(1.0 + std::exp(1.0))).epsilon(1e-13));
}

TEST_CASE("log_partition of a constant sum")
{
    auto p = GibbsInstance::from_counts({5.0}, -3.0, 3.0);
    for (double b : {-3.0, 0.0, 2.5}) CHECK(log_partition(p, b) == doctest::Approx(std::log(5.0)));
}

TEST_CASE("all-zero counts are rejected")
{
    CHECK_THROWS_AS(GibbsInstance::from_counts({0.0, 0.0}, 0.0, 1.0), DomainError);
}

TEST_CASE("support outside {0} u [1,n] is rejected")
{
    CHECK_THROWS_AS(GibbsInstance::from_counts(std::vector<double>{0.0, 0.5}, {1.0, 1.0}, 0.0, 1.0),
                    DomainError);
    CHECK_THROWS_AS(GibbsInstance::from_counts(std::vector<double>{1.0, 0.0}, {1.0, 1.0}, 0.0, 1.0),
                    DomainError);
}

TEST_CASE("log_ratio")
{
    auto a = fx::instance_a();
    CHECK(log_ratio(a, 0.0, 1.0) == doctest::Approx(1.240229).epsilon(1e-6));
    CHECK(log_ratio(a, 0.7, 0.7) == 0.0);
    CHECK(log_ratio(a, 1.0, 0.0) == doctest::Approx(-log_ratio(a, 0.0, 1.0)));
}

TEST_CASE("induced_mu")
{
    auto a = fx::instance_a();
    auto m0 = induced_mu(a, 0.0);
    CHECK(m0[0] == doctest::Approx(0.25));
    CHECK(m0[1] == doctest::Approx(0.5));
    CHECK(m0[2] == doctest::Approx(0.25));
    auto m1 = induced_mu(a, 1.0);
    CHECK(m1[0] == doctest::Approx(0.0723).epsilon(1e-3));
    CHECK(m1[1] == doctest::Approx(0.3933).epsilon(1e-3));
    CHECK(m1[2] == doctest::Approx(0.5344).epsilon(1e-3));

    auto z = GibbsInstance::from_counts({1.0, 0.0, 3.0}, -2.0, 2.0);
    for (double b : {-2.0, 0.0, 2.0}) CHECK(induced_mu(z, b)[1] == 0.0);
}

TEST_CASE("mean_energy")
{
    auto a = fx::instance_a();
    CHECK(mean_energy(a, 0.0).mean == doctest::Approx(1.0));
    CHECK(mean_energy(a, 1.0).mean > mean_energy(a, 0.0).mean);
    CHECK(mean_energy(fx::point_mass(), 0.3).mean == 0.0);
    CHECK(mean_energy(a, 0.0).variance == doctest::Approx(0.5));
}

TEST_CASE("delta_max on instance A")
{
    auto a = fx::instance_a();
    auto d0 = delta_argmax(a, 0.0);
    CHECK(d0.value == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(d0.beta == 0.0);
    auto d2 = delta_argmax(a, 2.0);
    CHECK(d2.value == doctest::Approx(0.5344).epsilon(1e-3));
    CHECK(d2.beta == 1.0);
    CHECK(delta_max(a, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(delta_max(a, 1.5), DomainError);
}

TEST_CASE("find_betamax")
{
    CHECK(find_betamax(std::vector<double>{1.0, 2.0, 1.0}, 0.0, 1.240229) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(find_betamax(std::vector<double>{1.0, 2.0, 1.0}, 0.0, 0.0) == 0.0);
    // (2 delta, 1) at delta = 0.1: ln((0.2 + e^b)/1.2) = 5
    double b = find_betamax(std::vector<double>{0.2, 1.0}, 0.0, 5.0);
    CHECK(b == doctest::Approx(std::log(1.2 * std::exp(5.0) - 0.2)).epsilon(1e-9));
    CHECK_THROWS_AS(find_betamax(std::vector<double>{3.0}, 0.0, 1.0), DomainError);
}

TEST_CASE("flags are recomputed from data")
{
    CHECK(fx::instance_a().integer_setting());
    CHECK(fx::instance_a().log_concave());
    CHECK_FALSE(GibbsInstance::from_counts({1.0, 0.0, 1.0}, 0.0, 1.0).log_concave());
    CHECK_FALSE(GibbsInstance::from_counts({1.0, 0.1, 1.0}, 0.0, 1.0).log_concave());
    auto c = GibbsInstance::from_counts(std::vector<double>{0.0, 1.5}, {1.0, 1.0}, 0.0, 1.0);
    CHECK_FALSE(c.integer_setting());
    CHECK(fx::instance_a().rho() == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("instance JSON round trip and canonical text")
{
    auto a = GibbsInstance::from_counts({1.0, 0.0, 2.5}, -0.5, 1.25);
    auto j = instance_to_json(a);
    auto b = instance_from_json(j);
    CHECK(b.support() == a.support());
    CHECK(b.counts() == a.counts());
    CHECK(b.beta_min() == a.beta_min());
    CHECK(canonical_dump(instance_to_json(b)) == canonical_dump(j));

    auto lc = nlohmann::json::parse(
        R"({"support":[0,1],"counts":{"log_counts":[0.0,-2000.0]},"beta_min":0,"beta_max":1})");
    auto c = instance_from_json(lc);
    CHECK(c.log_counts()[1] == -2000.0);
}

TEST_CASE("exact oracle frequencies at beta 0")
{
    ExactOracle o(fx::instance_a(), 1);
    auto h = o.draw_counts(0.0, 100000);
    CHECK(o.cost() == 100000);
    CHECK(std::abs(h[0] / 1e5 - 0.25) <= 0.01);
    CHECK(std::abs(h[1] / 1e5 - 0.5) <= 0.01);
    CHECK(std::abs(h[2] / 1e5 - 0.25) <= 0.01);

    ExactOracle p(fx::point_mass(3.0, 0.0, 1.0), 9);
    for (int i = 0; i < 50; ++i) CHECK(p.draw(0.4) == 3.0);
    CHECK(p.cost() == 50);
    CHECK_THROWS_AS(p.draw_index(NAN), DomainError);
}

TEST_CASE("single draws and batches agree in law")
{
    ExactOracle o(fx::instance_a(), 4);
    std::vector<double> h(3, 0.0);
    for (int i = 0; i < 40000; ++i) h[o.draw_index(1.0)] += 1.0;
    auto mu = induced_mu(fx::instance_a(), 1.0);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(h[j] / 4e4 - mu[j]) < 0.012);
}

TEST_CASE("oracles are reproducible and forks are independent")
{
    ExactOracle a(fx::instance_a(), 77), b(fx::instance_a(), 77);
    for (int i = 0; i < 200; ++i) CHECK(a.draw_index(0.3 * (i % 4)) == b.draw_index(0.3 * (i % 4)));
    auto f = a.fork("child");
    CHECK(f->cost() == 0);
    f->draw_counts(0.0, 10);
    CHECK(a.cost() == 200);
}

TEST_CASE("tv perturbed oracle")
{
    auto inst = std::make_shared<const GibbsInstance>(fx::instance_a());
    TvPerturbedOracle zero(inst, 0.0, TvMode::mass_shift_up, 3);
    auto m = zero.perturbed_mu(0.4);
    auto e = induced_mu(*inst, 0.4);
    for (int j = 0; j < 3; ++j) CHECK(m[j] == doctest::Approx(e[j]).epsilon(1e-15));

    TvPerturbedOracle up(inst, 0.1, TvMode::mass_shift_up, 3);
    auto p = up.perturbed_mu(0.0);
    CHECK(p[0] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.35).epsilon(1e-12));
    auto e0 = induced_mu(*inst, 0.0);
    double tv = 0.0;
    for (int j = 0; j < 3; ++j) tv += std::abs(p[j] - e0[j]);
    CHECK(0.5 * tv == doctest::Approx(0.1).epsilon(1e-12));

    auto h = up.draw_counts(0.0, 100000);
    CHECK(std::abs(h[0] / 1e5 - 0.15) < 0.01);
    CHECK(std::abs(h[2] / 1e5 - 0.35) < 0.01);
    CHECK_FALSE(up.clipped());

    TvPerturbedOracle big(inst, 0.9, TvMode::mass_shift_down, 3);
    big.draw_index(0.0);
    CHECK(big.clipped());
}

TEST_CASE("tv perturbation reaches the requested distance for every mode")
{
    auto inst = fx::instance_a();
    for (TvMode mode : {TvMode::mass_shift_up, TvMode::mass_shift_down, TvMode::random_pair}) {
        bool clipped = false;
        auto p = tv_perturbed_mu(inst, 0.5, 0.05, mode, 0, 2, &clipped);
        auto e = induced_mu(inst, 0.5);
        double tv = 0.0;
        for (int j = 0; j < 3; ++j) tv += std::abs(p[j] - e[j]);
        CHECK_FALSE(clipped);
        CHECK(0.5 * tv == doctest::Approx(0.05).epsilon(1e-12));
    }
}
