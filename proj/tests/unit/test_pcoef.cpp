#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/pcoef.hpp"

using namespace gibbs;

TEST_CASE("pcoef_continuous zero counts give zero estimates")
{
    auto inst = GibbsInstance::from_counts({1.0, 0.0, 2.0, 1.0}, 0.0, 1.0);
    for (std::uint64_t s = 0; s < 5; ++s) {
        fx::Run r(inst, s);
        auto t = pcoef_continuous(r.ctx, 0.1, 0.3, 0.25);
        CHECK(t.find(1.0)->pi_hat == 0.0);
    }
}

TEST_CASE("pcoef_continuous on a single energy")
{
    fx::Run r(fx::point_mass(1.5, 0.0, 2.0), 3);
    PcoefTrace tr;
    auto t = pcoef_continuous(r.ctx, 0.1, 0.3, 0.25, &tr);
    CHECK(tr.steps.size() == 1);
    CHECK(t.find(1.5)->pi_hat == 1.0);
}

TEST_CASE("pcoef_continuous trace invariants and cost accounting")
{
    auto a = fx::instance_a();
    fx::Run r(a, 9);
    PcoefTrace tr;
    auto t = pcoef_continuous(r.ctx, 0.1, 0.3, 0.25, &tr);
    CHECK(t.cost == r.oracle.cost());
    CHECK(tr.total_cost == t.cost);
    REQUIRE(!tr.steps.empty());
    CHECK(tr.steps.back().alpha == a.beta_min());
    for (std::size_t i = 1; i < tr.steps.size(); ++i) {
        CHECK(tr.steps[i].alpha <= tr.steps[i - 1].alpha);
        CHECK(tr.steps[i].x < tr.steps[i - 1].x);
    }
    for (const auto& row : t.rows) {
        CHECK(row.pi_hat >= 0.0);
        CHECK(row.u >= 0.0);
    }
}

TEST_CASE("pcoef_continuous meets the count contract on instance A")
{
    auto a = fx::instance_a();
    int ok = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        fx::Run r(a, 4000 + s);
        ok += fx::pcount_holds(a, pcoef_continuous(r.ctx, 0.1, 0.3, 0.25), 0.1, 0.3);
    }
    CHECK(ok >= 15);
}

TEST_CASE("pcoef_continuous on a non-integer support")
{
    auto inst = GibbsInstance::from_counts(std::vector<double>{0.0, 1.25, 2.5, 3.0},
                                           {1.0, 3.0, 2.0, 0.5}, -0.5, 0.5);
    int ok = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        fx::Run r(inst, 50 + s);
        ok += fx::pcount_holds(inst, pcoef_continuous(r.ctx, 0.1, 0.3, 0.25), 0.1, 0.3);
    }
    CHECK(ok >= 7);
}

TEST_CASE("pcoef_continuous argument checks")
{
    fx::Run r(fx::instance_a(), 1);
    CHECK_THROWS_AS(pcoef_continuous(r.ctx, 0.0, 0.3, 0.25), DomainError);
    CHECK_THROWS_AS(pcoef_continuous(r.ctx, 0.1, 1.0, 0.25), DomainError);
    CHECK(pcoef_samples(1, 0.1, 0.3, 0.25, paper_profile()) >
          pcoef_samples(1, 0.1, 0.3, 0.25, desk_profile()));
}

TEST_CASE("PiTable JSON and CSV")
{
    PiTable t;
    t.rows = {{0.0, 0.25, 0.01}, {1.0, 0.5, 0.02}};
    t.delta = 0.1;
    t.method = "x";
    auto b = PiTable::from_json(t.to_json());
    CHECK(b.rows.size() == 2);
    CHECK(b.rows[1].pi_hat == 0.5);
    CHECK(b.find(1.0)->u == 0.02);
    CHECK(b.find(0.5) == nullptr);
    CHECK(t.to_csv().rfind("x,pi_hat,u\n", 0) == 0);
}
