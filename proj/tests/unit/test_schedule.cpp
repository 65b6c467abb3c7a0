#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/families.hpp"
#include "gibbs/schedule.hpp"

using namespace gibbs;

namespace {

long span_sum(const std::vector<Segment>& s, long n)
{
    long t = 0;
    for (const auto& g : s) t += span(g.lo, g.hi, n);
    return t;
}

bool interleaved(const std::vector<Segment>& s)
{
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (!(s[i].beta < s[i + 1].beta)) return false;
        if (!(s[i].lo < s[i + 1].lo && s[i + 1].lo <= s[i].hi && s[i].hi < s[i + 1].hi))
            return false;
    }
    return true;
}

// Every pair of segments at one temperature shares an endpoint, not just
// neighbours. Interleaving after minimalization needs this: with three
// segments at one beta the middle one can be pinned by the neighbour rule.
bool shared_endpoint_per_beta(const std::vector<Segment>& s)
{
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size() && s[j].beta == s[i].beta; ++j)
            if (s[i].lo != s[j].lo && s[i].hi != s[j].hi) return false;
    return true;
}

bool single_removal_stuck(const PreSchedule& m, double bmin, double bmax, long n)
{
    for (std::size_t i = 0; i < m.size(); ++i) {
        PreSchedule t = m;
        t.erase(t.begin() + static_cast<std::ptrdiff_t>(i));
        if (!t.empty() && !pre_schedule_violation(t, bmin, bmax, n, true)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("inv_weight")
{
    CHECK(inv_weight({{0.0, kMinusInf, kPlusInf, 0.5}}) == 2.0);
    CHECK(inv_weight({{0.0, kMinusInf, 1, 0.25}, {1.0, 1, kPlusInf, 0.5}}) == 6.0);
}

TEST_CASE("span counts H inside the interval")
{
    CHECK(span(kMinusInf, kPlusInf, 4) == 5);
    CHECK(span(1, 3, 4) == 3);
    CHECK(span(kMinusInf, 0, 4) == 1);
    CHECK(span(2, kPlusInf, 4) == 3);
}

TEST_CASE("choose_interval arg-max rule")
{
    std::vector<double> mu(5, 0.2);
    auto s = choose_interval(mu, 0.3, {0, 2}, {3, 4}, 4, 0.9, 0.1);
    CHECK(s.lo == 0);
    // scores (a- - i + 1) Phi(i): 3 sqrt(.9) .2, 2 .9^1.5 .2, .9^1.5 .2
    CHECK(3.0 * std::sqrt(0.9) * 0.2 == doctest::Approx(0.5692).epsilon(1e-4));
    CHECK(2.0 * std::pow(0.9, 1.5) * 0.2 == doctest::Approx(0.3415).epsilon(1e-4));
    CHECK(std::pow(0.9, 1.5) * 0.2 == doctest::Approx(0.1708).epsilon(1e-3));
    CHECK(s.w == doctest::Approx(0.1 / 5.0));

    auto f = choose_interval(mu, 0.0, {kMinusInf, kMinusInf}, {0, 4}, 4, 0.9, 0.1);
    CHECK(f.lo == kMinusInf);

    std::vector<double> tie{0.1, 0.2, 0.0};
    auto t = choose_interval(tie, 0.0, {0, 1}, {kPlusInf, kPlusInf}, 2, 1.0, 0.1);
    CHECK(t.lo == 0);

    CHECK_THROWS_AS(choose_interval(mu, 0.0, {2, 1}, {3, 4}, 4, 0.9, 0.1), DomainError);
}

TEST_CASE("pre-schedule validator")
{
    PreSchedule ok{{0.0, kMinusInf, 2, 0.5}, {1.0, 1, kPlusInf, 0.5}};
    CHECK_FALSE(pre_schedule_violation(ok, 0.0, 1.0, 3, true));
    PreSchedule gap{{0.0, kMinusInf, 1, 0.5}, {1.0, 2, kPlusInf, 0.5}};
    CHECK(pre_schedule_violation(gap, 0.0, 1.0, 3, true));
    CHECK_FALSE(pre_schedule_violation(gap, 0.0, 1.0, 3, false));
    PreSchedule i4{{0.0, kMinusInf, 2, 0.5}, {0.5, 1, kPlusInf, 0.5}, {1.0, 2, kPlusInf, 0.5}};
    CHECK(pre_schedule_violation(i4, 0.0, 1.0, 3, true));
}

TEST_CASE("minimalize")
{
    PreSchedule m{{0.0, kMinusInf, 2, 0.5}, {1.0, 1, kPlusInf, 0.5}};
    CHECK(minimalize(m, 0.0, 1.0, 3) == m);

    PreSchedule dup{{0.0, kMinusInf, 2, 0.5}, {0.0, kMinusInf, 2, 0.5}, {1.0, 1, kPlusInf, 0.5}};
    CHECK(minimalize(dup, 0.0, 1.0, 3) == m);

    PreSchedule nested{{0.0, kMinusInf, 1, 0.5},
                       {0.4, 1, 2, 0.5},
                       {0.6, 1, 3, 0.5},
                       {1.0, 3, kPlusInf, 0.5}};
    auto r = minimalize(nested, 0.0, 1.0, 4);
    CHECK(r.size() == 3);
    CHECK(r[1].beta == 0.6);
    CHECK(interleaved(r));

    PreSchedule bad{{0.5, kMinusInf, kPlusInf, 0.5}};
    CHECK_THROWS_AS(minimalize(bad, 0.0, 1.0, 3), DomainError);
}

TEST_CASE("three segments at one beta can be minimal without interleaving")
{
    // Dropping the middle segment breaks the neighbour rule and dropping the
    // others uncovers 1/2 or a sentinel, so nothing can go.
    PreSchedule p{{0.0, kMinusInf, 0, 0.5}, {1.0, 0, 1, 0.5}, {1.0, 1, 1, 0.5}, {1.0, 1, kPlusInf, 0.5}};
    REQUIRE_FALSE(pre_schedule_violation(p, 0.0, 1.0, 1, true));
    auto m = minimalize(p, 0.0, 1.0, 1);
    CHECK(m == p);
    CHECK(single_removal_stuck(m, 0.0, 1.0, 1));
    CHECK_FALSE(interleaved(m));
    CHECK_FALSE(shared_endpoint_per_beta(p));
}

TEST_CASE("minimalize yields interleaved schedules on random pre-schedules")
{
    Rng g(2024, "pre");
    int made = 0, tries = 0;
    while (made < 1000 && tries < 2000000) {
        ++tries;
        long n = 1 + static_cast<long>(g.below(6));
        std::size_t len = 2 + g.below(6);
        std::vector<double> b(len);
        std::vector<long> lo(len), hi(len);
        for (std::size_t i = 0; i < len; ++i) {
            b[i] = static_cast<double>(g.below(4)) / 3.0;
            lo[i] = static_cast<long>(g.below(static_cast<std::uint64_t>(n + 1)));
            hi[i] = static_cast<long>(g.below(static_cast<std::uint64_t>(n + 1)));
        }
        std::sort(b.begin(), b.end());
        std::sort(lo.begin(), lo.end());
        std::sort(hi.begin(), hi.end());
        b.front() = 0.0;
        b.back() = 1.0;
        PreSchedule p;
        for (std::size_t i = 0; i < len; ++i) p.push_back({b[i], lo[i], hi[i], 0.5});
        for (auto& s : p) {
            if (s.beta == 0.0 && g.below(2)) s.lo = kMinusInf;
            if (s.beta == 1.0 && g.below(2)) s.hi = kPlusInf;
        }
        p.front().lo = kMinusInf;
        p.back().hi = kPlusInf;
        if (pre_schedule_violation(p, 0.0, 1.0, n, true)) continue;
        if (!shared_endpoint_per_beta(p)) continue;
        ++made;
        auto m = minimalize(p, 0.0, 1.0, n);
        CHECK_FALSE(pre_schedule_violation(m, 0.0, 1.0, n, true));
        CHECK(single_removal_stuck(m, 0.0, 1.0, n));
        CHECK(interleaved(m));
        CHECK(span_sum(m, n) <= 2 * (n + 1));
    }
    CHECK(made == 1000);
}

TEST_CASE("pre-schedule on an n = 1 instance")
{
    auto inst = GibbsInstance::from_counts({1.0, 2.0}, -1.0, 1.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
        fx::Run r(inst, s);
        auto p = build_pre_schedule(r.ctx);
        CHECK_FALSE(pre_schedule_violation(p, -1.0, 1.0, 1, true));
        CHECK(interleaved(p));
        CHECK(p.size() <= 3);
    }
}

TEST_CASE("pre-schedules on instance A")
{
    auto a = fx::instance_a();
    int proper = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        fx::Run r(a, 60 + s);
        auto p = build_pre_schedule(r.ctx);
        CHECK_FALSE(pre_schedule_violation(p, 0.0, 1.0, 2, true));
        CHECK(interleaved(p));
        CHECK(span_sum(p, 2) <= 6);
        proper += schedule_proper(a, p);
    }
    CHECK(proper >= 50);
}

TEST_CASE("uncross with a single segment")
{
    fx::Run r(fx::instance_a(), 2);
    PreSchedule p{{0.0, kMinusInf, kPlusInf, 0.3}};
    // beta_min = beta_max is the only way to get t = 0; the range is ignored here
    auto s = uncross_schedule(r.ctx, p, 0.2);
    REQUIRE(s);
    CHECK(s->size() == 1);
    CHECK((*s)[0].w == doctest::Approx(std::exp(-desk_profile().schedule_nu) * 0.3));
    CHECK(r.oracle.cost() == 0);
}

TEST_CASE("uncross scales inv_weight by e^nu")
{
    auto a = fx::instance_a();
    int done = 0;
    for (std::uint64_t s = 0; s < 30 && done < 10; ++s) {
        fx::Run r(a, 70 + s);
        auto p = build_pre_schedule(r.ctx);
        auto u = uncross_schedule(r.ctx, p, 0.2);
        if (!u) continue;
        ++done;
        CHECK(inv_weight(*u) ==
              doctest::Approx(std::exp(desk_profile().schedule_nu) * inv_weight(p)).epsilon(1e-12));
        CHECK_FALSE(covering_violation(*u, 0.0, 1.0, 2));
    }
    CHECK(done == 10);
}

TEST_CASE("uncross rarely passes an improper pre-schedule")
{
    auto a = fx::instance_a();
    // mu_1(1) = 0.393 < 0.45
    PreSchedule p{{0.0, kMinusInf, 1, 0.4}, {1.0, 1, kPlusInf, 0.45}};
    CHECK_FALSE(schedule_proper(a, p));
    int improper = 0;
    for (std::uint64_t s = 0; s < 500; ++s) {
        fx::Run r(a, 10000 + s);
        auto u = uncross_schedule(r.ctx, p, 0.2);
        if (u && !schedule_proper(a, *u)) ++improper;
    }
    CHECK(improper <= 100);
}

TEST_CASE("covering schedule bounds")
{
    auto one = GibbsInstance::from_counts({1.0, 2.0}, -1.0, 1.0);
    fx::Run r(one, 1);
    auto s = find_covering_schedule(r.ctx, 0.2);
    CHECK_FALSE(covering_violation(s, -1.0, 1.0, 1));
    CHECK(inv_weight(s) <= 6.0 * 2.0 * one.rho());

    auto poly = logconcave_poly_instance(2, 3.0);
    REQUIRE(poly.log_concave());
    for (std::uint64_t k = 0; k < 10; ++k) {
        fx::Run q(poly, 30 + k);
        auto c = find_covering_schedule(q.ctx, 0.2);
        CHECK_FALSE(covering_violation(c, poly.beta_min(), poly.beta_max(), 4));
        CHECK(inv_weight(c) <= 6.0 * 5.0 * std::exp(1.0));
    }
}

TEST_CASE("covering schedules on instance A are mostly proper")
{
    auto a = fx::instance_a();
    int proper = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        fx::Run r(a, 200 + s);
        proper += schedule_proper(a, find_covering_schedule(r.ctx, 0.2));
    }
    CHECK(proper >= 40);
}

TEST_CASE("find_interval segments are extremal under exact mu")
{
    auto inst = logconcave_poly_instance(3, 4.0);
    const long n = 6;
    const double lambda = desk_profile().schedule_lambda;
    int ext = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        fx::Run r(inst, 300 + s);
        double beta = inst.beta_max() * (static_cast<double>(s % 5) + 0.5) / 5.0;
        auto seg = find_interval(r.ctx, beta, {0, 3}, {3, n});
        ext += segment_extremal(inst, seg, lambda);
    }
    CHECK(ext >= 90);
}

TEST_CASE("schedule JSON round trip")
{
    CoveringSchedule s{{0.0, kMinusInf, 1, 0.2}, {0.7, 1, kPlusInf, 0.3}};
    CHECK(schedule_from_json(schedule_to_json(s)) == s);
}
