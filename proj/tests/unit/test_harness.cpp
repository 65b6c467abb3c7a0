#include <doctest.h>

#include <cmath>

#include "gibbs/harness.hpp"
#include "gibbs/profile.hpp"

using namespace gibbs;

TEST_CASE("seed lists")
{
    CHECK(parse_seeds("3..6") == std::vector<std::uint64_t>{3, 4, 5, 6});
    CHECK(parse_seeds("1,9,4") == std::vector<std::uint64_t>{1, 9, 4});
    CHECK_THROWS_AS(parse_seeds("5..2"), UsageError);
    CHECK_THROWS_AS(parse_seeds(""), UsageError);
}

TEST_CASE("oracle specs")
{
    CHECK(parse_oracle_spec("exact").kind == OracleKind::exact);
    auto tv = parse_oracle_spec("tv:0.01:down");
    CHECK(tv.kind == OracleKind::tv_perturbed);
    CHECK(tv.d_tv == 0.01);
    CHECK(tv.tv_mode == TvMode::mass_shift_down);
    auto js = parse_oracle_spec("js:2:0.05");
    CHECK(js.kind == OracleKind::js_chain);
    CHECK(js.mixing == 2.0);
    CHECK(parse_oracle_spec("external:./sampler --x").command == "./sampler --x");
    CHECK_THROWS_AS(parse_oracle_spec("magic"), UsageError);
}

TEST_CASE("instance generator specs")
{
    auto a = make_instance("A");
    CHECK(a.counts() == std::vector<double>{1, 2, 1});
    auto c = make_instance("counts:1,0,3;bmin=-1;bmax=2");
    CHECK(c.beta_min() == -1.0);
    CHECK(c.count(2) == 3.0);
    auto q = make_instance("counts:1,2,1;q=1.240229");
    CHECK(q.beta_max() == doctest::Approx(1.0).epsilon(1e-6));
    auto p = make_instance("poly:m=3,q=4");
    CHECK(p.n() == 6.0);
    auto f = make_instance("family:delta-pair:delta=0.1,eps=0.1,q=5:member=1");
    CHECK(f.count(0) == doctest::Approx(0.2 * std::exp(-0.3)));
    auto r = make_instance("rescale:poly:m=2,q=2");
    CHECK(r.support().front() == doctest::Approx(0.5));
    CHECK_THROWS_AS(make_instance("blob"), UsageError);
    CHECK(make_graph("K4").edge_count() == 6);
    CHECK(make_graph("C5").vertices() == 5);
    CHECK(make_graph("petersen").edge_count() == 15);
}

TEST_CASE("config validation")
{
    ExperimentConfig c;
    c.task = "ratio-all";
    c.gen = "A";
    CHECK_NOTHROW(validate_config(c));
    c.task = "frobnicate";
    CHECK_THROWS_AS(validate_config(c), UsageError);
    c.task = "ratio-all";
    c.eps = 1.5;
    CHECK_THROWS_AS(validate_config(c), UsageError);
    c.eps = 0.3;
    c.seeds.clear();
    CHECK_THROWS_AS(validate_config(c), UsageError);
}

TEST_CASE("unknown task is a usage error before any sampling")
{
    ExperimentConfig c;
    c.task = "frobnicate";
    c.gen = "A";
    CHECK_THROWS_AS(run_experiment(c), UsageError);
}

TEST_CASE("reports are byte-identical across reruns")
{
    ExperimentConfig c;
    c.task = "ratio-all";
    c.gen = "A";
    c.seeds = parse_seeds("1..4");
    c.jobs = 2;
    auto a = run_experiment(c);
    c.jobs = 1;
    auto b = run_experiment(c);
    CHECK(a.text() == b.text());
    CHECK(a.ratio_knots_csv == b.ratio_knots_csv);
    CHECK(a.json.contains("version"));
    CHECK(a.json["summary"]["runs"] == 4);
}

TEST_CASE("profile echo differs only in constants")
{
    ExperimentConfig c;
    c.task = "schedule";
    c.gen = "poly:m=2,q=2";
    c.seeds = {1};
    auto d = run_experiment(c);
    c.profile = "paper";
    auto p = run_experiment(c);
    CHECK(d.json["config"]["profile"] == "desk");
    CHECK(p.json["config"]["profile"] == "paper");
    auto dj = d.json["profile"], pj = p.json["profile"];
    CHECK(dj.size() == pj.size());
    for (auto it = dj.begin(); it != dj.end(); ++it) CHECK(pj.contains(it.key()));
    CHECK(d.json["seeds"][0].contains("inv_weight"));
}

TEST_CASE("bench needs three sweep points")
{
    ExperimentConfig c;
    c.task = "bench";
    c.gen = "poly:m=2,q={}";
    c.sweep = "q=2,4";
    CHECK_THROWS_AS(bench_scaling(c), UsageError);
}

TEST_CASE("coverage threshold")
{
    CHECK(coverage_threshold(0.25, 200) ==
          doctest::Approx(0.75 - 3.0 * std::sqrt(0.25 * 0.75 / 200.0)));
}

TEST_CASE("log-log fit recovers a known slope")
{
    std::vector<double> x{1, 2, 4, 8};
    std::vector<std::vector<double>> y;
    for (double v : x) y.push_back({3.0 * v, 3.0 * v * 1.01, 3.0 * v * 0.99});
    auto f = fit_loglog(x, y, 200, 1);
    CHECK(f.slope == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(f.lo <= f.slope);
    CHECK(f.hi >= f.slope);
}

TEST_CASE("profiles")
{
    CHECK(profile_by_name("paper").product_r == 100.0);
    CHECK(profile_by_name("desk").name == "desk");
    CHECK_THROWS(profile_by_name("fast"));
}
