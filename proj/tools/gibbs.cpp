// gibbs <task> [options]: batch runs of the estimators over seeds.
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "gibbs/errors.hpp"
#include "gibbs/harness.hpp"

using namespace gibbs;

int main(int argc, char** argv)
{
    CLI::App app{"Partition-ratio and count estimation from Gibbs samples"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", version_string());

    ExperimentConfig cfg;
    const char* env = std::getenv("GIBBS_PROFILE");
    cfg.profile = env && *env ? env : "desk";
    std::string seeds = "1";
    std::string oracle = "exact";
    std::string task;

    app.add_option("task", task, "ratio-all | ratio-point | counts-continuous | counts-integer | "
                                 "counts-logconcave | schedule | count-matchings | "
                                 "count-subgraphs | bench")
        ->required();
    app.add_option("--instance", cfg.instance_path, "instance JSON file");
    app.add_option("--gen", cfg.gen, "generator spec, e.g. A, poly:m=2,q=4, family:delta-pair:q=5");
    app.add_option("--graph", cfg.graph, "K<n>, C<n>, petersen, or an edge-list / JSON file");
    app.add_option("--eps", cfg.eps, "accuracy");
    app.add_option("--gamma", cfg.gamma, "failure probability");
    app.add_option("--delta", cfg.delta, "count threshold");
    app.add_option("--seeds", seeds, "a..b or a,b,c");
    app.add_option("--profile", cfg.profile, "desk | paper (default: $GIBBS_PROFILE or desk)");
    app.add_option("--oracle", oracle, "exact | tv:<d>[:up|down|pair] | js[:C][:d] | external:<cmd>");
    app.add_option("--out", cfg.out_dir, "output directory for report.json and CSV tables");
    app.add_flag("--assert", cfg.assert_mode, "exit 2 when coverage falls below threshold");
    app.add_option("--jobs", cfg.jobs, "seeds run concurrently");
    app.add_option("--sweep", cfg.sweep, "bench axis, e.g. q=2,4,8,16 or eps=0.5,0.35,0.25");
    app.add_option("--bench-task", cfg.bench_task, "task timed by bench");
    app.add_option("--bootstrap", cfg.bootstrap, "bootstrap resamples for the slope CI");
    app.add_flag("--wall-time", cfg.wall_time, "record wall time (reports stop being reproducible)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        cfg.task = task;
        cfg.seeds = parse_seeds(seeds);
        cfg.oracle = parse_oracle_spec(oracle);
        RunReport r = run_experiment(cfg);
        if (!cfg.out_dir.empty()) write_report(r, cfg.out_dir);
        else std::cout << r.text();
        if (r.exit_code == kExitContract) std::fprintf(stderr, "gibbs: coverage below threshold\n");
        return r.exit_code;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "gibbs: %s\n", e.what());
        return kExitUsage;
    } catch (const OracleError& e) {
        std::fprintf(stderr, "gibbs: oracle failure: %s\n", e.what());
        return kExitOracle;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "gibbs: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "gibbs: internal error: %s\n", e.what());
        return 1;
    }
}
