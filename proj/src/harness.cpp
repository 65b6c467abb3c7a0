#include "gibbs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "gibbs/errors.hpp"
#include "gibbs/families.hpp"
#include "gibbs/integer.hpp"
#include "gibbs/pcoef.hpp"
#include "gibbs/pratio.hpp"
#include "gibbs/schedule.hpp"

#ifndef GIBBS_VERSION
#define GIBBS_VERSION "unknown"
#endif

namespace gibbs {

std::string version_string() { return GIBBS_VERSION; }

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& what)
{
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError("bad number for " + what + ": '" + s + "'");
    }
}

long to_long(const std::string& s, const std::string& what)
{
    double v = to_double(s, what);
    if (v != std::floor(v)) throw UsageError(what + " must be an integer");
    return static_cast<long>(v);
}

std::string oracle_kind_name(OracleKind k)
{
    switch (k) {
    case OracleKind::exact: return "exact";
    case OracleKind::tv_perturbed: return "tv-perturbed";
    case OracleKind::js_chain: return "js-chain";
    case OracleKind::external: return "external";
    }
    return "?";
}

}  // namespace

nlohmann::json OracleSpec::to_json() const
{
    nlohmann::json j{{"kind", oracle_kind_name(kind)}};
    if (kind == OracleKind::tv_perturbed) {
        j["d_tv"] = d_tv;
        j["mode"] = std::string(tv_mode_name(tv_mode));
    }
    if (kind == OracleKind::js_chain) {
        j["mixing"] = mixing;
        j["d_tv"] = d_tv;
    }
    if (kind == OracleKind::external) j["command"] = command;
    return j;
}

OracleSpec parse_oracle_spec(const std::string& s)
{
    OracleSpec o;
    if (s.empty() || s == "exact") return o;
    if (s.rfind("external:", 0) == 0) {
        o.kind = OracleKind::external;
        o.command = s.substr(9);
        if (o.command.empty()) throw UsageError("external oracle needs a command");
        return o;
    }
    auto parts = split(s, ':');
    if (parts[0] == "tv") {
        o.kind = OracleKind::tv_perturbed;
        if (parts.size() < 2 || parts.size() > 3) throw UsageError("oracle spec tv:<d>[:mode]");
        o.d_tv = to_double(parts[1], "d_tv");
        if (!(o.d_tv >= 0.0 && o.d_tv < 1.0)) throw UsageError("d_tv must lie in [0,1)");
        if (parts.size() == 3) {
            const std::string& m = parts[2];
            if (m == "up") o.tv_mode = TvMode::mass_shift_up;
            else if (m == "down") o.tv_mode = TvMode::mass_shift_down;
            else if (m == "pair") o.tv_mode = TvMode::random_pair;
            else throw UsageError("tv mode must be up, down or pair");
        }
        return o;
    }
    if (parts[0] == "js") {
        o.kind = OracleKind::js_chain;
        o.d_tv = 0.01;
        if (parts.size() > 3) throw UsageError("oracle spec js[:C][:d]");
        if (parts.size() >= 2) o.mixing = to_double(parts[1], "mixing constant");
        if (parts.size() == 3) o.d_tv = to_double(parts[2], "d_tv");
        if (!(o.d_tv > 0.0 && o.d_tv < 1.0)) throw UsageError("js d_tv must lie in (0,1)");
        if (o.mixing < 0.0) throw UsageError("mixing constant must be positive");
        return o;
    }
    throw UsageError("unknown oracle spec: " + s);
}

nlohmann::json ExperimentConfig::to_json() const
{
    nlohmann::json j{{"task", task},       {"eps", eps},         {"gamma", gamma},
                     {"delta", delta},     {"seeds", seeds},     {"profile", profile},
                     {"oracle", oracle.to_json()}, {"assert", assert_mode}};
    if (!instance_path.empty()) j["instance"] = instance_path;
    if (!gen.empty()) j["gen"] = gen;
    if (!graph.empty()) j["graph"] = graph;
    if (task == "bench") {
        j["sweep"] = sweep;
        j["bench_task"] = bench_task;
        j["bootstrap"] = bootstrap;
    }
    return j;
}

const std::vector<std::string>& task_names()
{
    static const std::vector<std::string> names{
        "ratio-all",     "ratio-point", "counts-continuous", "counts-integer", "counts-logconcave",
        "schedule",      "count-matchings", "count-subgraphs", "bench"};
    return names;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s)
{
    std::vector<std::uint64_t> out;
    auto dots = s.find("..");
    if (dots != std::string::npos) {
        long a = to_long(s.substr(0, dots), "seed");
        long b = to_long(s.substr(dots + 2), "seed");
        if (a < 0 || b < a) throw UsageError("seed range must be a..b with 0 <= a <= b");
        for (long k = a; k <= b; ++k) out.push_back(static_cast<std::uint64_t>(k));
        return out;
    }
    for (const auto& p : split(s, ',')) {
        long v = to_long(p, "seed");
        if (v < 0) throw UsageError("seeds must be nonnegative");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    if (out.empty()) throw UsageError("at least one seed is required");
    return out;
}

namespace {

std::map<std::string, std::string> key_values(const std::string& s, char sep)
{
    std::map<std::string, std::string> kv;
    if (s.empty()) return kv;
    for (const auto& p : split(s, sep)) {
        auto eq = p.find('=');
        if (eq == std::string::npos) throw UsageError("expected key=value, got '" + p + "'");
        kv[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return kv;
}

GibbsInstance instance_a()
{
    return GibbsInstance::from_counts({1.0, 2.0, 1.0}, 0.0, 1.0);
}

}  // namespace

GibbsInstance make_instance(const std::string& spec)
{
    try {
        if (spec == "A") return instance_a();
        if (spec.rfind("rescale:", 0) == 0) return rescale_instance(make_instance(spec.substr(8)));
        if (spec.rfind("counts:", 0) == 0) {
            auto parts = split(spec.substr(7), ';');
            std::vector<double> c;
            for (const auto& v : split(parts[0], ',')) c.push_back(to_double(v, "count"));
            std::map<std::string, std::string> kv;
            for (std::size_t i = 1; i < parts.size(); ++i)
                for (auto& [k, v] : key_values(parts[i], ',')) kv[k] = v;
            double bmin = kv.count("bmin") ? to_double(kv["bmin"], "bmin") : 0.0;
            if (kv.count("q")) {
                double bmax = find_betamax(c, bmin, to_double(kv["q"], "q"));
                return GibbsInstance::from_counts(c, bmin, bmax);
            }
            double bmax = kv.count("bmax") ? to_double(kv["bmax"], "bmax") : bmin + 1.0;
            return GibbsInstance::from_counts(c, bmin, bmax);
        }
        if (spec.rfind("poly:", 0) == 0) {
            auto kv = key_values(spec.substr(5), ',');
            if (!kv.count("m")) throw UsageError("poly spec needs m");
            double q = kv.count("q") ? to_double(kv["q"], "q") : 0.0;
            return logconcave_poly_instance(static_cast<int>(to_long(kv["m"], "m")), q);
        }
        if (spec.rfind("family:", 0) == 0) {
            auto parts = split(spec.substr(7), ':');
            FamilyKind kind = family_kind_from_string(parts[0]);
            FamilyParams p;
            std::size_t member = 0;
            for (std::size_t i = 1; i < parts.size(); ++i) {
                for (auto& [k, v] : key_values(parts[i], ',')) {
                    if (k == "delta") p.delta = to_double(v, k);
                    else if (k == "eps") p.eps = to_double(v, k);
                    else if (k == "nu") p.nu = to_double(v, k);
                    else if (k == "m") p.m = static_cast<int>(to_long(v, k));
                    else if (k == "n") p.n = static_cast<int>(to_long(v, k));
                    else if (k == "q") p.q = to_double(v, k);
                    else if (k == "inner") p.inner = family_kind_from_string(v);
                    else if (k == "member") member = static_cast<std::size_t>(to_long(v, k));
                    else throw UsageError("unknown family parameter " + k);
                }
            }
            auto f = lower_bound_family(kind, p);
            if (member == 0) return f.base;
            if (member > f.d()) throw UsageError("family member out of range");
            return f.alternates[member - 1];
        }
    } catch (const DomainError& e) {
        throw UsageError(std::string("bad generator spec: ") + e.what());
    }
    throw UsageError("unknown generator spec: " + spec);
}

Graph make_graph(const std::string& spec)
{
    if (spec == "petersen") return Graph::petersen();
    if (spec.size() >= 2 && (spec[0] == 'K' || spec[0] == 'C') &&
        std::all_of(spec.begin() + 1, spec.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        long v = to_long(spec.substr(1), "graph size");
        if (v < 2 || v > 64) throw UsageError("graph size must lie in [2, 64]");
        if (spec[0] == 'C' && v < 3) throw UsageError("cycles need at least 3 vertices");
        return spec[0] == 'K' ? Graph::complete(static_cast<std::size_t>(v))
                              : Graph::cycle(static_cast<std::size_t>(v));
    }
    try {
        return load_graph(spec);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

void validate_config(const ExperimentConfig& c)
{
    const auto& names = task_names();
    if (std::find(names.begin(), names.end(), c.task) == names.end())
        throw UsageError("unknown task: " + c.task);
    auto in01 = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in01(c.eps) || !in01(c.gamma) || !in01(c.delta))
        throw UsageError("eps, gamma and delta must lie in (0,1)");
    if (c.seeds.empty()) throw UsageError("at least one seed is required");
    if (c.jobs < 1) throw UsageError("--jobs must be >= 1");
    try {
        profile_by_name(c.profile);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    const bool graph_task = c.task == "count-matchings" || c.task == "count-subgraphs";
    if (graph_task) {
        if (c.graph.empty()) throw UsageError(c.task + " needs --graph");
    } else if (c.task != "bench" && c.instance_path.empty() == c.gen.empty()) {
        throw UsageError("give exactly one of --instance and --gen");
    }
    if (c.oracle.kind == OracleKind::js_chain && c.task != "count-matchings")
        throw UsageError("the js-chain oracle only serves count-matchings");
    if (c.task == "bench") {
        if (c.sweep.empty()) throw UsageError("bench needs --sweep");
        if (c.bench_task == "bench") throw UsageError("bench cannot sweep itself");
        if (std::find(names.begin(), names.end(), c.bench_task) == names.end())
            throw UsageError("unknown bench task: " + c.bench_task);
    }
}

double coverage_threshold(double gamma, std::size_t runs)
{
    double se = std::sqrt(gamma * (1.0 - gamma) / static_cast<double>(std::max<std::size_t>(runs, 1)));
    return (1.0 - gamma) - 3.0 * se;
}

std::string RunReport::text() const { return canonical_dump(json, 2) + "\n"; }

namespace {

struct Setup {
    std::shared_ptr<const GibbsInstance> inst;
    std::optional<Graph> graph;
    std::vector<double> exact_counts;  // count tasks
    const ConstantsProfile* profile = nullptr;
};

Setup prepare(const ExperimentConfig& c)
{
    Setup s;
    s.profile = &profile_by_name(c.profile);
    if (c.task == "count-matchings" || c.task == "count-subgraphs") {
        s.graph = make_graph(c.graph);
        try {
            auto ci = c.task == "count-matchings" ? matchings_instance(*s.graph)
                                                  : connected_subgraphs_instance(*s.graph);
            s.exact_counts = ci.counts;
            s.inst = std::make_shared<const GibbsInstance>(ci.instance);
        } catch (const RefusalError& e) {
            throw UsageError(e.what());
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        return s;
    }
    if (!c.gen.empty()) {
        s.inst = std::make_shared<const GibbsInstance>(make_instance(c.gen));
    } else {
        try {
            s.inst = std::make_shared<const GibbsInstance>(load_instance(c.instance_path));
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }
    return s;
}

std::unique_ptr<Oracle> make_oracle(const ExperimentConfig& c, const Setup& s, std::uint64_t seed)
{
    const std::uint64_t os = mix64(seed ^ 0x6f7261636c65ULL);
    switch (c.oracle.kind) {
    case OracleKind::exact: return std::make_unique<ExactOracle>(s.inst, os);
    case OracleKind::tv_perturbed:
        return std::make_unique<TvPerturbedOracle>(s.inst, c.oracle.d_tv, c.oracle.tv_mode, os);
    case OracleKind::js_chain: {
        double mix = c.oracle.mixing > 0.0 ? c.oracle.mixing : s.profile->js_mixing;
        return std::make_unique<JsMatchingOracle>(*s.graph, Domain::of(*s.inst), mix, c.oracle.d_tv, os);
    }
    case OracleKind::external:
        return std::make_unique<ExternalOracle>(Domain::of(*s.inst), c.oracle.command);
    }
    return nullptr;
}

struct SeedResult {
    std::uint64_t seed = 0;
    nlohmann::json json;
    bool covered = false;
    bool failed = false;
    bool structural_ok = true;
    std::uint64_t cost = 0;
    std::string pi_csv;
    std::string knots_csv;
    std::string counts_csv;
};

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// |pi_hat - pi| <= u <= eps pi (1 + delta / Delta) at every support point.
nlohmann::json check_pcount(const GibbsInstance& inst, const PiTable& t, double eps, double delta,
                            bool& ok)
{
    ok = true;
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t j = 0; j < inst.size(); ++j) {
        const auto& r = t.rows.at(j);
        double pi = mu_at(inst, inst.beta_min(), j);
        double dm = delta_max(inst, inst.support()[j]);
        double bound = dm > 0.0 ? eps * pi * (1.0 + delta / dm) : std::numeric_limits<double>::infinity();
        bool row_ok = std::fabs(r.pi_hat - pi) <= r.u && r.u <= bound;
        if (!row_ok) ++bad;
        if (pi > 0.0) worst = std::max(worst, std::fabs(r.pi_hat - pi) / pi);
    }
    ok = bad == 0;
    return {{"violations", bad}, {"max_rel_err", worst}};
}

SeedResult run_seed(const ExperimentConfig& c, const Setup& s, std::uint64_t seed, bool first)
{
    SeedResult res;
    res.seed = seed;
    auto oracle = make_oracle(c, s, seed);
    Rng rng(seed, "pipeline");
    Context ctx{*oracle, rng, *s.profile};
    const GibbsInstance& inst = *s.inst;
    nlohmann::json j{{"seed", seed}};
    try {
        if (c.task == "ratio-all" || c.task == "ratio-point") {
            auto est = pratio_all(ctx, c.eps, c.gamma);
            j["variant"] = std::string(ratio_variant_name(est.variant));
            j["k1"] = est.k1;
            j["k2"] = est.k2;
            j["beta_mid"] = est.beta_mid;
            if (c.task == "ratio-point") {
                double lq = query_log_ratio(est, inst.beta_max());
                double q = log_ratio(inst, inst.beta_min(), inst.beta_max());
                j["log_q_hat"] = lq;
                j["log_err"] = std::fabs(lq - q);
                res.covered = std::fabs(lq - q) <= c.eps;
            } else {
                double err = 0.0;
                const int grid = 101;
                for (int g = 0; g < grid; ++g) {
                    double a = inst.beta_min() + (inst.beta_max() - inst.beta_min()) * g / (grid - 1.0);
                    if (g == grid - 1) a = inst.beta_max();
                    err = std::max(err, std::fabs(query_log_ratio(est, a) - log_ratio(inst, inst.beta_min(), a)));
                }
                j["sup_log_err"] = err;
                res.covered = err <= c.eps;
            }
            if (first) {
                std::string csv = "beta,log_q_hat,log_q\n";
                for (std::size_t k = 0; k < est.ppe.knots.size(); ++k) {
                    double b = est.ppe.knots[k];
                    csv += fmt(b) + "," + fmt(query_log_ratio(est, b)) + "," +
                           fmt(log_ratio(inst, inst.beta_min(), b)) + "\n";
                }
                res.knots_csv = csv;
            }
        } else if (c.task == "counts-continuous" || c.task == "counts-integer" ||
                   c.task == "counts-logconcave") {
            PiTable t;
            PcoefTrace trace;
            if (c.task == "counts-continuous") {
                t = pcoef_continuous(ctx, c.delta, c.eps, c.gamma, &trace);
                j["steps"] = trace.steps.size();
                j["ratio_cost"] = trace.ratio_cost;
            } else if (c.task == "counts-integer") {
                t = pcoef_integer(ctx, c.delta, c.eps, c.gamma);
            } else {
                t = pcoef_logconcave(ctx, c.delta, c.eps, c.gamma);
            }
            bool ok = false;
            j["pcount"] = check_pcount(inst, t, c.eps, c.delta, ok);
            res.covered = ok;
            if (first) res.pi_csv = t.to_csv();
        } else if (c.task == "schedule") {
            int attempts = 0;
            auto sch = find_covering_schedule(ctx, c.gamma, &attempts);
            const long n = static_cast<long>(inst.n());
            auto v = covering_violation(sch, inst.beta_min(), inst.beta_max(), n);
            double iw = inv_weight(sch);
            double bound = s.profile->schedule_a * (inst.n() + 1.0) * inst.rho();
            j["attempts"] = attempts;
            j["segments"] = sch.size();
            j["inv_weight"] = iw;
            j["inv_weight_bound"] = bound;
            j["structural"] = v ? *v : std::string("ok");
            j["proper"] = schedule_proper(inst, sch);
            j["schedule"] = schedule_to_json(sch);
            res.structural_ok = !v && iw <= bound;
            res.covered = schedule_proper(inst, sch);
        } else {
            // count-matchings / count-subgraphs: counts relative to c_0 = 1.
            // Delta(x) >= 1/(n+1) on these instances, so each pi_hat is within
            // relative r = e (1 + d (n+1)) and a ratio of two within
            // ln((1+r)/(1-r)); r = tanh(eps/2) makes that exactly eps.
            const double n = inst.n();
            const double d = 0.1 / std::max(n, 1.0);
            const double e = std::tanh(c.eps / 2.0) / (1.0 + d * (n + 1.0));
            PiTable t = inst.log_concave() ? pcoef_logconcave(ctx, d, e, c.gamma)
                                           : pcoef_integer(ctx, d, e, c.gamma);
            std::vector<double> est;
            double worst = 0.0;
            bool ok = t.rows[0].pi_hat > 0.0;
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                double v = ok ? t.rows[i].pi_hat / t.rows[0].pi_hat *
                                    std::exp(-inst.beta_min() * static_cast<double>(i))
                              : 0.0;
                est.push_back(v);
                double err = v > 0.0 ? std::fabs(std::log(v / inst.count(i))) : std::numeric_limits<double>::infinity();
                worst = std::max(worst, err);
            }
            // back to the graph's own indexing
            std::vector<double> counts = est;
            if (c.task == "count-subgraphs") {
                counts.assign(s.exact_counts.size(), 0.0);
                const std::size_t m = s.exact_counts.size() - 1;
                for (std::size_t i = 0; i < est.size(); ++i) counts[m - i] = est[i];
            }
            j["estimates"] = counts;
            j["max_log_err"] = std::isfinite(worst) ? nlohmann::json(worst) : nlohmann::json(nullptr);
            res.covered = worst <= c.eps;
            if (first) {
                std::string csv = "i,count,estimate\n";
                for (std::size_t i = 0; i < counts.size(); ++i)
                    csv += std::to_string(i) + "," + fmt(s.exact_counts[i]) + "," + fmt(counts[i]) + "\n";
                res.counts_csv = csv;
            }
        }
    } catch (const GiveUpError& e) {
        res.failed = true;
        j["error"] = std::string("give-up: ") + e.what();
    } catch (const EstimationError& e) {
        res.failed = true;
        j["error"] = std::string("estimation: ") + e.what();
    }
    // a failed run (the failure symbol for schedules) counts against
    // coverage but not as a structural violation
    if (res.failed) res.covered = false;
    res.cost = oracle->cost();
    j["cost"] = res.cost;
    j["covered"] = res.covered;
    res.json = std::move(j);
    return res;
}

std::vector<SeedResult> run_seeds(const ExperimentConfig& c, const Setup& s)
{
    std::vector<SeedResult> out(c.seeds.size());
    std::vector<std::exception_ptr> errs(c.seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < c.seeds.size();) {
            try {
                out[k] = run_seed(c, s, c.seeds[k], k == 0);
            } catch (...) {
                errs[k] = std::current_exception();
            }
        }
    };
    const int jobs = std::min<int>(c.jobs, static_cast<int>(c.seeds.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

double mean(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config)
{
    validate_config(config);
    if (config.task == "bench") return bench_scaling(config);
    auto t0 = std::chrono::steady_clock::now();
    Setup s = prepare(config);
    auto results = run_seeds(config, s);

    RunReport r;
    std::size_t covered = 0, failed = 0, structural_bad = 0;
    std::vector<double> costs;
    nlohmann::json per_seed = nlohmann::json::array();
    for (auto& sr : results) {
        covered += sr.covered;
        failed += sr.failed;
        structural_bad += !sr.structural_ok;
        costs.push_back(static_cast<double>(sr.cost));
        per_seed.push_back(sr.json);
    }
    const std::size_t runs = results.size();
    double rate = static_cast<double>(covered) / static_cast<double>(runs);
    double thr = coverage_threshold(config.gamma, runs);
    nlohmann::json summary{{"runs", runs},
                           {"covered", covered},
                           {"coverage", rate},
                           {"threshold", thr},
                           {"failed", failed},
                           {"mean_cost", mean(costs)},
                           {"total_cost", std::accumulate(costs.begin(), costs.end(), 0.0)}};
    if (config.task == "schedule") summary["structural_failures"] = structural_bad;

    const GibbsInstance& inst = *s.inst;
    nlohmann::json exact{{"beta_min", inst.beta_min()},
                         {"beta_max", inst.beta_max()},
                         {"n", inst.n()},
                         {"q", log_ratio(inst, inst.beta_min(), inst.beta_max())},
                         {"log_concave", inst.log_concave()},
                         {"integer", inst.integer_setting()}};
    if (inst.size() <= 64) {
        exact["pi"] = induced_mu(inst, inst.beta_min());
        std::vector<double> dm;
        for (double x : inst.support()) dm.push_back(delta_max(inst, x));
        exact["delta_max"] = dm;
    }
    if (!s.exact_counts.empty()) exact["counts"] = s.exact_counts;

    r.json = {{"version", version_string()},
              {"config", config.to_json()},
              {"profile", profile_to_json(*s.profile)},
              {"instance", instance_to_json(inst)},
              {"exact", exact},
              {"summary", summary},
              {"seeds", per_seed}};
    if (config.wall_time)
        r.json["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pi_table_csv = results.front().pi_csv;
    r.ratio_knots_csv = results.front().knots_csv;
    r.counts_csv = results.front().counts_csv;
    if (config.assert_mode && (rate < thr || structural_bad > 0)) r.exit_code = kExitContract;
    return r;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<std::vector<double>>& samples,
                    int bootstrap, std::uint64_t seed)
{
    auto slope_of = [&](const std::vector<double>& ys) {
        double mx = 0, my = 0;
        const double k = static_cast<double>(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += std::log(x[i]) / k;
            my += std::log(ys[i]) / k;
        }
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double dx = std::log(x[i]) - mx;
            sxy += dx * (std::log(ys[i]) - my);
            sxx += dx * dx;
        }
        return sxy / sxx;
    };
    std::vector<double> means;
    for (const auto& s : samples) means.push_back(mean(s));
    SlopeFit f;
    f.slope = slope_of(means);
    f.lo = f.hi = f.slope;
    if (bootstrap <= 0) return f;
    Rng rng(seed, "bootstrap");
    std::vector<double> boots;
    for (int b = 0; b < bootstrap; ++b) {
        std::vector<double> ys;
        for (const auto& s : samples) {
            double acc = 0;
            for (std::size_t k = 0; k < s.size(); ++k) acc += s[rng.below(s.size())];
            ys.push_back(acc / static_cast<double>(s.size()));
        }
        boots.push_back(slope_of(ys));
    }
    std::sort(boots.begin(), boots.end());
    auto pct = [&](double p) {
        auto i = static_cast<std::size_t>(std::floor(p * (boots.size() - 1)));
        return boots[i];
    };
    f.lo = pct(0.025);
    f.hi = pct(0.975);
    return f;
}

RunReport bench_scaling(const ExperimentConfig& config)
{
    validate_config(config);
    auto eq = config.sweep.find('=');
    if (eq == std::string::npos) throw UsageError("sweep must look like axis=v1,v2,...");
    const std::string axis = config.sweep.substr(0, eq);
    std::vector<double> values;
    for (const auto& v : split(config.sweep.substr(eq + 1), ',')) values.push_back(to_double(v, "sweep value"));
    if (values.size() < 3) throw UsageError("a sweep needs at least 3 values");
    if (axis != "q" && axis != "n" && axis != "eps" && axis != "delta" && axis != "inv_delta")
        throw UsageError("sweep axis must be q, n, eps, delta or inv_delta");
    if ((axis == "q" || axis == "n") && config.gen.find("{}") == std::string::npos)
        throw UsageError("a q or n sweep needs '{}' in --gen");

    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> xs;
    std::vector<std::vector<double>> samples;
    nlohmann::json points = nlohmann::json::array();
    for (double v : values) {
        ExperimentConfig c = config;
        c.task = config.bench_task;
        c.assert_mode = false;
        double x = v;
        if (axis == "q" || axis == "n") {
            std::string val = fmt(v);
            auto p = c.gen.find("{}");
            c.gen.replace(p, 2, val);
        } else if (axis == "eps") {
            c.eps = v;
            x = 1.0 / (v * v);
        } else if (axis == "delta") {
            c.delta = v;
            x = 1.0 / v;
        } else {
            c.delta = 1.0 / v;
        }
        validate_config(c);
        Setup s = prepare(c);
        auto results = run_seeds(c, s);
        std::vector<double> costs;
        std::size_t covered = 0;
        for (const auto& r : results) {
            costs.push_back(static_cast<double>(r.cost));
            covered += r.covered;
        }
        xs.push_back(x);
        points.push_back({{"value", v},
                          {"x", x},
                          {"mean_cost", mean(costs)},
                          {"coverage", static_cast<double>(covered) / results.size()},
                          {"costs", costs}});
        samples.push_back(std::move(costs));
    }
    auto fit = fit_loglog(xs, samples, config.bootstrap, config.seeds.front());
    bool monotone = true;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(mean(samples[i]) > mean(samples[i - 1]))) monotone = false;

    RunReport r;
    r.json = {{"version", version_string()},
              {"config", config.to_json()},
              {"profile", profile_to_json(profile_by_name(config.profile))},
              {"axis", axis},
              {"points", points},
              {"slope", fit.slope},
              {"slope_ci", {fit.lo, fit.hi}},
              {"monotone", monotone}};
    if (config.wall_time)
        r.json["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

void write_report(const RunReport& r, const std::string& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [&](const char* name, const std::string& text) {
        if (text.empty()) return;
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw UsageError(std::string("cannot write ") + name + " in " + dir);
        out << text;
    };
    put("report.json", r.text());
    put("pi_table.csv", r.pi_table_csv);
    put("ratio_knots.csv", r.ratio_knots_csv);
    put("counts.csv", r.counts_csv);
}

}  // namespace gibbs
