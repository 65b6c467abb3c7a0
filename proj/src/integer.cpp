#include "gibbs/integer.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include "gibbs/binary_search.hpp"
#include "gibbs/errors.hpp"

namespace gibbs {

double ScheduleRatios::q(std::size_t i) const { return std::exp(log_q.at(i)); }

nlohmann::json ScheduleRatios::to_json() const
{
    return {{"betas", betas}, {"log_q", log_q}, {"provenance", provenance}, {"cost", cost}};
}

ScheduleRatios ScheduleRatios::from_json(const nlohmann::json& j)
{
    ScheduleRatios r;
    r.betas = j.at("betas").get<std::vector<double>>();
    r.log_q = j.at("log_q").get<std::vector<double>>();
    r.provenance = j.value("provenance", std::string());
    r.cost = j.value("cost", std::uint64_t{0});
    return r;
}

ScheduleRatios schedule_log_ratios(const CoveringSchedule& s, const ProductEstimates& x,
                                   const ProductEstimates& y)
{
    ScheduleRatios r;
    double shift = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0) shift += (s[i].beta - s[i - 1].beta) * static_cast<double>(s[i].lo);
        r.betas.push_back(s[i].beta);
        r.log_q.push_back(x.log_values.at(i) - y.log_values.at(i) + shift);
    }
    return r;
}

namespace {

void check_schedule(const Context& ctx, const CoveringSchedule& s)
{
    const Domain& dom = ctx.domain();
    if (!dom.integer_setting) throw DomainError("covering schedules need the integer setting");
    if (auto v = covering_violation(s, dom.beta_min, dom.beta_max, static_cast<long>(dom.n)))
        throw DomainError("invalid covering schedule: " + *v);
}

}  // namespace

ScheduleRatios pratio_covering_schedule(Context& ctx, const CoveringSchedule& s, double eps,
                                        double gamma)
{
    check_schedule(ctx, s);
    std::uint64_t c0 = ctx.oracle.cost();
    const Domain& dom = ctx.domain();
    std::vector<Source> X, Y;
    for (std::size_t i = 1; i < s.size(); ++i) {
        // Shared endpoint sigma+_{i-1} = sigma-_i; absent energies have mass 0.
        auto j = dom.find(static_cast<double>(s[i].lo));
        if (!j) throw DomainError("pratio_covering_schedule: endpoint outside the support");
        X.push_back(indicator_source(ctx.oracle, s[i - 1].beta, *j));
        Y.push_back(indicator_source(ctx.oracle, s[i].beta, *j));
    }
    double W = inv_weight(s);
    auto xp = estimate_products(X, W, eps / 2.0, gamma / 2.0, ctx.profile);
    auto yp = estimate_products(Y, W, eps / 2.0, gamma / 2.0, ctx.profile);
    auto r = schedule_log_ratios(s, xp, yp);
    r.provenance = "direct";
    r.cost = ctx.oracle.cost() - c0;
    return r;
}

namespace {

struct Cancelled {};

// Hands the right to draw back and forth in fixed slices. A branch that
// finishes must hold the turn, so the winner depends only on draw counts.
class Baton {
public:
    explicit Baton(std::uint64_t slice)
        : slice_(std::max<std::uint64_t>(slice, 1))
        , left_(slice_)
    {
    }

    // The turn passes only when the holder asks for more after spending its
    // slice, so exactly one branch draws at any moment and the outcome does
    // not depend on thread timing.
    std::uint64_t acquire(int b, std::uint64_t want)
    {
        std::unique_lock lk(m_);
        for (;;) {
            cv_.wait(lk, [&] { return winner_ >= 0 || turn_ == b || !active_[1 - b]; });
            if (winner_ >= 0) throw Cancelled{};
            if (!active_[1 - b]) return want;
            if (left_ > 0) break;
            turn_ = 1 - b;
            left_ = slice_;
            cv_.notify_all();
        }
        std::uint64_t g = std::min(want, left_);
        left_ -= g;
        return g;
    }

    bool finish(int b)
    {
        std::unique_lock lk(m_);
        cv_.wait(lk, [&] { return winner_ >= 0 || turn_ == b || !active_[1 - b]; });
        if (winner_ < 0) winner_ = b;
        active_[b] = false;
        cv_.notify_all();
        return winner_ == b;
    }

    void abandon(int b)
    {
        std::lock_guard lk(m_);
        active_[b] = false;
        cv_.notify_all();
    }

private:
    std::mutex m_;
    std::condition_variable cv_;
    std::uint64_t slice_;
    std::uint64_t left_;
    int turn_ = 0;
    int winner_ = -1;
    bool active_[2] = {true, true};
};

class GatedOracle : public Oracle {
public:
    GatedOracle(std::unique_ptr<Oracle> inner, Baton& baton, int branch, std::uint64_t slice)
        : Oracle(inner->domain(), inner->label())
        , inner_(std::move(inner))
        , baton_(baton)
        , branch_(branch)
        , slice_(std::max<std::uint64_t>(slice, 1))
    {
    }

    std::unique_ptr<Oracle> fork(std::string_view label) const override { return inner_->fork(label); }

    // Draws actually made, including a request cut short by cancellation.
    std::uint64_t drawn() const { return inner_->cost(); }

protected:
    // Single draws take a whole slice of credit at once so the mutex is not
    // hit per draw; grants still depend only on the branch's own requests.
    std::size_t sample_index(double beta) override
    {
        if (credit_ == 0) credit_ = baton_.acquire(branch_, slice_);
        --credit_;
        return inner_->draw_index(beta);
    }

    void sample_counts(double beta, std::uint64_t n, std::vector<std::uint64_t>& out) override
    {
        while (n > 0) {
            std::uint64_t g = std::min(n, credit_);
            credit_ -= g;
            if (g == 0) g = baton_.acquire(branch_, n);
            auto h = inner_->draw_counts(beta, g);
            for (std::size_t j = 0; j < h.size(); ++j) out[j] += h[j];
            n -= g;
        }
    }

private:
    std::unique_ptr<Oracle> inner_;
    Baton& baton_;
    int branch_;
    std::uint64_t slice_;
    std::uint64_t credit_ = 0;
};

}  // namespace

ScheduleRatios pratio_points_dovetail(Context& ctx, const CoveringSchedule& s, double eps,
                                      double gamma, DovetailReport* report)
{
    check_schedule(ctx, s);
    const std::uint64_t slice = std::max<std::uint64_t>(ctx.profile.dovetail_slice, 1);
    Baton baton(slice);
    GatedOracle o_direct(ctx.oracle.fork("dovetail-direct"), baton, 0, slice);
    GatedOracle o_ratio(ctx.oracle.fork("dovetail-ratio"), baton, 1, slice);
    Rng r_direct = ctx.rng.split("dovetail-direct");
    Rng r_ratio = ctx.rng.split("dovetail-ratio");
    Context c_direct{o_direct, r_direct, ctx.profile};
    Context c_ratio{o_ratio, r_ratio, ctx.profile};

    std::optional<ScheduleRatios> out[2];
    std::exception_ptr err[2];
    bool won[2] = {false, false};
    auto run = [&](int b, auto&& body) {
        try {
            auto r = body();
            if (baton.finish(b)) {
                won[b] = true;
                out[b] = std::move(r);
            }
        } catch (const Cancelled&) {
        } catch (...) {
            err[b] = std::current_exception();
            baton.abandon(b);
        }
    };
    std::thread t0([&] {
        run(0, [&] { return pratio_covering_schedule(c_direct, s, eps, gamma / 2.0); });
    });
    std::thread t1([&] {
        run(1, [&] {
            auto D = pratio_all(c_ratio, eps, gamma / 2.0);
            ScheduleRatios r;
            for (const auto& g : s) {
                r.betas.push_back(g.beta);
                r.log_q.push_back(query_log_ratio(D, g.beta));
            }
            r.provenance = "ratio-all";
            return r;
        });
    });
    t0.join();
    t1.join();

    ctx.oracle.charge(o_direct.drawn() + o_ratio.drawn());
    int w = won[0] ? 0 : (won[1] ? 1 : -1);
    if (w < 0) std::rethrow_exception(err[0] ? err[0] : err[1]);
    if (report) {
        report->winner = out[w]->provenance;
        report->direct_cost = o_direct.drawn();
        report->ratio_cost = o_ratio.drawn();
    }
    out[w]->cost = o_direct.drawn() + o_ratio.drawn();
    return *out[w];
}

namespace {

PiTable empty_table(const Domain& dom, double delta, double eps, double gamma,
                    const ConstantsProfile& p, const char* method)
{
    PiTable t;
    t.delta = delta;
    t.eps = eps;
    t.gamma = gamma;
    t.beta_min = dom.beta_min;
    t.profile = p.name;
    t.method = method;
    for (double x : dom.support) t.rows.push_back({x, 0.0, 0.0});
    return t;
}

void check_params(double delta, double eps, double gamma, const char* who)
{
    auto in01 = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in01(delta) || !in01(eps) || !in01(gamma))
        throw DomainError(std::string(who) + ": delta, eps, gamma must lie in (0,1)");
}

}  // namespace

PiTable pcoef_integer(Context& ctx, double delta, double eps, double gamma)
{
    check_params(delta, eps, gamma, "pcoef_integer");
    const Domain& dom = ctx.domain();
    if (!dom.integer_setting) throw DomainError("pcoef_integer: integer setting required");
    const std::uint64_t c0 = ctx.oracle.cost();
    const double n1 = dom.n + 1.0;
    const double fine = ctx.profile.fine_eps * eps;
    const double g_point = gamma / (10.0 * n1 * n1);

    CoveringSchedule I = find_covering_schedule(ctx, gamma / 10.0);
    ScheduleRatios R = pratio_covering_schedule(ctx, I, fine, gamma / 10.0);
    const std::size_t t = I.size() - 1;
    std::vector<std::vector<double>> mu_knot;
    for (const auto& seg : I)
        mu_knot.push_back(energy_frequencies(
            dom, sample_empirical(ctx.oracle, seg.beta, Calibration{fine, g_point, seg.w}, ctx.profile)));

    PiTable table = empty_table(dom, delta, eps, gamma, ctx.profile, "integer");
    for (std::size_t r = 0; r < dom.size(); ++r) {
        const double jd = dom.support[r];
        const auto j = static_cast<std::size_t>(jd);
        double alpha = binary_search(ctx, dom.beta_min, dom.beta_max, jd, g_point, 0.25);
        auto mu_a = energy_frequencies(
            dom, sample_empirical(ctx.oracle, alpha, Calibration{fine, g_point, delta / 4.0}, ctx.profile));
        PiEstimate e;
        if (t == 0) {
            e = estimate_pi(jd, alpha, 0.25, 1.0, mu_a[j], dom.beta_min, eps, delta);
        } else {
            auto it = std::upper_bound(R.betas.begin(), R.betas.end(), alpha);
            std::size_t i = std::min<std::size_t>(t - 1, static_cast<std::size_t>(it - R.betas.begin()) - 1);
            const long k = I[i].hi;
            const auto kk = static_cast<std::size_t>(k);
            if (mu_a[kk] >= delta) {
                double q_alpha = mu_knot[i][kk] / mu_a[kk] *
                                 std::exp((alpha - I[i].beta) * static_cast<double>(k)) * R.q(i);
                e = estimate_pi(jd, alpha, 0.25, q_alpha, mu_a[j], dom.beta_min, eps, delta);
            } else {
                std::size_t m = static_cast<long>(j) >= k ? i + 1 : i;
                e = estimate_pi(jd, I[m].beta, I[m].w / (8.0 * delta), R.q(m), mu_knot[m][j],
                                dom.beta_min, eps, delta);
            }
        }
        table.rows[r].pi_hat = e.pi_hat;
        table.rows[r].u = e.u;
    }
    table.cost = ctx.oracle.cost() - c0;
    return table;
}

PiTable pcoef_logconcave(Context& ctx, double delta, double eps, double gamma)
{
    check_params(delta, eps, gamma, "pcoef_logconcave");
    const Domain& dom = ctx.domain();
    if (!dom.integer_setting || !dom.log_concave)
        throw DomainError("pcoef_logconcave: instance is not log-concave");
    const std::uint64_t c0 = ctx.oracle.cost();
    const double n1 = dom.n + 1.0;

    CoveringSchedule I = find_covering_schedule(ctx, gamma / 6.0);
    ScheduleRatios R = pratio_points_dovetail(ctx, I, ctx.profile.coarse_eps * eps, gamma / 6.0);
    double d = std::min(delta, 1.0 / inv_weight(I));
    if (dom.n >= 1.0) d = std::min(d, 1.0 / dom.n);
    const std::size_t t = I.size() - 1;
    I[0].w = std::min(I[0].w, d / 2.0);
    I[t].w = std::min(I[t].w, d / 2.0);

    PiTable table = empty_table(dom, delta, eps, gamma, ctx.profile, "logconcave");
    for (std::size_t i = 0; i <= t; ++i) {
        Calibration c{ctx.profile.fine_eps * eps, gamma / (6.0 * n1), I[i].w};
        auto emp = sample_empirical(ctx.oracle, I[i].beta, c, ctx.profile);
        for (std::size_t r = 0; r < dom.size(); ++r) {
            double k = dom.support[r];
            bool above = I[i].lo == kMinusInf || k > static_cast<double>(I[i].lo);
            bool below = I[i].hi == kPlusInf || k <= static_cast<double>(I[i].hi);
            if (!above || !below) continue;
            auto e = estimate_pi(k, I[i].beta, 0.25, R.q(i), emp.mu_index(r), dom.beta_min, eps, d);
            table.rows[r].pi_hat = e.pi_hat;
            table.rows[r].u = e.u;
        }
    }
    table.cost = ctx.oracle.cost() - c0;
    return table;
}

RatioEstimator pratio_all_integer(const PiTable& table, double beta_min, double beta_max)
{
    RatioEstimator e;
    e.variant = RatioVariant::integer;
    e.beta_min = beta_min;
    e.beta_max = beta_max;
    e.eps = table.eps;
    e.gamma = table.gamma;
    for (const auto& r : table.rows) {
        e.support.push_back(r.x);
        e.pi_hat.push_back(r.pi_hat);
    }
    return e;
}

std::vector<std::optional<double>> derive_ptcoef(const PiTable& table, double eps)
{
    std::vector<std::optional<double>> out;
    for (const auto& r : table.rows) {
        if (r.pi_hat > 0.0 && r.u <= 0.2 * eps * r.pi_hat)
            out.emplace_back(r.pi_hat * std::exp(-table.beta_min * r.x));
        else
            out.emplace_back(std::nullopt);
    }
    return out;
}

}  // namespace gibbs
