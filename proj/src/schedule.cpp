#include "gibbs/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs/binary_search.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/sampling.hpp"

namespace gibbs {

long span(long lo, long hi, long n)
{
    long a = std::max(lo, 0L);
    long b = std::min(hi, n);
    return b >= a ? b - a + 1 : 0;
}

double inv_weight(const std::vector<Segment>& segs)
{
    double s = 0.0;
    for (const auto& g : segs) s += 1.0 / g.w;
    return s;
}

namespace {

nlohmann::json endpoint_json(long v)
{
    if (v == kMinusInf) return "-inf";
    if (v == kPlusInf) return "+inf";
    return v;
}

long endpoint_from(const nlohmann::json& j)
{
    if (j.is_string()) {
        auto s = j.get<std::string>();
        if (s == "-inf") return kMinusInf;
        if (s == "+inf" || s == "inf") return kPlusInf;
        throw DomainError("bad schedule endpoint: " + s);
    }
    return j.get<long>();
}

bool finite(long v) { return v != kMinusInf && v != kPlusInf; }

}  // namespace

nlohmann::json schedule_to_json(const std::vector<Segment>& segs)
{
    nlohmann::json a = nlohmann::json::array();
    for (const auto& g : segs)
        a.push_back({{"beta", g.beta},
                     {"sigma_minus", endpoint_json(g.lo)},
                     {"sigma_plus", endpoint_json(g.hi)},
                     {"w", g.w}});
    return a;
}

std::vector<Segment> schedule_from_json(const nlohmann::json& j)
{
    std::vector<Segment> out;
    for (const auto& s : j)
        out.push_back({s.at("beta").get<double>(), endpoint_from(s.at("sigma_minus")),
                       endpoint_from(s.at("sigma_plus")), s.at("w").get<double>()});
    return out;
}

bool covers_everything(const std::vector<Segment>& segs)
{
    if (segs.empty() || segs.front().lo != kMinusInf || segs.back().hi != kPlusInf) return false;
    long reach = segs.front().hi;
    for (std::size_t i = 1; i < segs.size(); ++i) {
        if (segs[i].lo > reach) return false;
        reach = std::max(reach, segs[i].hi);
    }
    return reach == kPlusInf;
}

std::optional<std::string> pre_schedule_violation(const std::vector<Segment>& s, double beta_min,
                                                  double beta_max, long n, bool complete)
{
    if (s.empty()) return "empty";
    const std::size_t t = s.size() - 1;
    if (s.front().beta != beta_min || s.back().beta != beta_max) return "I1: endpoints";
    for (std::size_t i = 1; i <= t; ++i)
        if (s[i].beta < s[i - 1].beta) return "I1: beta decreases";
    if (s.front().lo != kMinusInf || s.back().hi != kPlusInf) return "I2: sentinels";
    for (std::size_t i = 0; i <= t; ++i) {
        if (s[i].lo > s[i].hi) return "segment with lo > hi";
        if (s[i].lo == kPlusInf || s[i].hi == kMinusInf) return "I2: misplaced sentinel";
        if (finite(s[i].lo) && (s[i].lo < 0 || s[i].lo > n)) return "I2: sigma- out of range";
        if (finite(s[i].hi) && (s[i].hi < 0 || s[i].hi > n)) return "I2: sigma+ out of range";
        if (!(s[i].w > 0.0 && s[i].w <= 1.0)) return "weight outside (0,1]";
        if (i > 0 && (s[i].lo < s[i - 1].lo || s[i].hi < s[i - 1].hi)) return "I2: not monotone";
    }
    for (std::size_t i = 1; i <= t; ++i)
        if (s[i].beta == s[i - 1].beta && s[i].lo != s[i - 1].lo && s[i].hi != s[i - 1].hi)
            return "I3";
    for (const auto& g : s) {
        if (g.lo == kMinusInf && g.beta != beta_min) return "I4: -inf away from beta_min";
        if (g.hi == kPlusInf && g.beta != beta_max) return "I4: +inf away from beta_max";
    }
    if (complete && !covers_everything(s)) return "I0";
    return std::nullopt;
}

std::optional<std::string> covering_violation(const CoveringSchedule& s, double beta_min,
                                              double beta_max, long n)
{
    if (s.empty()) return "empty";
    if (s.front().beta != beta_min || s.back().beta != beta_max) return "(i): endpoints";
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i].beta > s[i - 1].beta)) return "(i): beta not strictly increasing";
    if (s.front().lo != kMinusInf || s.back().hi != kPlusInf) return "(ii): sentinels";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i].w > 0.0 && s[i].w <= 1.0)) return "weight outside (0,1]";
        if (!(s[i].lo < s[i].hi)) return "(ii): empty segment";
        if (i + 1 < s.size()) {
            if (s[i].hi != s[i + 1].lo) return "(ii): endpoints not chained";
            if (s[i].hi < 0 || s[i].hi > n) return "(ii): shared endpoint outside H";
        }
    }
    return std::nullopt;
}

bool segment_proper(const GibbsInstance& inst, const Segment& seg, double slack)
{
    for (long k : {seg.lo, seg.hi}) {
        if (!finite(k)) continue;
        auto j = inst.find(static_cast<double>(k));
        double m = j ? mu_at(inst, seg.beta, *j) : 0.0;
        if (m < seg.w * (1.0 - slack)) return false;
    }
    return true;
}

bool schedule_proper(const GibbsInstance& inst, const std::vector<Segment>& segs)
{
    for (const auto& g : segs)
        if (!segment_proper(inst, g)) return false;
    return true;
}

bool segment_extremal(const GibbsInstance& inst, const Segment& seg, double lambda, double tol)
{
    const long n = static_cast<long>(inst.n());
    const double sp = static_cast<double>(span(seg.lo, seg.hi, n));
    auto mu = [&](long k) {
        auto j = inst.find(static_cast<double>(k));
        return j ? mu_at(inst, seg.beta, *j) : 0.0;
    };
    if (finite(seg.lo)) {
        double m = mu(seg.lo);
        for (long k = 0; k < seg.lo; ++k) {
            double bound = sp / (sp + static_cast<double>(seg.lo - k)) * m / lambda;
            if (mu(k) > bound + tol) return false;
        }
    }
    if (finite(seg.hi)) {
        double m = mu(seg.hi);
        for (long k = seg.hi + 1; k <= n; ++k) {
            double bound = sp / (sp + static_cast<double>(k - seg.hi)) * m / lambda;
            if (mu(k) > bound + tol) return false;
        }
    }
    return true;
}

double schedule_phi(const ConstantsProfile& p, double rho)
{
    return p.schedule_tau * std::pow(p.schedule_lambda, 3) / rho;
}

Segment choose_interval(const std::vector<double>& mu_hat, double beta, EndpointSet am,
                        EndpointSet ap, long n, double lambda, double phi)
{
    if (am.first > am.last || ap.first > ap.last) throw DomainError("find_interval: empty set");
    const long h_minus = am.first, h_plus = ap.last;
    auto Phi = [&](long i) {
        double m = mu_hat.at(static_cast<std::size_t>(i));
        return (i == h_minus || i == h_plus) ? std::sqrt(lambda) * m : std::pow(lambda, 1.5) * m;
    };
    Segment seg;
    seg.beta = beta;
    if (am.first == kMinusInf && am.last == kMinusInf) {
        seg.lo = kMinusInf;
    } else {
        if (!finite(am.first) || !finite(am.last)) throw DomainError("find_interval: bad A-");
        double best = -1.0;
        for (long i = am.first; i <= am.last; ++i) {
            double s = static_cast<double>(am.last - i + 1) * Phi(i);
            if (s > best) {
                best = s;
                seg.lo = i;
            }
        }
    }
    if (ap.first == kPlusInf && ap.last == kPlusInf) {
        seg.hi = kPlusInf;
    } else {
        if (!finite(ap.first) || !finite(ap.last)) throw DomainError("find_interval: bad A+");
        double best = -1.0;
        for (long i = ap.first; i <= ap.last; ++i) {
            double s = static_cast<double>(i - ap.first + 1) * Phi(i);
            if (s > best) {
                best = s;
                seg.hi = i;
            }
        }
    }
    seg.w = phi / static_cast<double>(span(seg.lo, seg.hi, n));
    return seg;
}

std::vector<double> energy_frequencies(const Domain& dom, const EmpiricalDistribution& emp)
{
    const long n = static_cast<long>(dom.n);
    std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t j = 0; j < dom.size(); ++j) {
        auto x = static_cast<long>(dom.support[j]);
        out[static_cast<std::size_t>(x)] = emp.mu_index(j);
    }
    return out;
}

namespace {

void require_integer(const Domain& dom, const char* who)
{
    if (!dom.integer_setting) throw DomainError(std::string(who) + ": integer setting required");
}

}  // namespace

Segment find_interval(Context& ctx, double beta, EndpointSet am, EndpointSet ap)
{
    const Domain& dom = ctx.domain();
    require_integer(dom, "find_interval");
    if (am.first > am.last || ap.first > ap.last) throw DomainError("find_interval: empty set");
    const long n = static_cast<long>(dom.n);
    const double lambda = ctx.profile.schedule_lambda;
    const double phi = schedule_phi(ctx.profile, dom.rho());
    const double s = static_cast<double>(span(am.first, ap.last, n));
    const double nn = static_cast<double>(n) + 2.0;
    Calibration c{0.5 * std::log(1.0 / lambda), 1.0 / (4.0 * nn * nn), phi / s};
    auto emp = sample_empirical(ctx.oracle, beta, c, ctx.profile);
    return choose_interval(energy_frequencies(dom, emp), beta, am, ap, n, lambda, phi);
}

PreSchedule minimalize(const PreSchedule& pre, double beta_min, double beta_max, long n)
{
    if (auto v = pre_schedule_violation(pre, beta_min, beta_max, n, true))
        throw DomainError("minimalize: not a pre-schedule (" + *v + ")");
    PreSchedule cur = pre;
    bool removed = true;
    while (removed) {
        removed = false;
        for (std::size_t i = 0; i < cur.size() && cur.size() > 1; ++i) {
            PreSchedule trial = cur;
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
            if (!pre_schedule_violation(trial, beta_min, beta_max, n, true)) {
                cur = std::move(trial);
                removed = true;
                break;
            }
        }
    }
    return cur;
}

PreSchedule build_pre_schedule(Context& ctx)
{
    const Domain& dom = ctx.domain();
    require_integer(dom, "build_pre_schedule");
    const long n = static_cast<long>(dom.n);
    const double phi = schedule_phi(ctx.profile, dom.rho());
    if (dom.beta_min == dom.beta_max)
        return {Segment{dom.beta_min, kMinusInf, kPlusInf, phi / static_cast<double>(n + 1)}};

    PreSchedule J;
    J.push_back(find_interval(ctx, dom.beta_min, {kMinusInf, kMinusInf}, {0, n}));
    J.push_back(find_interval(ctx, dom.beta_max, {0, n}, {kPlusInf, kPlusInf}));
    const double bs_gamma = 1.0 / (4.0 * static_cast<double>(std::max(n, 1L)));
    while (!covers_everything(J)) {
        std::size_t p = 0;
        while (!(J[p].hi < J[p + 1].lo)) ++p;
        const Segment L = J[p], R = J[p + 1];
        // Lower median of the half-integers L.hi + 1/2 .. R.lo - 1/2; ell = m + 1/2.
        long m = L.hi + (R.lo - L.hi - 1) / 2;
        double ell = static_cast<double>(m) + 0.5;
        double beta = binary_search(ctx, L.beta, R.beta, ell, bs_gamma, ctx.profile.schedule_tau);
        EndpointSet am{std::max(L.lo, 0L), m}, ap{m + 1, std::min(R.hi, n)};
        if (beta == L.beta)
            am = {L.lo, L.lo};
        else if (beta == R.beta)
            ap = {R.hi, R.hi};
        J.insert(J.begin() + static_cast<std::ptrdiff_t>(p + 1), find_interval(ctx, beta, am, ap));
        if (auto v = pre_schedule_violation(J, dom.beta_min, dom.beta_max, n, false))
            throw std::logic_error("build_pre_schedule broke an invariant: " + *v);
    }
    return minimalize(J, dom.beta_min, dom.beta_max, n);
}

std::optional<CoveringSchedule> uncross_schedule(Context& ctx, const PreSchedule& pre, double gamma)
{
    const Domain& dom = ctx.domain();
    require_integer(dom, "uncross_schedule");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("uncross_schedule: gamma must lie in (0,1)");
    const double nu = ctx.profile.schedule_nu;
    const std::size_t t = pre.size() - 1;
    const double shrink = std::exp(-nu / 2.0);
    std::vector<std::vector<double>> mu;
    for (std::size_t i = 0; i <= t && t > 0; ++i) {
        Calibration c{nu / 2.0, gamma / (4.0 * static_cast<double>(t + 1)), shrink * pre[i].w};
        mu.push_back(energy_frequencies(dom, sample_empirical(ctx.oracle, pre[i].beta, c, ctx.profile)));
    }
    std::vector<long> b(t + 2);
    b[0] = kMinusInf;
    b[t + 1] = kPlusInf;
    for (std::size_t i = 1; i <= t; ++i) {
        bool found = false;
        for (long k : {pre[i - 1].hi, pre[i].lo}) {
            if (!finite(k)) continue;
            auto kk = static_cast<std::size_t>(k);
            if (mu[i - 1][kk] >= shrink * pre[i - 1].w && mu[i][kk] >= shrink * pre[i].w) {
                b[i] = k;
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }
    CoveringSchedule out;
    for (std::size_t i = 0; i <= t; ++i)
        out.push_back({pre[i].beta, b[i], b[i + 1], std::exp(-nu) * pre[i].w});
    return out;
}

CoveringSchedule find_covering_schedule(Context& ctx, double gamma, int* attempts)
{
    for (int a = 1; a <= ctx.profile.schedule_retries; ++a) {
        auto pre = build_pre_schedule(ctx);
        auto s = uncross_schedule(ctx, pre, gamma / 4.0);
        if (s) {
            if (attempts) *attempts = a;
            return *s;
        }
    }
    throw GiveUpError("find_covering_schedule: retry cap reached");
}

}  // namespace gibbs
