#include "gibbs/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbs/errors.hpp"

namespace gibbs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b)
{
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

double beta_max_for(const std::vector<double>& log_counts, double q)
{
    if (q <= 0.0) return 0.0;
    auto base = GibbsInstance::from_log_counts(
        [&] {
            std::vector<double> s(log_counts.size());
            for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i);
            return s;
        }(),
        log_counts, 0.0, 0.0);
    return find_betamax(base, q);
}

std::vector<double> iota_support(std::size_t n)
{
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<double>(i);
    return s;
}

GibbsInstance integer_instance(const std::vector<double>& lc, double bmin, double bmax)
{
    return GibbsInstance::from_log_counts(iota_support(lc.size()), lc, bmin, bmax);
}

}  // namespace

std::vector<double> logconcave_poly_log_counts(int m)
{
    if (m < 1) throw DomainError("logconcave_poly_instance: m must be >= 1");
    // prod_{k<m} (e^k + x), then shift by x^m
    std::vector<double> p{0.0};
    for (int k = 0; k < m; ++k) {
        std::vector<double> next(p.size() + 1, kNegInf);
        for (std::size_t i = 0; i < p.size(); ++i) {
            next[i] = log_add(next[i], p[i] + k);
            next[i + 1] = log_add(next[i + 1], p[i]);
        }
        p = std::move(next);
    }
    std::vector<double> out(static_cast<std::size_t>(m), kNegInf);
    out.insert(out.end(), p.begin(), p.end());
    return out;
}

GibbsInstance logconcave_poly_instance(int m, double q_target)
{
    if (q_target < 0.0) throw DomainError("logconcave_poly_instance: q_target must be >= 0");
    auto lc = logconcave_poly_log_counts(m);
    return integer_instance(lc, 0.0, beta_max_for(lc, q_target));
}

FamilyKind family_kind_from_string(const std::string& s)
{
    if (s == "delta-pair") return FamilyKind::delta_pair;
    if (s == "poly-envelope") return FamilyKind::poly_envelope;
    if (s == "integer-comb") return FamilyKind::integer_comb;
    if (s == "rescaled") return FamilyKind::rescaled;
    throw DomainError("unknown family kind: " + s);
}

std::string family_kind_name(FamilyKind k)
{
    switch (k) {
    case FamilyKind::delta_pair: return "delta-pair";
    case FamilyKind::poly_envelope: return "poly-envelope";
    case FamilyKind::integer_comb: return "integer-comb";
    case FamilyKind::rescaled: return "rescaled";
    }
    return "?";
}

nlohmann::json InstanceFamily::to_json() const
{
    nlohmann::json alts = nlohmann::json::array();
    for (const auto& a : alternates) alts.push_back(instance_to_json(a));
    return {{"kind", family_kind_name(kind)}, {"base", instance_to_json(base)},
            {"alternates", alts}, {"psi", psi}, {"psi_beta", psi_beta}, {"psi_x", psi_x},
            {"nu", nu}, {"d", d()}};
}

double log_u(const InstanceFamily& f, double beta, std::size_t j)
{
    double z0 = log_partition(f.base, beta);
    double c0 = f.base.log_counts()[j];
    double s = 0.0;
    for (const auto& a : f.alternates) s += c0 - a.log_counts()[j] + log_partition(a, beta) - z0;
    return s;
}

void compute_psi(InstanceFamily& f, std::size_t grid)
{
    double lo = f.base.beta_min(), hi = f.base.beta_max();
    f.psi = kNegInf;
    for (std::size_t g = 0; g < grid; ++g) {
        double b = grid == 1 || hi == lo ? lo : lo + (hi - lo) * static_cast<double>(g) / (grid - 1.0);
        for (std::size_t j = 0; j < f.base.size(); ++j) {
            if (f.base.log_counts()[j] == kNegInf) continue;
            double v = log_u(f, b, j);
            if (v > f.psi) {
                f.psi = v;
                f.psi_beta = b;
                f.psi_x = f.base.support()[j];
            }
        }
    }
}

GibbsInstance rescale_instance(const GibbsInstance& inst)
{
    if (!inst.integer_setting() || inst.n() < 1.0)
        throw DomainError("rescale: integer instance with n >= 1 required");
    const double n = inst.n();
    std::vector<double> s, lc;
    for (std::size_t j = 0; j < inst.size(); ++j) {
        double x = inst.support()[j];
        double l = inst.log_counts()[j];
        if (l == kNegInf) continue;
        if (x < n / 2.0) throw DomainError("rescale: counts below n/2 must vanish");
        s.push_back(x / n);
        lc.push_back(l);
    }
    return GibbsInstance::from_log_counts_unchecked(s, lc, inst.beta_min() * n, inst.beta_max() * n);
}

InstanceFamily lower_bound_family(FamilyKind kind, const FamilyParams& p)
{
    auto need = [](bool ok, const char* what) {
        if (!ok) throw DomainError(std::string("lower_bound_family: ") + what);
    };
    need(p.q >= 0.0, "q must be >= 0");
    need(p.nu >= 0.0, "nu must be >= 0");
    InstanceFamily f;
    f.kind = kind;
    switch (kind) {
    case FamilyKind::delta_pair: {
        need(p.delta > 0.0 && p.delta < 0.5, "delta must lie in (0, 1/2)");
        need(p.eps > 0.0, "eps must be positive");
        need(p.n >= 1, "n must be >= 1");
        std::vector<double> lc(static_cast<std::size_t>(p.n) + 1, kNegInf);
        lc[0] = std::log(2.0 * p.delta);
        lc[1] = 0.0;
        double bmax = beta_max_for(lc, p.q);
        f.base = integer_instance(lc, 0.0, bmax);
        for (double s : {-3.0, 3.0}) {
            auto a = lc;
            a[0] += s * p.eps;
            f.alternates.push_back(integer_instance(a, 0.0, bmax));
        }
        f.nu = 3.0 * p.eps;
        break;
    }
    case FamilyKind::poly_envelope: {
        need(p.m >= 1, "m must be >= 1");
        need(p.eps > 0.0 || p.nu > 0.0, "eps or nu must be positive");
        auto lc = logconcave_poly_log_counts(p.m);
        double bmax = beta_max_for(lc, p.q);
        f.base = integer_instance(lc, 0.0, bmax);
        f.nu = p.nu > 0.0 ? p.nu : 3.0 * p.eps / p.m;
        for (double s : {-1.0, 1.0}) {
            auto a = lc;
            for (std::size_t k = 0; k < a.size(); ++k)
                if (a[k] != kNegInf) a[k] += s * static_cast<double>(k) * f.nu;
            f.alternates.push_back(integer_instance(a, 0.0, bmax));
        }
        break;
    }
    case FamilyKind::integer_comb: {
        need(p.m >= 1, "m must be >= 1");
        need(p.delta > 0.0 && p.delta < 1.0, "delta must lie in (0,1)");
        need(p.eps > 0.0 || p.nu > 0.0, "eps or nu must be positive");
        const int m = p.m;
        std::vector<double> lc(static_cast<std::size_t>(4 * m) + 1, kNegInf);
        const double ln2 = std::log(2.0);
        for (int i = 0; i <= m; ++i) lc[2 * m + 2 * i] = -static_cast<double>(i * i) * ln2;
        for (int i = 0; i < m; ++i)
            lc[2 * m + 2 * i + 1] = -static_cast<double>(i + i * i) * ln2 + std::log(8.0 * p.delta);
        double bmax = p.q > 0.0 ? beta_max_for(lc, p.q) : m * ln2;
        f.base = integer_instance(lc, 0.0, bmax);
        f.nu = p.nu > 0.0 ? p.nu : 3.0 * p.eps;
        for (int i = 0; i < m; ++i)
            for (double s : {1.0, -1.0}) {
                auto a = lc;
                a[2 * m + 2 * i + 1] += s * f.nu;
                f.alternates.push_back(integer_instance(a, 0.0, bmax));
            }
        break;
    }
    case FamilyKind::rescaled: {
        need(p.inner == FamilyKind::poly_envelope || p.inner == FamilyKind::integer_comb,
             "rescaled needs a poly-envelope or integer-comb inner family");
        auto inner = lower_bound_family(p.inner, p);
        f.base = rescale_instance(inner.base);
        for (const auto& a : inner.alternates) f.alternates.push_back(rescale_instance(a));
        f.nu = inner.nu;
        break;
    }
    }
    compute_psi(f);
    return f;
}

bool logconcave_harmonic_check(const std::vector<double>& a)
{
    std::vector<double> lc;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!(a[k] >= 0.0)) return false;
        if (a[k] > 1.0 / static_cast<double>(k + 1)) return false;
        lc.push_back(a[k] > 0.0 ? std::log(a[k]) : kNegInf);
    }
    return log_concave_sequence(lc);
}

}  // namespace gibbs
