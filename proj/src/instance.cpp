#include "gibbs/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gibbs/errors.hpp"
#include "gibbs/kernels.hpp"

namespace gibbs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_beta(double beta)
{
    if (!std::isfinite(beta)) throw DomainError("beta must be finite");
}

}  // namespace

GibbsInstance GibbsInstance::from_counts(std::vector<double> support,
                                         const std::vector<double>& counts, double beta_min,
                                         double beta_max)
{
    if (support.size() != counts.size()) throw DomainError("support and counts differ in length");
    std::vector<double> logs(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (!(counts[j] >= 0.0) || !std::isfinite(counts[j]))
            throw DomainError("counts must be finite and nonnegative");
        logs[j] = counts[j] > 0.0 ? std::log(counts[j]) : kNegInf;
    }
    GibbsInstance g;
    g.support_ = std::move(support);
    g.log_counts_ = std::move(logs);
    g.counts_ = counts;
    g.beta_min_ = beta_min;
    g.beta_max_ = beta_max;
    g.validate(true);
    return g;
}

GibbsInstance GibbsInstance::from_counts(const std::vector<double>& counts, double beta_min,
                                         double beta_max)
{
    std::vector<double> support(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) support[j] = static_cast<double>(j);
    return from_counts(std::move(support), counts, beta_min, beta_max);
}

GibbsInstance GibbsInstance::from_log_counts(std::vector<double> support,
                                             std::vector<double> log_counts, double beta_min,
                                             double beta_max)
{
    GibbsInstance g;
    g.support_ = std::move(support);
    g.log_counts_ = std::move(log_counts);
    g.beta_min_ = beta_min;
    g.beta_max_ = beta_max;
    g.validate(true);
    return g;
}

GibbsInstance GibbsInstance::from_log_counts_unchecked(std::vector<double> support,
                                                       std::vector<double> log_counts,
                                                       double beta_min, double beta_max)
{
    GibbsInstance g;
    g.support_ = std::move(support);
    g.log_counts_ = std::move(log_counts);
    g.beta_min_ = beta_min;
    g.beta_max_ = beta_max;
    g.validate(false);
    return g;
}

void GibbsInstance::validate(bool check_energies)
{
    if (support_.empty()) throw DomainError("empty support");
    if (support_.size() != log_counts_.size())
        throw DomainError("support and counts differ in length");
    if (!std::isfinite(beta_min_) || !std::isfinite(beta_max_) || beta_min_ > beta_max_)
        throw DomainError("need finite beta_min <= beta_max");
    bool any = false;
    for (std::size_t j = 0; j < support_.size(); ++j) {
        double x = support_[j];
        if (!std::isfinite(x) || x < 0.0) throw DomainError("energies must be finite and >= 0");
        if (j > 0 && !(x > support_[j - 1])) throw DomainError("support must strictly increase");
        if (check_energies && x != 0.0 && x < 1.0)
            throw DomainError("energies must lie in {0} u [1, n]");
        double l = log_counts_[j];
        if (std::isnan(l) || l == std::numeric_limits<double>::infinity())
            throw DomainError("log counts must be < +inf");
        any = any || l > kNegInf;
    }
    if (!any) throw DomainError("all counts are zero");
    if (counts_.size() != log_counts_.size()) {
        counts_.resize(log_counts_.size());
        for (std::size_t j = 0; j < log_counts_.size(); ++j) counts_[j] = std::exp(log_counts_[j]);
    }
    n_ = support_.back();

    integer_ = std::all_of(support_.begin(), support_.end(),
                           [](double x) { return x == std::floor(x); });
    log_concave_ = false;
    if (integer_ && n_ <= 1e7) {
        std::vector<double> dense(static_cast<std::size_t>(n_) + 1, kNegInf);
        for (std::size_t j = 0; j < support_.size(); ++j)
            dense[static_cast<std::size_t>(support_[j])] = log_counts_[j];
        log_concave_ = log_concave_sequence(dense);
    }
}

bool log_concave_sequence(const std::vector<double>& lc)
{
    std::size_t first = lc.size(), last = 0;
    for (std::size_t k = 0; k < lc.size(); ++k) {
        if (lc[k] > kNegInf) {
            first = std::min(first, k);
            last = k;
        }
    }
    if (first == lc.size()) return true;
    for (std::size_t k = first; k <= last; ++k)
        if (lc[k] == kNegInf) return false;
    // 2 ln c_k >= ln c_{k-1} + ln c_{k+1}, with a little slack for rounding
    for (std::size_t k = first + 1; k < last; ++k) {
        double lhs = 2.0 * lc[k];
        double rhs = lc[k - 1] + lc[k + 1];
        if (lhs < rhs - 1e-12 * std::max(1.0, std::fabs(rhs))) return false;
    }
    return true;
}

std::vector<double> GibbsInstance::counts() const
{
    return counts_;
}

double GibbsInstance::count(std::size_t j) const
{
    return counts_.at(j);
}

double GibbsInstance::rho() const
{
    if (log_concave_) return std::exp(1.0);
    return 1.0 + std::log(n_ + 1.0);
}

std::optional<std::size_t> GibbsInstance::find(double x) const
{
    auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it == support_.end() || *it != x) return std::nullopt;
    return static_cast<std::size_t>(it - support_.begin());
}

double GibbsInstance::count_at(double x) const
{
    auto j = find(x);
    return j ? counts_[*j] : 0.0;
}

GibbsInstance GibbsInstance::with_beta_range(double beta_min, double beta_max) const
{
    GibbsInstance g = *this;
    g.beta_min_ = beta_min;
    g.beta_max_ = beta_max;
    if (!std::isfinite(beta_min) || !std::isfinite(beta_max) || beta_min > beta_max)
        throw DomainError("need finite beta_min <= beta_max");
    return g;
}

double log_partition(const GibbsInstance& inst, double beta)
{
    check_beta(beta);
    return kernels::tilt_log_sum(beta, inst.support().data(), inst.log_counts().data(),
                                 inst.size());
}

double log_ratio(const GibbsInstance& inst, double beta1, double beta2)
{
    if (beta1 == beta2) {
        check_beta(beta1);
        return 0.0;
    }
    return log_partition(inst, beta2) - log_partition(inst, beta1);
}

std::vector<double> induced_mu(const GibbsInstance& inst, double beta)
{
    check_beta(beta);
    const double* x = inst.support().data();
    const double* b = inst.log_counts().data();
    std::size_t n = inst.size();
    double m = kernels::tilt_max(beta, x, b, n);
    std::vector<double> mu(n);
    double s = kernels::tilt_weights(beta, x, b, m, mu.data(), n);
    for (double& v : mu) v /= s;
    return mu;
}

double mu_at(const GibbsInstance& inst, double beta, std::size_t j)
{
    double l = inst.log_counts().at(j);
    if (l == kNegInf) return 0.0;
    return std::exp(l + beta * inst.support()[j] - log_partition(inst, beta));
}

double mu_range(const GibbsInstance& inst, double beta, double lo, double hi, bool hi_closed)
{
    auto mu = induced_mu(inst, beta);
    double s = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        double x = inst.support()[j];
        if (x >= lo && (x < hi || (hi_closed && x == hi))) s += mu[j];
    }
    return s;
}

EnergyMoments mean_energy(const GibbsInstance& inst, double beta)
{
    auto mu = induced_mu(inst, beta);
    EnergyMoments m;
    for (std::size_t j = 0; j < mu.size(); ++j) m.mean += mu[j] * inst.support()[j];
    for (std::size_t j = 0; j < mu.size(); ++j) {
        double d = inst.support()[j] - m.mean;
        m.variance += mu[j] * d * d;
    }
    return m;
}

double theta(const GibbsInstance& inst)
{
    double lo = mean_energy(inst, inst.beta_min()).mean;
    double hi = mean_energy(inst, inst.beta_max()).mean;
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return std::log(hi / lo);
}

DeltaMax delta_argmax(const GibbsInstance& inst, double x)
{
    auto j = inst.find(x);
    if (!j) throw DomainError("energy not in support");
    double lc = inst.log_counts()[*j];
    if (lc == kNegInf) return {0.0, inst.beta_min()};
    auto f = [&](double beta) { return lc + beta * x - log_partition(inst, beta); };
    double lo = inst.beta_min(), hi = inst.beta_max();
    // d/dbeta log mu_beta(x) = x - z'(beta) is decreasing, so its sign at
    // the ends decides a clamped maximum exactly.
    if (x <= mean_energy(inst, lo).mean) return {std::exp(f(lo)), lo};
    if (x >= mean_energy(inst, hi).mean) return {std::exp(f(hi)), hi};
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        if (f(m1) < f(m2))
            lo = m1;
        else
            hi = m2;
    }
    double best_beta = 0.5 * (lo + hi);
    double best = f(best_beta);
    for (double b : {inst.beta_min(), inst.beta_max()}) {
        double v = f(b);
        if (v > best) {
            best = v;
            best_beta = b;
        }
    }
    return {std::exp(best), best_beta};
}

double delta_max(const GibbsInstance& inst, double x)
{
    return delta_argmax(inst, x).value;
}

double find_betamax(const GibbsInstance& base, double q_target)
{
    if (!(q_target >= 0.0) || !std::isfinite(q_target)) throw DomainError("q_target must be >= 0");
    double b0 = base.beta_min();
    if (q_target == 0.0) return b0;
    double top = kNegInf;
    for (std::size_t j = 0; j < base.size(); ++j)
        if (base.log_counts()[j] > kNegInf) top = base.support()[j];
    double bottom = 0.0;
    for (std::size_t j = 0; j < base.size(); ++j)
        if (base.log_counts()[j] > kNegInf) {
            bottom = base.support()[j];
            break;
        }
    if (top == bottom) throw DomainError("q is constant: single nonzero energy level");
    double z0 = log_partition(base, b0);
    auto z = [&](double b) { return log_partition(base, b) - z0; };
    double step = 1.0;
    while (z(b0 + step) < q_target) {
        step *= 2.0;
        if (step > 1e300) throw DomainError("q_target unreachable");
    }
    double lo = b0, hi = b0 + step;
    for (int it = 0; it < 400 && hi - lo > 0.0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (z(mid) < q_target)
            lo = mid;
        else
            hi = mid;
    }
    return std::fabs(z(lo) - q_target) < std::fabs(z(hi) - q_target) ? lo : hi;
}

double find_betamax(const std::vector<double>& counts, double beta_min, double q_target)
{
    return find_betamax(GibbsInstance::from_counts(counts, beta_min, beta_min), q_target);
}

GibbsInstance instance_from_json(const nlohmann::json& j)
{
    try {
        auto support = j.at("support").get<std::vector<double>>();
        double bmin = j.at("beta_min").get<double>();
        double bmax = j.at("beta_max").get<double>();
        // "counts" may itself hold {"log_counts": [...]}
        const nlohmann::json* lj = j.contains("log_counts") ? &j.at("log_counts") : nullptr;
        if (j.contains("counts")) {
            const auto& c = j.at("counts");
            if (c.is_object()) {
                lj = &c.at("log_counts");
            } else {
                auto counts = c.get<std::vector<double>>();
                return GibbsInstance::from_counts(std::move(support), counts, bmin, bmax);
            }
        }
        if (!lj) throw DomainError("bad instance json: no counts");
        std::vector<double> logs;
        for (const auto& v : *lj) logs.push_back(v.is_null() ? kNegInf : v.get<double>());
        return GibbsInstance::from_log_counts(std::move(support), std::move(logs), bmin, bmax);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("bad instance json: ") + e.what());
    }
}

nlohmann::json instance_to_json(const GibbsInstance& inst)
{
    nlohmann::json j;
    j["support"] = inst.support();
    j["beta_min"] = inst.beta_min();
    j["beta_max"] = inst.beta_max();
    bool linear_ok = true;
    for (std::size_t k = 0; k < inst.size(); ++k) {
        bool zero_log = inst.log_counts()[k] == kNegInf;
        bool zero_lin = inst.count(k) == 0.0;
        if (zero_log != zero_lin || !std::isfinite(inst.count(k))) linear_ok = false;
    }
    if (linear_ok) {
        j["counts"] = inst.counts();
    } else {
        nlohmann::json logs = nlohmann::json::array();
        for (double l : inst.log_counts()) {
            if (l == kNegInf)
                logs.push_back(nullptr);
            else
                logs.push_back(l);
        }
        j["log_counts"] = logs;
    }
    return j;
}

GibbsInstance load_instance(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open instance file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("bad instance json: ") + e.what());
    }
    return instance_from_json(j);
}

namespace {

void dump_string(std::ostringstream& os, const std::string& s)
{
    os << nlohmann::json(s).dump();
}

void dump_value(std::ostringstream& os, const nlohmann::json& j, int indent, int depth)
{
    auto newline = [&](int d) {
        if (indent < 0) return;
        os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',';
            first = false;
            newline(depth + 1);
            dump_string(os, it.key());
            os << (indent < 0 ? ":" : ": ");
            dump_value(os, it.value(), indent, depth + 1);
        }
        newline(depth);
        os << '}';
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << '[';
        bool first = true;
        for (const auto& v : j) {
            if (!first) os << ',';
            first = false;
            newline(depth + 1);
            dump_value(os, v, indent, depth + 1);
        }
        newline(depth);
        os << ']';
        return;
    }
    case nlohmann::json::value_t::number_float: {
        double v = j.get<double>();
        if (!std::isfinite(v)) {
            os << "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
        return;
    }
    default:
        os << j.dump();
    }
}

}  // namespace

std::string canonical_dump(const nlohmann::json& j, int indent)
{
    std::ostringstream os;
    dump_value(os, j, indent, 0);
    return os.str();
}

}  // namespace gibbs
