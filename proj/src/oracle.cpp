#include "gibbs/oracle.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <tuple>
#include <utility>

#include <sys/wait.h>
#include <unistd.h>

#include "gibbs/errors.hpp"
#include "gibbs/kernels.hpp"

namespace gibbs {

Domain Domain::of(const GibbsInstance& inst)
{
    Domain d;
    d.support = inst.support();
    d.beta_min = inst.beta_min();
    d.beta_max = inst.beta_max();
    d.n = inst.n();
    d.integer_setting = inst.integer_setting();
    d.log_concave = inst.log_concave();
    return d;
}

std::optional<std::size_t> Domain::find(double x) const
{
    auto it = std::lower_bound(support.begin(), support.end(), x);
    if (it == support.end() || *it != x) return std::nullopt;
    return static_cast<std::size_t>(it - support.begin());
}

double Domain::rho() const
{
    if (log_concave) return std::exp(1.0);
    return 1.0 + std::log(n + 1.0);
}

Oracle::Oracle(Domain domain, std::string label)
    : domain_(std::move(domain))
    , label_(std::move(label))
{
}

std::size_t Oracle::draw_index(double beta)
{
    if (!std::isfinite(beta)) throw DomainError("oracle queried at non-finite beta");
    std::size_t j = sample_index(beta);
    ++cost_;
    return j;
}

std::vector<std::uint64_t> Oracle::draw_counts(double beta, std::uint64_t n)
{
    if (!std::isfinite(beta)) throw DomainError("oracle queried at non-finite beta");
    std::vector<std::uint64_t> out(domain_.size(), 0);
    if (n == 0) return out;
    sample_counts(beta, n, out);
    cost_ += n;
    return out;
}

void Oracle::sample_counts(double beta, std::uint64_t n, std::vector<std::uint64_t>& out)
{
    for (std::uint64_t i = 0; i < n; ++i) ++out[sample_index(beta)];
}

namespace {

// Builds the cumulative table of mu_beta; returns the last index with
// positive weight.
std::size_t build_cdf(const GibbsInstance& inst, double beta, std::vector<double>& cdf)
{
    std::size_t n = inst.size();
    cdf.resize(n);
    const double* x = inst.support().data();
    const double* b = inst.log_counts().data();
    double m = kernels::tilt_max(beta, x, b, n);
    kernels::tilt_weights(beta, x, b, m, cdf.data(), n);
    std::size_t last = 0;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (cdf[j] > 0.0) last = j;
        acc += cdf[j];
        cdf[j] = acc;
    }
    return last;
}

std::size_t pick(const std::vector<double>& cdf, std::size_t last_positive, double u)
{
    double target = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    auto j = static_cast<std::size_t>(it - cdf.begin());
    return std::min(j, last_positive);
}

// n draws from the law with cumulative weights cdf, as a chain of
// conditional binomials (same law as n inverse-CDF draws).
void multinomial(Rng& rng, const std::vector<double>& cdf, std::uint64_t n,
                 std::vector<std::uint64_t>& out)
{
    std::size_t last = 0;
    for (std::size_t j = 0; j < cdf.size(); ++j)
        if (cdf[j] > (j ? cdf[j - 1] : 0.0)) last = j;
    double rest = cdf.back();
    double prev = 0.0;
    for (std::size_t j = 0; j < cdf.size() && n > 0; ++j) {
        double w = cdf[j] - prev;
        prev = cdf[j];
        if (w <= 0.0) continue;
        std::uint64_t c = j == last ? n : rng.binomial(n, rest > 0.0 ? std::min(1.0, w / rest) : 1.0);
        out[j] += c;
        n -= c;
        rest -= w;
    }
}

}  // namespace

ExactOracle::ExactOracle(std::shared_ptr<const GibbsInstance> inst, std::uint64_t seed,
                         std::string label)
    : Oracle(Domain::of(*inst), label)
    , inst_(std::move(inst))
    , seed_(seed)
    , rng_(seed, label)
    , cached_beta_(std::numeric_limits<double>::quiet_NaN())
{
}

ExactOracle::ExactOracle(const GibbsInstance& inst, std::uint64_t seed, std::string label)
    : ExactOracle(std::make_shared<const GibbsInstance>(inst), seed, std::move(label))
{
}

std::unique_ptr<Oracle> ExactOracle::fork(std::string_view label) const
{
    std::string l = this->label() + "/" + std::string(label);
    return std::make_unique<ExactOracle>(inst_, seed_, l);
}

void ExactOracle::refresh(double beta)
{
    if (!(beta == cached_beta_)) {
        last_positive_ = build_cdf(*inst_, beta, cdf_);
        cached_beta_ = beta;
    }
}

std::size_t ExactOracle::sample_index(double beta)
{
    refresh(beta);
    return pick(cdf_, last_positive_, rng_.uniform());
}

void ExactOracle::sample_counts(double beta, std::uint64_t n, std::vector<std::uint64_t>& out)
{
    refresh(beta);
    multinomial(rng_, cdf_, n, out);
}

TvMode tv_mode_from_string(std::string_view s)
{
    if (s == "mass-shift-up") return TvMode::mass_shift_up;
    if (s == "mass-shift-down") return TvMode::mass_shift_down;
    if (s == "random-pair") return TvMode::random_pair;
    throw DomainError("unknown tv mode: " + std::string(s));
}

std::string_view tv_mode_name(TvMode m)
{
    switch (m) {
    case TvMode::mass_shift_up:
        return "mass-shift-up";
    case TvMode::mass_shift_down:
        return "mass-shift-down";
    default:
        return "random-pair";
    }
}

namespace {

// Source and destination of the moved mass; equal when nothing can move.
std::pair<std::size_t, std::size_t> tv_endpoints(const GibbsInstance& inst, TvMode mode,
                                                 std::size_t from, std::size_t to)
{
    std::size_t lo = inst.size(), hi = 0;
    for (std::size_t j = 0; j < inst.size(); ++j) {
        if (inst.count(j) > 0.0 || inst.log_counts()[j] > -std::numeric_limits<double>::infinity()) {
            lo = std::min(lo, j);
            hi = j;
        }
    }
    if (mode == TvMode::mass_shift_up) return {lo, hi};
    if (mode == TvMode::mass_shift_down) return {hi, lo};
    return {from, to};
}

// mu_beta into mu (resized), then d_tv moved from src to dst.
void tv_fill(const GibbsInstance& inst, double beta, double d_tv, std::size_t src,
             std::size_t dst, std::vector<double>& mu, bool* clipped)
{
    const double* x = inst.support().data();
    const double* b = inst.log_counts().data();
    std::size_t n = inst.size();
    mu.resize(n);
    double m = kernels::tilt_max(beta, x, b, n);
    double s = kernels::tilt_weights(beta, x, b, m, mu.data(), n);
    for (double& v : mu) v /= s;
    if (d_tv <= 0.0) return;
    if (src == dst) {
        if (clipped) *clipped = true;
        return;
    }
    double moved = std::min(d_tv, mu[src]);
    if (moved < d_tv && clipped) *clipped = true;
    mu[src] -= moved;
    mu[dst] += moved;
}

}  // namespace

std::vector<double> tv_perturbed_mu(const GibbsInstance& inst, double beta, double d_tv,
                                    TvMode mode, std::size_t from, std::size_t to, bool* clipped)
{
    if (!std::isfinite(beta)) throw DomainError("beta must be finite");
    auto [src, dst] = tv_endpoints(inst, mode, from, to);
    std::vector<double> mu;
    tv_fill(inst, beta, d_tv, src, dst, mu, clipped);
    return mu;
}

TvPerturbedOracle::TvPerturbedOracle(std::shared_ptr<const GibbsInstance> inst, double d_tv,
                                     TvMode mode, std::uint64_t seed, std::string label)
    : Oracle(Domain::of(*inst), label)
    , inst_(std::move(inst))
    , d_tv_(d_tv)
    , mode_(mode)
    , seed_(seed)
    , rng_(seed, label)
    , cached_beta_(std::numeric_limits<double>::quiet_NaN())
{
    if (!(d_tv >= 0.0 && d_tv <= 1.0)) throw DomainError("d_tv must lie in [0, 1]");
    std::vector<std::size_t> pos;
    for (std::size_t j = 0; j < inst_->size(); ++j)
        if (inst_->log_counts()[j] > -std::numeric_limits<double>::infinity()) pos.push_back(j);
    if (pos.size() >= 2) {
        Rng r(seed, "tv-pair");
        std::size_t a = r.below(pos.size());
        std::size_t b = r.below(pos.size() - 1);
        if (b >= a) ++b;
        from_ = pos[a];
        to_ = pos[b];
    } else {
        from_ = to_ = pos.front();
    }
    std::tie(src_, dst_) = tv_endpoints(*inst_, mode_, from_, to_);
}

std::unique_ptr<Oracle> TvPerturbedOracle::fork(std::string_view label) const
{
    std::string l = this->label() + "/" + std::string(label);
    return std::make_unique<TvPerturbedOracle>(inst_, d_tv_, mode_, seed_, l);
}

std::vector<double> TvPerturbedOracle::perturbed_mu(double beta) const
{
    return tv_perturbed_mu(*inst_, beta, d_tv_, mode_, from_, to_, nullptr);
}

void TvPerturbedOracle::sample_counts(double beta, std::uint64_t n, std::vector<std::uint64_t>& out)
{
    refresh(beta);
    multinomial(rng_, cdf_, n, out);
}

void TvPerturbedOracle::refresh(double beta)
{
    if (!(beta == cached_beta_)) {
        bool clip = false;
        tv_fill(*inst_, beta, d_tv_, src_, dst_, cdf_, &clip);
        clipped_ = clipped_ || clip;
        double acc = 0.0;
        for (double& v : cdf_) {
            acc += v;
            v = acc;
        }
        cached_beta_ = beta;
    }
}

std::size_t TvPerturbedOracle::sample_index(double beta)
{
    refresh(beta);
    double target = rng_.uniform() * cdf_.back();
    auto j = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), target) - cdf_.begin());
    if (j >= cdf_.size()) {
        j = cdf_.size() - 1;
        while (j > 0 && cdf_[j] == cdf_[j - 1]) --j;
    }
    return j;
}

std::unique_ptr<TvPerturbedOracle> tv_perturbed_oracle(const ExactOracle& base, double d_tv,
                                                       TvMode mode, std::uint64_t seed)
{
    return std::make_unique<TvPerturbedOracle>(base.instance_ptr(), d_tv, mode, seed);
}

ExternalOracle::ExternalOracle(Domain domain, std::string command, std::string label)
    : Oracle(std::move(domain), std::move(label))
    , command_(std::move(command))
{
    start();
}

ExternalOracle::~ExternalOracle()
{
    stop();
}

void ExternalOracle::start()
{
    std::signal(SIGPIPE, SIG_IGN);
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) throw OracleError("pipe() failed");
    pid_t pid = ::fork();
    if (pid < 0) throw OracleError("fork() failed");
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

void ExternalOracle::stop()
{
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        int status = 0;
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
}

std::unique_ptr<Oracle> ExternalOracle::fork(std::string_view label) const
{
    return std::make_unique<ExternalOracle>(domain(), command_,
                                            this->label() + "/" + std::string(label));
}

std::size_t ExternalOracle::sample_index(double beta)
{
    char line[64];
    int len = std::snprintf(line, sizeof line, "SAMPLE %.17g\n", beta);
    const char* p = line;
    while (len > 0) {
        ssize_t w = write(to_child_, p, static_cast<std::size_t>(len));
        if (w < 0) {
            if (errno == EINTR) continue;
            throw OracleError("external oracle closed its input");
        }
        p += w;
        len -= static_cast<int>(w);
    }
    std::size_t nl;
    while ((nl = buffer_.find('\n')) == std::string::npos) {
        char buf[256];
        ssize_t r = read(from_child_, buf, sizeof buf);
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) throw OracleError("external oracle ended its output");
        buffer_.append(buf, static_cast<std::size_t>(r));
    }
    std::string reply = buffer_.substr(0, nl);
    buffer_.erase(0, nl + 1);
    char* end = nullptr;
    double x = std::strtod(reply.c_str(), &end);
    if (end == reply.c_str()) throw OracleError("external oracle reply is not a number: " + reply);
    auto j = domain().find(x);
    if (!j) throw OracleError("external oracle returned an energy outside the support: " + reply);
    return *j;
}

}  // namespace gibbs
