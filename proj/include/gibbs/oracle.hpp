#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gibbs/instance.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

// What an estimator may know about the model without drawing: the possible
// energies, the temperature range and the setting flags.
struct Domain {
    std::vector<double> support;
    double beta_min = 0.0;
    double beta_max = 0.0;
    double n = 0.0;
    bool integer_setting = false;
    bool log_concave = false;

    static Domain of(const GibbsInstance& inst);
    std::size_t size() const { return support.size(); }
    std::optional<std::size_t> find(double x) const;
    double rho() const;
    // Integer energies 0..n (the set H); integer setting only.
    std::size_t h_size() const { return static_cast<std::size_t>(n) + 1; }
};

// Sampler beta -> x ~ mu_beta with a draw counter. Single owner.
class Oracle {
public:
    virtual ~Oracle() = default;
    Oracle(const Oracle&) = delete;
    Oracle& operator=(const Oracle&) = delete;

    // One draw; returns the support index / the energy. Cost +1.
    std::size_t draw_index(double beta);
    double draw(double beta) { return domain_.support[draw_index(beta)]; }
    // Histogram of n draws over the support indices. Cost +n.
    std::vector<std::uint64_t> draw_counts(double beta, std::uint64_t n);

    std::uint64_t cost() const { return cost_; }
    const Domain& domain() const { return domain_; }
    const std::string& label() const { return label_; }

    // Same law, independent stream, zero cost.
    virtual std::unique_ptr<Oracle> fork(std::string_view label) const = 0;

    // Adds draws made on a fork to this counter.
    void charge(std::uint64_t draws) { cost_ += draws; }

protected:
    Oracle(Domain domain, std::string label);
    virtual std::size_t sample_index(double beta) = 0;
    // Adds n draws into out; the default loops over sample_index.
    virtual void sample_counts(double beta, std::uint64_t n, std::vector<std::uint64_t>& out);

private:
    Domain domain_;
    std::string label_;
    std::uint64_t cost_ = 0;
};

// Inverse-CDF sampler on an explicit instance. The cumulative table is kept
// for the last beta, so batches at one temperature are cheap.
class ExactOracle : public Oracle {
public:
    ExactOracle(std::shared_ptr<const GibbsInstance> inst, std::uint64_t seed,
                std::string label = "exact");
    ExactOracle(const GibbsInstance& inst, std::uint64_t seed, std::string label = "exact");

    const GibbsInstance& instance() const { return *inst_; }
    std::shared_ptr<const GibbsInstance> instance_ptr() const { return inst_; }
    std::uint64_t seed() const { return seed_; }
    std::unique_ptr<Oracle> fork(std::string_view label) const override;

protected:
    std::size_t sample_index(double beta) override;
    void sample_counts(double beta, std::uint64_t n, std::vector<std::uint64_t>& out) override;

private:
    void refresh(double beta);

    std::shared_ptr<const GibbsInstance> inst_;
    std::uint64_t seed_;
    Rng rng_;
    double cached_beta_;
    std::vector<double> cdf_;
    std::size_t last_positive_ = 0;
};

enum class TvMode { mass_shift_up, mass_shift_down, random_pair };

TvMode tv_mode_from_string(std::string_view s);
std::string_view tv_mode_name(TvMode m);

// mu_beta with d_tv mass moved between two positive-count energies:
// lowest -> highest (up), highest -> lowest (down), or a fixed random pair.
// A request larger than the source mass is clipped and flagged.
std::vector<double> tv_perturbed_mu(const GibbsInstance& inst, double beta, double d_tv,
                                    TvMode mode, std::size_t from, std::size_t to, bool* clipped);

class TvPerturbedOracle : public Oracle {
public:
    TvPerturbedOracle(std::shared_ptr<const GibbsInstance> inst, double d_tv, TvMode mode,
                      std::uint64_t seed, std::string label = "tv");

    std::unique_ptr<Oracle> fork(std::string_view label) const override;
    bool clipped() const { return clipped_; }
    double d_tv() const { return d_tv_; }
    std::vector<double> perturbed_mu(double beta) const;

protected:
    std::size_t sample_index(double beta) override;
    void sample_counts(double beta, std::uint64_t n, std::vector<std::uint64_t>& out) override;

private:
    void refresh(double beta);

    std::shared_ptr<const GibbsInstance> inst_;
    double d_tv_;
    TvMode mode_;
    std::uint64_t seed_;
    Rng rng_;
    std::size_t from_ = 0, to_ = 0;
    std::size_t src_ = 0, dst_ = 0;
    bool clipped_ = false;
    double cached_beta_;
    std::vector<double> cdf_;
};

std::unique_ptr<TvPerturbedOracle> tv_perturbed_oracle(const ExactOracle& base, double d_tv,
                                                       TvMode mode, std::uint64_t seed);

// Child process speaking "SAMPLE <beta>\n" -> "<x>\n" on stdin/stdout.
class ExternalOracle : public Oracle {
public:
    ExternalOracle(Domain domain, std::string command, std::string label = "external");
    ~ExternalOracle() override;

    std::unique_ptr<Oracle> fork(std::string_view label) const override;

protected:
    std::size_t sample_index(double beta) override;

private:
    void start();
    void stop();

    std::string command_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

}  // namespace gibbs
