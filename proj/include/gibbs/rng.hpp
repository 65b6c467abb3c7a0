#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gibbs {

// splitmix64 finalizer, used to turn (seed, label) pairs into stream seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

// Seeded generator whose children are derived from (seed, label) only, so a
// child stream never depends on how much of the parent has been consumed.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::string_view label = {});

    Rng split(std::string_view label) const;
    Rng split(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next() { return eng_(); }

    // Uniform on the open interval (0, 1).
    double uniform();

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    // Binomial(n, p) variate.
    std::uint64_t binomial(std::uint64_t n, double p);

private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace gibbs
