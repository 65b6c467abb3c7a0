#include "gibbs/rng.hpp"

namespace gibbs {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label)
{
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Rng::Rng(std::uint64_t seed, std::string_view label)
    : seed_(label.empty() ? seed : mix64(seed ^ mix64(hash_label(label))))
    , eng_(mix64(seed_))
{
}

Rng Rng::split(std::string_view label) const
{
    return Rng(seed_, label);
}

Rng Rng::split(std::uint64_t index) const
{
    Rng r(0);
    r.seed_ = mix64(seed_ + mix64(index + 0x5851f42d4c957f2dULL));
    r.eng_.seed(mix64(r.seed_));
    return r;
}

double Rng::uniform()
{
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n)
{
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(eng_);
}

std::uint64_t Rng::binomial(std::uint64_t n, double p)
{
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    return std::binomial_distribution<std::uint64_t>(n, p)(eng_);
}

}  // namespace gibbs
