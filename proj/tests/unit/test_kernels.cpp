#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gibbs/kernels.hpp"
#include "gibbs/rng.hpp"

using namespace gibbs;
namespace k = gibbs::kernels;

namespace {

bool close(double a, double b, double rel)
{
    if (a == b) return true;
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("scalar kernels on a tiny example")
{
    std::vector<double> x{0, 1, 2}, b{0, std::log(2.0), 0};
    CHECK(k::scalar::tilt_max(0.0, x.data(), b.data(), 3) == doctest::Approx(std::log(2.0)));
    std::vector<double> w(3);
    double s = k::scalar::tilt_weights(0.0, x.data(), b.data(), 0.0, w.data(), 3);
    CHECK(s == doctest::Approx(4.0));
    CHECK(k::tilt_log_sum(1.0, x.data(), b.data(), 3) ==
          doctest::Approx(2.0 * std::log(1.0 + std::exp(1.0))));
    auto m = k::scalar::tilt_moments(0.0, x.data(), b.data(), 0.0, 3);
    CHECK(m.s0 == doctest::Approx(4.0));
    CHECK(m.s1 == doctest::Approx(4.0));
    CHECK(m.s2 == doctest::Approx(6.0));
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> empty{ninf, ninf};
    CHECK(k::tilt_max(1.0, x.data(), empty.data(), 2) == ninf);
}

TEST_CASE("every supported kernel table matches the scalar reference")
{
    Rng g(99, "kernels");
    const double ninf = -std::numeric_limits<double>::infinity();
    for (auto isa : {k::Isa::scalar, k::Isa::avx2}) {
        if (!k::isa_supported(isa)) continue;
        const auto& t = k::table(isa);
        for (std::size_t n = 0; n <= 37; ++n) {
            for (int rep = 0; rep < 20; ++rep) {
                std::vector<double> x(n), b(n), w1(n), w2(n);
                for (std::size_t j = 0; j < n; ++j) {
                    x[j] = 30.0 * g.uniform();
                    b[j] = g.uniform() < 0.15 ? ninf : 40.0 * (g.uniform() - 0.5);
                }
                double a = 6.0 * (g.uniform() - 0.5);
                double m0 = k::scalar::tilt_max(a, x.data(), b.data(), n);
                double m1 = t.tilt_max(a, x.data(), b.data(), n);
                CHECK(close(m0, m1, 1e-13));
                double shift = std::isfinite(m0) ? m0 : 0.0;
                double s0 = k::scalar::tilt_weights(a, x.data(), b.data(), shift, w1.data(), n);
                double s1 = t.tilt_weights(a, x.data(), b.data(), shift, w2.data(), n);
                CHECK(close(s0, s1, 1e-13));
                for (std::size_t j = 0; j < n; ++j) CHECK(close(w1[j], w2[j], 1e-13));
                auto q0 = k::scalar::tilt_moments(a, x.data(), b.data(), shift, n);
                auto q1 = t.tilt_moments(a, x.data(), b.data(), shift, n);
                CHECK(close(q0.s0, q1.s0, 1e-13));
                CHECK(close(q0.s1, q1.s1, 1e-13));
                CHECK(close(q0.s2, q1.s2, 1e-13));
            }
        }
    }
    CHECK(k::isa_supported(k::Isa::scalar));
    CHECK_FALSE(k::isa_name(k::active_isa()).empty());
}
