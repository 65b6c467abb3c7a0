#include "gibbs/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

namespace gibbs::kernels {
namespace {

const Table scalar_table{&scalar::tilt_max, &scalar::tilt_weights, &scalar::tilt_moments};
#if GIBBS_SIMD_X86
const Table avx2_table{&avx2::tilt_max, &avx2::tilt_weights, &avx2::tilt_moments};
#endif

Isa pick()
{
    const char* env = std::getenv("GIBBS_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (isa_supported(Isa::avx2)) return Isa::avx2;
    return Isa::scalar;
}

}  // namespace

bool isa_supported(Isa isa)
{
    if (isa == Isa::scalar) return true;
#if GIBBS_SIMD_X86 && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa()
{
    static const Isa isa = pick();
    return isa;
}

std::string_view isa_name(Isa isa)
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

const Table& table(Isa isa)
{
#if GIBBS_SIMD_X86
    if (isa == Isa::avx2) return avx2_table;
#endif
    (void)isa;
    return scalar_table;
}

const Table& active()
{
    static const Table& t = table(active_isa());
    return t;
}

double tilt_max(double a, const double* x, const double* b, std::size_t n)
{
    return active().tilt_max(a, x, b, n);
}

double tilt_weights(double a, const double* x, const double* b, double shift, double* out,
                    std::size_t n)
{
    return active().tilt_weights(a, x, b, shift, out, n);
}

double tilt_log_sum(double a, const double* x, const double* b, std::size_t n)
{
    const Table& t = active();
    double m = t.tilt_max(a, x, b, n);
    if (!std::isfinite(m)) return m;
    Moments s = t.tilt_moments(a, x, b, m, n);
    return m + std::log(s.s0);
}

Moments tilt_moments(double a, const double* x, const double* b, double shift, std::size_t n)
{
    return active().tilt_moments(a, x, b, shift, n);
}

}  // namespace gibbs::kernels
