#pragma once

// Dense exponential-tilt kernels over support arrays.
//
// Every kernel evaluates terms t_j = a * x_j + b_j (b_j is a log weight and
// may be -inf for an empty slot). A scalar reference and an AVX2 variant are
// compiled; the variant is chosen once at startup from the CPU flags.
// GIBBS_SIMD=scalar in the environment pins the scalar path.

#include <cstddef>
#include <string_view>

#if defined(__x86_64__) || defined(_M_X64)
#define GIBBS_SIMD_X86 1
#else
#define GIBBS_SIMD_X86 0
#endif

namespace gibbs::kernels {

enum class Isa { scalar, avx2 };

struct Moments {
    double s0 = 0.0;  // sum of w_j
    double s1 = 0.0;  // sum of x_j w_j
    double s2 = 0.0;  // sum of x_j^2 w_j
};

struct Table {
    double (*tilt_max)(double a, const double* x, const double* b, std::size_t n);
    double (*tilt_weights)(double a, const double* x, const double* b, double shift,
                           double* out, std::size_t n);
    Moments (*tilt_moments)(double a, const double* x, const double* b, double shift,
                            std::size_t n);
};

namespace scalar {
double tilt_max(double a, const double* x, const double* b, std::size_t n);
double tilt_weights(double a, const double* x, const double* b, double shift, double* out,
                    std::size_t n);
Moments tilt_moments(double a, const double* x, const double* b, double shift, std::size_t n);
}  // namespace scalar

#if GIBBS_SIMD_X86
namespace avx2 {
double tilt_max(double a, const double* x, const double* b, std::size_t n);
double tilt_weights(double a, const double* x, const double* b, double shift, double* out,
                    std::size_t n);
Moments tilt_moments(double a, const double* x, const double* b, double shift, std::size_t n);
}  // namespace avx2
#endif

bool isa_supported(Isa isa);
Isa active_isa();
std::string_view isa_name(Isa isa);
const Table& table(Isa isa);
const Table& active();

// Convenience wrappers over the active table.

// max_j (a x_j + b_j); -inf when every b_j is -inf.
double tilt_max(double a, const double* x, const double* b, std::size_t n);

// out_j = exp(a x_j + b_j - shift); returns the sum of out.
double tilt_weights(double a, const double* x, const double* b, double shift, double* out,
                    std::size_t n);

// log sum_j exp(a x_j + b_j), computed around the max.
double tilt_log_sum(double a, const double* x, const double* b, std::size_t n);

Moments tilt_moments(double a, const double* x, const double* b, double shift, std::size_t n);

}  // namespace gibbs::kernels
