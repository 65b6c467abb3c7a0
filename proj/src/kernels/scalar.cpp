#include "gibbs/kernels.hpp"

#include <cmath>
#include <limits>

namespace gibbs::kernels::scalar {

double tilt_max(double a, const double* x, const double* b, std::size_t n)
{
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        double t = a * x[j] + b[j];
        if (t > m) m = t;
    }
    return m;
}

double tilt_weights(double a, const double* x, const double* b, double shift, double* out,
                    std::size_t n)
{
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = std::exp(a * x[j] + b[j] - shift);
        s += out[j];
    }
    return s;
}

Moments tilt_moments(double a, const double* x, const double* b, double shift, std::size_t n)
{
    Moments m;
    for (std::size_t j = 0; j < n; ++j) {
        double w = std::exp(a * x[j] + b[j] - shift);
        m.s0 += w;
        m.s1 += x[j] * w;
        m.s2 += x[j] * x[j] * w;
    }
    return m;
}

}  // namespace gibbs::kernels::scalar
