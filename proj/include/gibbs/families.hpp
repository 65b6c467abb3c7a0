#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gibbs/instance.hpp"

namespace gibbs {

// Counts of x^m prod_{k<m} (e^k + x) on 0..2m, beta_min = 0 and beta_max
// chosen so that q = q_target (beta_max = 0 when q_target = 0).
GibbsInstance logconcave_poly_instance(int m, double q_target);
// Same coefficients in log domain.
std::vector<double> logconcave_poly_log_counts(int m);

enum class FamilyKind { delta_pair, poly_envelope, integer_comb, rescaled };

FamilyKind family_kind_from_string(const std::string& s);
std::string family_kind_name(FamilyKind k);

struct FamilyParams {
    double delta = 0.1;
    double eps = 0.1;
    double nu = 0.0;  // 0: derived from eps
    int m = 2;
    int n = 1;        // delta-pair: zero-padded up to n
    double q = 0.0;   // 0: default beta_max
    FamilyKind inner = FamilyKind::poly_envelope;  // rescaled only
};

struct InstanceFamily {
    FamilyKind kind = FamilyKind::delta_pair;
    GibbsInstance base;
    std::vector<GibbsInstance> alternates;
    double psi = 0.0;  // max of log U_beta(x) over the grid
    double psi_beta = 0.0;
    double psi_x = 0.0;
    double nu = 0.0;

    std::size_t d() const { return alternates.size(); }
    nlohmann::json to_json() const;
};

InstanceFamily lower_bound_family(FamilyKind kind, const FamilyParams& p);

// log U_beta(x) = sum_r ln(mu_beta(x|c0) / mu_beta(x|c_r)).
double log_u(const InstanceFamily& f, double beta, std::size_t j);
// Grid maximum of log_u; fills psi, psi_beta, psi_x.
void compute_psi(InstanceFamily& f, std::size_t grid = 401);

// c'_y = c_{n y} on y = x/n, beta range scaled by n.
GibbsInstance rescale_instance(const GibbsInstance& inst);

// Nonnegative, log-concave and a_k <= 1/k (1-based).
bool logconcave_harmonic_check(const std::vector<double>& a);

}  // namespace gibbs
