#include "gibbs/profile.hpp"

#include <cstdlib>

#include "gibbs/errors.hpp"

namespace gibbs {

const ConstantsProfile& paper_profile()
{
    static const ConstantsProfile p{
        "paper",
        1.0,    // calibration_factor
        100.0,  // product_r
        3.0,    // median_trials
        400.0,  // hybrid_k1
        30.0,   // hybrid_k1_log
        4.0,    // hybrid_mid
        10.0,   // ppe_k2
        1e8,    // pcoef_c5
        40.0,   // search_budget
        0.95,   // search_halt_mass
        0.45,   // schedule_tau
        0.95,   // schedule_lambda
        0.05,   // schedule_nu
        6.0,    // schedule_a
        64,     // schedule_retries
        0.01,   // fine_eps
        0.1,    // coarse_eps
        256,    // dovetail_slice
        1.0,    // js_mixing
    };
    return p;
}

const ConstantsProfile& desk_profile()
{
    static const ConstantsProfile p = [] {
        ConstantsProfile d = paper_profile();
        d.name = "desk";
        d.product_r = 2.0;
        d.ppe_k2 = 0.5;
        d.pcoef_c5 = 30.0;
        d.fine_eps = 0.05;
        d.coarse_eps = 0.5;
        d.dovetail_slice = 16384;
        return d;
    }();
    return p;
}

const ConstantsProfile& profile_by_name(const std::string& name)
{
    if (name == "paper") return paper_profile();
    if (name == "desk") return desk_profile();
    throw DomainError("unknown constants profile: " + name);
}

const ConstantsProfile& default_profile()
{
    const char* env = std::getenv("GIBBS_PROFILE");
    if (env && *env) return profile_by_name(env);
    return desk_profile();
}

nlohmann::json profile_to_json(const ConstantsProfile& p)
{
    return {
        {"name", p.name},
        {"calibration_factor", p.calibration_factor},
        {"product_r", p.product_r},
        {"median_trials", p.median_trials},
        {"hybrid_k1", p.hybrid_k1},
        {"hybrid_k1_log", p.hybrid_k1_log},
        {"hybrid_mid", p.hybrid_mid},
        {"ppe_k2", p.ppe_k2},
        {"pcoef_c5", p.pcoef_c5},
        {"search_budget", p.search_budget},
        {"search_halt_mass", p.search_halt_mass},
        {"schedule_tau", p.schedule_tau},
        {"schedule_lambda", p.schedule_lambda},
        {"schedule_nu", p.schedule_nu},
        {"schedule_a", p.schedule_a},
        {"schedule_retries", p.schedule_retries},
        {"fine_eps", p.fine_eps},
        {"coarse_eps", p.coarse_eps},
        {"dovetail_slice", p.dovetail_slice},
        {"js_mixing", p.js_mixing},
    };
}

}  // namespace gibbs
