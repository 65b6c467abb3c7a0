#pragma once

#include "gibbs/oracle.hpp"
#include "gibbs/profile.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

// What a randomized estimator runs against: the oracle it pays for, its own
// coin stream, and the constants in force.
struct Context {
    Oracle& oracle;
    Rng& rng;
    const ConstantsProfile& profile;

    const Domain& domain() const { return oracle.domain(); }
};

}  // namespace gibbs
