#pragma once

#include <stdexcept>
#include <string>

namespace gibbs {

// Bad arguments or an instance that violates its invariants.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// An external sampler misbehaved (died, garbled output, unknown energy).
struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An estimator produced a value outside its output contract, e.g. a zero
// telescoping product. Harnesses count these as failed runs.
struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A retry loop hit its cap; with sane inputs this signals a bug.
struct GiveUpError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A request too large for exhaustive enumeration.
struct RefusalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gibbs
