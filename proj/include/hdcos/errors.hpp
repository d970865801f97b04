#pragma once

#include <stdexcept>

namespace hdcos {

// Online phase ran out of dealer-provisioned triples.
struct PoolExhaustedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Round-index or protocol-tag mismatch between the two parties.
struct DesyncError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimeoutError : TransportError {
    using TransportError::TransportError;
};

// Requested operation has no MPC realization (relu/exp activations,
// circulant/phd layers).
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Debug-oracle detected a value outside a protocol's input contract.
struct RangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hdcos
