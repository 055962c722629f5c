#pragma once

#include <vector>

#include "edhoc/session.hpp"

namespace edhoc {

// One in-process handshake between two honest parties, fully relayed.
// Separate initiator/responder suites support mismatch experiments; the
// usual case passes the same suite twice.
struct HandshakeResult {
    Session initiator;
    Session responder;
    std::vector<Bytes> flows;  // wire bytes in transmission order
    bool completed = false;    // both Terminated
    bool sk_match = false;     // completed and bytewise-equal session keys
};

HandshakeResult run_handshake(const SuiteParams& initiator_suite,
                              const SuiteParams& responder_suite, uint64_t seed);

inline HandshakeResult run_handshake(const SuiteParams& suite, uint64_t seed) {
    return run_handshake(suite, suite, seed);
}

}  // namespace edhoc
