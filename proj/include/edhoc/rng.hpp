#pragma once

#include <array>
#include <cstdint>

#include "edhoc/bytes.hpp"

namespace edhoc {

// Deterministic byte stream: block i = SHA-256(key || u64_be(i)).
// Every experiment draws all randomness from one of these, so a (seed,
// config) pair fully determines a run. fork() derives an independent
// child stream, used for per-trial randomness in attack campaigns.
class DetRng {
public:
    explicit DetRng(uint64_t seed);
    explicit DetRng(BytesView key_material);

    DetRng fork(uint64_t index) const;

    void fill(uint8_t* out, size_t n);
    Bytes bytes(size_t n);
    uint64_t u64();
    // Uniform in [0, bound), bound > 0.
    uint64_t below(uint64_t bound);

private:
    std::array<uint8_t, 32> key_;
    std::array<uint8_t, 32> block_{};
    uint64_t counter_ = 0;
    size_t avail_ = 0;  // unread bytes at the tail of block_
};

}  // namespace edhoc
