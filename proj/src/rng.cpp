#include "edhoc/rng.hpp"

#include <cstring>

#include "edhoc/crypto.hpp"

namespace edhoc {

DetRng::DetRng(uint64_t seed) {
    Bytes material;
    material.reserve(12);
    material.insert(material.end(), {'s', 'e', 'e', 'd'});
    put_u64be(material, seed);
    Bytes k = sha256(material);
    std::memcpy(key_.data(), k.data(), key_.size());
}

DetRng::DetRng(BytesView key_material) {
    Bytes k = sha256(key_material);
    std::memcpy(key_.data(), k.data(), key_.size());
}

DetRng DetRng::fork(uint64_t index) const {
    Bytes material(key_.begin(), key_.end());
    material.insert(material.end(), {'f', 'o', 'r', 'k'});
    put_u64be(material, index);
    return DetRng(BytesView(material));
}

void DetRng::fill(uint8_t* out, size_t n) {
    while (n > 0) {
        if (avail_ == 0) {
            Bytes material(key_.begin(), key_.end());
            put_u64be(material, counter_++);
            Bytes b = sha256(material);
            std::memcpy(block_.data(), b.data(), block_.size());
            avail_ = block_.size();
        }
        size_t take = std::min(n, avail_);
        std::memcpy(out, block_.data() + (block_.size() - avail_), take);
        out += take;
        n -= take;
        avail_ -= take;
    }
}

Bytes DetRng::bytes(size_t n) {
    Bytes out(n);
    fill(out.data(), n);
    return out;
}

uint64_t DetRng::u64() {
    uint8_t buf[8];
    fill(buf, sizeof buf);
    uint64_t v = 0;
    for (uint8_t b : buf) v = (v << 8) | b;
    return v;
}

uint64_t DetRng::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("DetRng::below: zero bound");
    // Rejection sampling keeps the draw unbiased.
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        uint64_t v = u64();
        if (v < limit) return v % bound;
    }
}

}  // namespace edhoc
