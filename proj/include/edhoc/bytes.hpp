#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edhoc {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

inline Bytes to_bytes(BytesView v) { return Bytes(v.begin(), v.end()); }

inline Bytes to_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

inline void put_u16be(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void put_u32be(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void put_u64be(Bytes& out, uint64_t v) {
    put_u32be(out, static_cast<uint32_t>(v >> 32));
    put_u32be(out, static_cast<uint32_t>(v));
}

inline uint32_t read_u32be(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) |
           (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

// Canonical tuple encoding: every field length-prefixed (u32 BE), fields
// in caller order. Used for transcript-hash inputs, CTX values, and sid,
// so variable-length fields can never alias across boundaries.
inline Bytes encode_tuple(std::initializer_list<BytesView> fields) {
    Bytes out;
    size_t total = 0;
    for (auto f : fields) total += 4 + f.size();
    out.reserve(total);
    for (auto f : fields) {
        put_u32be(out, static_cast<uint32_t>(f.size()));
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

inline Bytes concat(std::initializer_list<BytesView> parts) {
    Bytes out;
    size_t total = 0;
    for (auto p : parts) total += p.size();
    out.reserve(total);
    for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

// Not constant time; fine for tests and bookkeeping. Handshake tag checks
// go through ct_equal below.
inline bool eq(BytesView a, BytesView b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Tag lengths are configured in bits. Values occupy ceil(bits/8) bytes
// with the unused low bits of the last byte cleared; every producer of
// sub-byte-granular tags (KDF outputs, AEAD tags, adversarial guesses)
// applies the same mask so comparisons stay exact.
inline void mask_to_bits(Bytes& b, size_t bits) {
    size_t rem = bits % 8;
    if (rem != 0 && !b.empty()) b.back() &= static_cast<uint8_t>(0xFF << (8 - rem));
}

inline size_t bits_to_len(size_t bits) { return (bits + 7) / 8; }

inline bool ct_equal(BytesView a, BytesView b) {
    if (a.size() != b.size()) return false;
    uint8_t acc = 0;
    for (size_t i = 0; i < a.size(); ++i) acc |= a[i] ^ b[i];
    return acc == 0;
}

inline std::string hex(BytesView data) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(data.size() * 2);
    for (uint8_t b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

inline Bytes from_hex(std::string_view s) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("bad hex digit");
    };
    if (s.size() % 2 != 0) throw std::invalid_argument("odd hex length");
    Bytes out;
    out.reserve(s.size() / 2);
    for (size_t i = 0; i < s.size(); i += 2)
        out.push_back(static_cast<uint8_t>(nibble(s[i]) << 4 | nibble(s[i + 1])));
    return out;
}

}  // namespace edhoc
