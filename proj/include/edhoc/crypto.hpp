#pragma once

#include <optional>

#include "edhoc/bytes.hpp"
#include "edhoc/rng.hpp"
#include "edhoc/suite.hpp"

namespace edhoc {

Bytes sha256(BytesView data);
Bytes hmac_sha256(BytesView key, BytesView data);

// RFC 5869 with SHA-256. Empty salt means a zero-filled hash-length key.
Bytes hkdf_extract(BytesView salt, BytesView ikm);
Bytes hkdf_expand(BytesView prk, BytesView info, size_t out_len);

struct KeyPair {
    Bytes secret;
    Bytes pub;
};

// Encoded public-key length: 32 (X25519 u-coordinate) or 65 (P-256
// uncompressed point).
size_t curve_public_len(CurveId curve);
// Shared secrets are 32 bytes on both curves (P-256 uses the x-coordinate).
constexpr size_t kSharedLen = 32;

KeyPair dh_keygen(CurveId curve, DetRng& rng);

// nullopt on invalid peer encodings: off-curve / infinity points for
// P-256, and the all-zero X25519 output (contributory behaviour).
std::optional<Bytes> dh_shared(CurveId curve, BytesView secret, BytesView peer_pub);

// One-time pad: XOR at exactly key length; throws on length mismatch.
Bytes otp_apply(BytesView key, BytesView data);

// AES-128-CCM, 13-byte nonce, 2-byte length field. Tag lengths
// {32,48,...,128} follow RFC 3610 exactly; shorter experimental tags
// (8/16/24 bits) are computed with the M=4 encoding and truncated.
Bytes aead_seal(BytesView key, BytesView nonce, BytesView plaintext,
                BytesView aad, int tag_bits);
std::optional<Bytes> aead_open(BytesView key, BytesView nonce,
                               BytesView ciphertext, BytesView aad,
                               int tag_bits);

}  // namespace edhoc
