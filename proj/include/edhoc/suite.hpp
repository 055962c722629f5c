#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edhoc {

enum class CurveId { X25519, P256 };
enum class Variant { Baseline, Improved };

inline const char* to_string(CurveId c) {
    return c == CurveId::X25519 ? "x25519" : "p256";
}
inline const char* to_string(Variant v) {
    return v == Variant::Baseline ? "baseline" : "improved";
}

// Cipher-suite and deployment parameters. Defaults correspond to the
// standard suites (SHA-256, AES-CCM with 13-byte nonce, 64-bit handshake
// tags); mac_bits/sec_bits are runtime-adjustable so forgery experiments
// can run at reduced tag lengths.
struct SuiteParams {
    CurveId curve = CurveId::X25519;
    Variant variant = Variant::Baseline;
    int hash_bits = 256;  // transcript hashes, PRKs, session key
    int mac_bits = 64;    // t_2 always; t_3 in the baseline variant
    int sec_bits = 128;   // t_3 and the message-4 AEAD tag in the improved variant
    int key_bits = 128;   // AEAD key
    int iv_bits = 104;    // AEAD nonce (13 bytes)
    int id_bits = 32;     // identity labels, fixed length per deployment
    int cid_bits = 32;    // connection identifiers C_I / C_R

    // Tags may have sub-byte bit lengths (reduced-tag experiments); they
    // occupy ceil(bits/8) bytes with trailing bits masked to zero.
    size_t hash_len() const { return static_cast<size_t>(hash_bits) / 8; }
    size_t mac_len() const { return (static_cast<size_t>(mac_bits) + 7) / 8; }
    size_t sec_len() const { return (static_cast<size_t>(sec_bits) + 7) / 8; }
    size_t key_len() const { return static_cast<size_t>(key_bits) / 8; }
    size_t iv_len() const { return static_cast<size_t>(iv_bits) / 8; }
    size_t id_len() const { return static_cast<size_t>(id_bits) / 8; }
    size_t cid_len() const { return static_cast<size_t>(cid_bits) / 8; }

    // t_3 is lMAC bits in the baseline and lSEC bits in the improved
    // variant; the improved variant's message-4 tag is also lSEC bits.
    int tag3_bits() const {
        return variant == Variant::Improved ? sec_bits : mac_bits;
    }
    size_t tag3_len() const { return (static_cast<size_t>(tag3_bits()) + 7) / 8; }

    void validate() const {
        auto req = [](bool ok, const char* what) {
            if (!ok) throw std::invalid_argument(std::string("suite: ") + what);
        };
        req(hash_bits == 256, "only SHA-256 (hash_bits=256) is supported");
        req(key_bits == 128, "only AES-128 (key_bits=128) is supported");
        req(iv_bits == 104, "AEAD nonce must be 13 bytes (iv_bits=104)");
        req(mac_bits >= 1 && mac_bits <= 128, "mac_bits must be in [1,128]");
        req(sec_bits >= 1 && sec_bits <= 256, "sec_bits must be in [1,256]");
        req(id_bits >= 8 && id_bits % 8 == 0, "id_bits must be a positive multiple of 8");
        req(cid_bits >= 8 && cid_bits % 8 == 0, "cid_bits must be a positive multiple of 8");
        if (variant == Variant::Improved)
            req(sec_bits <= 128, "improved message-4 tag (sec_bits) is limited to 128");
    }
};

}  // namespace edhoc
