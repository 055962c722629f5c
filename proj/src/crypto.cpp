#include "edhoc/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>
#include <openssl/sha.h>

#include <array>
#include <cassert>
#include <cstring>
#include <memory>

namespace edhoc {

namespace {

struct EvpPkeyDel {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct EvpPkeyCtxDel {
    void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct EvpCipherCtxDel {
    void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
struct EcPointDel {
    void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
struct BnDel {
    void operator()(BIGNUM* b) const { BN_free(b); }
};
struct BnCtxDel {
    void operator()(BN_CTX* b) const { BN_CTX_free(b); }
};

using PkeyPtr = std::unique_ptr<EVP_PKEY, EvpPkeyDel>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, EvpPkeyCtxDel>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, EvpCipherCtxDel>;
using EcPointPtr = std::unique_ptr<EC_POINT, EcPointDel>;
using BnPtr = std::unique_ptr<BIGNUM, BnDel>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDel>;

[[noreturn]] void fail(const char* what) {
    throw std::runtime_error(std::string("crypto: ") + what);
}

const EC_GROUP* p256_group() {
    static EC_GROUP* g = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
    if (!g) fail("P-256 group unavailable");
    return g;
}

const BIGNUM* p256_order() {
    static BIGNUM* n = [] {
        BIGNUM* b = BN_new();
        BnCtxPtr ctx(BN_CTX_new());
        if (!b || !ctx || !EC_GROUP_get_order(p256_group(), b, ctx.get()))
            fail("P-256 order unavailable");
        return b;
    }();
    return n;
}

}  // namespace

Bytes sha256(BytesView data) {
    Bytes out(32);
    SHA256(data.data(), data.size(), out.data());
    return out;
}

Bytes hmac_sha256(BytesView key, BytesView data) {
    Bytes out(32);
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
              data.data(), data.size(), out.data(), &len) ||
        len != 32)
        fail("HMAC failure");
    return out;
}

Bytes hkdf_extract(BytesView salt, BytesView ikm) {
    // HMAC zero-pads short keys, so an empty salt already behaves as the
    // RFC 5869 zero-filled hash-length salt.
    return hmac_sha256(salt, ikm);
}

Bytes hkdf_expand(BytesView prk, BytesView info, size_t out_len) {
    if (out_len > 255 * 32) throw std::invalid_argument("hkdf_expand: output too long");
    Bytes okm;
    okm.reserve(out_len);
    Bytes t;
    uint8_t counter = 1;
    while (okm.size() < out_len) {
        Bytes block = concat({t, info, BytesView(&counter, 1)});
        t = hmac_sha256(prk, block);
        size_t take = std::min<size_t>(32, out_len - okm.size());
        okm.insert(okm.end(), t.begin(), t.begin() + take);
        ++counter;
    }
    return okm;
}

size_t curve_public_len(CurveId curve) {
    return curve == CurveId::X25519 ? 32u : 65u;
}

// ---------------------------------------------------------------- X25519

namespace {

// Imported-private-key cache. OpenSSL 3 computes the public key eagerly
// on raw import, so importing costs about as much as the scalar mult
// itself; sessions and attack campaigns import the same static secret
// every trial and each ephemeral secret several times. A tiny LRU keyed
// by the secret bytes roughly halves X25519 handshake cost. Borrowed
// pointers survive eviction because contexts refcount the EVP_PKEY.
class X25519PrivateCache {
public:
    EVP_PKEY* get(BytesView secret) {
        for (Entry& e : slots_) {
            if (e.key && eq(e.secret, secret)) {
                e.stamp = ++clock_;
                return e.key.get();
            }
        }
        PkeyPtr imported(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                                      secret.data(), secret.size()));
        if (!imported) return nullptr;
        Entry* slot = &slots_[0];
        for (Entry& e : slots_) {
            if (!e.key) {
                slot = &e;
                break;
            }
            if (e.stamp < slot->stamp) slot = &e;
        }
        slot->secret = to_bytes(secret);
        slot->key = std::move(imported);
        slot->stamp = ++clock_;
        return slot->key.get();
    }

private:
    struct Entry {
        Bytes secret;
        PkeyPtr key;
        uint64_t stamp = 0;
    };
    std::array<Entry, 16> slots_;
    uint64_t clock_ = 0;
};

X25519PrivateCache& x25519_privates() {
    thread_local X25519PrivateCache cache;
    return cache;
}

}  // namespace

static KeyPair x25519_keygen(DetRng& rng) {
    Bytes secret = rng.bytes(32);
    EVP_PKEY* pkey = x25519_privates().get(secret);
    if (!pkey) fail("X25519 key import");
    Bytes pub(32);
    size_t len = pub.size();
    if (!EVP_PKEY_get_raw_public_key(pkey, pub.data(), &len) || len != 32)
        fail("X25519 public extraction");
    return {std::move(secret), std::move(pub)};
}

static std::optional<Bytes> x25519_shared(BytesView secret, BytesView peer) {
    if (secret.size() != 32) throw std::invalid_argument("X25519 secret must be 32 bytes");
    if (peer.size() != 32) return std::nullopt;
    EVP_PKEY* sk = x25519_privates().get(secret);
    PkeyPtr pk(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr,
                                           peer.data(), peer.size()));
    if (!sk || !pk) return std::nullopt;
    PkeyCtxPtr ctx(EVP_PKEY_CTX_new(sk, nullptr));
    Bytes shared(32);
    size_t len = shared.size();
    if (!ctx || EVP_PKEY_derive_init(ctx.get()) <= 0 ||
        EVP_PKEY_derive_set_peer(ctx.get(), pk.get()) <= 0 ||
        EVP_PKEY_derive(ctx.get(), shared.data(), &len) <= 0 || len != 32)
        return std::nullopt;  // includes OpenSSL's own all-zero rejection
    uint8_t acc = 0;
    for (uint8_t b : shared) acc |= b;
    if (acc == 0) return std::nullopt;  // low-order peer point
    return shared;
}

// ---------------------------------------------------------------- P-256

static KeyPair p256_keygen(DetRng& rng) {
    const EC_GROUP* group = p256_group();
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr d(BN_new());
    if (!ctx || !d) fail("P-256 alloc");
    // Rejection-sample a scalar in [1, n-1].
    for (;;) {
        Bytes cand = rng.bytes(32);
        if (!BN_bin2bn(cand.data(), static_cast<int>(cand.size()), d.get()))
            fail("P-256 scalar import");
        if (!BN_is_zero(d.get()) && BN_cmp(d.get(), p256_order()) < 0) break;
    }
    EcPointPtr pub(EC_POINT_new(group));
    if (!pub || !EC_POINT_mul(group, pub.get(), d.get(), nullptr, nullptr, ctx.get()))
        fail("P-256 base multiplication");
    Bytes secret(32);
    if (BN_bn2binpad(d.get(), secret.data(), 32) != 32) fail("P-256 scalar export");
    Bytes enc(65);
    if (EC_POINT_point2oct(group, pub.get(), POINT_CONVERSION_UNCOMPRESSED,
                           enc.data(), enc.size(), ctx.get()) != 65)
        fail("P-256 point export");
    return {std::move(secret), std::move(enc)};
}

static std::optional<Bytes> p256_shared(BytesView secret, BytesView peer) {
    if (secret.size() != 32) throw std::invalid_argument("P-256 secret must be 32 bytes");
    const EC_GROUP* group = p256_group();
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr d(BN_bin2bn(secret.data(), static_cast<int>(secret.size()), nullptr));
    if (!ctx || !d) fail("P-256 alloc");
    if (BN_is_zero(d.get()) || BN_cmp(d.get(), p256_order()) >= 0)
        throw std::invalid_argument("P-256 secret out of range");
    EcPointPtr pt(EC_POINT_new(group));
    if (!pt) fail("P-256 alloc");
    // oct2point enforces the curve equation; reject anything else.
    if (peer.size() != 65 || peer[0] != 0x04 ||
        !EC_POINT_oct2point(group, pt.get(), peer.data(), peer.size(), ctx.get()))
        return std::nullopt;
    if (EC_POINT_is_at_infinity(group, pt.get())) return std::nullopt;
    EcPointPtr prod(EC_POINT_new(group));
    if (!prod ||
        !EC_POINT_mul(group, prod.get(), nullptr, pt.get(), d.get(), ctx.get()))
        return std::nullopt;
    if (EC_POINT_is_at_infinity(group, prod.get())) return std::nullopt;
    BnPtr x(BN_new());
    if (!x ||
        !EC_POINT_get_affine_coordinates(group, prod.get(), x.get(), nullptr, ctx.get()))
        fail("P-256 affine extraction");
    Bytes shared(32);
    if (BN_bn2binpad(x.get(), shared.data(), 32) != 32) fail("P-256 x export");
    return shared;
}

KeyPair dh_keygen(CurveId curve, DetRng& rng) {
    return curve == CurveId::X25519 ? x25519_keygen(rng) : p256_keygen(rng);
}

std::optional<Bytes> dh_shared(CurveId curve, BytesView secret, BytesView peer_pub) {
    return curve == CurveId::X25519 ? x25519_shared(secret, peer_pub)
                                    : p256_shared(secret, peer_pub);
}

// ---------------------------------------------------------------- OTP

Bytes otp_apply(BytesView key, BytesView data) {
    if (key.size() != data.size())
        throw std::invalid_argument("otp_apply: key/data length mismatch");
    Bytes out(data.size());
    for (size_t i = 0; i < data.size(); ++i) out[i] = key[i] ^ data[i];
    return out;
}

// ---------------------------------------------------------------- CCM

namespace {

constexpr size_t kCcmNonceLen = 13;  // L = 2
constexpr size_t kBlock = 16;

// RFC 3610 M field; tags below 32 bits use the M=4 encoding truncated,
// odd byte counts round up to the next even RFC length, sub-byte bit
// counts mask the trailing bits after truncation.
int ccm_m_enc(int tag_bits) {
    int m = (tag_bits + 7) / 8;
    if (m < 4) return 4;
    if (m > 16) throw std::invalid_argument("ccm: tag too long");
    return m + (m % 2);
}

class AesEcb {
public:
    explicit AesEcb(BytesView key) : ctx_(EVP_CIPHER_CTX_new()) {
        if (key.size() != 16) throw std::invalid_argument("ccm: key must be 16 bytes");
        if (!ctx_ ||
            !EVP_EncryptInit_ex(ctx_.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr))
            fail("AES init");
        EVP_CIPHER_CTX_set_padding(ctx_.get(), 0);
    }
    void encrypt(const uint8_t in[kBlock], uint8_t out[kBlock]) {
        int len = 0;
        if (!EVP_EncryptUpdate(ctx_.get(), out, &len, in, kBlock) || len != kBlock)
            fail("AES block");
    }

private:
    CipherCtxPtr ctx_;
};

struct CcmCore {
    AesEcb aes;
    uint8_t s0[kBlock];  // keystream block 0, masks the tag
    Bytes nonce;

    CcmCore(BytesView key, BytesView nonce_in) : aes(key), nonce(to_bytes(nonce_in)) {
        if (nonce.size() != kCcmNonceLen)
            throw std::invalid_argument("ccm: nonce must be 13 bytes");
        uint8_t a0[kBlock];
        counter_block(0, a0);
        aes.encrypt(a0, s0);
    }

    void counter_block(uint16_t i, uint8_t out[kBlock]) {
        out[0] = 0x01;  // flags: L' = L-1 = 1
        std::memcpy(out + 1, nonce.data(), kCcmNonceLen);
        out[14] = static_cast<uint8_t>(i >> 8);
        out[15] = static_cast<uint8_t>(i);
    }

    // CBC-MAC over B_0 | aad blocks | payload blocks, returns X_n.
    void cbc_mac(BytesView payload, BytesView aad, int m_enc, uint8_t x[kBlock]) {
        uint8_t b0[kBlock];
        b0[0] = static_cast<uint8_t>((aad.empty() ? 0 : 0x40) |
                                     (((m_enc - 2) / 2) << 3) | 0x01);
        std::memcpy(b0 + 1, nonce.data(), kCcmNonceLen);
        b0[14] = static_cast<uint8_t>(payload.size() >> 8);
        b0[15] = static_cast<uint8_t>(payload.size());
        aes.encrypt(b0, x);

        uint8_t buf[kBlock];
        size_t fill = 0;
        auto absorb = [&](const uint8_t* p, size_t n) {
            while (n > 0) {
                size_t take = std::min(n, kBlock - fill);
                std::memcpy(buf + fill, p, take);
                fill += take;
                p += take;
                n -= take;
                if (fill == kBlock) {
                    for (size_t i = 0; i < kBlock; ++i) buf[i] ^= x[i];
                    aes.encrypt(buf, x);
                    fill = 0;
                }
            }
        };
        auto flush = [&] {
            if (fill > 0) {
                std::memset(buf + fill, 0, kBlock - fill);
                for (size_t i = 0; i < kBlock; ++i) buf[i] ^= x[i];
                aes.encrypt(buf, x);
                fill = 0;
            }
        };
        if (!aad.empty()) {
            uint8_t alen[2] = {static_cast<uint8_t>(aad.size() >> 8),
                               static_cast<uint8_t>(aad.size())};
            absorb(alen, 2);
            absorb(aad.data(), aad.size());
            flush();
        }
        absorb(payload.data(), payload.size());
        flush();
    }

    void keystream_xor(BytesView in, uint8_t* out) {
        uint8_t a[kBlock], s[kBlock];
        for (size_t off = 0; off < in.size(); off += kBlock) {
            counter_block(static_cast<uint16_t>(off / kBlock + 1), a);
            aes.encrypt(a, s);
            size_t n = std::min(kBlock, in.size() - off);
            for (size_t i = 0; i < n; ++i) out[off + i] = in[off + i] ^ s[i];
        }
    }
};

void ccm_check_sizes(BytesView plaintext, BytesView aad) {
    if (plaintext.size() >= (1u << 16))
        throw std::invalid_argument("ccm: plaintext exceeds 2^16 bytes");
    if (aad.size() >= (1u << 16) - (1u << 8))
        throw std::invalid_argument("ccm: aad too long for 2-byte encoding");
}

}  // namespace

Bytes aead_seal(BytesView key, BytesView nonce, BytesView plaintext,
                BytesView aad, int tag_bits) {
    if (tag_bits < 1) throw std::invalid_argument("ccm: tag_bits must be positive");
    ccm_check_sizes(plaintext, aad);
    const int m_enc = ccm_m_enc(tag_bits);
    const size_t tag_len = bits_to_len(tag_bits);

    CcmCore core(key, nonce);
    uint8_t x[kBlock];
    core.cbc_mac(plaintext, aad, m_enc, x);

    Bytes out(plaintext.size() + tag_len);
    core.keystream_xor(plaintext, out.data());
    for (size_t i = 0; i < tag_len; ++i)
        out[plaintext.size() + i] = x[i] ^ core.s0[i];
    if (tag_bits % 8 != 0)
        out.back() &= static_cast<uint8_t>(0xFF << (8 - tag_bits % 8));
    return out;
}

std::optional<Bytes> aead_open(BytesView key, BytesView nonce,
                               BytesView ciphertext, BytesView aad,
                               int tag_bits) {
    if (tag_bits < 1) throw std::invalid_argument("ccm: tag_bits must be positive");
    const int m_enc = ccm_m_enc(tag_bits);
    const size_t tag_len = bits_to_len(tag_bits);
    if (ciphertext.size() < tag_len) return std::nullopt;
    BytesView body = ciphertext.first(ciphertext.size() - tag_len);
    BytesView tag = ciphertext.last(tag_len);
    ccm_check_sizes(body, aad);

    CcmCore core(key, nonce);
    Bytes plaintext(body.size());
    core.keystream_xor(body, plaintext.data());
    uint8_t x[kBlock];
    core.cbc_mac(plaintext, aad, m_enc, x);
    Bytes expect(tag_len);
    for (size_t i = 0; i < tag_len; ++i) expect[i] = x[i] ^ core.s0[i];
    mask_to_bits(expect, static_cast<size_t>(tag_bits));
    if (!ct_equal(expect, tag)) return std::nullopt;
    return plaintext;
}

}  // namespace edhoc
