#pragma once

#include <optional>

#include "edhoc/bytes.hpp"
#include "edhoc/crypto.hpp"
#include "edhoc/suite.hpp"

namespace edhoc {

// Derivation labels. 0-9 are reserved for the handshake; applications
// export keys with labels >= 16. Label 4 (IV_3) exists only in the
// baseline variant; 8/9 (message-4 material) only in the improved one.
inline constexpr uint8_t kLabelSk2 = 0;
inline constexpr uint8_t kLabelSalt3e2m = 1;
inline constexpr uint8_t kLabelMac2 = 2;
inline constexpr uint8_t kLabelSk3 = 3;
inline constexpr uint8_t kLabelIv3 = 4;
inline constexpr uint8_t kLabelSalt4e3m = 5;
inline constexpr uint8_t kLabelMac3 = 6;
inline constexpr uint8_t kLabelSessionKey = 7;
inline constexpr uint8_t kLabelSk4 = 8;
inline constexpr uint8_t kLabelIv4 = 9;
inline constexpr uint8_t kMinExporterLabel = 16;

// Labeled HKDF-Expand. info = u8(label) || u32_be(|context| bytes)
// || context || u16_be(out_bits). This encoding is normative for the
// artifact: both parties and all oracles must produce identical bytes.
Bytes kdf_expand(BytesView prk, uint8_t label, BytesView context, size_t out_bits);

// Transcript hashes over canonical tuple encodings (see encode_tuple).
// m1/m2/m3 are exact bytes: m1 as transmitted on the wire, m2/m3 as the
// protected plaintexts.
Bytes compute_th2(BytesView y_e, BytesView c_r, BytesView m1);
Bytes compute_th3(BytesView th2, BytesView m2);
Bytes compute_th4_baseline(BytesView th3, BytesView m3);
Bytes compute_th4_improved(BytesView th3, BytesView m3, BytesView m3_clear);

// Chain key after the ephemeral-ephemeral exchange. Baseline extracts
// with an empty salt; the improved variant salts with th2 so equal DH
// outputs in different sessions still yield distinct chain keys.
Bytes derive_prk2e(const SuiteParams& suite, BytesView th2, BytesView gxy);

Bytes derive_sk2(BytesView prk2e, BytesView th2, size_t pt_bits);
Bytes derive_salt3e2m(BytesView prk2e, BytesView th2);
Bytes derive_prk3e2m(BytesView salt3e2m, BytesView g_xe_ys);

Bytes encode_ctx2(BytesView id_r, BytesView th2, BytesView y_s, BytesView ead2);
Bytes derive_mac2(BytesView prk3e2m, BytesView ctx2, int mac_bits);

struct Msg3Material {
    Bytes sk3;                 // AEAD key (baseline) or identity pad (improved)
    std::optional<Bytes> iv3;  // baseline only
    Bytes salt4e3m;
};
Msg3Material derive_message3_material(const SuiteParams& suite, BytesView prk3e2m,
                                      BytesView th3);

Bytes derive_prk4e3m(BytesView salt4e3m, BytesView g_xs_ye);

Bytes encode_ctx3(BytesView id_i, BytesView th3, BytesView x_s, BytesView ead3);
Bytes derive_mac3(const SuiteParams& suite, BytesView prk4e3m, BytesView ctx3);

struct Msg4Material {
    Bytes sk4;
    Bytes iv4;
};
// Improved variant only; throws std::logic_error in the baseline.
Msg4Material derive_message4_material(const SuiteParams& suite, BytesView prk4e3m,
                                      BytesView th4);

// The session key (the chain output of the final extract stage).
Bytes derive_session_key(BytesView prk4e3m, BytesView th4);

// Application key export bound to the final transcript. Labels below 16
// are rejected so exports can never collide with handshake derivations.
Bytes exporter(BytesView prk4e3m, BytesView th4, uint8_t label,
               BytesView app_context, size_t out_bits);

// Forward-secure rekeying: the chain key is replaced by
// extract(nonce, prk4e3m); callers re-derive downstream values from it.
Bytes key_update(BytesView prk4e3m, BytesView nonce);

}  // namespace edhoc
