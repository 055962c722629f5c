#include "edhoc/key_schedule.hpp"

namespace edhoc {

Bytes kdf_expand(BytesView prk, uint8_t label, BytesView context, size_t out_bits) {
    if (out_bits == 0) throw std::invalid_argument("kdf_expand: zero output length");
    Bytes info;
    info.reserve(1 + 4 + context.size() + 2);
    info.push_back(label);
    put_u32be(info, static_cast<uint32_t>(context.size()));
    info.insert(info.end(), context.begin(), context.end());
    put_u16be(info, static_cast<uint16_t>(out_bits));
    Bytes out = hkdf_expand(prk, info, bits_to_len(out_bits));
    mask_to_bits(out, out_bits);
    return out;
}

Bytes compute_th2(BytesView y_e, BytesView c_r, BytesView m1) {
    Bytes h1 = sha256(m1);
    return sha256(encode_tuple({y_e, c_r, h1}));
}

Bytes compute_th3(BytesView th2, BytesView m2) {
    return sha256(encode_tuple({th2, m2}));
}

Bytes compute_th4_baseline(BytesView th3, BytesView m3) {
    return sha256(encode_tuple({th3, m3}));
}

Bytes compute_th4_improved(BytesView th3, BytesView m3, BytesView m3_clear) {
    return sha256(encode_tuple({th3, m3, m3_clear}));
}

Bytes derive_prk2e(const SuiteParams& suite, BytesView th2, BytesView gxy) {
    if (suite.variant == Variant::Improved) return hkdf_extract(th2, gxy);
    return hkdf_extract({}, gxy);
}

Bytes derive_sk2(BytesView prk2e, BytesView th2, size_t pt_bits) {
    return kdf_expand(prk2e, kLabelSk2, th2, pt_bits);
}

Bytes derive_salt3e2m(BytesView prk2e, BytesView th2) {
    return kdf_expand(prk2e, kLabelSalt3e2m, th2, 256);
}

Bytes derive_prk3e2m(BytesView salt3e2m, BytesView g_xe_ys) {
    return hkdf_extract(salt3e2m, g_xe_ys);
}

Bytes encode_ctx2(BytesView id_r, BytesView th2, BytesView y_s, BytesView ead2) {
    return encode_tuple({id_r, th2, y_s, ead2});
}

Bytes derive_mac2(BytesView prk3e2m, BytesView ctx2, int mac_bits) {
    return kdf_expand(prk3e2m, kLabelMac2, ctx2, static_cast<size_t>(mac_bits));
}

Msg3Material derive_message3_material(const SuiteParams& suite, BytesView prk3e2m,
                                      BytesView th3) {
    Msg3Material out;
    if (suite.variant == Variant::Baseline) {
        out.sk3 = kdf_expand(prk3e2m, kLabelSk3, th3, suite.key_bits);
        out.iv3 = kdf_expand(prk3e2m, kLabelIv3, th3, suite.iv_bits);
    } else {
        // Only the identity is pad-encrypted; the tag travels in clear.
        out.sk3 = kdf_expand(prk3e2m, kLabelSk3, th3, suite.id_bits);
    }
    out.salt4e3m = kdf_expand(prk3e2m, kLabelSalt4e3m, th3, 256);
    return out;
}

Bytes derive_prk4e3m(BytesView salt4e3m, BytesView g_xs_ye) {
    return hkdf_extract(salt4e3m, g_xs_ye);
}

Bytes encode_ctx3(BytesView id_i, BytesView th3, BytesView x_s, BytesView ead3) {
    return encode_tuple({id_i, th3, x_s, ead3});
}

Bytes derive_mac3(const SuiteParams& suite, BytesView prk4e3m, BytesView ctx3) {
    return kdf_expand(prk4e3m, kLabelMac3, ctx3, static_cast<size_t>(suite.tag3_bits()));
}

Msg4Material derive_message4_material(const SuiteParams& suite, BytesView prk4e3m,
                                      BytesView th4) {
    if (suite.variant != Variant::Improved)
        throw std::logic_error("message-4 material exists only in the improved variant");
    return {kdf_expand(prk4e3m, kLabelSk4, th4, suite.key_bits),
            kdf_expand(prk4e3m, kLabelIv4, th4, suite.iv_bits)};
}

Bytes derive_session_key(BytesView prk4e3m, BytesView th4) {
    return kdf_expand(prk4e3m, kLabelSessionKey, th4, 256);
}

Bytes exporter(BytesView prk4e3m, BytesView th4, uint8_t label,
               BytesView app_context, size_t out_bits) {
    if (label < kMinExporterLabel)
        throw std::invalid_argument("exporter: labels below 16 are reserved");
    return kdf_expand(prk4e3m, label, encode_tuple({th4, app_context}), out_bits);
}

Bytes key_update(BytesView prk4e3m, BytesView nonce) {
    return hkdf_extract(nonce, prk4e3m);
}

}  // namespace edhoc
