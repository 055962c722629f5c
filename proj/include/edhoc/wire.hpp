#pragma once

#include <optional>

#include "edhoc/bytes.hpp"
#include "edhoc/suite.hpp"

namespace edhoc {

// Wire format: one kind byte, then each field as u32_be length || bytes.
// Message 3 carries one field in the baseline variant (the sealed c_3)
// and two in the improved one (pad-encrypted identity, clear tag part),
// so decoding it needs the variant.
enum class MsgKind : uint8_t { Msg1 = 1, Msg2 = 2, Msg3 = 3, Msg4 = 4 };

struct Msg1 {
    Bytes x_e;   // initiator ephemeral public
    Bytes c_i;   // initiator connection identifier
    Bytes ead1;
};

struct Msg2 {
    Bytes y_e;   // responder ephemeral public
    Bytes c2;    // pad-encrypted (ID_R || t_2 || EAD_2)
    Bytes c_r;
};

struct Msg3 {
    Bytes c3;      // baseline: sealed (ID_I || t_3 || EAD_3); improved: padded ID_I
    Bytes clear3;  // improved only: t_3 || EAD_3
};

struct Msg4 {
    Bytes c4;      // AEAD tag over empty plaintext, aad = clear4
    Bytes clear4;  // EAD_4
};

Bytes encode_msg1(const Msg1& m);
Bytes encode_msg2(const Msg2& m);
Bytes encode_msg3(const Msg3& m, Variant variant);
Bytes encode_msg4(const Msg4& m);

std::optional<MsgKind> peek_kind(BytesView wire);

// Strict decoding: exact kind byte, well-formed length prefixes, no
// trailing bytes. nullopt on any violation.
std::optional<Msg1> decode_msg1(BytesView wire);
std::optional<Msg2> decode_msg2(BytesView wire);
std::optional<Msg3> decode_msg3(BytesView wire, Variant variant);
std::optional<Msg4> decode_msg4(BytesView wire);

}  // namespace edhoc
