#include "edhoc/wire.hpp"

namespace edhoc {

namespace {

// Messages are bounded well below this; the cap stops nonsense lengths
// from driving allocations.
constexpr size_t kMaxFieldLen = 1u << 16;

Bytes encode(MsgKind kind, std::initializer_list<BytesView> fields) {
    Bytes out;
    size_t total = 1;
    for (auto f : fields) total += 4 + f.size();
    out.reserve(total);
    out.push_back(static_cast<uint8_t>(kind));
    for (auto f : fields) {
        put_u32be(out, static_cast<uint32_t>(f.size()));
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

// Reads exactly `n` length-prefixed fields covering the whole input.
bool decode_fields(BytesView wire, MsgKind kind, Bytes* fields, size_t n) {
    if (wire.empty() || wire[0] != static_cast<uint8_t>(kind)) return false;
    size_t pos = 1;
    for (size_t i = 0; i < n; ++i) {
        if (wire.size() - pos < 4) return false;
        uint32_t len = read_u32be(wire.data() + pos);
        pos += 4;
        if (len > kMaxFieldLen || wire.size() - pos < len) return false;
        fields[i].assign(wire.begin() + pos, wire.begin() + pos + len);
        pos += len;
    }
    return pos == wire.size();
}

}  // namespace

Bytes encode_msg1(const Msg1& m) {
    return encode(MsgKind::Msg1, {m.x_e, m.c_i, m.ead1});
}

Bytes encode_msg2(const Msg2& m) {
    return encode(MsgKind::Msg2, {m.y_e, m.c2, m.c_r});
}

Bytes encode_msg3(const Msg3& m, Variant variant) {
    if (variant == Variant::Baseline) return encode(MsgKind::Msg3, {m.c3});
    return encode(MsgKind::Msg3, {m.c3, m.clear3});
}

Bytes encode_msg4(const Msg4& m) {
    return encode(MsgKind::Msg4, {m.c4, m.clear4});
}

std::optional<MsgKind> peek_kind(BytesView wire) {
    if (wire.empty()) return std::nullopt;
    uint8_t k = wire[0];
    if (k < 1 || k > 4) return std::nullopt;
    return static_cast<MsgKind>(k);
}

std::optional<Msg1> decode_msg1(BytesView wire) {
    Msg1 m;
    Bytes f[3];
    if (!decode_fields(wire, MsgKind::Msg1, f, 3)) return std::nullopt;
    m.x_e = std::move(f[0]);
    m.c_i = std::move(f[1]);
    m.ead1 = std::move(f[2]);
    return m;
}

std::optional<Msg2> decode_msg2(BytesView wire) {
    Msg2 m;
    Bytes f[3];
    if (!decode_fields(wire, MsgKind::Msg2, f, 3)) return std::nullopt;
    m.y_e = std::move(f[0]);
    m.c2 = std::move(f[1]);
    m.c_r = std::move(f[2]);
    return m;
}

std::optional<Msg3> decode_msg3(BytesView wire, Variant variant) {
    Msg3 m;
    if (variant == Variant::Baseline) {
        Bytes f[1];
        if (!decode_fields(wire, MsgKind::Msg3, f, 1)) return std::nullopt;
        m.c3 = std::move(f[0]);
    } else {
        Bytes f[2];
        if (!decode_fields(wire, MsgKind::Msg3, f, 2)) return std::nullopt;
        m.c3 = std::move(f[0]);
        m.clear3 = std::move(f[1]);
    }
    return m;
}

std::optional<Msg4> decode_msg4(BytesView wire) {
    Msg4 m;
    Bytes f[2];
    if (!decode_fields(wire, MsgKind::Msg4, f, 2)) return std::nullopt;
    m.c4 = std::move(f[0]);
    m.clear4 = std::move(f[1]);
    return m;
}

}  // namespace edhoc
