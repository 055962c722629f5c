#include "edhoc/session.hpp"

namespace edhoc {

Session::Session(const SuiteParams& suite, Role role, Bytes own_id, KeyPair ltk)
    : suite_(suite), role_(role), own_id_(std::move(own_id)), ltk_(std::move(ltk)) {
    suite_.validate();
    if (own_id_.size() != suite_.id_len())
        throw std::invalid_argument("session: identity label length mismatch");
    step_ = role_ == Role::Initiator ? Step::IStart : Step::RAwaitMsg1;
}

Session Session::initiator(const SuiteParams& suite, Bytes own_id, KeyPair ltk,
                           Bytes peer_id, Bytes peer_pub) {
    Session s(suite, Role::Initiator, std::move(own_id), std::move(ltk));
    if (peer_id.size() != suite.id_len())
        throw std::invalid_argument("session: peer identity label length mismatch");
    s.peer_id_ = std::move(peer_id);
    s.peer_ltpub_ = std::move(peer_pub);
    return s;
}

Session Session::responder(const SuiteParams& suite, Bytes own_id, KeyPair ltk) {
    return Session(suite, Role::Responder, std::move(own_id), std::move(ltk));
}

void Session::set_ead(int index, Bytes value) {
    if (index < 1 || index > 4) throw std::invalid_argument("set_ead: index 1..4");
    ead_out_[index - 1] = std::move(value);
}

const Bytes& Session::received_ead(int index) const {
    if (index < 1 || index > 4) throw std::invalid_argument("received_ead: index 1..4");
    return ead_in_[index - 1];
}

std::optional<Bytes> Session::reject() {
    status_ = Status::Rejected;
    step_ = Step::Done;
    return std::nullopt;
}

std::optional<Bytes> Session::start(DetRng& rng) {
    if (step_ != Step::IStart) return std::nullopt;
    eph_ = dh_keygen(suite_.curve, rng);
    c_i_ = rng.bytes(suite_.cid_len());
    m1_ = encode_msg1({eph_.pub, c_i_, ead_out_[0]});
    step_ = Step::IAwaitMsg2;
    return m1_;
}

std::optional<Bytes> Session::deliver(BytesView wire, DetRng& rng,
                                      const PeerRegistry& reg) {
    switch (step_) {
        case Step::RAwaitMsg1: return run_resp1(wire, rng);
        case Step::IAwaitMsg2: return run_init2(wire);
        case Step::RAwaitMsg3: return run_resp2(wire, reg);
        case Step::IAwaitMsg4: return run_init3(wire);
        default: return std::nullopt;  // finished or not yet started
    }
}

std::optional<Bytes> Session::run_resp1(BytesView wire, DetRng& rng) {
    auto m = decode_msg1(wire);
    if (!m) return reject();

    eph_ = dh_keygen(suite_.curve, rng);
    c_r_ = rng.bytes(suite_.cid_len());
    peer_eph_ = m->x_e;
    c_i_ = m->c_i;
    ead_in_[0] = m->ead1;
    m1_.assign(wire.begin(), wire.end());

    th_.th2 = compute_th2(eph_.pub, c_r_, m1_);
    auto gxy = dh_shared(suite_.curve, eph_.secret, peer_eph_);
    if (!gxy) return reject();
    prk_.prk2e = derive_prk2e(suite_, th_.th2, *gxy);
    sid_ = encode_tuple({c_i_, c_r_, peer_eph_, eph_.pub});

    auto g_xe_ys = dh_shared(suite_.curve, ltk_.secret, peer_eph_);
    if (!g_xe_ys) return reject();
    prk_.salt3e2m = derive_salt3e2m(prk_.prk2e, th_.th2);
    prk_.prk3e2m = derive_prk3e2m(prk_.salt3e2m, *g_xe_ys);

    Bytes ctx2 = encode_ctx2(own_id_, th_.th2, ltk_.pub, ead_out_[1]);
    mac2_ = derive_mac2(prk_.prk3e2m, ctx2, suite_.mac_bits);
    m2_plain_ = concat({own_id_, mac2_, ead_out_[1]});
    Bytes sk2 = derive_sk2(prk_.prk2e, th_.th2, 8 * m2_plain_.size());
    Bytes c2 = otp_apply(sk2, m2_plain_);

    th_.th3 = compute_th3(th_.th2, m2_plain_);
    mat3_ = derive_message3_material(suite_, prk_.prk3e2m, th_.th3);
    prk_.salt4e3m = mat3_.salt4e3m;

    step_ = Step::RAwaitMsg3;
    return encode_msg2({eph_.pub, c2, c_r_});
}

std::optional<Bytes> Session::run_init2(BytesView wire) {
    auto m = decode_msg2(wire);
    if (!m) return reject();
    peer_eph_ = m->y_e;
    c_r_ = m->c_r;

    th_.th2 = compute_th2(peer_eph_, c_r_, m1_);
    auto gxy = dh_shared(suite_.curve, eph_.secret, peer_eph_);
    if (!gxy) return reject();
    prk_.prk2e = derive_prk2e(suite_, th_.th2, *gxy);

    Bytes sk2 = derive_sk2(prk_.prk2e, th_.th2, 8 * m->c2.size());
    m2_plain_ = otp_apply(sk2, m->c2);
    if (m2_plain_.size() < suite_.id_len() + suite_.mac_len()) return reject();
    BytesView plain(m2_plain_);
    BytesView id_r = plain.first(suite_.id_len());
    BytesView t2 = plain.subspan(suite_.id_len(), suite_.mac_len());
    BytesView ead2 = plain.subspan(suite_.id_len() + suite_.mac_len());
    // The activation fixed the intended peer; a different identity in
    // message 2 is an authentication failure, not a renegotiation.
    if (!eq(id_r, peer_id_)) return reject();
    ead_in_[1] = to_bytes(ead2);

    sid_ = encode_tuple({c_i_, c_r_, eph_.pub, peer_eph_});

    auto g_xe_ys = dh_shared(suite_.curve, eph_.secret, peer_ltpub_);
    if (!g_xe_ys) return reject();
    prk_.salt3e2m = derive_salt3e2m(prk_.prk2e, th_.th2);
    prk_.prk3e2m = derive_prk3e2m(prk_.salt3e2m, *g_xe_ys);

    Bytes ctx2 = encode_ctx2(id_r, th_.th2, peer_ltpub_, ead2);
    mac2_ = derive_mac2(prk_.prk3e2m, ctx2, suite_.mac_bits);
    if (!ct_equal(mac2_, t2)) return reject();
    status_ = Status::Accepted;

    th_.th3 = compute_th3(th_.th2, m2_plain_);
    mat3_ = derive_message3_material(suite_, prk_.prk3e2m, th_.th3);
    prk_.salt4e3m = mat3_.salt4e3m;

    auto g_xs_ye = dh_shared(suite_.curve, ltk_.secret, peer_eph_);
    if (!g_xs_ye) return reject();
    prk_.prk4e3m = derive_prk4e3m(prk_.salt4e3m, *g_xs_ye);

    Bytes ctx3 = encode_ctx3(own_id_, th_.th3, ltk_.pub, ead_out_[2]);
    mac3_ = derive_mac3(suite_, prk_.prk4e3m, ctx3);

    if (suite_.variant == Variant::Baseline) {
        m3_plain_ = concat({own_id_, mac3_, ead_out_[2]});
        Bytes c3 = aead_seal(mat3_.sk3, *mat3_.iv3, m3_plain_, {}, suite_.mac_bits);
        th_.th4 = compute_th4_baseline(th_.th3, m3_plain_);
        sk_ = derive_session_key(prk_.prk4e3m, th_.th4);
        status_ = Status::Terminated;
        step_ = Step::Done;
        return encode_msg3({std::move(c3), {}}, Variant::Baseline);
    }

    // Improved: identity under the pad, tag and EAD in clear, key
    // confirmation deferred to message 4.
    m3_plain_ = own_id_;
    Bytes c3 = otp_apply(mat3_.sk3, own_id_);
    m3_clear_ = concat({mac3_, ead_out_[2]});
    th_.th4 = compute_th4_improved(th_.th3, m3_plain_, m3_clear_);
    step_ = Step::IAwaitMsg4;
    return encode_msg3({std::move(c3), m3_clear_}, Variant::Improved);
}

std::optional<Bytes> Session::run_resp2(BytesView wire, const PeerRegistry& reg) {
    auto m = decode_msg3(wire, suite_.variant);
    if (!m) return reject();

    Bytes id_i, t3, ead3;
    if (suite_.variant == Variant::Baseline) {
        auto plain = aead_open(mat3_.sk3, *mat3_.iv3, m->c3, {}, suite_.mac_bits);
        if (!plain) return reject();
        m3_plain_ = std::move(*plain);
        if (m3_plain_.size() < suite_.id_len() + suite_.mac_len()) return reject();
        BytesView pv(m3_plain_);
        id_i = to_bytes(pv.first(suite_.id_len()));
        t3 = to_bytes(pv.subspan(suite_.id_len(), suite_.mac_len()));
        ead3 = to_bytes(pv.subspan(suite_.id_len() + suite_.mac_len()));
    } else {
        if (m->c3.size() != suite_.id_len()) return reject();
        if (m->clear3.size() < suite_.sec_len()) return reject();
        id_i = otp_apply(mat3_.sk3, m->c3);
        m3_plain_ = id_i;
        m3_clear_ = m->clear3;
        BytesView cv(m3_clear_);
        t3 = to_bytes(cv.first(suite_.sec_len()));
        ead3 = to_bytes(cv.subspan(suite_.sec_len()));
    }

    const Bytes* x_s = reg.find(id_i);
    if (!x_s) return reject();
    peer_id_ = id_i;
    peer_ltpub_ = *x_s;
    ead_in_[2] = ead3;

    auto g_xs_ye = dh_shared(suite_.curve, eph_.secret, peer_ltpub_);
    if (!g_xs_ye) return reject();
    prk_.prk4e3m = derive_prk4e3m(prk_.salt4e3m, *g_xs_ye);

    Bytes ctx3 = encode_ctx3(id_i, th_.th3, peer_ltpub_, ead3);
    mac3_ = derive_mac3(suite_, prk_.prk4e3m, ctx3);
    if (!ct_equal(mac3_, t3)) return reject();
    status_ = Status::Accepted;

    if (suite_.variant == Variant::Baseline) {
        th_.th4 = compute_th4_baseline(th_.th3, m3_plain_);
        sk_ = derive_session_key(prk_.prk4e3m, th_.th4);
        status_ = Status::Terminated;
        step_ = Step::Done;
        return std::nullopt;
    }

    th_.th4 = compute_th4_improved(th_.th3, m3_plain_, m3_clear_);
    Msg4Material mat4 = derive_message4_material(suite_, prk_.prk4e3m, th_.th4);
    Bytes c4 = aead_seal(mat4.sk4, mat4.iv4, {}, ead_out_[3], suite_.sec_bits);
    sk_ = derive_session_key(prk_.prk4e3m, th_.th4);
    status_ = Status::Terminated;
    step_ = Step::Done;
    return encode_msg4({std::move(c4), ead_out_[3]});
}

std::optional<Bytes> Session::run_init3(BytesView wire) {
    auto m = decode_msg4(wire);
    if (!m) return reject();
    Msg4Material mat4 = derive_message4_material(suite_, prk_.prk4e3m, th_.th4);
    auto plain = aead_open(mat4.sk4, mat4.iv4, m->c4, m->clear4, suite_.sec_bits);
    if (!plain || !plain->empty()) return reject();
    ead_in_[3] = m->clear4;
    sk_ = derive_session_key(prk_.prk4e3m, th_.th4);
    status_ = Status::Terminated;
    step_ = Step::Done;
    return std::nullopt;
}

Bytes Session::export_key(uint8_t label, BytesView app_context, size_t out_bits) const {
    if (status_ != Status::Terminated)
        throw std::logic_error("export_key: session not terminated");
    return exporter(prk_.prk4e3m, th_.th4, label, app_context, out_bits);
}

void Session::update_key(BytesView nonce) {
    if (status_ != Status::Terminated)
        throw std::logic_error("update_key: session not terminated");
    prk_.prk4e3m = key_update(prk_.prk4e3m, nonce);
    sk_ = derive_session_key(prk_.prk4e3m, th_.th4);
}

}  // namespace edhoc
