#pragma once

#include <map>
#include <optional>

#include "edhoc/bytes.hpp"
#include "edhoc/crypto.hpp"
#include "edhoc/key_schedule.hpp"
#include "edhoc/suite.hpp"
#include "edhoc/wire.hpp"

namespace edhoc {

enum class Role { Initiator, Responder };
enum class Status { Running, Accepted, Terminated, Rejected };

inline const char* to_string(Role r) {
    return r == Role::Initiator ? "initiator" : "responder";
}
inline const char* to_string(Status s) {
    switch (s) {
        case Status::Running: return "running";
        case Status::Accepted: return "accepted";
        case Status::Terminated: return "terminated";
        default: return "rejected";
    }
}

struct TranscriptState {
    Bytes th2, th3, th4;
};

struct PrkChain {
    Bytes prk2e, salt3e2m, prk3e2m, salt4e3m, prk4e3m;
};

// Long-term public keys by identity label. Read-only during handshakes.
class PeerRegistry {
public:
    void add(Bytes id, Bytes pub) { map_[std::move(id)] = std::move(pub); }
    const Bytes* find(BytesView id) const {
        auto it = map_.find(Bytes(id.begin(), id.end()));
        return it == map_.end() ? nullptr : &it->second;
    }

private:
    std::map<Bytes, Bytes> map_;
};

// One handshake endpoint. start() emits message 1 (initiator only);
// deliver() consumes one incoming message and returns the reply, if the
// step produces one. Outcomes surface through status(): protocol
// failures (bad decode, tag mismatch, unknown identity, bad DH input)
// move the session to Rejected; out-of-order deliveries and deliveries
// to finished sessions return nullopt without touching state.
class Session {
public:
    static Session initiator(const SuiteParams& suite, Bytes own_id, KeyPair ltk,
                             Bytes peer_id, Bytes peer_pub);
    static Session responder(const SuiteParams& suite, Bytes own_id, KeyPair ltk);

    std::optional<Bytes> start(DetRng& rng);
    std::optional<Bytes> deliver(BytesView wire, DetRng& rng, const PeerRegistry& reg);

    // Outgoing associated data, set before the handshake reaches the
    // flow that carries it. Index 1..4.
    void set_ead(int index, Bytes value);

    const SuiteParams& suite() const { return suite_; }
    Role role() const { return role_; }
    Status status() const { return status_; }
    const Bytes& own_id() const { return own_id_; }
    const Bytes& peer_id() const { return peer_id_; }
    // Session identifier (C_I, C_R, X_e, Y_e), tuple-encoded; empty until set.
    const Bytes& sid() const { return sid_; }
    const std::optional<Bytes>& session_key() const { return sk_; }

    const TranscriptState& transcript() const { return th_; }
    const PrkChain& prks() const { return prk_; }
    const Bytes& mac2() const { return mac2_; }
    const Bytes& mac3() const { return mac3_; }
    const Bytes& message1_bytes() const { return m1_; }
    const Bytes& message2_plain() const { return m2_plain_; }
    const Bytes& message3_plain() const { return m3_plain_; }
    const Bytes& message3_clear() const { return m3_clear_; }
    const Bytes& ephemeral_public() const { return eph_.pub; }
    const Bytes& received_ead(int index) const;

    // Application key export; requires a terminated session.
    Bytes export_key(uint8_t label, BytesView app_context, size_t out_bits) const;
    // Replaces the final chain key with extract(nonce, chain key) and
    // re-derives the session key; requires a terminated session.
    void update_key(BytesView nonce);

private:
    Session(const SuiteParams& suite, Role role, Bytes own_id, KeyPair ltk);

    enum class Step { IStart, IAwaitMsg2, IAwaitMsg4, RAwaitMsg1, RAwaitMsg3, Done };

    std::optional<Bytes> reject();
    std::optional<Bytes> run_resp1(BytesView wire, DetRng& rng);
    std::optional<Bytes> run_init2(BytesView wire);
    std::optional<Bytes> run_resp2(BytesView wire, const PeerRegistry& reg);
    std::optional<Bytes> run_init3(BytesView wire);

    SuiteParams suite_;
    Role role_;
    Status status_ = Status::Running;
    Step step_;

    Bytes own_id_;
    KeyPair ltk_;
    Bytes peer_id_;     // fixed at activation (initiator), learned from m_3 (responder)
    Bytes peer_ltpub_;

    KeyPair eph_;
    Bytes peer_eph_;
    Bytes c_i_, c_r_;
    Bytes sid_;

    Bytes m1_;        // exact wire bytes of message 1
    Bytes m2_plain_;  // protected plaintext of message 2
    Bytes m3_plain_;  // baseline sealed plaintext / improved padded identity
    Bytes m3_clear_;  // improved: t_3 || EAD_3

    TranscriptState th_;
    PrkChain prk_;
    Msg3Material mat3_;
    Bytes mac2_, mac3_;
    std::optional<Bytes> sk_;

    Bytes ead_out_[4];
    Bytes ead_in_[4];
};

}  // namespace edhoc
