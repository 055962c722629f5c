#include "edhoc/handshake.hpp"

namespace edhoc {

HandshakeResult run_handshake(const SuiteParams& initiator_suite,
                              const SuiteParams& responder_suite, uint64_t seed) {
    DetRng rng(seed);
    const SuiteParams& si = initiator_suite;
    const SuiteParams& sr = responder_suite;

    Bytes id_i = rng.bytes(si.id_len());
    Bytes id_r = rng.bytes(sr.id_len());
    KeyPair ltk_i = dh_keygen(si.curve, rng);
    KeyPair ltk_r = dh_keygen(sr.curve, rng);
    PeerRegistry reg;
    reg.add(id_i, ltk_i.pub);
    reg.add(id_r, ltk_r.pub);

    HandshakeResult out{
        Session::initiator(si, id_i, ltk_i, id_r, ltk_r.pub),
        Session::responder(sr, id_r, ltk_r),
        {}, false, false};

    auto m1 = out.initiator.start(rng);
    if (!m1) return out;
    out.flows.push_back(*m1);
    auto m2 = out.responder.deliver(*m1, rng, reg);
    if (!m2) return out;
    out.flows.push_back(*m2);
    auto m3 = out.initiator.deliver(*m2, rng, reg);
    if (!m3) return out;
    out.flows.push_back(*m3);
    auto m4 = out.responder.deliver(*m3, rng, reg);
    if (m4) {
        out.flows.push_back(*m4);
        out.initiator.deliver(*m4, rng, reg);
    }

    out.completed = out.initiator.status() == Status::Terminated &&
                    out.responder.status() == Status::Terminated;
    out.sk_match = out.completed &&
                   eq(*out.initiator.session_key(), *out.responder.session_key());
    return out;
}

}  // namespace edhoc
