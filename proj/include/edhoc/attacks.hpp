#pragma once

#include <string>

#include "edhoc/session.hpp"

namespace edhoc {

// Outcome of a tag-forgery campaign. Trials are i.i.d.: one honest
// victim configuration, fresh ephemerals and an independent rng stream
// per trial.
struct AttackReport {
    std::string target;
    Variant variant = Variant::Baseline;
    int tag_bits = 0;
    uint64_t trials = 0;
    uint64_t successes = 0;
    // Successful trials whose best-effort session-key recovery matched
    // the victim's key. The protocol claim is that this stays 0.
    uint64_t sk_matches = 0;
    double expected_rate = 0;
    double rate = 0;
    double z = 0;
};

// "target=... variant=... ltag=... trials=... successes=... rate=... z=..."
std::string format_report_line(const AttackReport& r);

// Forged message 2 against an honest initiator: the adversary uses its
// own ephemeral (so it can derive the pad key legitimately) and guesses
// the tag it cannot compute without the responder's static key.
struct ForgedMsg2 {
    Bytes wire;
    KeyPair eph;          // adversary ephemeral
    Bytes c_r, th2, prk2e, guess;
};
ForgedMsg2 forge_message2(const SuiteParams& suite, BytesView msg1_wire,
                          BytesView responder_id, DetRng& adv_rng);

// Adversary impersonating a registered initiator identity toward an
// honest responder. It owns the ephemeral, so every key up to the
// message-3 encryption key is honestly derivable; only the tag is a
// guess, and the session key stays out of reach.
class InitiatorImpersonation {
public:
    static InitiatorImpersonation begin(const SuiteParams& suite, Bytes victim_id,
                                        Bytes responder_static_pub, DetRng& adv_rng);

    const Bytes& message1() const { return m1_; }
    // Builds message 3 with a guessed tag; nullopt if msg2 is malformed.
    std::optional<Bytes> forge_message3(BytesView msg2_wire, DetRng& adv_rng);
    // Best-effort key recovery, valid after forge_message3: substitutes
    // the one static-involving DH value the adversary can compute.
    const Bytes& sk_candidate() const { return sk_candidate_; }

private:
    SuiteParams suite_;
    Bytes victim_id_, responder_pub_;
    KeyPair eph_;
    Bytes c_i_, m1_, sk_candidate_;
};

// Random message 4 of the right shape for an adversary holding none of
// the confirmation key material.
Bytes forge_message4(const SuiteParams& suite, DetRng& adv_rng);

// Campaigns. Each validates the variant it attacks and reports the
// empirical rate against 2^-tag_bits.
AttackReport attack_responder_auth(const SuiteParams& suite, uint64_t trials,
                                   DetRng& rng);
AttackReport attack_initiator_auth(const SuiteParams& suite, uint64_t trials,
                                   DetRng& rng);
AttackReport attack_initiator_auth_improved(const SuiteParams& suite, uint64_t trials,
                                            DetRng& rng);

// The message-2 forgery replayed against the improved variant: the
// initiator accepts at the guessed-tag rate but the unforgeable fourth
// flow keeps it from terminating.
struct FourthFlowReport {
    int mac_bits = 0;
    int sec_bits = 0;
    uint64_t trials = 0;
    uint64_t accepted = 0;
    uint64_t terminated = 0;
    double accept_expected_rate = 0;
    double accept_rate = 0;
    double accept_z = 0;
};
std::string format_report_line(const FourthFlowReport& r);
FourthFlowReport attack_fourth_flow(const SuiteParams& suite, uint64_t trials,
                                    DetRng& rng);

// Message-3 payload bytes (field contents, excluding codec framing) for
// both variants at equal identity/EAD sizes, by formula and by
// measuring real handshakes. Equality holds exactly at lSEC = 2*lMAC.
struct WireCostRecord {
    size_t baseline_formula = 0;
    size_t improved_formula = 0;
    size_t baseline_measured = 0;
    size_t improved_measured = 0;
    bool formula_matches_measured = false;
    bool equal_across_variants = false;
};
WireCostRecord wire_cost_accounting(const SuiteParams& baseline_suite,
                                    const SuiteParams& improved_suite,
                                    BytesView ead3, uint64_t seed);

}  // namespace edhoc
