#include "edhoc/attacks.hpp"

#include <cinttypes>
#include <cstdarg>
#include <cstdio>

#include "edhoc/handshake.hpp"
#include "edhoc/stats.hpp"

namespace edhoc {

namespace {

void finish(AttackReport& r) {
    r.expected_rate = std::ldexp(1.0, -r.tag_bits);
    r.rate = r.trials ? static_cast<double>(r.successes) / static_cast<double>(r.trials) : 0;
    r.z = binomial_z(r.trials, r.successes, r.expected_rate);
}

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

struct Victims {
    Bytes id_i, id_r;
    KeyPair ltk_i, ltk_r;
    PeerRegistry reg;
};

Victims make_victims(const SuiteParams& suite, DetRng& setup) {
    Victims v;
    v.id_i = setup.bytes(suite.id_len());
    v.id_r = setup.bytes(suite.id_len());
    v.ltk_i = dh_keygen(suite.curve, setup);
    v.ltk_r = dh_keygen(suite.curve, setup);
    v.reg.add(v.id_i, v.ltk_i.pub);
    v.reg.add(v.id_r, v.ltk_r.pub);
    return v;
}

}  // namespace

std::string format_report_line(const AttackReport& r) {
    return fmt("target=%s variant=%s ltag=%d trials=%" PRIu64 " successes=%" PRIu64
               " rate=%.10g z=%.4f",
               r.target.c_str(), to_string(r.variant), r.tag_bits, r.trials,
               r.successes, r.rate, r.z);
}

std::string format_report_line(const FourthFlowReport& r) {
    return fmt("target=fourth-flow variant=improved ltag=%d trials=%" PRIu64
               " accepted=%" PRIu64 " terminated=%" PRIu64
               " accept_rate=%.10g accept_z=%.4f",
               r.mac_bits, r.trials, r.accepted, r.terminated, r.accept_rate,
               r.accept_z);
}

ForgedMsg2 forge_message2(const SuiteParams& suite, BytesView msg1_wire,
                          BytesView responder_id, DetRng& adv_rng) {
    auto m1 = decode_msg1(msg1_wire);
    if (!m1) throw std::invalid_argument("forge_message2: undecodable message 1");
    ForgedMsg2 f;
    f.eph = dh_keygen(suite.curve, adv_rng);
    f.c_r = adv_rng.bytes(suite.cid_len());
    f.th2 = compute_th2(f.eph.pub, f.c_r, msg1_wire);
    auto gxy = dh_shared(suite.curve, f.eph.secret, m1->x_e);
    if (!gxy) throw std::invalid_argument("forge_message2: bad initiator ephemeral");
    f.prk2e = derive_prk2e(suite, f.th2, *gxy);
    // The tag key sits behind the responder's static DH; guess it.
    f.guess = adv_rng.bytes(suite.mac_len());
    mask_to_bits(f.guess, static_cast<size_t>(suite.mac_bits));
    Bytes m2_plain = concat({responder_id, f.guess, {}});
    Bytes sk2 = derive_sk2(f.prk2e, f.th2, 8 * m2_plain.size());
    f.wire = encode_msg2({f.eph.pub, otp_apply(sk2, m2_plain), f.c_r});
    return f;
}

InitiatorImpersonation InitiatorImpersonation::begin(const SuiteParams& suite,
                                                     Bytes victim_id,
                                                     Bytes responder_static_pub,
                                                     DetRng& adv_rng) {
    InitiatorImpersonation a;
    a.suite_ = suite;
    a.victim_id_ = std::move(victim_id);
    a.responder_pub_ = std::move(responder_static_pub);
    a.eph_ = dh_keygen(suite.curve, adv_rng);
    a.c_i_ = adv_rng.bytes(suite.cid_len());
    a.m1_ = encode_msg1({a.eph_.pub, a.c_i_, {}});
    return a;
}

std::optional<Bytes> InitiatorImpersonation::forge_message3(BytesView msg2_wire,
                                                            DetRng& adv_rng) {
    auto m2 = decode_msg2(msg2_wire);
    if (!m2) return std::nullopt;
    Bytes th2 = compute_th2(m2->y_e, m2->c_r, m1_);
    auto gxy = dh_shared(suite_.curve, eph_.secret, m2->y_e);
    if (!gxy) return std::nullopt;
    Bytes prk2e = derive_prk2e(suite_, th2, *gxy);
    Bytes sk2 = derive_sk2(prk2e, th2, 8 * m2->c2.size());
    Bytes m2_plain = otp_apply(sk2, m2->c2);

    // Owning the session ephemeral makes the whole message-3 encryption
    // chain available; the responder's static only enters via Y_s here.
    auto g_xe_ys = dh_shared(suite_.curve, eph_.secret, responder_pub_);
    if (!g_xe_ys) return std::nullopt;
    Bytes salt3e2m = derive_salt3e2m(prk2e, th2);
    Bytes prk3e2m = derive_prk3e2m(salt3e2m, *g_xe_ys);
    Bytes th3 = compute_th3(th2, m2_plain);
    Msg3Material mat3 = derive_message3_material(suite_, prk3e2m, th3);

    // The tag key needs g^(x_s y_e); without the victim's static secret
    // the only option is a guess.
    Bytes guess = adv_rng.bytes(suite_.tag3_len());
    mask_to_bits(guess, static_cast<size_t>(suite_.tag3_bits()));
    Bytes wire, th4;
    if (suite_.variant == Variant::Baseline) {
        Bytes m3_plain = concat({victim_id_, guess, {}});
        Bytes c3 = aead_seal(mat3.sk3, *mat3.iv3, m3_plain, {}, suite_.mac_bits);
        th4 = compute_th4_baseline(th3, m3_plain);
        wire = encode_msg3({std::move(c3), {}}, Variant::Baseline);
    } else {
        Bytes c3 = otp_apply(mat3.sk3, victim_id_);
        th4 = compute_th4_improved(th3, victim_id_, guess);
        wire = encode_msg3({std::move(c3), guess}, Variant::Improved);
    }

    // Best-effort session-key recovery: stand in g^(x_e y_s) for the
    // unreachable g^(x_s y_e) and run the chain to the end.
    Bytes prk4e3m_guess = derive_prk4e3m(mat3.salt4e3m, *g_xe_ys);
    sk_candidate_ = derive_session_key(prk4e3m_guess, th4);
    return wire;
}

Bytes forge_message4(const SuiteParams& suite, DetRng& adv_rng) {
    // c_4 is an AEAD tag over the empty plaintext; all the adversary can
    // do is emit random bytes of the right shape (masked like real tags).
    Bytes c4 = adv_rng.bytes(suite.sec_len());
    mask_to_bits(c4, static_cast<size_t>(suite.sec_bits));
    return encode_msg4({std::move(c4), {}});
}

AttackReport attack_responder_auth(const SuiteParams& suite, uint64_t trials,
                                   DetRng& rng) {
    if (suite.variant != Variant::Baseline)
        throw std::invalid_argument("attack_responder_auth: baseline variant only");
    DetRng setup = rng.fork(0);
    Victims v = make_victims(suite, setup);
    AttackReport r{"responder-auth", suite.variant, suite.mac_bits, trials, 0, 0, 0, 0, 0};
    for (uint64_t t = 0; t < trials; ++t) {
        DetRng trial = rng.fork(1 + t);
        Session victim =
            Session::initiator(suite, v.id_i, v.ltk_i, v.id_r, v.ltk_r.pub);
        Bytes m1 = *victim.start(trial);
        ForgedMsg2 f = forge_message2(suite, m1, v.id_r, trial);
        victim.deliver(f.wire, trial, v.reg);
        if (victim.status() == Status::Terminated || victim.status() == Status::Accepted)
            ++r.successes;
    }
    finish(r);
    return r;
}

namespace {

AttackReport initiator_auth_campaign(const SuiteParams& suite, uint64_t trials,
                                     DetRng& rng, const char* target) {
    DetRng setup = rng.fork(0);
    Victims v = make_victims(suite, setup);
    AttackReport r{target, suite.variant, suite.tag3_bits(), trials, 0, 0, 0, 0, 0};
    for (uint64_t t = 0; t < trials; ++t) {
        DetRng trial = rng.fork(1 + t);
        Session victim = Session::responder(suite, v.id_r, v.ltk_r);
        auto adv = InitiatorImpersonation::begin(suite, v.id_i, v.ltk_r.pub, trial);
        auto m2 = victim.deliver(adv.message1(), trial, v.reg);
        if (!m2) continue;
        auto m3 = adv.forge_message3(*m2, trial);
        if (!m3) continue;
        victim.deliver(*m3, trial, v.reg);
        if (victim.status() == Status::Terminated) {
            ++r.successes;
            if (victim.session_key() && eq(adv.sk_candidate(), *victim.session_key()))
                ++r.sk_matches;
        }
    }
    finish(r);
    return r;
}

}  // namespace

AttackReport attack_initiator_auth(const SuiteParams& suite, uint64_t trials,
                                   DetRng& rng) {
    if (suite.variant != Variant::Baseline)
        throw std::invalid_argument("attack_initiator_auth: baseline variant only");
    return initiator_auth_campaign(suite, trials, rng, "initiator-auth");
}

AttackReport attack_initiator_auth_improved(const SuiteParams& suite, uint64_t trials,
                                            DetRng& rng) {
    if (suite.variant != Variant::Improved)
        throw std::invalid_argument("attack_initiator_auth_improved: improved variant only");
    return initiator_auth_campaign(suite, trials, rng, "initiator-auth-improved");
}

FourthFlowReport attack_fourth_flow(const SuiteParams& suite, uint64_t trials,
                                    DetRng& rng) {
    if (suite.variant != Variant::Improved)
        throw std::invalid_argument("attack_fourth_flow: improved variant only");
    DetRng setup = rng.fork(0);
    Victims v = make_victims(suite, setup);
    FourthFlowReport r;
    r.mac_bits = suite.mac_bits;
    r.sec_bits = suite.sec_bits;
    r.trials = trials;
    for (uint64_t t = 0; t < trials; ++t) {
        DetRng trial = rng.fork(1 + t);
        Session victim =
            Session::initiator(suite, v.id_i, v.ltk_i, v.id_r, v.ltk_r.pub);
        Bytes m1 = *victim.start(trial);
        ForgedMsg2 f = forge_message2(suite, m1, v.id_r, trial);
        victim.deliver(f.wire, trial, v.reg);
        if (victim.status() != Status::Accepted) continue;
        ++r.accepted;
        victim.deliver(forge_message4(suite, trial), trial, v.reg);
        if (victim.status() == Status::Terminated) ++r.terminated;
    }
    r.accept_expected_rate = std::ldexp(1.0, -suite.mac_bits);
    r.accept_rate =
        trials ? static_cast<double>(r.accepted) / static_cast<double>(trials) : 0;
    r.accept_z = binomial_z(trials, r.accepted, r.accept_expected_rate);
    return r;
}

WireCostRecord wire_cost_accounting(const SuiteParams& baseline_suite,
                                    const SuiteParams& improved_suite,
                                    BytesView ead3, uint64_t seed) {
    if (baseline_suite.variant != Variant::Baseline ||
        improved_suite.variant != Variant::Improved)
        throw std::invalid_argument("wire_cost_accounting: pass (baseline, improved)");
    if (baseline_suite.id_bits != improved_suite.id_bits)
        throw std::invalid_argument("wire_cost_accounting: identity sizes must match");

    WireCostRecord rec;
    rec.baseline_formula = baseline_suite.id_len() + baseline_suite.mac_len() +
                           ead3.size() + baseline_suite.mac_len();
    rec.improved_formula =
        improved_suite.id_len() + improved_suite.sec_len() + ead3.size();

    auto measure = [&](const SuiteParams& suite) -> size_t {
        SuiteParams s = suite;
        DetRng rng(seed);
        Bytes id_i = rng.bytes(s.id_len());
        Bytes id_r = rng.bytes(s.id_len());
        KeyPair ltk_i = dh_keygen(s.curve, rng);
        KeyPair ltk_r = dh_keygen(s.curve, rng);
        PeerRegistry reg;
        reg.add(id_i, ltk_i.pub);
        reg.add(id_r, ltk_r.pub);
        Session init = Session::initiator(s, id_i, ltk_i, id_r, ltk_r.pub);
        Session resp = Session::responder(s, id_r, ltk_r);
        init.set_ead(3, to_bytes(ead3));
        auto m1 = init.start(rng);
        auto m2 = resp.deliver(*m1, rng, reg);
        auto m3 = init.deliver(*m2, rng, reg);
        auto parsed = decode_msg3(*m3, s.variant);
        if (!parsed) throw std::logic_error("wire_cost_accounting: handshake failed");
        return parsed->c3.size() + parsed->clear3.size();
    };
    rec.baseline_measured = measure(baseline_suite);
    rec.improved_measured = measure(improved_suite);
    rec.formula_matches_measured = rec.baseline_measured == rec.baseline_formula &&
                                   rec.improved_measured == rec.improved_formula;
    rec.equal_across_variants = rec.baseline_measured == rec.improved_measured;
    return rec;
}

}  // namespace edhoc
