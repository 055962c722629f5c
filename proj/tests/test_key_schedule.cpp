// Key-schedule checks: every derivation formula against the oracle's
// independent encoders on random inputs, then a full handshake whose
// internal values are recomputed from scratch out of wire bytes, the
// parties' static secrets, and oracle primitives only.
#include <catch2/catch_amalgamated.hpp>

#include "edhoc/handshake.hpp"
#include "edhoc/key_schedule.hpp"
#include "edhoc/session.hpp"
#include "edhoc/wire.hpp"
#include "frozen_vectors.hpp"
#include "oracle.hpp"

using namespace edhoc;

namespace {

Bytes oracle_dh(CurveId curve, BytesView secret, BytesView pub) {
    if (curve == CurveId::X25519) return oracle::x25519_shared(secret, pub);
    auto r = oracle::p256_shared(secret, pub);
    REQUIRE(r.has_value());
    return *r;
}

SuiteParams make_suite(CurveId curve, Variant variant) {
    SuiteParams s;
    s.curve = curve;
    s.variant = variant;
    return s;
}

}  // namespace

TEST_CASE("derivation formulas match the oracle on random inputs", "[schedule]") {
    DetRng rng(0x4b444631);
    for (Variant variant : {Variant::Baseline, Variant::Improved}) {
        SuiteParams suite = make_suite(CurveId::X25519, variant);
        for (int i = 0; i < 20; ++i) {
            Bytes th2 = rng.bytes(32), gxy = rng.bytes(32);
            Bytes prk2e = derive_prk2e(suite, th2, gxy);
            if (variant == Variant::Baseline)
                REQUIRE(eq(prk2e, oracle::hkdf_extract({}, gxy)));
            else
                REQUIRE(eq(prk2e, oracle::hkdf_extract(th2, gxy)));

            size_t pt_len = 1 + rng.below(64);
            REQUIRE(eq(derive_sk2(prk2e, th2, 8 * pt_len),
                       oracle::kdf_expand(prk2e, 0, th2, 8 * pt_len)));
            Bytes salt3 = derive_salt3e2m(prk2e, th2);
            REQUIRE(eq(salt3, oracle::kdf_expand(prk2e, 1, th2, 256)));

            Bytes g2 = rng.bytes(32);
            Bytes prk3 = derive_prk3e2m(salt3, g2);
            REQUIRE(eq(prk3, oracle::hkdf_extract(salt3, g2)));

            Bytes id_r = rng.bytes(4), y_s = rng.bytes(32), ead2 = rng.bytes(rng.below(9));
            Bytes ctx2 = encode_ctx2(id_r, th2, y_s, ead2);
            REQUIRE(eq(ctx2, oracle::tuple({id_r, th2, y_s, ead2})));
            REQUIRE(eq(derive_mac2(prk3, ctx2, suite.mac_bits),
                       oracle::kdf_expand(prk3, 2, ctx2, suite.mac_bits)));

            Bytes th3 = rng.bytes(32);
            Msg3Material mat3 = derive_message3_material(suite, prk3, th3);
            if (variant == Variant::Baseline) {
                REQUIRE(eq(mat3.sk3, oracle::kdf_expand(prk3, 3, th3, 128)));
                REQUIRE(mat3.iv3.has_value());
                REQUIRE(eq(*mat3.iv3, oracle::kdf_expand(prk3, 4, th3, 104)));
            } else {
                REQUIRE(eq(mat3.sk3, oracle::kdf_expand(prk3, 3, th3, suite.id_bits)));
                REQUIRE_FALSE(mat3.iv3.has_value());
            }
            REQUIRE(eq(mat3.salt4e3m, oracle::kdf_expand(prk3, 5, th3, 256)));

            Bytes g3 = rng.bytes(32);
            Bytes prk4 = derive_prk4e3m(mat3.salt4e3m, g3);
            REQUIRE(eq(prk4, oracle::hkdf_extract(mat3.salt4e3m, g3)));

            Bytes id_i = rng.bytes(4), x_s = rng.bytes(32), ead3 = rng.bytes(rng.below(9));
            Bytes ctx3 = encode_ctx3(id_i, th3, x_s, ead3);
            REQUIRE(eq(ctx3, oracle::tuple({id_i, th3, x_s, ead3})));
            REQUIRE(eq(derive_mac3(suite, prk4, ctx3),
                       oracle::kdf_expand(prk4, 6, ctx3, suite.tag3_bits())));

            Bytes th4 = rng.bytes(32);
            if (variant == Variant::Improved) {
                Msg4Material mat4 = derive_message4_material(suite, prk4, th4);
                REQUIRE(eq(mat4.sk4, oracle::kdf_expand(prk4, 8, th4, 128)));
                REQUIRE(eq(mat4.iv4, oracle::kdf_expand(prk4, 9, th4, 104)));
            } else {
                REQUIRE_THROWS_AS(derive_message4_material(suite, prk4, th4),
                                  std::logic_error);
            }
            REQUIRE(eq(derive_session_key(prk4, th4),
                       oracle::kdf_expand(prk4, 7, th4, 256)));

            Bytes app = rng.bytes(rng.below(16));
            REQUIRE(eq(exporter(prk4, th4, 20, app, 128),
                       oracle::kdf_expand(prk4, 20, oracle::tuple({th4, app}), 128)));
            Bytes nonce = rng.bytes(16);
            REQUIRE(eq(key_update(prk4, nonce), oracle::hkdf_extract(nonce, prk4)));
        }
    }
}

TEST_CASE("transcript hashes match the oracle encoders", "[schedule]") {
    DetRng rng(0x54485348);
    for (int i = 0; i < 32; ++i) {
        Bytes y_e = rng.bytes(32), c_r = rng.bytes(4), m1 = rng.bytes(1 + rng.below(80));
        Bytes h1 = oracle::sha256(m1);
        REQUIRE(eq(compute_th2(y_e, c_r, m1),
                   oracle::sha256(oracle::tuple({y_e, c_r, h1}))));
        Bytes th2 = rng.bytes(32), m2 = rng.bytes(1 + rng.below(80));
        REQUIRE(eq(compute_th3(th2, m2), oracle::sha256(oracle::tuple({th2, m2}))));
        Bytes th3 = rng.bytes(32), m3 = rng.bytes(1 + rng.below(80));
        Bytes clear = rng.bytes(rng.below(40));
        REQUIRE(eq(compute_th4_baseline(th3, m3),
                   oracle::sha256(oracle::tuple({th3, m3}))));
        REQUIRE(eq(compute_th4_improved(th3, m3, clear),
                   oracle::sha256(oracle::tuple({th3, m3, clear}))));
        // The two-field and three-field encodings can never collide.
        REQUIRE_FALSE(eq(compute_th4_baseline(th3, m3),
                         compute_th4_improved(th3, m3, {})));
    }
}

TEST_CASE("derivation labels separate the key space", "[schedule]") {
    DetRng rng(0x4c41424c);
    Bytes prk = rng.bytes(32), ctx = rng.bytes(32);
    std::vector<Bytes> outs;
    for (uint8_t label = 0; label <= 9; ++label)
        outs.push_back(kdf_expand(prk, label, ctx, 128));
    for (size_t a = 0; a < outs.size(); ++a)
        for (size_t b = a + 1; b < outs.size(); ++b)
            REQUIRE_FALSE(eq(outs[a], outs[b]));
    // Context and length feed the info string too.
    Bytes ctx2 = ctx;
    ctx2[0] ^= 1;
    REQUIRE_FALSE(eq(kdf_expand(prk, 0, ctx2, 128), outs[0]));
    REQUIRE_FALSE(eq(kdf_expand(prk, 0, ctx, 120),
                     Bytes(outs[0].begin(), outs[0].begin() + 15)));
    CHECK_THROWS_AS(kdf_expand(prk, 0, ctx, 0), std::invalid_argument);
}

TEST_CASE("chain key divergence is a property of the improved salt", "[schedule]") {
    // Same DH output in two sessions with different transcripts: the
    // baseline chain key collides, the improved one cannot.
    DetRng rng(0x434f4c4c);
    SuiteParams base = make_suite(CurveId::X25519, Variant::Baseline);
    SuiteParams impr = make_suite(CurveId::X25519, Variant::Improved);
    for (int i = 0; i < 50; ++i) {
        Bytes gxy = rng.bytes(32);
        Bytes th2_a = rng.bytes(32), th2_b = rng.bytes(32);
        REQUIRE(eq(derive_prk2e(base, th2_a, gxy), derive_prk2e(base, th2_b, gxy)));
        REQUIRE_FALSE(eq(derive_prk2e(impr, th2_a, gxy), derive_prk2e(impr, th2_b, gxy)));
    }
}

TEST_CASE("exporter rejects reserved labels", "[schedule]") {
    Bytes prk(32, 1), th4(32, 2);
    for (uint8_t label : {0, 7, 9, 15})
        CHECK_THROWS_AS(exporter(prk, th4, label, {}, 128), std::invalid_argument);
    CHECK(exporter(prk, th4, 16, {}, 128).size() == 16);
    // Exporter context binds th4 and the application context as fields.
    Bytes a = exporter(prk, th4, 16, Bytes{1, 2}, 128);
    Bytes b = exporter(prk, th4, 16, Bytes{1}, 128);
    CHECK_FALSE(eq(a, b));
}

TEST_CASE("handshake internals recompute from wire bytes and oracle only",
          "[schedule]") {
    for (CurveId curve : {CurveId::X25519, CurveId::P256}) {
        for (Variant variant : {Variant::Baseline, Variant::Improved}) {
            SuiteParams suite = make_suite(curve, variant);
            DetRng rng(0x52454243 + static_cast<int>(curve) * 2 +
                       static_cast<int>(variant));
            Bytes id_i = rng.bytes(suite.id_len()), id_r = rng.bytes(suite.id_len());
            REQUIRE_FALSE(eq(id_i, id_r));
            KeyPair ltk_i = dh_keygen(curve, rng), ltk_r = dh_keygen(curve, rng);
            PeerRegistry reg;
            reg.add(id_i, ltk_i.pub);
            reg.add(id_r, ltk_r.pub);

            Session I = Session::initiator(suite, id_i, ltk_i, id_r, ltk_r.pub);
            Session R = Session::responder(suite, id_r, ltk_r);
            Bytes ead1 = {0xa1}, ead2 = {0xb2, 0xb3}, ead3 = {0xc4}, ead4 = {0xd5};
            I.set_ead(1, ead1);
            R.set_ead(2, ead2);
            I.set_ead(3, ead3);
            R.set_ead(4, ead4);

            auto m1 = I.start(rng);
            REQUIRE(m1.has_value());
            auto m2 = R.deliver(*m1, rng, reg);
            REQUIRE(m2.has_value());
            auto m3 = I.deliver(*m2, rng, reg);
            REQUIRE(m3.has_value());
            auto m4 = R.deliver(*m3, rng, reg);
            if (variant == Variant::Improved) {
                REQUIRE(m4.has_value());
                REQUIRE_FALSE(I.deliver(*m4, rng, reg).has_value());
            } else {
                REQUIRE_FALSE(m4.has_value());
            }
            REQUIRE(I.status() == Status::Terminated);
            REQUIRE(R.status() == Status::Terminated);
            REQUIRE(eq(I.sid(), R.sid()));
            REQUIRE(I.session_key().has_value());
            REQUIRE(R.session_key().has_value());
            REQUIRE(eq(*I.session_key(), *R.session_key()));
            REQUIRE(eq(I.peer_id(), id_r));
            REQUIRE(eq(R.peer_id(), id_i));
            REQUIRE(eq(I.received_ead(2), ead2));
            REQUIRE(eq(R.received_ead(1), ead1));
            REQUIRE(eq(R.received_ead(3), ead3));
            if (variant == Variant::Improved) REQUIRE(eq(I.received_ead(4), ead4));

            // Transcript chain from wire bytes via oracle hashing.
            auto w2 = decode_msg2(*m2);
            REQUIRE(w2.has_value());
            REQUIRE(eq(w2->y_e, R.ephemeral_public()));
            Bytes th2 = oracle::sha256(
                oracle::tuple({w2->y_e, w2->c_r, oracle::sha256(*m1)}));
            REQUIRE(eq(th2, I.transcript().th2));
            REQUIRE(eq(th2, R.transcript().th2));
            REQUIRE(eq(I.message2_plain(), R.message2_plain()));
            Bytes th3 = oracle::sha256(oracle::tuple({th2, I.message2_plain()}));
            REQUIRE(eq(th3, I.transcript().th3));
            Bytes th4 =
                variant == Variant::Baseline
                    ? oracle::sha256(oracle::tuple({th3, I.message3_plain()}))
                    : oracle::sha256(oracle::tuple(
                          {th3, I.message3_plain(), I.message3_clear()}));
            REQUIRE(eq(th4, I.transcript().th4));
            REQUIRE(eq(th4, R.transcript().th4));

            // PRK chain from static secrets + ephemeral publics via oracle.
            const PrkChain& pk = I.prks();
            REQUIRE(eq(pk.prk2e, R.prks().prk2e));
            REQUIRE(eq(pk.salt3e2m, oracle::kdf_expand(pk.prk2e, 1, th2, 256)));
            Bytes g_xe_ys = oracle_dh(curve, ltk_r.secret, I.ephemeral_public());
            REQUIRE(eq(pk.prk3e2m, oracle::hkdf_extract(pk.salt3e2m, g_xe_ys)));
            REQUIRE(eq(pk.salt4e3m, oracle::kdf_expand(pk.prk3e2m, 5, th3, 256)));
            Bytes g_xs_ye = oracle_dh(curve, ltk_i.secret, R.ephemeral_public());
            REQUIRE(eq(pk.prk4e3m, oracle::hkdf_extract(pk.salt4e3m, g_xs_ye)));

            // Authenticators and the session key.
            Bytes mac2 = oracle::kdf_expand(
                pk.prk3e2m, 2, oracle::tuple({id_r, th2, ltk_r.pub, ead2}),
                suite.mac_bits);
            REQUIRE(eq(mac2, I.mac2()));
            REQUIRE(eq(mac2, R.mac2()));
            Bytes mac3 = oracle::kdf_expand(
                pk.prk4e3m, 6, oracle::tuple({id_i, th3, ltk_i.pub, ead3}),
                suite.tag3_bits());
            REQUIRE(eq(mac3, I.mac3()));
            REQUIRE(eq(mac3, R.mac3()));
            REQUIRE(eq(*I.session_key(), oracle::kdf_expand(pk.prk4e3m, 7, th4, 256)));

            // Message-2 plaintext layout: ID_R || t_2 || EAD_2.
            REQUIRE(eq(I.message2_plain(),
                       concat({id_r, mac2, ead2})));

            auto w3 = decode_msg3(*m3, variant);
            REQUIRE(w3.has_value());
            if (variant == Variant::Baseline) {
                // c_3 opens under oracle CCM to ID_I || t_3 || EAD_3.
                Bytes sk3 = oracle::kdf_expand(pk.prk3e2m, 3, th3, 128);
                Bytes iv3 = oracle::kdf_expand(pk.prk3e2m, 4, th3, 104);
                auto plain = oracle::ccm_open(sk3, iv3, w3->c3, {},
                                              static_cast<size_t>(suite.mac_bits) / 8);
                REQUIRE(plain.has_value());
                REQUIRE(eq(*plain, concat({id_i, mac3, ead3})));
            } else {
                // c_3 is the identity under the derived pad; the tag and
                // EAD travel in clear.
                Bytes pad = oracle::kdf_expand(pk.prk3e2m, 3, th3, suite.id_bits);
                REQUIRE(eq(otp_apply(pad, w3->c3), id_i));
                REQUIRE(eq(w3->clear3, concat({mac3, ead3})));
                // Message 4 is an empty-payload AEAD over EAD_4.
                auto w4 = decode_msg4(*m4);
                REQUIRE(w4.has_value());
                REQUIRE(eq(w4->clear4, ead4));
                Bytes sk4 = oracle::kdf_expand(pk.prk4e3m, 8, th4, 128);
                Bytes iv4 = oracle::kdf_expand(pk.prk4e3m, 9, th4, 104);
                auto c4open = oracle::ccm_open(sk4, iv4, w4->c4, w4->clear4,
                                               static_cast<size_t>(suite.sec_bits) / 8);
                REQUIRE(c4open.has_value());
                REQUIRE(c4open->empty());
            }

            // Exporter and rekeying agree across parties and routes.
            Bytes app = {0x01, 0x02, 0x03};
            Bytes exp_i = I.export_key(33, app, 256);
            REQUIRE(eq(exp_i, R.export_key(33, app, 256)));
            REQUIRE(eq(exp_i, oracle::kdf_expand(pk.prk4e3m, 33,
                                                 oracle::tuple({th4, app}), 256)));
            Bytes old_sk = *I.session_key();
            Bytes old_prk4 = pk.prk4e3m;  // pk is a live reference into I
            Bytes nonce = {0x0f, 0x0e, 0x0d};
            I.update_key(nonce);
            R.update_key(nonce);
            REQUIRE(eq(*I.session_key(), *R.session_key()));
            REQUIRE_FALSE(eq(*I.session_key(), old_sk));
            Bytes new_prk = oracle::hkdf_extract(nonce, old_prk4);
            REQUIRE(eq(pk.prk4e3m, new_prk));
            REQUIRE(eq(*I.session_key(), oracle::kdf_expand(new_prk, 7, th4, 256)));
        }
    }
}
