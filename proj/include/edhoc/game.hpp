#pragma once

#include <map>
#include <string>
#include <vector>

#include "edhoc/session.hpp"

namespace edhoc {

inline constexpr uint64_t kNeverCorrupted = UINT64_MAX;

// Flat snapshot of the adversary-visible game state. The predicates are
// pure functions of this view, so tests can evaluate them on
// constructed states (including violations no honest execution reaches).
struct SessionView {
    uint32_t user = 0;
    Role role = Role::Initiator;
    Status status = Status::Running;
    Bytes sid;      // empty when unset
    Bytes peer_id;
    std::optional<Bytes> sk;
    uint64_t t_acc = 0;  // 0 = never accepted
    bool tested = false;
    bool revealed = false;
};

struct GameView {
    std::vector<Bytes> user_ids;
    std::vector<uint64_t> revltk;  // kNeverCorrupted when uncorrupted
    std::vector<SessionView> sessions;
};

// No sid shared three ways, and partnered accepted pairs have distinct
// roles, reciprocal peer identities and equal established keys.
bool sound_predicate(const GameView& g);
// No tested session is revealed, or was accepted after its peer's
// corruption, or has a tested/revealed partner.
bool fresh_predicate(const GameView& g);
// Every terminated session whose peer was uncorrupted at acceptance has
// a partnered accepted session.
bool explicit_auth_predicate(const GameView& g);
// Game output: 1 on unsound states; otherwise the guess (forced to 0
// when not fresh) compared against the challenge bit.
int finalize_key_privacy_output(const GameView& g, int challenge_bit, int guess);

// Key-privacy / explicit-authentication game environment: users with
// long-term keys, adversary-scheduled sessions, a logical clock that
// ticks on corruptions and acceptances, and the predicates the
// finalize functions evaluate. The adversary drives it through the
// query methods and may inject arbitrary message bytes via send().
class Game {
public:
    Game(const SuiteParams& suite, uint64_t seed);

    // Queries.
    uint32_t new_user();
    std::optional<Bytes> activate_initiator(uint32_t u, uint32_t i, uint32_t peer_user);
    bool activate_responder(uint32_t u, uint32_t i);
    std::optional<Bytes> send(uint32_t u, uint32_t i, BytesView message);
    std::optional<Bytes> rev_ltk(uint32_t u);
    std::optional<Bytes> rev_sk(uint32_t u, uint32_t i);
    std::optional<Bytes> test_key(uint32_t u, uint32_t i);

    // Predicates and finalize functions.
    bool sound() const;
    bool fresh() const;
    // Game output for a key-privacy adversary guessing `guess`: 1 on
    // unsound states, otherwise [guess' == b] with guess' forced to 0
    // for non-fresh test sets.
    int finalize_key_privacy(int guess) const;
    // True iff every terminated session whose peer was uncorrupted at
    // acceptance has a partnered accepted session.
    bool finalize_explicit_auth() const;

    // Inspection (harness/test side, not adversary capabilities).
    const SuiteParams& suite() const { return suite_; }
    size_t user_count() const { return users_.size(); }
    const Bytes& user_id(uint32_t u) const { return users_.at(u).id; }
    const Bytes& user_public(uint32_t u) const { return users_.at(u).ltk.pub; }
    uint64_t corruption_time(uint32_t u) const { return users_.at(u).revltk; }
    const PeerRegistry& registry() const { return registry_; }
    const Session* session(uint32_t u, uint32_t i) const;
    uint64_t accept_time(uint32_t u, uint32_t i) const;
    bool is_tested(uint32_t u, uint32_t i) const;
    bool is_revealed(uint32_t u, uint32_t i) const;
    uint64_t now() const { return time_; }
    int challenge_bit() const { return b_; }
    const std::vector<std::string>& trace() const { return trace_; }
    GameView snapshot() const;

    static constexpr uint64_t kNever = UINT64_MAX;  // revltk of uncorrupted users

private:
    struct UserRec {
        Bytes id;
        KeyPair ltk;
        uint64_t revltk = kNever;
    };
    struct SessRec {
        Session session;
        uint64_t t_acc = 0;  // 0 = never accepted
        bool tested = false;
        bool revealed = false;
    };

    SessRec* find(uint32_t u, uint32_t i);
    const SessRec* find(uint32_t u, uint32_t i) const;
    void stamp_acceptance(SessRec& rec);
    void log(std::string line);

    SuiteParams suite_;
    DetRng rng_;
    int b_;
    uint64_t time_ = 0;
    std::vector<UserRec> users_;
    std::map<Bytes, uint32_t> owner_by_id_;
    PeerRegistry registry_;
    std::map<uint64_t, SessRec> sessions_;  // key = u << 32 | i
    std::vector<std::string> trace_;
};

}  // namespace edhoc
