#include "edhoc/game.hpp"

#include <algorithm>

namespace edhoc {

namespace {
uint64_t skey(uint32_t u, uint32_t i) { return (uint64_t(u) << 32) | i; }
}  // namespace

Game::Game(const SuiteParams& suite, uint64_t seed)
    : suite_(suite), rng_(DetRng(seed).fork(0)) {
    suite_.validate();
    b_ = static_cast<int>(rng_.below(2));
}

void Game::log(std::string line) { trace_.push_back(std::move(line)); }

Game::SessRec* Game::find(uint32_t u, uint32_t i) {
    auto it = sessions_.find(skey(u, i));
    return it == sessions_.end() ? nullptr : &it->second;
}

const Game::SessRec* Game::find(uint32_t u, uint32_t i) const {
    auto it = sessions_.find(skey(u, i));
    return it == sessions_.end() ? nullptr : &it->second;
}

const Session* Game::session(uint32_t u, uint32_t i) const {
    const SessRec* r = find(u, i);
    return r ? &r->session : nullptr;
}

uint64_t Game::accept_time(uint32_t u, uint32_t i) const {
    const SessRec* r = find(u, i);
    return r ? r->t_acc : 0;
}

bool Game::is_tested(uint32_t u, uint32_t i) const {
    const SessRec* r = find(u, i);
    return r && r->tested;
}

bool Game::is_revealed(uint32_t u, uint32_t i) const {
    const SessRec* r = find(u, i);
    return r && r->revealed;
}

uint32_t Game::new_user() {
    uint32_t u = static_cast<uint32_t>(users_.size());
    Bytes id(suite_.id_len(), 0);
    for (size_t b = 0; b < std::min<size_t>(4, id.size()); ++b)
        id[id.size() - 1 - b] = static_cast<uint8_t>(u >> (8 * b));
    UserRec rec{id, dh_keygen(suite_.curve, rng_), kNever};
    registry_.add(rec.id, rec.ltk.pub);
    owner_by_id_[rec.id] = u;
    users_.push_back(std::move(rec));
    log("t=" + std::to_string(time_) + " q=newuser u=" + std::to_string(u));
    return u;
}

void Game::stamp_acceptance(SessRec& rec) {
    Status st = rec.session.status();
    if (rec.t_acc == 0 && (st == Status::Accepted || st == Status::Terminated)) {
        ++time_;
        rec.t_acc = time_;
    }
}

std::optional<Bytes> Game::activate_initiator(uint32_t u, uint32_t i, uint32_t peer_user) {
    if (u >= users_.size() || peer_user >= users_.size() || find(u, i)) return std::nullopt;
    const UserRec& self = users_[u];
    const UserRec& peer = users_[peer_user];
    SessRec rec{Session::initiator(suite_, self.id, self.ltk, peer.id, peer.ltk.pub),
                0, false, false};
    auto out = rec.session.start(rng_);
    sessions_.emplace(skey(u, i), std::move(rec));
    log("t=" + std::to_string(time_) + " q=send u=" + std::to_string(u) +
        " i=" + std::to_string(i) + " act=initiator peer=" + std::to_string(peer_user) +
        " out=" + std::to_string(out ? out->size() : 0));
    return out;
}

bool Game::activate_responder(uint32_t u, uint32_t i) {
    if (u >= users_.size() || find(u, i)) return false;
    const UserRec& self = users_[u];
    sessions_.emplace(skey(u, i),
                      SessRec{Session::responder(suite_, self.id, self.ltk), 0, false, false});
    log("t=" + std::to_string(time_) + " q=send u=" + std::to_string(u) +
        " i=" + std::to_string(i) + " act=responder");
    return true;
}

std::optional<Bytes> Game::send(uint32_t u, uint32_t i, BytesView message) {
    SessRec* rec = find(u, i);
    if (!rec) return std::nullopt;
    Status before = rec->session.status();
    auto out = rec->session.deliver(message, rng_, registry_);
    stamp_acceptance(*rec);
    log("t=" + std::to_string(time_) + " q=send u=" + std::to_string(u) +
        " i=" + std::to_string(i) + " status=" + to_string(before) + "->" +
        to_string(rec->session.status()) + " out=" +
        std::to_string(out ? out->size() : 0));
    return out;
}

std::optional<Bytes> Game::rev_ltk(uint32_t u) {
    if (u >= users_.size()) return std::nullopt;
    UserRec& rec = users_[u];
    if (rec.revltk == kNever) {
        ++time_;
        rec.revltk = time_;
    }
    log("t=" + std::to_string(time_) + " q=revltk u=" + std::to_string(u));
    return rec.ltk.secret;
}

std::optional<Bytes> Game::rev_sk(uint32_t u, uint32_t i) {
    SessRec* rec = find(u, i);
    // Requires an established key: accepted-but-unconfirmed sessions
    // (improved initiator before message 4) have nothing to reveal.
    bool ok = rec && rec->session.session_key().has_value();
    if (ok) rec->revealed = true;
    log("t=" + std::to_string(time_) + " q=revsk u=" + std::to_string(u) +
        " i=" + std::to_string(i) + " ok=" + (ok ? "1" : "0"));
    if (!ok) return std::nullopt;
    return *rec->session.session_key();
}

std::optional<Bytes> Game::test_key(uint32_t u, uint32_t i) {
    SessRec* rec = find(u, i);
    bool ok = rec && rec->session.session_key().has_value() && !rec->tested;
    log("t=" + std::to_string(time_) + " q=test u=" + std::to_string(u) +
        " i=" + std::to_string(i) + " ok=" + (ok ? "1" : "0"));
    if (!ok) return std::nullopt;
    rec->tested = true;
    if (b_ == 0) return *rec->session.session_key();
    return rng_.bytes(suite_.hash_len());
}

GameView Game::snapshot() const {
    GameView g;
    for (const auto& u : users_) {
        g.user_ids.push_back(u.id);
        g.revltk.push_back(u.revltk);
    }
    for (const auto& [k, rec] : sessions_) {
        SessionView v;
        v.user = static_cast<uint32_t>(k >> 32);
        v.role = rec.session.role();
        v.status = rec.session.status();
        v.sid = rec.session.sid();
        v.peer_id = rec.session.peer_id();
        v.sk = rec.session.session_key();
        v.t_acc = rec.t_acc;
        v.tested = rec.tested;
        v.revealed = rec.revealed;
        g.sessions.push_back(std::move(v));
    }
    return g;
}

namespace {

// Index of the user owning `id`, or nullopt for identities outside the game.
std::optional<uint32_t> owner_of(const GameView& g, const Bytes& id) {
    for (uint32_t u = 0; u < g.user_ids.size(); ++u)
        if (eq(g.user_ids[u], id)) return u;
    return std::nullopt;
}

uint64_t corruption(const GameView& g, uint32_t u) {
    return u < g.revltk.size() ? g.revltk[u] : kNeverCorrupted;
}

}  // namespace

bool sound_predicate(const GameView& g) {
    // At most two sessions per sid.
    std::map<Bytes, int> sid_count;
    for (const auto& s : g.sessions)
        if (!s.sid.empty() && ++sid_count[s.sid] > 2) return false;
    // Partnered accepted pairs: distinct roles, reciprocal peer
    // identities, equal established keys.
    for (size_t a = 0; a < g.sessions.size(); ++a) {
        for (size_t b = a + 1; b < g.sessions.size(); ++b) {
            const SessionView& sa = g.sessions[a];
            const SessionView& sb = g.sessions[b];
            if (sa.t_acc == 0 || sb.t_acc == 0) continue;
            if (sa.sid.empty() || !eq(sa.sid, sb.sid)) continue;
            if (sa.role == sb.role) return false;
            if (sa.user >= g.user_ids.size() || sb.user >= g.user_ids.size())
                continue;
            if (!eq(sa.peer_id, g.user_ids[sb.user]) ||
                !eq(sb.peer_id, g.user_ids[sa.user]))
                return false;
            if (sa.sk && sb.sk && !eq(*sa.sk, *sb.sk)) return false;
        }
    }
    return true;
}

bool fresh_predicate(const GameView& g) {
    for (size_t a = 0; a < g.sessions.size(); ++a) {
        const SessionView& s = g.sessions[a];
        if (!s.tested) continue;
        if (s.revealed) return false;
        auto owner = owner_of(g, s.peer_id);
        if (owner && corruption(g, *owner) < s.t_acc)
            return false;  // peer corrupted before acceptance
        if (s.sid.empty()) continue;
        for (size_t b = 0; b < g.sessions.size(); ++b) {
            if (b == a) continue;
            const SessionView& p = g.sessions[b];
            if (!p.sid.empty() && eq(p.sid, s.sid) && (p.tested || p.revealed))
                return false;  // partner tested or revealed
        }
    }
    return true;
}

bool explicit_auth_predicate(const GameView& g) {
    for (const auto& s : g.sessions) {
        if (s.status != Status::Terminated) continue;
        auto owner = owner_of(g, s.peer_id);
        if (!owner) continue;  // peer outside the game
        if (s.t_acc >= corruption(g, *owner)) continue;  // peer corrupted first
        bool partnered = false;
        for (const auto& p : g.sessions) {
            if (p.user != *owner || p.t_acc == 0) continue;
            if (eq(p.sid, s.sid) && p.role != s.role &&
                s.user < g.user_ids.size() && eq(p.peer_id, g.user_ids[s.user])) {
                partnered = true;
                break;
            }
        }
        if (!partnered) return false;
    }
    return true;
}

int finalize_key_privacy_output(const GameView& g, int challenge_bit, int guess) {
    if (!sound_predicate(g)) return 1;
    if (!fresh_predicate(g)) guess = 0;
    return guess == challenge_bit ? 1 : 0;
}

bool Game::sound() const { return sound_predicate(snapshot()); }

bool Game::fresh() const { return fresh_predicate(snapshot()); }

int Game::finalize_key_privacy(int guess) const {
    return finalize_key_privacy_output(snapshot(), b_, guess);
}

bool Game::finalize_explicit_auth() const {
    return explicit_auth_predicate(snapshot());
}

}  // namespace edhoc
