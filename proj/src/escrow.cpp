// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/escrow.hpp"

#include <sodium.h>

#include <algorithm>

namespace pubfab::escrow {

using canonical::Value;

namespace {

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw DomainError("CryptoInit", "libsodium initialization failed");
}

constexpr uint64_t kPoolExtension = 16;

}  // namespace

const char* investigation_state_name(Investigation::State s) {
    switch (s) {
        case Investigation::State::open: return "open";
        case Investigation::State::resolved_retraction: return "resolved_retraction";
        case Investigation::State::resolved_clarification: return "resolved_clarification";
        case Investigation::State::escrow_nonresponsive: return "escrow_nonresponsive";
    }
    return "?";
}

EscrowService::EscrowService(std::string board_label, std::vector<model::Identity> board,
                             uint64_t seed)
    : label_(std::move(board_label)), board_(std::move(board)), seed_(seed), rng_(seed) {}

uint64_t EscrowService::draw_pseudonym_number() {
    if (number_pool_.empty()) {
        // Extend the number range and shuffle it; assignment order then says
        // nothing about registration order.
        for (uint64_t i = 0; i < kPoolExtension; ++i) {
            number_pool_.push_back(++pool_high_);
        }
        rng_.shuffle(number_pool_);
    }
    uint64_t n = number_pool_.back();
    number_pool_.pop_back();
    return n;
}

std::string EscrowService::register_identity(const model::Identity& identity) {
    std::string pseudonym =
        "Anonymous reviewer " + std::to_string(draw_pseudonym_number()) + " mandated by " +
        label_;
    sealed_.emplace(pseudonym, identity);
    return pseudonym;
}

bool EscrowService::knows_pseudonym(const std::string& pseudonym) const {
    return sealed_.contains(pseudonym);
}

void EscrowService::attribute_review(const Fingerprint& review_fp,
                                     const std::string& pseudonym) {
    if (!sealed_.contains(pseudonym)) {
        throw UnknownInvestigation("pseudonym was not issued by this escrow");
    }
    review_attribution_[review_fp] = pseudonym;
}

std::optional<std::string> EscrowService::pseudonym_for_review(
    const Fingerprint& review_fp) const {
    auto it = review_attribution_.find(review_fp);
    if (it == review_attribution_.end()) return std::nullopt;
    return it->second;
}

const Investigation& EscrowService::open_investigation(
    std::vector<model::Identity> petitioners, std::vector<model::DocumentHandle> reviews,
    const Date& now, size_t min_petitioners, int64_t window_days) {
    // Pairwise distinct petitioners, none of whom sit on the board.
    std::vector<std::string> names;
    for (const auto& p : petitioners) names.push_back(p.display_name);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
        throw PetitionTooSmall("petitioners must be pairwise distinct");
    }
    if (petitioners.size() < min_petitioners) {
        throw PetitionTooSmall(std::to_string(petitioners.size()) + " of " +
                               std::to_string(min_petitioners) + " required petitioners");
    }
    for (const auto& p : petitioners) {
        for (const auto& member : board_) {
            if (p.display_name == member.display_name) {
                throw PetitionerOnBoard(p.display_name + " sits on this escrow board");
            }
        }
    }

    Investigation inv;
    inv.id = next_investigation_id_++;
    inv.petitioners = std::move(petitioners);
    inv.reviews_in_question = std::move(reviews);
    inv.state = Investigation::State::open;
    inv.opened = now;
    inv.deadline = now.plus_days(window_days);
    investigations_.push_back(std::move(inv));
    transitions_.push_back(
        Transition{investigations_.back().id, Investigation::State::open, now});
    return investigations_.back();
}

Investigation* EscrowService::find_open(uint64_t id) {
    for (auto& inv : investigations_) {
        if (inv.id == id) {
            if (inv.state != Investigation::State::open) {
                throw UnknownInvestigation("investigation " + std::to_string(id) +
                                           " is already closed");
            }
            return &inv;
        }
    }
    throw UnknownInvestigation("no investigation with id " + std::to_string(id));
}

std::vector<model::ReviewObject> EscrowService::resolve_investigation(
    uint64_t id, ResolutionAction action) {
    Investigation* inv = find_open(id);
    std::vector<model::ReviewObject> templates;
    if (action == ResolutionAction::retraction) {
        // The retraction mechanism is publication of counter-reviews by the
        // same (pseudonymous) author.
        for (const auto& handle : inv->reviews_in_question) {
            auto pseudonym = pseudonym_for_review(handle.fingerprint);
            if (!pseudonym) continue;
            model::ReviewObject counter;
            model::PseudonymousAttribution author;
            author.pseudonym = *pseudonym;
            author.escrow_board = board_;
            counter.author = author;
            counter.title =
                "Retraction of " + handle.title.value_or(handle.fingerprint.path_form());
            counter.targets = {handle};
            counter.comments = "This review is retracted by its author.";
            counter.process.start_date = inv->opened;
            counter.process.end_date = inv->deadline;
            counter.process.reviewer_identity_mode = model::ReviewerMode::anonymized;
            counter.process.escrow_board = board_;
            templates.push_back(std::move(counter));
        }
        inv->state = Investigation::State::resolved_retraction;
    } else {
        inv->state = Investigation::State::resolved_clarification;
    }
    transitions_.push_back(Transition{inv->id, inv->state, std::nullopt});
    return templates;
}

void EscrowService::expire_investigation(uint64_t id, const Date& now) {
    Investigation* inv = find_open(id);
    if (now <= inv->deadline) {
        throw NotYetExpired("deadline " + inv->deadline.to_string() + " has not passed by " +
                            now.to_string());
    }
    inv->state = Investigation::State::escrow_nonresponsive;
    responsive_ = false;
    transitions_.push_back(Transition{inv->id, inv->state, now});
}

canonical::Value EscrowService::public_log() const {
    Value::List entries;
    for (const auto& inv : investigations_) {
        Value::List reviews;
        for (const auto& h : inv.reviews_in_question) {
            reviews.push_back(Value::text(h.fingerprint.path_form()));
        }
        entries.push_back(Value::map({
            {"id", Value::integer(static_cast<int64_t>(inv.id))},
            {"reviews", Value::list(std::move(reviews))},
            {"state", Value::text(investigation_state_name(inv.state))},
            {"opened", Value::text(inv.opened.to_string())},
            {"deadline", Value::text(inv.deadline.to_string())},
        }));
    }
    Value::List log;
    for (const auto& t : transitions_) {
        std::vector<std::pair<std::string, Value>> fields = {
            {"id", Value::integer(static_cast<int64_t>(t.investigation))},
            {"state", Value::text(investigation_state_name(t.state))},
        };
        if (t.date) fields.emplace_back("date", Value::text(t.date->to_string()));
        log.push_back(Value::map(std::move(fields)));
    }
    return Value::map({
        {"board", Value::text(board_key())},
        {"responsive", Value::boolean(responsive_)},
        {"investigations", Value::list(std::move(entries))},
        {"transitions", Value::list(std::move(log))},
    });
}

// --- encrypted persistence ---------------------------------------------------

namespace {

Investigation::State state_from_name(const std::string& name) {
    if (name == "open") return Investigation::State::open;
    if (name == "resolved_retraction") return Investigation::State::resolved_retraction;
    if (name == "resolved_clarification") return Investigation::State::resolved_clarification;
    if (name == "escrow_nonresponsive") return Investigation::State::escrow_nonresponsive;
    throw MalformedEncoding("unknown investigation state: " + name);
}

Value investigation_to_value(const Investigation& inv) {
    Value::List petitioners;
    for (const auto& p : inv.petitioners) petitioners.push_back(model::to_value(p));
    Value::List reviews;
    for (const auto& h : inv.reviews_in_question) reviews.push_back(model::to_value(h));
    return Value::map({
        {"id", Value::integer(static_cast<int64_t>(inv.id))},
        {"petitioners", Value::list(std::move(petitioners))},
        {"reviews", Value::list(std::move(reviews))},
        {"state", Value::text(investigation_state_name(inv.state))},
        {"opened", Value::text(inv.opened.to_string())},
        {"deadline", Value::text(inv.deadline.to_string())},
    });
}

Investigation investigation_from_value(const Value& v) {
    Investigation inv;
    inv.id = static_cast<uint64_t>(v.at("id").as_int());
    for (const auto& p : v.at("petitioners").as_list()) {
        inv.petitioners.push_back(model::identity_from_value(p));
    }
    for (const auto& h : v.at("reviews").as_list()) {
        inv.reviews_in_question.push_back(model::handle_from_value(h));
    }
    inv.state = state_from_name(v.at("state").as_text());
    auto opened = Date::parse(v.at("opened").as_text());
    auto deadline = Date::parse(v.at("deadline").as_text());
    if (!opened || !deadline) throw MalformedEncoding("bad investigation dates");
    inv.opened = *opened;
    inv.deadline = *deadline;
    return inv;
}

}  // namespace

Bytes EscrowService::seal(std::string_view passphrase) const {
    ensure_sodium();

    Value::List board;
    for (const auto& id : board_) board.push_back(model::to_value(id));
    Value::List pool;
    for (uint64_t n : number_pool_) pool.push_back(Value::integer(static_cast<int64_t>(n)));
    std::vector<std::pair<std::string, Value>> sealed_entries;
    for (const auto& [pseudonym, identity] : sealed_) {
        sealed_entries.emplace_back(pseudonym, model::to_value(identity));
    }
    std::vector<std::pair<std::string, Value>> attributions;
    for (const auto& [fp, pseudonym] : review_attribution_) {
        attributions.emplace_back(fp.path_form(), Value::text(pseudonym));
    }
    Value::List investigations;
    for (const auto& inv : investigations_) {
        investigations.push_back(investigation_to_value(inv));
    }
    Value::List transitions;
    for (const auto& t : transitions_) {
        std::vector<std::pair<std::string, Value>> fields = {
            {"id", Value::integer(static_cast<int64_t>(t.investigation))},
            {"state", Value::text(investigation_state_name(t.state))},
        };
        if (t.date) fields.emplace_back("date", Value::text(t.date->to_string()));
        transitions.push_back(Value::map(std::move(fields)));
    }
    Bytes plain = canonical::encode(Value::map({
        {"label", Value::text(label_)},
        {"board", Value::list(std::move(board))},
        {"seed", Value::integer(static_cast<int64_t>(seed_))},
        {"pool", Value::list(std::move(pool))},
        {"pool_high", Value::integer(static_cast<int64_t>(pool_high_))},
        {"sealed", Value::map(std::move(sealed_entries))},
        {"attributions", Value::map(std::move(attributions))},
        {"investigations", Value::list(std::move(investigations))},
        {"transitions", Value::list(std::move(transitions))},
        {"next_id", Value::integer(static_cast<int64_t>(next_investigation_id_))},
        {"responsive", Value::boolean(responsive_)},
    }));

    Bytes salt(crypto_pwhash_SALTBYTES);
    randombytes_buf(salt.data(), salt.size());
    Bytes key(crypto_secretbox_KEYBYTES);
    if (crypto_pwhash(key.data(), key.size(), passphrase.data(), passphrase.size(),
                      salt.data(), crypto_pwhash_OPSLIMIT_INTERACTIVE,
                      crypto_pwhash_MEMLIMIT_INTERACTIVE, crypto_pwhash_ALG_DEFAULT) != 0) {
        throw EscrowSealed("key derivation failed (out of memory)");
    }
    Bytes nonce(crypto_secretbox_NONCEBYTES);
    randombytes_buf(nonce.data(), nonce.size());
    Bytes box(plain.size() + crypto_secretbox_MACBYTES);
    crypto_secretbox_easy(box.data(), plain.data(), plain.size(), nonce.data(), key.data());

    return canonical::encode(Value::map({
        {"kdf", Value::text("argon2id")},
        {"salt", Value::bytes(std::move(salt))},
        {"nonce", Value::bytes(std::move(nonce))},
        {"box", Value::bytes(std::move(box))},
    }));
}

EscrowService EscrowService::unseal(std::span<const uint8_t> data,
                                    std::string_view passphrase) {
    ensure_sodium();
    Value envelope;
    try {
        envelope = canonical::decode(data);
    } catch (const MalformedEncoding& e) {
        throw EscrowSealed(std::string("not an escrow file: ") + e.what());
    }
    if (envelope.at("kdf").as_text() != "argon2id") {
        throw EscrowSealed("unknown key derivation scheme");
    }
    const Bytes& salt = envelope.at("salt").as_bytes();
    const Bytes& nonce = envelope.at("nonce").as_bytes();
    const Bytes& box = envelope.at("box").as_bytes();
    if (salt.size() != crypto_pwhash_SALTBYTES || nonce.size() != crypto_secretbox_NONCEBYTES ||
        box.size() < crypto_secretbox_MACBYTES) {
        throw EscrowSealed("corrupted escrow file");
    }
    Bytes key(crypto_secretbox_KEYBYTES);
    if (crypto_pwhash(key.data(), key.size(), passphrase.data(), passphrase.size(),
                      salt.data(), crypto_pwhash_OPSLIMIT_INTERACTIVE,
                      crypto_pwhash_MEMLIMIT_INTERACTIVE, crypto_pwhash_ALG_DEFAULT) != 0) {
        throw EscrowSealed("key derivation failed (out of memory)");
    }
    Bytes plain(box.size() - crypto_secretbox_MACBYTES);
    if (crypto_secretbox_open_easy(plain.data(), box.data(), box.size(), nonce.data(),
                                   key.data()) != 0) {
        throw EscrowSealed("wrong passphrase or tampered file");
    }

    Value v = canonical::decode(plain);
    EscrowService s;
    s.label_ = v.at("label").as_text();
    for (const auto& id : v.at("board").as_list()) {
        s.board_.push_back(model::identity_from_value(id));
    }
    s.seed_ = static_cast<uint64_t>(v.at("seed").as_int());
    s.rng_ = Rng(s.seed_ ^ 0x9e3779b97f4a7c15ULL);  // fresh stream after restore
    for (const auto& n : v.at("pool").as_list()) {
        s.number_pool_.push_back(static_cast<uint64_t>(n.as_int()));
    }
    s.pool_high_ = static_cast<uint64_t>(v.at("pool_high").as_int());
    for (const auto& entry : v.at("sealed").as_map()) {
        s.sealed_.emplace(entry.key, model::identity_from_value(entry.value));
    }
    for (const auto& entry : v.at("attributions").as_map()) {
        s.review_attribution_.emplace(Fingerprint::parse(entry.key), entry.value.as_text());
    }
    for (const auto& inv : v.at("investigations").as_list()) {
        s.investigations_.push_back(investigation_from_value(inv));
    }
    for (const auto& t : v.at("transitions").as_list()) {
        Transition tr;
        tr.investigation = static_cast<uint64_t>(t.at("id").as_int());
        tr.state = state_from_name(t.at("state").as_text());
        if (const auto* d = t.get("date")) {
            auto date = Date::parse(d->as_text());
            if (!date) throw MalformedEncoding("bad transition date");
            tr.date = *date;
        }
        s.transitions_.push_back(tr);
    }
    s.next_investigation_id_ = static_cast<uint64_t>(v.at("next_id").as_int());
    s.responsive_ = v.at("responsive").as_bool();
    return s;
}

}  // namespace pubfab::escrow
