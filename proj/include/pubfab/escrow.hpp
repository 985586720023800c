// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Identity escrow for anonymized reviewers. The service issues pseudonyms
// and keeps the pseudonym -> identity mapping sealed; external petitions
// open investigations that the board must answer, and an unanswered
// investigation flips the service to nonresponsive, which query engines use
// to dismiss every review from this escrow. Sealed identities never cross
// any public read path.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pubfab/canonical.hpp"
#include "pubfab/date.hpp"
#include "pubfab/errors.hpp"
#include "pubfab/fingerprint.hpp"
#include "pubfab/model.hpp"
#include "pubfab/rng.hpp"

namespace pubfab::escrow {

inline constexpr size_t kDefaultMinPetitioners = 3;
inline constexpr int64_t kDefaultInvestigationWindowDays = 60;

struct Investigation {
    enum class State {
        open,
        resolved_retraction,
        resolved_clarification,
        escrow_nonresponsive,
    };

    uint64_t id = 0;
    std::vector<model::Identity> petitioners;
    std::vector<model::DocumentHandle> reviews_in_question;
    State state = State::open;
    Date opened;
    Date deadline;
};

const char* investigation_state_name(Investigation::State s);

enum class ResolutionAction { retraction, clarification };

class EscrowService {
public:
    // The label appears inside pseudonyms ("... mandated by <label>"); the
    // seed drives pseudonym number assignment so no timing order leaks.
    EscrowService(std::string board_label, std::vector<model::Identity> board,
                  uint64_t seed);

    const std::string& label() const { return label_; }
    const std::vector<model::Identity>& board() const { return board_; }
    std::string board_key() const { return model::board_key(board_); }
    bool responsive() const { return responsive_; }

    // Issues a fresh pseudonym, statistically independent of the identity;
    // registering the same person twice yields two unlinkable pseudonyms.
    std::string register_identity(const model::Identity& identity);

    bool knows_pseudonym(const std::string& pseudonym) const;
    size_t sealed_record_count() const { return sealed_.size(); }

    // Records which published review was written under which pseudonym, so
    // retractions can be authored by "the same author".
    void attribute_review(const Fingerprint& review_fp, const std::string& pseudonym);
    std::optional<std::string> pseudonym_for_review(const Fingerprint& review_fp) const;

    const Investigation& open_investigation(std::vector<model::Identity> petitioners,
                                            std::vector<model::DocumentHandle> reviews,
                                            const Date& now,
                                            size_t min_petitioners = kDefaultMinPetitioners,
                                            int64_t window_days = kDefaultInvestigationWindowDays);

    // Retraction yields one counter-review draft per attributed review in
    // question, authored under the original pseudonym; clarification yields
    // none. Both close the investigation.
    std::vector<model::ReviewObject> resolve_investigation(uint64_t id,
                                                           ResolutionAction action);

    // After the deadline passes unanswered: the investigation and the whole
    // service become nonresponsive.
    void expire_investigation(uint64_t id, const Date& now);

    const std::vector<Investigation>& investigations() const { return investigations_; }

    struct Transition {
        uint64_t investigation = 0;
        Investigation::State state = Investigation::State::open;
        std::optional<Date> date;  // resolve carries no date by contract
    };

    // Append-only public record: investigation ids, review handles and state
    // transitions with dates. No identities of any kind appear here.
    canonical::Value public_log() const;
    const std::vector<Transition>& transitions() const { return transitions_; }

    // Encrypted-at-rest persistence; the board passphrase, not the host,
    // holds the secret. Unseal throws EscrowSealed on a wrong passphrase.
    Bytes seal(std::string_view passphrase) const;
    static EscrowService unseal(std::span<const uint8_t> data, std::string_view passphrase);

private:
    EscrowService() : rng_(0) {}

    uint64_t draw_pseudonym_number();
    Investigation* find_open(uint64_t id);

    std::string label_;
    std::vector<model::Identity> board_;
    uint64_t seed_ = 0;
    Rng rng_;
    std::vector<uint64_t> number_pool_;  // shuffled, unused pseudonym numbers
    uint64_t pool_high_ = 0;
    std::map<std::string, model::Identity> sealed_;
    std::map<Fingerprint, std::string> review_attribution_;
    std::vector<Investigation> investigations_;
    std::vector<Transition> transitions_;
    uint64_t next_investigation_id_ = 1;
    bool responsive_ = true;
};

}  // namespace pubfab::escrow
