// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Release-gated review rounds: the self-organized blind process and its
// double-blind extension. A round is a single-writer state machine driven
// by logical calendar dates injected by the caller; reviews held for
// end-of-process publication are unreachable through any public read until
// release. Coordinators have no required operations after setup.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pubfab/coe.hpp"
#include "pubfab/date.hpp"
#include "pubfab/errors.hpp"
#include "pubfab/model.hpp"

namespace pubfab::review {

enum class Phase { setup, invitation, reviewing, released };
enum class Mode { blind, double_blind };

const char* phase_name(Phase p);

// One work entering a round. The non-anonymized version must already have a
// fingerprint and a certificate of existence before the round starts; for
// double-blind rounds an anonymized variant is circulated instead of it.
struct WorkSubmission {
    model::PublishedObject private_object;  // the non-anonymized version
    std::optional<model::PublishedObject> anonymized_object;
    Fingerprint nonanon_fingerprint;
    std::optional<coe::CoERef> nonanon_coe;
    std::optional<std::string> title;
    std::optional<std::vector<std::string>> authors;
};

// The template reviewers receive: it pins the review target (for
// double-blind rounds, the fingerprint of the non-anonymized version, which
// links the review to the revealed work) and embeds the process block that
// every submitted review must carry verbatim.
struct ReviewTemplate {
    Fingerprint target;
    coe::CoERef target_coe;
    model::ReviewProcessSpec process;

    Bytes render() const;  // canonical bytes as delivered to reviewers
};

// Everything delivered to a reviewer for one work.
struct ReviewerPacket {
    Bytes work_bytes;  // anonymized bytes in double-blind mode
    ReviewTemplate review_template;
};

// Observable public channel: anything the round makes public, when.
struct PublicEvent {
    Date date;
    std::string kind;  // "review_published" | "work_published"
    model::DocumentHandle handle;
    Bytes bytes;
};

class ReviewRound {
public:
    struct SubmitReceipt {
        size_t review_number = 0;
        Fingerprint review_fp;
    };

    struct ReleaseOutput {
        std::vector<std::pair<model::PublishedObject, model::DocumentHandle>> published;
        // Works below the acceptance threshold: not part of the round's
        // output, but their authors remain free to publish them elsewhere.
        std::vector<model::DocumentHandle> withheld;
    };

    // Throws SpecInvalid, MissingAnonymizedVariant, MissingCoE, TargetMismatch.
    static ReviewRound start(model::ReviewProcessSpec spec, std::vector<WorkSubmission> works,
                             Mode mode);

    Phase phase() const { return phase_; }
    Mode mode() const { return mode_; }
    const model::ReviewProcessSpec& spec() const { return spec_; }
    const std::vector<ReviewerPacket>& reviewer_packets() const { return packets_; }
    size_t pending_count() const { return pending_.size(); }

    // Accepts a review during the reviewing phase. The embedded process must
    // equal the round spec field by field and every target must be one of
    // the round's works. Immediate-publication specs publish at once.
    SubmitReceipt submit(const model::ReviewObject& review, const Date& now);

    // At or after the end date: publishes all held reviews, then the
    // non-anonymized works (gated by the acceptance threshold when the spec
    // demands it; reviews are released regardless).
    ReleaseOutput release(const Date& now);

    const std::vector<PublicEvent>& public_events() const { return public_events_; }

    static bool verify_double_blind_link(const model::ReviewObject& review,
                                         const model::PublishedObject& revealed);

    // Full state persistence (a private file: pending reviews included).
    canonical::Value to_value() const;
    static ReviewRound from_value(const canonical::Value& v);

private:
    ReviewRound() = default;

    Phase phase_ = Phase::setup;
    Mode mode_ = Mode::blind;
    model::ReviewProcessSpec spec_;
    std::vector<WorkSubmission> works_;
    std::vector<ReviewerPacket> packets_;
    std::vector<model::ReviewObject> pending_;  // private until release
    std::vector<PublicEvent> public_events_;
};

}  // namespace pubfab::review
