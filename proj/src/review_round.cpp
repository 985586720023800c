// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/review_round.hpp"

#include "pubfab/query.hpp"

namespace pubfab::review {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::setup: return "setup";
        case Phase::invitation: return "invitation";
        case Phase::reviewing: return "reviewing";
        case Phase::released: return "released";
    }
    return "?";
}

Bytes ReviewTemplate::render() const {
    return canonical::encode(canonical::Value::map({
        {"kind", canonical::Value::text("review_template")},
        {"target", canonical::Value::text(target.path_form())},
        {"target_coe", canonical::Value::text(coe::to_text(target_coe))},
        {"process", model::to_value(process)},
    }));
}

ReviewRound ReviewRound::start(model::ReviewProcessSpec spec,
                               std::vector<WorkSubmission> works, Mode mode) {
    auto violations = model::validate_process(spec);
    if (!violations.empty()) {
        throw SpecInvalid(violations.front().rule + " (" + violations.front().field + ")");
    }

    for (const auto& work : works) {
        if (!work.nonanon_coe) {
            throw MissingCoE("every work needs a certificate of existence for its "
                             "non-anonymized version before the round starts");
        }
        Fingerprint actual = model::object_fingerprint(work.private_object);
        if (actual != work.nonanon_fingerprint) {
            throw TargetMismatch("declared non-anonymized fingerprint does not match the "
                                 "submitted object");
        }
        if (mode == Mode::double_blind) {
            if (!work.anonymized_object) {
                throw MissingAnonymizedVariant("double-blind rounds require an anonymized "
                                               "variant of every work");
            }
            if (model::object_fingerprint(*work.anonymized_object) == work.nonanon_fingerprint) {
                throw MissingAnonymizedVariant("anonymized variant is byte-identical to the "
                                               "non-anonymized version");
            }
        }
    }

    ReviewRound round;
    round.mode_ = mode;
    round.spec_ = std::move(spec);
    round.works_ = std::move(works);
    for (const auto& work : round.works_) {
        ReviewerPacket packet;
        const model::PublishedObject& delivered =
            mode == Mode::double_blind ? *work.anonymized_object : work.private_object;
        packet.work_bytes = model::object_canonical_bytes(delivered);
        packet.review_template.target = work.nonanon_fingerprint;
        packet.review_template.target_coe = *work.nonanon_coe;
        packet.review_template.process = round.spec_;
        round.packets_.push_back(std::move(packet));
    }
    round.phase_ = Phase::reviewing;
    return round;
}

ReviewRound::SubmitReceipt ReviewRound::submit(const model::ReviewObject& review,
                                               const Date& now) {
    if (phase_ != Phase::reviewing) {
        throw WrongPhase(std::string("round is in phase ") + phase_name(phase_));
    }
    if (review.process != spec_) {
        throw ProcessMismatch("the review's embedded process block differs from the round spec");
    }
    if (review.targets.empty()) throw TargetMismatch("review targets no work");
    for (const auto& target : review.targets) {
        bool known = false;
        for (const auto& work : works_) {
            if (work.nonanon_fingerprint == target.fingerprint) known = true;
        }
        if (!known) {
            throw TargetMismatch("review targets " + target.fingerprint.path_form() +
                                 ", which is not part of this round");
        }
    }

    pending_.push_back(review);
    auto [object, handle] = model::review_as_object(review);
    if (spec_.review_text_published_when == model::TextPublishedWhen::immediate) {
        public_events_.push_back(PublicEvent{now, "review_published", handle,
                                             model::object_canonical_bytes(object)});
    }
    return SubmitReceipt{pending_.size() - 1, handle.fingerprint};
}

ReviewRound::ReleaseOutput ReviewRound::release(const Date& now) {
    if (phase_ != Phase::reviewing) {
        throw WrongPhase(std::string("round is in phase ") + phase_name(phase_));
    }
    if (now < spec_.end_date) {
        throw TooEarly("release on " + now.to_string() + " before end date " +
                       spec_.end_date.to_string());
    }

    ReleaseOutput out;

    // Reviews first: they are released regardless of any threshold.
    for (const auto& review : pending_) {
        auto [object, handle] = model::review_as_object(review);
        if (spec_.review_text_published_when != model::TextPublishedWhen::immediate) {
            public_events_.push_back(PublicEvent{now, "review_published", handle,
                                                 model::object_canonical_bytes(object)});
        }
        out.published.emplace_back(std::move(object), std::move(handle));
    }

    // Threshold gating uses the query engine's score over this round's own
    // reviews. A work with no grading reviews has no score and is withheld.
    std::optional<query::KnowledgeGraph> graph;
    if (spec_.reviewed_work_public == model::WorkPublic::afterwards_beyond_threshold) {
        graph.emplace();
        for (const auto& review : pending_) {
            auto [object, handle] = model::review_as_object(review);
            graph->index(object, handle);
        }
    }

    for (const auto& work : works_) {
        model::DocumentHandle handle;
        handle.title = work.title;
        handle.authors = work.authors;
        handle.fingerprint = work.nonanon_fingerprint;
        handle.coes = {*work.nonanon_coe};

        if (graph) {
            auto score = graph->score(work.nonanon_fingerprint, query::RankingSpec{});
            if (!score || *score < *spec_.acceptance_threshold) {
                out.withheld.push_back(std::move(handle));
                continue;
            }
        }
        public_events_.push_back(PublicEvent{now, "work_published", handle,
                                             model::object_canonical_bytes(work.private_object)});
        out.published.emplace_back(work.private_object, std::move(handle));
    }

    pending_.clear();
    phase_ = Phase::released;
    return out;
}

bool ReviewRound::verify_double_blind_link(const model::ReviewObject& review,
                                           const model::PublishedObject& revealed) {
    if (review.targets.size() != 1) return false;
    return model::object_fingerprint(revealed) == review.targets.front().fingerprint;
}

canonical::Value ReviewRound::to_value() const {
    using canonical::Value;
    Value::List works;
    for (const auto& w : works_) {
        std::vector<std::pair<std::string, Value>> fields;
        fields.emplace_back("private", model::object_to_value(w.private_object));
        if (w.anonymized_object) {
            fields.emplace_back("anonymized", model::object_to_value(*w.anonymized_object));
        }
        fields.emplace_back("fingerprint", Value::text(w.nonanon_fingerprint.path_form()));
        fields.emplace_back("coe", Value::text(coe::to_text(*w.nonanon_coe)));
        if (w.title) fields.emplace_back("title", Value::text(*w.title));
        if (w.authors) {
            Value::List authors;
            for (const auto& a : *w.authors) authors.push_back(Value::text(a));
            fields.emplace_back("authors", Value::list(std::move(authors)));
        }
        works.push_back(Value::map(std::move(fields)));
    }
    Value::List pending;
    for (const auto& r : pending_) pending.push_back(model::to_value(r));
    Value::List events;
    for (const auto& e : public_events_) {
        events.push_back(Value::map({
            {"date", Value::text(e.date.to_string())},
            {"kind", Value::text(e.kind)},
            {"handle", model::to_value(e.handle)},
            {"bytes", Value::bytes(e.bytes)},
        }));
    }
    return Value::map({
        {"phase", Value::text(phase_name(phase_))},
        {"mode", Value::text(mode_ == Mode::blind ? "blind" : "double_blind")},
        {"spec", model::to_value(spec_)},
        {"works", Value::list(std::move(works))},
        {"pending", Value::list(std::move(pending))},
        {"events", Value::list(std::move(events))},
    });
}

ReviewRound ReviewRound::from_value(const canonical::Value& v) {
    std::vector<WorkSubmission> works;
    for (const auto& w : v.at("works").as_list()) {
        WorkSubmission sub;
        sub.private_object = model::object_from_value(w.at("private"));
        if (const auto* anon = w.get("anonymized")) {
            sub.anonymized_object = model::object_from_value(*anon);
        }
        sub.nonanon_fingerprint = Fingerprint::parse(w.at("fingerprint").as_text());
        sub.nonanon_coe = coe::parse_coe(w.at("coe").as_text());
        if (const auto* t = w.get("title")) sub.title = t->as_text();
        if (const auto* authors = w.get("authors")) {
            std::vector<std::string> list;
            for (const auto& a : authors->as_list()) list.push_back(a.as_text());
            sub.authors = std::move(list);
        }
        works.push_back(std::move(sub));
    }
    const std::string& mode_text = v.at("mode").as_text();
    ReviewRound round =
        start(model::process_from_value(v.at("spec")), std::move(works),
              mode_text == "double_blind" ? Mode::double_blind : Mode::blind);
    for (const auto& r : v.at("pending").as_list()) {
        round.pending_.push_back(model::review_from_value(r));
    }
    for (const auto& e : v.at("events").as_list()) {
        PublicEvent event;
        auto date = Date::parse(e.at("date").as_text());
        if (!date) throw MalformedEncoding("bad event date");
        event.date = *date;
        event.kind = e.at("kind").as_text();
        event.handle = model::handle_from_value(e.at("handle"));
        event.bytes = e.at("bytes").as_bytes();
        round.public_events_.push_back(std::move(event));
    }
    const std::string& phase_text = v.at("phase").as_text();
    if (phase_text == "released") round.phase_ = Phase::released;
    return round;
}

}  // namespace pubfab::review
