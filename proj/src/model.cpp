// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/model.hpp"

#include <algorithm>
#include <set>

namespace pubfab::model {

using canonical::Value;

namespace {

// Enum spellings are part of the serialized form; never reorder or rename.
template <typename E>
struct EnumName {
    E value;
    std::string_view name;
};

constexpr EnumName<AuthorKnown> kAuthorKnown[] = {
    {AuthorKnown::prior, "prior"},
    {AuthorKnown::afterwards, "afterwards"},
    {AuthorKnown::after_first_release, "after_first_release"},
};
constexpr EnumName<ReviewerMode> kReviewerMode[] = {
    {ReviewerMode::open, "open"},
    {ReviewerMode::anonymized, "anonymized"},
    {ReviewerMode::anonymized_to_authors_only, "anonymized_to_authors_only"},
};
constexpr EnumName<ReviewerKnownWhen> kReviewerKnownWhen[] = {
    {ReviewerKnownWhen::prior, "prior"},
    {ReviewerKnownWhen::immediate, "immediate"},
    {ReviewerKnownWhen::afterwards, "afterwards"},
};
constexpr EnumName<TextPublishedWhen> kTextPublishedWhen[] = {
    {TextPublishedWhen::immediate, "immediate"},
    {TextPublishedWhen::end_of_process, "end_of_process"},
};
constexpr EnumName<TextAudience> kTextAudience[] = {
    {TextAudience::public_audience, "public"},
    {TextAudience::authors_and_committee, "authors_and_committee"},
};
constexpr EnumName<WorkPublic> kWorkPublic[] = {
    {WorkPublic::prior, "prior"},
    {WorkPublic::afterwards, "afterwards"},
    {WorkPublic::afterwards_beyond_threshold, "afterwards_beyond_threshold"},
};
constexpr EnumName<Grade::Orientation> kOrientation[] = {
    {Grade::Orientation::higher_is_better, "higher_is_better"},
    {Grade::Orientation::lower_is_better, "lower_is_better"},
};
constexpr EnumName<PostHocCitation::Relation> kRelation[] = {
    {PostHocCitation::Relation::prior_work, "prior_work"},
    {PostHocCitation::Relation::influence, "influence"},
    {PostHocCitation::Relation::plagiarism, "plagiarism"},
};

template <typename E, size_t N>
std::string_view enum_name(const EnumName<E> (&table)[N], E value) {
    for (const auto& e : table) {
        if (e.value == value) return e.name;
    }
    throw MalformedEncoding("unknown enum value");
}

template <typename E, size_t N>
E enum_value(const EnumName<E> (&table)[N], const std::string& name) {
    for (const auto& e : table) {
        if (e.name == name) return e.value;
    }
    throw MalformedEncoding("unknown enum spelling: " + name);
}

Date date_from_text(const std::string& text) {
    auto d = Date::parse(text);
    if (!d) throw MalformedEncoding("bad date: " + text);
    return *d;
}

Value identities_to_value(const std::vector<Identity>& ids) {
    Value::List out;
    for (const auto& id : ids) out.push_back(to_value(id));
    return Value::list(std::move(out));
}

std::vector<Identity> identities_from_value(const Value& v) {
    std::vector<Identity> out;
    for (const auto& item : v.as_list()) out.push_back(identity_from_value(item));
    return out;
}

}  // namespace

std::string board_key(const std::vector<Identity>& board) {
    Value::List ids;
    for (const auto& id : board) ids.push_back(to_value(id));
    return fingerprint_value(Value::list(std::move(ids))).path_form();
}

// --- published objects --------------------------------------------------------

Bytes object_canonical_bytes(const PublishedObject& object) {
    if (const auto* blob = std::get_if<Blob>(&object)) {
        return blob->bytes;
    }
    return canonical::encode(to_value(std::get<Dictionary>(object)));
}

Fingerprint object_fingerprint(const PublishedObject& object) {
    return fingerprint(object_canonical_bytes(object));
}

Value object_to_value(const PublishedObject& object) {
    if (const auto* blob = std::get_if<Blob>(&object)) {
        return Value::map({
            {"object", Value::text("blob")},
            {"bytes", Value::bytes(blob->bytes)},
            {"media_type", Value::text(blob->media_type)},
        });
    }
    return Value::map({
        {"object", Value::text("dict")},
        {"value", to_value(std::get<Dictionary>(object))},
    });
}

PublishedObject object_from_value(const Value& v) {
    const std::string& kind = v.at("object").as_text();
    if (kind == "blob") {
        return Blob{v.at("bytes").as_bytes(), v.at("media_type").as_text()};
    }
    if (kind == "dict") {
        return dictionary_from_value(v.at("value"));
    }
    throw MalformedEncoding("unknown object kind: " + kind);
}

Value to_value(const Dictionary& dict) {
    std::vector<std::pair<std::string, Value>> entries;
    for (const auto& [name, fp] : dict.entries) {
        if (name.empty()) throw UnencodableValue("dictionary entry name is empty");
        entries.emplace_back(name, Value::text(fp.path_form()));
    }
    return Value::map({
        {"type", Value::text("dict")},
        {"entries", Value::map(std::move(entries))},
    });
}

Dictionary dictionary_from_value(const Value& v) {
    if (v.at("type").as_text() != "dict") throw MalformedEncoding("not a dictionary");
    Dictionary d;
    for (const auto& entry : v.at("entries").as_map()) {
        if (entry.key.empty()) throw MalformedEncoding("dictionary entry name is empty");
        d.entries.emplace(entry.key, Fingerprint::parse(entry.value.as_text()));
    }
    return d;
}

// --- handles --------------------------------------------------------------------

DocumentHandle make_handle(const PublishedObject& object, std::optional<std::string> title,
                           std::optional<std::vector<std::string>> authors,
                           std::vector<coe::CoERef> coes) {
    DocumentHandle h;
    h.title = std::move(title);
    h.authors = std::move(authors);
    h.fingerprint = object_fingerprint(object);
    h.coes = std::move(coes);
    return h;
}

Value to_value(const DocumentHandle& handle) {
    std::vector<std::pair<std::string, Value>> fields;
    fields.emplace_back("fingerprint", Value::text(handle.fingerprint.path_form()));
    if (handle.title) fields.emplace_back("title", Value::text(*handle.title));
    if (handle.authors) {
        Value::List authors;
        for (const auto& a : *handle.authors) authors.push_back(Value::text(a));
        fields.emplace_back("authors", Value::list(std::move(authors)));
    }
    if (!handle.coes.empty()) {
        Value::List coes;
        for (const auto& c : handle.coes) coes.push_back(Value::text(coe::to_text(c)));
        fields.emplace_back("coes", Value::list(std::move(coes)));
    }
    return Value::map(std::move(fields));
}

DocumentHandle handle_from_value(const Value& v) {
    DocumentHandle h;
    h.fingerprint = Fingerprint::parse(v.at("fingerprint").as_text());
    if (const auto* title = v.get("title")) h.title = title->as_text();
    if (const auto* authors = v.get("authors")) {
        std::vector<std::string> list;
        for (const auto& a : authors->as_list()) list.push_back(a.as_text());
        h.authors = std::move(list);
    }
    if (const auto* coes = v.get("coes")) {
        for (const auto& c : coes->as_list()) h.coes.push_back(coe::parse_coe(c.as_text()));
    }
    return h;
}

// --- identities / grades -----------------------------------------------------------

Value to_value(const Identity& id) {
    std::vector<std::pair<std::string, Value>> fields;
    fields.emplace_back("name", Value::text(id.display_name));
    if (id.affiliation) fields.emplace_back("affiliation", Value::text(*id.affiliation));
    if (id.contact) fields.emplace_back("contact", Value::text(*id.contact));
    if (id.verify_key) fields.emplace_back("verify_key", Value::bytes(*id.verify_key));
    return Value::map(std::move(fields));
}

Identity identity_from_value(const Value& v) {
    Identity id;
    id.display_name = v.at("name").as_text();
    if (const auto* a = v.get("affiliation")) id.affiliation = a->as_text();
    if (const auto* c = v.get("contact")) id.contact = c->as_text();
    if (const auto* k = v.get("verify_key")) id.verify_key = k->as_bytes();
    return id;
}

Rational Grade::normalized() const {
    Rational ratio(value, scale_max);
    return orientation == Orientation::higher_is_better ? ratio : Rational(1) - ratio;
}

Value to_value(const Grade& grade) {
    return Value::map({
        {"name", Value::text(grade.name)},
        {"value", Value::integer(grade.value)},
        {"scale_max", Value::integer(grade.scale_max)},
        {"orientation", Value::text(enum_name(kOrientation, grade.orientation))},
    });
}

Grade grade_from_value(const Value& v) {
    Grade g;
    g.name = v.at("name").as_text();
    g.value = v.at("value").as_int();
    g.scale_max = v.at("scale_max").as_int();
    g.orientation = enum_value(kOrientation, v.at("orientation").as_text());
    return g;
}

// --- process spec ---------------------------------------------------------------------

Value to_value(const ReviewProcessSpec& spec) {
    std::vector<std::pair<std::string, Value>> fields = {
        {"start", Value::text(spec.start_date.to_string())},
        {"end", Value::text(spec.end_date.to_string())},
        {"author_known", Value::text(enum_name(kAuthorKnown, spec.author_identity_known))},
        {"reviewer_mode", Value::text(enum_name(kReviewerMode, spec.reviewer_identity_mode))},
        {"reviewer_known_when",
         Value::text(enum_name(kReviewerKnownWhen, spec.reviewer_identity_known_when))},
        {"text_published_when",
         Value::text(enum_name(kTextPublishedWhen, spec.review_text_published_when))},
        {"text_audience", Value::text(enum_name(kTextAudience, spec.review_text_audience))},
        {"work_public", Value::text(enum_name(kWorkPublic, spec.reviewed_work_public))},
        {"coordinators", identities_to_value(spec.coordinators)},
        {"escrow", identities_to_value(spec.escrow_board)},
    };
    if (spec.acceptance_threshold) {
        fields.emplace_back("threshold",
                            Value::text(rational_to_string(*spec.acceptance_threshold)));
    }
    return Value::map(std::move(fields));
}

ReviewProcessSpec process_from_value(const Value& v) {
    ReviewProcessSpec spec;
    spec.start_date = date_from_text(v.at("start").as_text());
    spec.end_date = date_from_text(v.at("end").as_text());
    spec.author_identity_known = enum_value(kAuthorKnown, v.at("author_known").as_text());
    spec.reviewer_identity_mode = enum_value(kReviewerMode, v.at("reviewer_mode").as_text());
    spec.reviewer_identity_known_when =
        enum_value(kReviewerKnownWhen, v.at("reviewer_known_when").as_text());
    spec.review_text_published_when =
        enum_value(kTextPublishedWhen, v.at("text_published_when").as_text());
    spec.review_text_audience = enum_value(kTextAudience, v.at("text_audience").as_text());
    spec.reviewed_work_public = enum_value(kWorkPublic, v.at("work_public").as_text());
    if (const auto* t = v.get("threshold")) {
        auto r = rational_parse(t->as_text());
        if (!r) throw MalformedEncoding("bad threshold: " + t->as_text());
        spec.acceptance_threshold = *r;
    }
    spec.coordinators = identities_from_value(v.at("coordinators"));
    spec.escrow_board = identities_from_value(v.at("escrow"));
    return spec;
}

// --- attribution -----------------------------------------------------------------------

std::string attribution_display(const ReviewerAttribution& attribution) {
    if (const auto* open = std::get_if<OpenAttribution>(&attribution)) {
        return open->identity.display_name;
    }
    return std::get<PseudonymousAttribution>(attribution).pseudonym;
}

Value to_value(const ReviewerAttribution& attribution) {
    if (const auto* open = std::get_if<OpenAttribution>(&attribution)) {
        return Value::map({
            {"kind", Value::text("open")},
            {"identity", to_value(open->identity)},
        });
    }
    const auto& pseud = std::get<PseudonymousAttribution>(attribution);
    return Value::map({
        {"kind", Value::text("pseudonym")},
        {"pseudonym", Value::text(pseud.pseudonym)},
        {"escrow", identities_to_value(pseud.escrow_board)},
    });
}

ReviewerAttribution attribution_from_value(const Value& v) {
    const std::string& kind = v.at("kind").as_text();
    if (kind == "open") {
        return OpenAttribution{identity_from_value(v.at("identity"))};
    }
    if (kind == "pseudonym") {
        PseudonymousAttribution p;
        p.pseudonym = v.at("pseudonym").as_text();
        p.escrow_board = identities_from_value(v.at("escrow"));
        return p;
    }
    throw MalformedEncoding("unknown attribution kind: " + kind);
}

// --- reviews ---------------------------------------------------------------------------

Value to_value(const ReviewObject& review) {
    Value::List targets;
    for (const auto& t : review.targets) targets.push_back(to_value(t));
    Value::List grades;
    for (const auto& g : review.grades) grades.push_back(to_value(g));
    return Value::map({
        {"type", Value::text("review")},
        {"author", to_value(review.author)},
        {"title", Value::text(review.title)},
        {"targets", Value::list(std::move(targets))},
        {"grades", Value::list(std::move(grades))},
        {"comments", Value::text(review.comments)},
        {"process", to_value(review.process)},
    });
}

ReviewObject review_from_value(const Value& v) {
    if (v.at("type").as_text() != "review") throw MalformedEncoding("not a review object");
    ReviewObject r;
    r.author = attribution_from_value(v.at("author"));
    r.title = v.at("title").as_text();
    for (const auto& t : v.at("targets").as_list()) r.targets.push_back(handle_from_value(t));
    for (const auto& g : v.at("grades").as_list()) r.grades.push_back(grade_from_value(g));
    r.comments = v.at("comments").as_text();
    r.process = process_from_value(v.at("process"));
    return r;
}

// --- citations --------------------------------------------------------------------------

Value to_value(const PostHocCitation& citation) {
    return Value::map({
        {"type", Value::text("citation")},
        {"source", to_value(citation.source)},
        {"target", to_value(citation.target)},
        {"relation", Value::text(enum_name(kRelation, citation.relation))},
        {"statement", Value::text(citation.statement)},
        {"author", to_value(citation.author)},
    });
}

PostHocCitation posthoc_from_value(const Value& v) {
    if (v.at("type").as_text() != "citation") throw MalformedEncoding("not a citation");
    PostHocCitation c;
    c.source = handle_from_value(v.at("source"));
    c.target = handle_from_value(v.at("target"));
    c.relation = enum_value(kRelation, v.at("relation").as_text());
    c.statement = v.at("statement").as_text();
    c.author = identity_from_value(v.at("author"));
    return c;
}

// --- validation -------------------------------------------------------------------------

namespace {

void check_identities(const std::vector<Identity>& ids, const std::string& field,
                      std::vector<Violation>& out) {
    for (const auto& id : ids) {
        if (id.display_name.empty()) {
            out.push_back({"DisplayNameEmpty", field, "identity without display name"});
        }
    }
}

}  // namespace

std::vector<Violation> validate_process(const ReviewProcessSpec& spec) {
    std::vector<Violation> out;
    if (spec.start_date > spec.end_date) {
        out.push_back({"DateOrder", "start",
                       spec.start_date.to_string() + " > " + spec.end_date.to_string()});
    }
    if (spec.reviewer_identity_mode != ReviewerMode::open && spec.escrow_board.empty()) {
        out.push_back({"EscrowMissing", "escrow",
                       "anonymized reviewer identities require an escrow board"});
    }
    if (spec.reviewed_work_public == WorkPublic::afterwards_beyond_threshold &&
        !spec.acceptance_threshold) {
        out.push_back({"ThresholdMissing", "threshold",
                       "threshold-gated release requires acceptance_threshold"});
    }
    check_identities(spec.coordinators, "coordinators", out);
    check_identities(spec.escrow_board, "escrow", out);
    return out;
}

std::vector<Violation> validate_review(const ReviewObject& review) {
    std::vector<Violation> out = validate_process(review.process);
    if (review.targets.empty()) {
        out.push_back({"TargetsEmpty", "targets", "a review must target at least one work"});
    }
    for (const auto& g : review.grades) {
        if (g.scale_max < 1) {
            out.push_back({"ScaleInvalid", "grades", g.name + ": scale_max < 1"});
        } else if (g.value < 0 || g.value > g.scale_max) {
            out.push_back({"GradeOutOfRange", "grades",
                           g.name + ": " + std::to_string(g.value) + "/" +
                               std::to_string(g.scale_max)});
        }
    }
    if (const auto* open = std::get_if<OpenAttribution>(&review.author)) {
        if (open->identity.display_name.empty()) {
            out.push_back({"DisplayNameEmpty", "author", "open attribution without name"});
        }
    } else {
        const auto& pseud = std::get<PseudonymousAttribution>(review.author);
        if (pseud.pseudonym.empty()) {
            out.push_back({"PseudonymEmpty", "author", "pseudonymous attribution without pseudonym"});
        }
        if (pseud.escrow_board.empty()) {
            out.push_back({"EscrowMissing", "author",
                           "pseudonymous attribution requires an escrow board"});
        }
        check_identities(pseud.escrow_board, "author", out);
    }
    return out;
}

std::vector<Violation> validate_posthoc(const PostHocCitation& citation) {
    std::vector<Violation> out;
    if (citation.source.fingerprint == citation.target.fingerprint) {
        out.push_back({"SelfCitation", "target", "source and target are the same work"});
    }
    if (citation.relation == PostHocCitation::Relation::plagiarism &&
        citation.statement.empty()) {
        out.push_back({"StatementRequired", "statement",
                       "plagiarism assertions must state their grounds"});
    }
    if (citation.author.display_name.empty()) {
        out.push_back({"DisplayNameEmpty", "author", "citation author without name"});
    }
    return out;
}

// --- publication -------------------------------------------------------------------------

std::pair<PublishedObject, DocumentHandle> review_as_object(const ReviewObject& review) {
    auto violations = validate_review(review);
    if (!violations.empty()) {
        std::string detail = violations.front().rule + " (" + violations.front().field + ")";
        if (violations.size() > 1) {
            detail += " and " + std::to_string(violations.size() - 1) + " more";
        }
        throw InvalidReview(detail);
    }
    Blob blob{canonical::encode(to_value(review)), std::string(kReviewMediaType)};
    DocumentHandle handle = make_handle(blob, review.title,
                                        std::vector<std::string>{attribution_display(review.author)});
    return {PublishedObject(std::move(blob)), std::move(handle)};
}

std::pair<PublishedObject, DocumentHandle> posthoc_as_object(const PostHocCitation& citation) {
    Blob blob{canonical::encode(to_value(citation)), std::string(kCitationMediaType)};
    std::string title = "Citation: " + std::string(enum_name(kRelation, citation.relation));
    DocumentHandle handle = make_handle(blob, title,
                                        std::vector<std::string>{citation.author.display_name});
    return {PublishedObject(std::move(blob)), std::move(handle)};
}

// --- traversal ------------------------------------------------------------------------------

namespace {

void traverse_into(const Dictionary& dict, const ObjectResolver& resolve,
                   const std::string& prefix, int depth, int max_depth,
                   std::set<Fingerprint>& visited, std::vector<TraversalEntry>& out) {
    for (const auto& [name, fp] : dict.entries) {
        TraversalEntry entry;
        entry.path = prefix.empty() ? name : prefix + "/" + name;
        entry.fingerprint = fp;
        if (visited.contains(fp) || depth >= max_depth) {
            entry.truncated = true;
            out.push_back(std::move(entry));
            continue;
        }
        visited.insert(fp);
        auto object = resolve(fp);
        entry.resolved = object.has_value();
        std::string path = entry.path;
        out.push_back(std::move(entry));
        if (object) {
            if (const auto* sub = std::get_if<Dictionary>(&*object)) {
                traverse_into(*sub, resolve, path, depth + 1, max_depth, visited, out);
            }
        }
    }
}

}  // namespace

std::vector<TraversalEntry> traverse_dictionary(const Dictionary& root,
                                                const ObjectResolver& resolve, int max_depth) {
    std::vector<TraversalEntry> out;
    std::set<Fingerprint> visited;
    traverse_into(root, resolve, "", 0, max_depth, visited, out);
    return out;
}

}  // namespace pubfab::model
