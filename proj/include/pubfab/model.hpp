// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Domain objects of the publication fabric: published objects (singleton
// blobs and dictionaries), document handles, review objects with their
// declarative process descriptions, and post-hoc citations. All values are
// immutable once constructed and serialize through the canonical encoding,
// so they fingerprint stably forever.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pubfab/canonical.hpp"
#include "pubfab/coe.hpp"
#include "pubfab/date.hpp"
#include "pubfab/errors.hpp"
#include "pubfab/fingerprint.hpp"
#include "pubfab/rational.hpp"

namespace pubfab::model {

struct Identity {
    std::string display_name;
    std::optional<std::string> affiliation;
    std::optional<std::string> contact;
    std::optional<Bytes> verify_key;

    bool operator==(const Identity&) const = default;
};

// Escrow boards are keyed by the fingerprint of their identity list, so a
// review names its own board without any registry lookup.
std::string board_key(const std::vector<Identity>& board);

// --- published objects -------------------------------------------------------

struct Blob {
    Bytes bytes;
    std::string media_type = "application/octet-stream";

    bool operator==(const Blob&) const = default;
};

// Named references to other objects. Entries may dangle (reference objects
// no store can resolve yet); stores flag but accept them.
struct Dictionary {
    std::map<std::string, Fingerprint> entries;

    bool operator==(const Dictionary&) const = default;
};

using PublishedObject = std::variant<Blob, Dictionary>;

// Identity-bearing bytes of an object. A blob is identified by its raw
// content (the fingerprint of a PDF is the hash of the PDF itself; the
// media type is transport metadata, not identity). A dictionary is
// identified by its canonical map encoding.
Bytes object_canonical_bytes(const PublishedObject& object);
Fingerprint object_fingerprint(const PublishedObject& object);

// Tagged transport form (distinct from the identity bytes above): carries
// the media type and disambiguates blob bytes that happen to spell a
// dictionary encoding.
canonical::Value object_to_value(const PublishedObject& object);
PublishedObject object_from_value(const canonical::Value& v);

// --- document handles ----------------------------------------------------------

// The public 4-tuple naming a work. Only the fingerprint (plus its CoEs) is
// authoritative; title and authors are display copies, so equality and
// ordering are defined by fingerprint alone.
struct DocumentHandle {
    std::optional<std::string> title;
    std::optional<std::vector<std::string>> authors;
    Fingerprint fingerprint;
    std::vector<coe::CoERef> coes;

    friend bool operator==(const DocumentHandle& a, const DocumentHandle& b) {
        return a.fingerprint == b.fingerprint;
    }
    friend auto operator<=>(const DocumentHandle& a, const DocumentHandle& b) {
        return a.fingerprint <=> b.fingerprint;
    }
};

DocumentHandle make_handle(const PublishedObject& object,
                           std::optional<std::string> title = std::nullopt,
                           std::optional<std::vector<std::string>> authors = std::nullopt,
                           std::vector<coe::CoERef> coes = {});

// --- review objects -------------------------------------------------------------

struct Grade {
    enum class Orientation { higher_is_better, lower_is_better };

    std::string name;
    int64_t value = 0;
    int64_t scale_max = 1;
    Orientation orientation = Orientation::higher_is_better;

    bool operator==(const Grade&) const = default;

    // Normalized contribution in [0,1]; lower-is-better grades are inverted.
    Rational normalized() const;
};

enum class AuthorKnown { prior, afterwards, after_first_release };
enum class ReviewerMode { open, anonymized, anonymized_to_authors_only };
enum class ReviewerKnownWhen { prior, immediate, afterwards };
enum class TextPublishedWhen { immediate, end_of_process };
enum class TextAudience { public_audience, authors_and_committee };
enum class WorkPublic { prior, afterwards, afterwards_beyond_threshold };

// Declarative description of the process that produced a review. Embedded
// whole in every review object so the process can be understood and checked
// long after the coordinating platform is gone.
struct ReviewProcessSpec {
    Date start_date;
    Date end_date;
    AuthorKnown author_identity_known = AuthorKnown::prior;
    ReviewerMode reviewer_identity_mode = ReviewerMode::open;
    ReviewerKnownWhen reviewer_identity_known_when = ReviewerKnownWhen::prior;
    TextPublishedWhen review_text_published_when = TextPublishedWhen::end_of_process;
    TextAudience review_text_audience = TextAudience::public_audience;
    WorkPublic reviewed_work_public = WorkPublic::afterwards;
    std::optional<Rational> acceptance_threshold;
    std::vector<Identity> coordinators;
    std::vector<Identity> escrow_board;

    bool operator==(const ReviewProcessSpec&) const = default;
};

struct OpenAttribution {
    Identity identity;

    bool operator==(const OpenAttribution&) const = default;
};

// Carries no real identity anywhere; the escrow board listed in full is
// what makes the pseudonym accountable.
struct PseudonymousAttribution {
    std::string pseudonym;
    std::vector<Identity> escrow_board;

    bool operator==(const PseudonymousAttribution&) const = default;
};

using ReviewerAttribution = std::variant<OpenAttribution, PseudonymousAttribution>;

// Author string as it appears in the published handle.
std::string attribution_display(const ReviewerAttribution& attribution);

struct ReviewObject {
    ReviewerAttribution author;
    std::string title;
    std::vector<DocumentHandle> targets;
    std::vector<Grade> grades;
    std::string comments;
    ReviewProcessSpec process;

    bool operator==(const ReviewObject&) const = default;
};

// --- post-hoc citations ------------------------------------------------------------

// An assertion between two existing works, legal regardless of which was
// published or stamped first.
struct PostHocCitation {
    enum class Relation { prior_work, influence, plagiarism };

    DocumentHandle source;  // the earlier / original work
    DocumentHandle target;  // the derived work
    Relation relation = Relation::prior_work;
    std::string statement;
    Identity author;
};

// --- validation --------------------------------------------------------------------

struct Violation {
    std::string rule;   // stable identifier, e.g. "GradeOutOfRange"
    std::string field;
    std::string detail;
};

std::vector<Violation> validate_process(const ReviewProcessSpec& spec);
std::vector<Violation> validate_review(const ReviewObject& review);
std::vector<Violation> validate_posthoc(const PostHocCitation& citation);

// --- canonical serialization ---------------------------------------------------------

canonical::Value to_value(const Identity& id);
canonical::Value to_value(const Grade& grade);
canonical::Value to_value(const ReviewProcessSpec& spec);
canonical::Value to_value(const ReviewerAttribution& attribution);
canonical::Value to_value(const DocumentHandle& handle);
canonical::Value to_value(const ReviewObject& review);
canonical::Value to_value(const PostHocCitation& citation);
canonical::Value to_value(const Dictionary& dict);

Identity identity_from_value(const canonical::Value& v);
Grade grade_from_value(const canonical::Value& v);
ReviewProcessSpec process_from_value(const canonical::Value& v);
ReviewerAttribution attribution_from_value(const canonical::Value& v);
DocumentHandle handle_from_value(const canonical::Value& v);
ReviewObject review_from_value(const canonical::Value& v);
PostHocCitation posthoc_from_value(const canonical::Value& v);
Dictionary dictionary_from_value(const canonical::Value& v);

// Review as a publishable document: a blob of the review's canonical bytes
// plus a handle reusing the review's title and author attribution.
// Throws InvalidReview when validate_review reports violations.
std::pair<PublishedObject, DocumentHandle> review_as_object(const ReviewObject& review);

inline constexpr std::string_view kReviewMediaType = "application/vnd.review";
inline constexpr std::string_view kCitationMediaType = "application/vnd.citation";

std::pair<PublishedObject, DocumentHandle> posthoc_as_object(const PostHocCitation& citation);

// --- dictionary traversal -----------------------------------------------------------

inline constexpr int kTraversalDepthLimit = 64;

struct TraversalEntry {
    std::string path;        // "a/b/c"
    Fingerprint fingerprint;
    bool resolved = false;   // resolver produced an object
    bool truncated = false;  // revisit of a seen fingerprint or depth limit
};

using ObjectResolver = std::function<std::optional<PublishedObject>(const Fingerprint&)>;

// Depth-first walk with a visited set; terminates on any input, including
// reference cycles crafted across dictionaries.
std::vector<TraversalEntry> traverse_dictionary(const Dictionary& root,
                                                const ObjectResolver& resolve,
                                                int max_depth = kTraversalDepthLimit);

}  // namespace pubfab::model
