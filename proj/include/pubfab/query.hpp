// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Query engine: a metadata graph over works, reviews and post-hoc
// citations, plus public saved queries with filtering, review-weighted
// ranking, citation expansion and syndication feeds. A next-generation
// journal is nothing more than a public saved query and a portal showing
// its results.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pubfab/canonical.hpp"
#include "pubfab/date.hpp"
#include "pubfab/errors.hpp"
#include "pubfab/fingerprint.hpp"
#include "pubfab/model.hpp"
#include "pubfab/rational.hpp"

namespace pubfab::query {

using model::board_key;

// --- graph ------------------------------------------------------------------

enum class NodeKind { opaque, dictionary, review, citation };

struct Node {
    Fingerprint fp;
    NodeKind kind = NodeKind::opaque;
    bool unresolved = false;  // known only as an edge endpoint or by metadata
    std::optional<std::string> title;
    std::optional<std::vector<std::string>> authors;
    std::vector<coe::CoERef> coes;
    std::optional<Date> earliest_coe;
    std::optional<model::ReviewObject> review;       // kind == review
    std::optional<model::PostHocCitation> citation;  // kind == citation

    model::DocumentHandle handle() const;
    // Board key for pseudonymous reviews; empty otherwise.
    std::string review_board_key() const;
};

// Controls the review-weighted score. The damping factor scales how much a
// meta-review's verdict moves its target's weight; meta chains deeper than
// `meta_depth` no longer adjust weights.
struct RankingSpec {
    Rational damping = Rational(1, 2);
    int meta_depth = 3;  // >= 1

    bool operator==(const RankingSpec&) const = default;

    canonical::Value to_value() const;
    static RankingSpec from_value(const canonical::Value& v);
};

class KnowledgeGraph {
public:
    // Indexes a published object: reviews and citations get typed nodes and
    // edges, dictionaries are walked for display metadata, anything else is
    // an opaque work. Idempotent per fingerprint. A handle, when supplied,
    // contributes display metadata and CoE dates.
    const Node& index(const model::PublishedObject& object);
    const Node& index(const model::PublishedObject& object, const model::DocumentHandle& handle);

    // Metadata-only indexing for legacy works: no content, just the handle.
    const Node& index_handle(const model::DocumentHandle& handle);

    void set_escrow_responsive(const std::string& board, bool responsive);
    bool escrow_responsive(const std::string& board) const;

    const Node* find(const Fingerprint& fp) const;
    const std::map<Fingerprint, Node>& nodes() const { return nodes_; }

    std::vector<const Node*> reviews_of(const Fingerprint& target) const;
    std::vector<const Node*> citations_touching(const Fingerprint& side) const;

    // Review-weighted score; nullopt for works without grading reviews or
    // whose reviews have all been dismissed. Deterministic and independent
    // of indexing order.
    std::optional<Rational> score(const Fingerprint& work, const RankingSpec& spec) const;
    std::optional<Rational> score(const Fingerprint& work, const RankingSpec& spec,
                                  const std::set<std::string>& blacklisted_boards) const;

private:
    Node& upsert(const Fingerprint& fp);
    void merge_handle(Node& node, const model::DocumentHandle& handle);
    void add_review_edges(const Node& node);
    void add_citation_edges(const Node& node);
    Rational review_weight(const Node& review_node, const RankingSpec& spec,
                           const std::set<std::string>& blacklist, int depth,
                           std::set<Fingerprint>& visited) const;

    std::map<Fingerprint, Node> nodes_;
    std::map<Fingerprint, std::vector<Fingerprint>> reviews_by_target_;
    std::map<Fingerprint, std::vector<Fingerprint>> citations_by_side_;
    std::map<std::string, bool> escrow_status_;
};

// --- saved queries -------------------------------------------------------------

// Predicate tree over node metadata and scores. escrow_blacklist leaves act
// query-wide: the named boards are removed from both scoring and results.
struct Filter {
    enum class Kind {
        match_all,
        all_of,
        any_of,
        not_of,
        title_term,        // case-insensitive whole-word match on the title
        author_match,      // case-insensitive exact author name
        date_range,        // inclusive range on the earliest CoE date
        min_score,         // score >= bound (unscored nodes fail)
        reviewed_by,       // has a review from this board key or open reviewer
        escrow_blacklist,  // see above
    };

    Kind kind = Kind::match_all;
    std::vector<Filter> children;     // all_of / any_of / not_of
    std::string text;                 // title_term / author_match / reviewed_by
    std::vector<std::string> boards;  // escrow_blacklist
    std::optional<Date> from;         // date_range
    std::optional<Date> to;
    Rational bound;                   // min_score

    static Filter match_all();
    static Filter all_of(std::vector<Filter> children);
    static Filter any_of(std::vector<Filter> children);
    static Filter not_of(Filter child);
    static Filter title_term(std::string word);
    static Filter author_match(std::string name);
    static Filter date_range(std::optional<Date> from, std::optional<Date> to);
    static Filter min_score(Rational bound);
    static Filter reviewed_by(std::string board_or_name);
    static Filter escrow_blacklist(std::vector<std::string> boards);

    canonical::Value to_value() const;
    static Filter from_value(const canonical::Value& v);

    void collect_blacklists(std::set<std::string>& out) const;
};

// Public saved queries are the journal primitive: the definition must stay
// readable so anyone can assess the journal's criteria.
struct SavedQuery {
    std::string id;
    model::Identity owner;
    Filter filter;
    RankingSpec ranking;
    bool is_public = true;

    canonical::Value to_value() const;
    static SavedQuery from_value(const canonical::Value& v);
};

struct ResultEntry {
    model::DocumentHandle handle;
    std::optional<Rational> score;
    bool expansion = false;           // appended via a post-hoc citation
    std::vector<std::string> notes;   // citation statement + review context
};

// Filter, score and rank; then append the missing side of any post-hoc
// citation touching a result. Throws QueryPrivate for private queries
// executed by non-owners.
std::vector<ResultEntry> execute(const KnowledgeGraph& graph, const SavedQuery& q,
                                 bool as_owner = false);

}  // namespace pubfab::query
