// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/query.hpp"

#include <algorithm>

namespace pubfab::query {

using canonical::Value;

// --- node -----------------------------------------------------------------

model::DocumentHandle Node::handle() const {
    model::DocumentHandle h;
    h.title = title;
    h.authors = authors;
    h.fingerprint = fp;
    h.coes = coes;
    return h;
}

std::string Node::review_board_key() const {
    if (!review) return {};
    if (const auto* pseud = std::get_if<model::PseudonymousAttribution>(&review->author)) {
        return board_key(pseud->escrow_board);
    }
    return {};
}

// --- ranking spec ------------------------------------------------------------

Value RankingSpec::to_value() const {
    return Value::map({
        {"damping", Value::text(rational_to_string(damping))},
        {"meta_depth", Value::integer(meta_depth)},
        {"unreviewed", Value::text("rank_after_scored")},
        {"tiebreak", Value::text("coe_date_desc_then_fingerprint")},
    });
}

RankingSpec RankingSpec::from_value(const Value& v) {
    RankingSpec spec;
    auto damping = rational_parse(v.at("damping").as_text());
    if (!damping || *damping <= 0 || *damping > 1) {
        throw MalformedEncoding("damping must be a rational in (0,1]");
    }
    spec.damping = *damping;
    spec.meta_depth = static_cast<int>(v.at("meta_depth").as_int());
    if (spec.meta_depth < 1) throw MalformedEncoding("meta_depth must be >= 1");
    return spec;
}

// --- graph indexing ------------------------------------------------------------

Node& KnowledgeGraph::upsert(const Fingerprint& fp) {
    auto [it, inserted] = nodes_.try_emplace(fp);
    if (inserted) {
        it->second.fp = fp;
        it->second.unresolved = true;
    }
    return it->second;
}

void KnowledgeGraph::merge_handle(Node& node, const model::DocumentHandle& handle) {
    if (!node.title && handle.title) node.title = handle.title;
    if (!node.authors && handle.authors) node.authors = handle.authors;
    for (const auto& c : handle.coes) {
        bool seen = false;
        std::string text = coe::to_text(c);
        for (const auto& existing : node.coes) {
            if (coe::to_text(existing) == text) seen = true;
        }
        if (!seen) node.coes.push_back(c);
        if (const auto* reg = std::get_if<coe::RegistryStamp>(&c)) {
            if (!node.earliest_coe || reg->date < *node.earliest_coe) {
                node.earliest_coe = reg->date;
            }
        }
    }
}

namespace {

void insert_sorted(std::vector<Fingerprint>& list, const Fingerprint& fp) {
    auto it = std::lower_bound(list.begin(), list.end(), fp);
    if (it == list.end() || *it != fp) list.insert(it, fp);
}

}  // namespace

void KnowledgeGraph::add_review_edges(const Node& node) {
    for (const auto& target : node.review->targets) {
        merge_handle(upsert(target.fingerprint), target);
        insert_sorted(reviews_by_target_[target.fingerprint], node.fp);
    }
}

void KnowledgeGraph::add_citation_edges(const Node& node) {
    for (const auto& side : {node.citation->source, node.citation->target}) {
        merge_handle(upsert(side.fingerprint), side);
        insert_sorted(citations_by_side_[side.fingerprint], node.fp);
    }
}

const Node& KnowledgeGraph::index(const model::PublishedObject& object) {
    Fingerprint fp = model::object_fingerprint(object);
    Node& node = upsert(fp);
    if (!node.unresolved) return node;  // idempotent per fingerprint
    node.unresolved = false;

    if (std::holds_alternative<model::Dictionary>(object)) {
        node.kind = NodeKind::dictionary;
        return node;
    }
    // Typed interpretation of the content; anything unparseable stays an
    // opaque work (a malformed semantic object is data, not an error).
    try {
        Value v = canonical::decode(model::object_canonical_bytes(object));
        const Value* type = v.get("type");
        if (type && type->as_text() == "review") {
            node.review = model::review_from_value(v);
            node.kind = NodeKind::review;
            if (!node.title) node.title = node.review->title;
            if (!node.authors) {
                node.authors =
                    std::vector<std::string>{model::attribution_display(node.review->author)};
            }
            add_review_edges(node);
        } else if (type && type->as_text() == "citation") {
            node.citation = model::posthoc_from_value(v);
            node.kind = NodeKind::citation;
            add_citation_edges(node);
        }
    } catch (const DomainError&) {
        node.kind = NodeKind::opaque;
        node.review.reset();
        node.citation.reset();
    }
    return node;
}

const Node& KnowledgeGraph::index(const model::PublishedObject& object,
                                  const model::DocumentHandle& handle) {
    const Node& indexed = index(object);
    merge_handle(nodes_.at(indexed.fp), handle);
    return nodes_.at(indexed.fp);
}

const Node& KnowledgeGraph::index_handle(const model::DocumentHandle& handle) {
    Node& node = upsert(handle.fingerprint);
    merge_handle(node, handle);
    return node;
}

void KnowledgeGraph::set_escrow_responsive(const std::string& board, bool responsive) {
    escrow_status_[board] = responsive;
}

bool KnowledgeGraph::escrow_responsive(const std::string& board) const {
    auto it = escrow_status_.find(board);
    return it == escrow_status_.end() ? true : it->second;
}

const Node* KnowledgeGraph::find(const Fingerprint& fp) const {
    auto it = nodes_.find(fp);
    return it == nodes_.end() ? nullptr : &it->second;
}

std::vector<const Node*> KnowledgeGraph::reviews_of(const Fingerprint& target) const {
    std::vector<const Node*> out;
    auto it = reviews_by_target_.find(target);
    if (it == reviews_by_target_.end()) return out;
    for (const auto& fp : it->second) out.push_back(&nodes_.at(fp));
    return out;
}

std::vector<const Node*> KnowledgeGraph::citations_touching(const Fingerprint& side) const {
    std::vector<const Node*> out;
    auto it = citations_by_side_.find(side);
    if (it == citations_by_side_.end()) return out;
    for (const auto& fp : it->second) out.push_back(&nodes_.at(fp));
    return out;
}

// --- scoring -----------------------------------------------------------------

namespace {

std::optional<Rational> grade_mean(const model::ReviewObject& review) {
    if (review.grades.empty()) return std::nullopt;
    Rational sum = 0;
    for (const auto& g : review.grades) sum += g.normalized();
    return sum / int(review.grades.size());
}

}  // namespace

Rational KnowledgeGraph::review_weight(const Node& review_node, const RankingSpec& spec,
                                       const std::set<std::string>& blacklist, int depth,
                                       std::set<Fingerprint>& visited) const {
    std::string board = review_node.review_board_key();
    if (!board.empty() && (!escrow_responsive(board) || blacklist.contains(board))) {
        return Rational(0);
    }
    if (depth >= spec.meta_depth) return Rational(1);

    Rational adjustment = 0;
    for (const Node* meta : reviews_of(review_node.fp)) {
        if (!meta->review || visited.contains(meta->fp)) continue;
        auto g = grade_mean(*meta->review);
        if (!g) continue;
        visited.insert(meta->fp);
        Rational w = review_weight(*meta, spec, blacklist, depth + 1, visited);
        visited.erase(meta->fp);
        adjustment += (Rational(2) * *g - 1) * w;
    }
    Rational w = Rational(1) + spec.damping * adjustment;
    return w < 0 ? Rational(0) : w;
}

std::optional<Rational> KnowledgeGraph::score(const Fingerprint& work,
                                              const RankingSpec& spec) const {
    return score(work, spec, {});
}

std::optional<Rational> KnowledgeGraph::score(
    const Fingerprint& work, const RankingSpec& spec,
    const std::set<std::string>& blacklisted_boards) const {
    Rational weighted = 0;
    Rational total = 0;
    bool any = false;
    for (const Node* r : reviews_of(work)) {
        if (!r->review) continue;
        auto g = grade_mean(*r->review);
        if (!g) continue;
        std::set<Fingerprint> visited{r->fp};
        Rational w = review_weight(*r, spec, blacklisted_boards, 0, visited);
        weighted += w * *g;
        total += w;
        any = true;
    }
    if (!any || total == 0) return std::nullopt;
    return weighted / total;
}

// --- filters ------------------------------------------------------------------

namespace {

constexpr std::pair<Filter::Kind, std::string_view> kFilterKinds[] = {
    {Filter::Kind::match_all, "match_all"},
    {Filter::Kind::all_of, "all_of"},
    {Filter::Kind::any_of, "any_of"},
    {Filter::Kind::not_of, "not_of"},
    {Filter::Kind::title_term, "title_term"},
    {Filter::Kind::author_match, "author_match"},
    {Filter::Kind::date_range, "date_range"},
    {Filter::Kind::min_score, "min_score"},
    {Filter::Kind::reviewed_by, "reviewed_by"},
    {Filter::Kind::escrow_blacklist, "escrow_blacklist"},
};

std::string_view filter_kind_name(Filter::Kind k) {
    for (const auto& [kind, name] : kFilterKinds) {
        if (kind == k) return name;
    }
    throw MalformedEncoding("unknown filter kind");
}

Filter::Kind filter_kind_value(const std::string& name) {
    for (const auto& [kind, n] : kFilterKinds) {
        if (n == name) return kind;
    }
    throw MalformedEncoding("unknown filter kind: " + name);
}

// ASCII case folding; text is NFC-normalized before matching so composed
// and decomposed spellings of a term agree.
std::string fold_ascii(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool is_word_byte(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool contains_word(std::string_view haystack, std::string_view word) {
    if (word.empty()) return false;
    size_t pos = 0;
    while ((pos = haystack.find(word, pos)) != std::string_view::npos) {
        bool left_ok = pos == 0 || !is_word_byte(haystack[pos - 1]);
        size_t end = pos + word.size();
        bool right_ok = end == haystack.size() || !is_word_byte(haystack[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

}  // namespace

Filter Filter::match_all() {
    return Filter{};
}

Filter Filter::all_of(std::vector<Filter> children) {
    Filter f;
    f.kind = Kind::all_of;
    f.children = std::move(children);
    return f;
}

Filter Filter::any_of(std::vector<Filter> children) {
    Filter f;
    f.kind = Kind::any_of;
    f.children = std::move(children);
    return f;
}

Filter Filter::not_of(Filter child) {
    Filter f;
    f.kind = Kind::not_of;
    f.children.push_back(std::move(child));
    return f;
}

Filter Filter::title_term(std::string word) {
    Filter f;
    f.kind = Kind::title_term;
    f.text = std::move(word);
    return f;
}

Filter Filter::author_match(std::string name) {
    Filter f;
    f.kind = Kind::author_match;
    f.text = std::move(name);
    return f;
}

Filter Filter::date_range(std::optional<Date> from, std::optional<Date> to) {
    Filter f;
    f.kind = Kind::date_range;
    f.from = from;
    f.to = to;
    return f;
}

Filter Filter::min_score(Rational bound) {
    Filter f;
    f.kind = Kind::min_score;
    f.bound = std::move(bound);
    return f;
}

Filter Filter::reviewed_by(std::string board_or_name) {
    Filter f;
    f.kind = Kind::reviewed_by;
    f.text = std::move(board_or_name);
    return f;
}

Filter Filter::escrow_blacklist(std::vector<std::string> boards) {
    Filter f;
    f.kind = Kind::escrow_blacklist;
    f.boards = std::move(boards);
    return f;
}

Value Filter::to_value() const {
    std::vector<std::pair<std::string, Value>> fields;
    fields.emplace_back("kind", Value::text(filter_kind_name(kind)));
    if (!children.empty()) {
        Value::List kids;
        for (const auto& c : children) kids.push_back(c.to_value());
        fields.emplace_back("children", Value::list(std::move(kids)));
    }
    if (!text.empty()) fields.emplace_back("text", Value::text(text));
    if (!boards.empty()) {
        Value::List list;
        for (const auto& b : boards) list.push_back(Value::text(b));
        fields.emplace_back("boards", Value::list(std::move(list)));
    }
    if (from) fields.emplace_back("from", Value::text(from->to_string()));
    if (to) fields.emplace_back("to", Value::text(to->to_string()));
    if (kind == Kind::min_score) {
        fields.emplace_back("bound", Value::text(rational_to_string(bound)));
    }
    return Value::map(std::move(fields));
}

Filter Filter::from_value(const Value& v) {
    Filter f;
    f.kind = filter_kind_value(v.at("kind").as_text());
    if (const auto* kids = v.get("children")) {
        for (const auto& c : kids->as_list()) f.children.push_back(from_value(c));
    }
    if (f.kind == Kind::not_of && f.children.size() != 1) {
        throw MalformedEncoding("not_of takes exactly one child");
    }
    if (const auto* t = v.get("text")) f.text = t->as_text();
    if (const auto* boards = v.get("boards")) {
        for (const auto& b : boards->as_list()) f.boards.push_back(b.as_text());
    }
    if (const auto* from = v.get("from")) {
        auto d = Date::parse(from->as_text());
        if (!d) throw MalformedEncoding("bad from date");
        f.from = *d;
    }
    if (const auto* to = v.get("to")) {
        auto d = Date::parse(to->as_text());
        if (!d) throw MalformedEncoding("bad to date");
        f.to = *d;
    }
    if (f.kind == Kind::min_score) {
        auto r = rational_parse(v.at("bound").as_text());
        if (!r) throw MalformedEncoding("bad score bound");
        f.bound = *r;
    }
    return f;
}

void Filter::collect_blacklists(std::set<std::string>& out) const {
    if (kind == Kind::escrow_blacklist) {
        out.insert(boards.begin(), boards.end());
    }
    for (const auto& c : children) c.collect_blacklists(out);
}

// --- saved query ----------------------------------------------------------------

Value SavedQuery::to_value() const {
    return Value::map({
        {"id", Value::text(id)},
        {"owner", model::to_value(owner)},
        {"filter", filter.to_value()},
        {"ranking", ranking.to_value()},
        {"public", Value::boolean(is_public)},
    });
}

SavedQuery SavedQuery::from_value(const Value& v) {
    SavedQuery q;
    q.id = v.at("id").as_text();
    q.owner = model::identity_from_value(v.at("owner"));
    q.filter = Filter::from_value(v.at("filter"));
    q.ranking = RankingSpec::from_value(v.at("ranking"));
    q.is_public = v.at("public").as_bool();
    return q;
}

// --- execution ----------------------------------------------------------------------

namespace {

struct EvalContext {
    const KnowledgeGraph& graph;
    const std::map<Fingerprint, std::optional<Rational>>& scores;
};

bool filter_matches(const Filter& f, const Node& node, const EvalContext& ctx) {
    switch (f.kind) {
        case Filter::Kind::match_all:
            return true;
        case Filter::Kind::all_of:
            for (const auto& c : f.children) {
                if (!filter_matches(c, node, ctx)) return false;
            }
            return true;
        case Filter::Kind::any_of:
            for (const auto& c : f.children) {
                if (filter_matches(c, node, ctx)) return true;
            }
            return false;
        case Filter::Kind::not_of:
            return !filter_matches(f.children.front(), node, ctx);
        case Filter::Kind::title_term: {
            // Whole-word match over the title and, for reviews, the comment
            // text; both sides NFC-normalized, no stemming.
            std::string want = fold_ascii(canonical::nfc_normalize(f.text));
            if (node.title &&
                contains_word(fold_ascii(canonical::nfc_normalize(*node.title)), want)) {
                return true;
            }
            if (node.review &&
                contains_word(fold_ascii(canonical::nfc_normalize(node.review->comments)),
                              want)) {
                return true;
            }
            return false;
        }
        case Filter::Kind::author_match: {
            if (!node.authors) return false;
            std::string want = fold_ascii(canonical::nfc_normalize(f.text));
            for (const auto& a : *node.authors) {
                if (fold_ascii(canonical::nfc_normalize(a)) == want) return true;
            }
            return false;
        }
        case Filter::Kind::date_range: {
            if (!node.earliest_coe) return false;
            if (f.from && *node.earliest_coe < *f.from) return false;
            if (f.to && *node.earliest_coe > *f.to) return false;
            return true;
        }
        case Filter::Kind::min_score: {
            auto it = ctx.scores.find(node.fp);
            if (it == ctx.scores.end() || !it->second) return false;
            return *it->second >= f.bound;
        }
        case Filter::Kind::reviewed_by: {
            for (const Node* r : ctx.graph.reviews_of(node.fp)) {
                if (!r->review) continue;
                std::string board = r->review_board_key();
                if (!board.empty() && board == f.text) return true;
                if (const auto* open =
                        std::get_if<model::OpenAttribution>(&r->review->author)) {
                    if (open->identity.display_name == f.text) return true;
                }
            }
            return false;
        }
        case Filter::Kind::escrow_blacklist:
            // Acts query-wide through collect_blacklists(); as a local
            // predicate it matches everything.
            return true;
    }
    return true;
}

std::string relation_text(model::PostHocCitation::Relation r) {
    switch (r) {
        case model::PostHocCitation::Relation::prior_work: return "prior_work";
        case model::PostHocCitation::Relation::influence: return "influence";
        case model::PostHocCitation::Relation::plagiarism: return "plagiarism";
    }
    return "?";
}

}  // namespace

std::vector<ResultEntry> execute(const KnowledgeGraph& graph, const SavedQuery& q,
                                 bool as_owner) {
    if (!q.is_public && !as_owner) {
        throw QueryPrivate("query '" + q.id + "' is not public");
    }

    std::set<std::string> blacklist;
    q.filter.collect_blacklists(blacklist);

    // Scores for every node, computed once against the query's blacklist.
    std::map<Fingerprint, std::optional<Rational>> scores;
    for (const auto& [fp, node] : graph.nodes()) {
        scores[fp] = graph.score(fp, q.ranking, blacklist);
    }

    EvalContext ctx{graph, scores};
    std::vector<const Node*> matched;
    for (const auto& [fp, node] : graph.nodes()) {
        // Reviews published under blacklisted boards never appear as results.
        if (node.review) {
            std::string board = node.review_board_key();
            if (!board.empty() && blacklist.contains(board)) continue;
        }
        if (filter_matches(q.filter, node, ctx)) matched.push_back(&node);
    }

    std::stable_sort(matched.begin(), matched.end(), [&](const Node* a, const Node* b) {
        const auto& sa = scores.at(a->fp);
        const auto& sb = scores.at(b->fp);
        if (sa.has_value() != sb.has_value()) return sa.has_value();
        if (sa && sb && *sa != *sb) return *sa > *sb;
        if (a->earliest_coe.has_value() != b->earliest_coe.has_value()) {
            return a->earliest_coe.has_value();
        }
        if (a->earliest_coe && b->earliest_coe && *a->earliest_coe != *b->earliest_coe) {
            return *a->earliest_coe > *b->earliest_coe;
        }
        return a->fp < b->fp;
    });

    std::vector<ResultEntry> results;
    std::set<Fingerprint> included;
    for (const Node* node : matched) {
        results.push_back(ResultEntry{node->handle(), scores.at(node->fp), false, {}});
        included.insert(node->fp);
    }

    // Post-hoc expansion: surface the missing side of citations touching any
    // result, with the citation's statement and its reviews as context.
    size_t base_count = results.size();
    for (size_t i = 0; i < base_count; ++i) {
        Fingerprint here = results[i].handle.fingerprint;
        for (const Node* citation : graph.citations_touching(here)) {
            if (!citation->citation) continue;
            const auto& cite = *citation->citation;
            const model::DocumentHandle& other =
                cite.source.fingerprint == here ? cite.target : cite.source;
            if (included.contains(other.fingerprint)) continue;
            included.insert(other.fingerprint);

            ResultEntry entry;
            const Node* other_node = graph.find(other.fingerprint);
            entry.handle = other_node ? other_node->handle() : other;
            auto it = scores.find(other.fingerprint);
            entry.score = it != scores.end() ? it->second : std::nullopt;
            entry.expansion = true;
            entry.notes.push_back("posthoc-expansion " + relation_text(cite.relation) +
                                  " of " + here.path_form());
            if (!cite.statement.empty()) entry.notes.push_back("statement: " + cite.statement);
            for (const Node* r : graph.reviews_of(citation->fp)) {
                if (!r->review) continue;
                std::string summary =
                    "citation-review by " + model::attribution_display(r->review->author);
                for (const auto& g : r->review->grades) {
                    summary += " " + g.name + " " + std::to_string(g.value) + "/" +
                               std::to_string(g.scale_max);
                }
                entry.notes.push_back(summary);
            }
            results.push_back(std::move(entry));
        }
    }
    return results;
}

}  // namespace pubfab::query
