// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/feed.hpp"

namespace pubfab::query {

namespace {

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string atom_date(const Date& d) {
    return d.to_string() + "T00:00:00Z";
}

}  // namespace

canonical::Value result_to_value(const ResultEntry& entry) {
    using canonical::Value;
    std::vector<std::pair<std::string, Value>> fields;
    fields.emplace_back("handle", model::to_value(entry.handle));
    if (entry.score) fields.emplace_back("score", Value::text(rational_to_string(*entry.score)));
    if (entry.expansion) fields.emplace_back("expansion", Value::boolean(true));
    if (!entry.notes.empty()) {
        Value::List notes;
        for (const auto& n : entry.notes) notes.push_back(Value::text(n));
        fields.emplace_back("notes", Value::list(std::move(notes)));
    }
    return Value::map(std::move(fields));
}

Bytes results_canonical(const KnowledgeGraph& graph, const SavedQuery& q, size_t limit) {
    auto results = execute(graph, q);
    canonical::Value::List out;
    for (size_t i = 0; i < results.size() && i < limit; ++i) {
        out.push_back(result_to_value(results[i]));
    }
    return canonical::encode(canonical::Value::list(std::move(out)));
}

std::string feed(const KnowledgeGraph& graph, const SavedQuery& q, size_t limit) {
    auto results = execute(graph, q);  // throws QueryPrivate for private queries
    if (results.size() > limit) results.resize(limit);

    // The feed-level updated stamp is the newest entry date: output depends
    // only on graph state, so identical state yields identical bytes.
    std::optional<Date> newest;
    for (const auto& r : results) {
        const query::Node* node = graph.find(r.handle.fingerprint);
        if (node && node->earliest_coe && (!newest || *node->earliest_coe > *newest)) {
            newest = node->earliest_coe;
        }
    }

    Bytes definition = canonical::encode(q.to_value());

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
    out += "<feed xmlns=\"http://www.w3.org/2005/Atom\">\n";
    out += "  <title>" + xml_escape(q.id) + "</title>\n";
    out += "  <id>urn:pubfab:query:" + xml_escape(q.id) + "</id>\n";
    out += "  <updated>" + atom_date(newest.value_or(Date{1970, 1, 1})) + "</updated>\n";
    out += "  <author><name>" + xml_escape(q.owner.display_name) + "</name></author>\n";
    // The public query definition, verbatim, so users can assess the
    // journal's criteria.
    out += "  <pubfab:definition xmlns:pubfab=\"urn:pubfab\">" +
           xml_escape(std::string(definition.begin(), definition.end())) +
           "</pubfab:definition>\n";

    for (const auto& r : results) {
        const query::Node* node = graph.find(r.handle.fingerprint);
        std::string title = r.handle.title.value_or(r.handle.fingerprint.path_form());
        out += "  <entry>\n";
        out += "    <title>" + xml_escape(title) + "</title>\n";
        out += "    <id>" + xml_escape(r.handle.fingerprint.path_form()) + "</id>\n";
        Date updated = (node && node->earliest_coe) ? *node->earliest_coe : Date{1970, 1, 1};
        out += "    <updated>" + atom_date(updated) + "</updated>\n";
        std::string summary;
        summary += r.score ? "score " + rational_to_string(*r.score) : "unscored";
        for (const auto& c : r.handle.coes) summary += "; coe " + coe::to_text(c);
        for (const auto& n : r.notes) summary += "; " + n;
        out += "    <summary>" + xml_escape(summary) + "</summary>\n";
        out += "  </entry>\n";
    }
    out += "</feed>\n";
    return out;
}

}  // namespace pubfab::query
