// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "pubfab/query.hpp"

namespace pubfab::query {

// Atom-compatible syndication of a public saved query: one entry per result
// (entry id = path-form fingerprint, entry updated = earliest CoE date),
// with the query definition embedded so readers can assess the journal's
// criteria. Output is a pure function of the graph and query; no clocks.
// Throws QueryPrivate for non-public queries.
std::string feed(const KnowledgeGraph& graph, const SavedQuery& q, size_t limit);

// The same results as a canonical-encoded list (the machine-readable
// alternative served at /queries/{id}/results).
Bytes results_canonical(const KnowledgeGraph& graph, const SavedQuery& q, size_t limit);

canonical::Value result_to_value(const ResultEntry& entry);

}  // namespace pubfab::query
