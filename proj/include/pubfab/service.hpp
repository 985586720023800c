// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>

#include "pubfab/query.hpp"
#include "pubfab/store.hpp"

namespace pubfab::service {

// Indexes everything a store knows into a fresh knowledge graph:
// content-bearing objects fully, metadata-only entries by handle.
query::KnowledgeGraph graph_from_store(store::StoreNode& node);

// HTTP face of a store node plus its query engine:
//   GET /objects/{fp}            object bytes (X-Provenance names the server)
//   GET /metadata/{fp}           canonical handle record
//   PUT /objects                 submit (X-Submitter header, Content-Type)
//   GET /queries/{id}/results    canonical-encoded ranked results
//   GET /queries/{id}/definition the public saved-query definition
//   GET /queries/{id}/feed       Atom feed
// Handlers serialize on one lock; the node contract allows concurrent reads
// but a single writer.
class HttpService {
public:
    HttpService(store::StoreNode& node, std::map<std::string, query::SavedQuery> queries);
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    // Binds and serves on a background thread; returns the bound port.
    int start(const std::string& host, int port = 0);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pubfab::service
