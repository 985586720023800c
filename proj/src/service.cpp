// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/service.hpp"

#include <httplib.h>

#include <mutex>
#include <thread>

#include "pubfab/feed.hpp"

namespace pubfab::service {

query::KnowledgeGraph graph_from_store(store::StoreNode& node) {
    query::KnowledgeGraph graph;
    for (const auto& fp : node.indexed_fingerprints()) {
        auto meta = node.get_metadata(fp);
        if (node.is_metadata_only(fp)) {
            if (meta) graph.index_handle(*meta);
            continue;
        }
        auto out = node.get_local(fp);
        if (out.kind != store::LookupOutcome::Kind::found) continue;
        model::Blob blob{out.object->bytes, out.object->media_type};
        if (meta) {
            graph.index(blob, *meta);
        } else {
            graph.index(blob);
        }
    }
    return graph;
}

struct HttpService::Impl {
    store::StoreNode& node;
    std::map<std::string, query::SavedQuery> queries;
    httplib::Server server;
    std::thread thread;
    std::mutex lock;

    Impl(store::StoreNode& n, std::map<std::string, query::SavedQuery> q)
        : node(n), queries(std::move(q)) {}

    static std::optional<Fingerprint> parse_fp(const std::string& text) {
        try {
            return Fingerprint::parse(text);
        } catch (const DomainError&) {
            return std::nullopt;
        }
    }

    void setup() {
        server.Get(R"(/objects/([a-z0-9]+/[0-9a-f]+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       std::lock_guard guard(lock);
                       auto fp = parse_fp(req.matches[1]);
                       if (!fp) {
                           res.status = 400;
                           res.set_content("malformed fingerprint", "text/plain");
                           return;
                       }
                       store::LookupOutcome out;
                       if (node.config().mode == store::StoreMode::institutional &&
                           req.has_param("ttl")) {
                           out = node.propagate_request(*fp, std::stoi(req.get_param_value("ttl")),
                                                        {});
                       } else {
                           out = node.get_local(*fp);
                       }
                       res.set_header("X-Lookup-Outcome", store::outcome_name(out.kind));
                       switch (out.kind) {
                           case store::LookupOutcome::Kind::found: {
                               std::string provenance;
                               for (const auto& p : out.provenance) {
                                   if (!provenance.empty()) provenance += ", ";
                                   provenance += p;
                               }
                               res.set_header("X-Provenance", provenance);
                               res.set_content(to_string(out.object->bytes),
                                               out.object->media_type);
                               break;
                           }
                           case store::LookupOutcome::Kind::metadata_only: {
                               Bytes meta = canonical::encode(model::to_value(*out.metadata));
                               res.status = 404;
                               res.set_content(to_string(meta), "application/octet-stream");
                               break;
                           }
                           default:
                               res.status = 404;
                               res.set_content(store::outcome_name(out.kind), "text/plain");
                       }
                   });

        server.Get(R"(/metadata/([a-z0-9]+/[0-9a-f]+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       std::lock_guard guard(lock);
                       auto fp = parse_fp(req.matches[1]);
                       if (!fp) {
                           res.status = 400;
                           return;
                       }
                       auto meta = node.get_metadata(*fp);
                       if (!meta) {
                           res.status = 404;
                           return;
                       }
                       Bytes bytes = canonical::encode(model::to_value(*meta));
                       res.set_content(to_string(bytes), "application/octet-stream");
                   });

        server.Put("/objects", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard guard(lock);
            if (!req.has_header("X-Submitter")) {
                res.status = 400;
                res.set_content("X-Submitter header required", "text/plain");
                return;
            }
            model::Identity submitter;
            submitter.display_name = req.get_header_value("X-Submitter");
            if (req.has_header("X-Submitter-Affiliation")) {
                submitter.affiliation = req.get_header_value("X-Submitter-Affiliation");
            }
            std::optional<std::string> title;
            if (req.has_header("X-Title")) title = req.get_header_value("X-Title");
            model::Blob blob{to_bytes(req.body),
                             req.has_header("Content-Type")
                                 ? req.get_header_value("Content-Type")
                                 : "application/octet-stream"};
            try {
                auto handle = node.submit(blob, submitter, title);
                Bytes bytes = canonical::encode(model::to_value(handle));
                res.status = 201;
                res.set_content(to_string(bytes), "application/octet-stream");
            } catch (const DomainError& e) {
                res.status = 403;
                res.set_content(e.what(), "text/plain");
            }
        });

        server.Get(R"(/queries/([A-Za-z0-9_\-]+)/(results|definition|feed))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       std::lock_guard guard(lock);
                       auto it = queries.find(req.matches[1]);
                       if (it == queries.end()) {
                           res.status = 404;
                           res.set_content("no such query", "text/plain");
                           return;
                       }
                       const query::SavedQuery& q = it->second;
                       size_t limit = 50;
                       if (req.has_param("limit")) {
                           limit = std::stoul(req.get_param_value("limit"));
                       }
                       std::string which = req.matches[2];
                       try {
                           if (which == "definition") {
                               Bytes bytes = canonical::encode(q.to_value());
                               res.set_content(to_string(bytes), "application/octet-stream");
                           } else if (which == "results") {
                               auto graph = graph_from_store(node);
                               Bytes bytes = query::results_canonical(graph, q, limit);
                               res.set_content(to_string(bytes), "application/octet-stream");
                           } else {
                               auto graph = graph_from_store(node);
                               res.set_content(query::feed(graph, q, limit),
                                               "application/atom+xml");
                           }
                       } catch (const QueryPrivate& e) {
                           res.status = 403;
                           res.set_content(e.what(), "text/plain");
                       }
                   });
    }
};

HttpService::HttpService(store::StoreNode& node, std::map<std::string, query::SavedQuery> queries)
    : impl_(std::make_unique<Impl>(node, std::move(queries))) {
    impl_->setup();
}

HttpService::~HttpService() {
    stop();
}

int HttpService::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        throw DomainError("BindFailed", "cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpService::stop() {
    if (impl_ && impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

}  // namespace pubfab::service
