// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Request/response frames between data-store nodes: canonical-encoded maps,
// length-prefixed by a 4-byte big-endian size, usable over any byte stream
// or the simulated transport. The client-facing operations are GET_OBJECT,
// GET_METADATA, PUT_OBJECT and FIND_NODE; FIND_VALUE and STORE_PROVIDER are
// the DHT-internal routing operations carried in the same frame format.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pubfab/canonical.hpp"
#include "pubfab/errors.hpp"
#include "pubfab/fingerprint.hpp"
#include "pubfab/model.hpp"

namespace pubfab::wire {

struct Request {
    enum class Op {
        get_object,
        get_metadata,
        put_object,
        find_node,
        find_value,
        store_provider,
    };

    Op op = Op::get_object;
    std::optional<Fingerprint> fp;
    // Institutional flood control: remaining hops and nodes already covered.
    int ttl = 0;
    std::vector<Bytes> visited;
    // put_object
    std::optional<Bytes> object_bytes;
    std::string media_type;
    std::optional<model::Identity> submitter;
    std::optional<std::string> title;
    std::optional<std::vector<std::string>> authors;
    // find_node / store_provider
    std::optional<Bytes> target_id;
    std::optional<Bytes> provider_id;
    std::string provider_label;

    canonical::Value to_value() const;
    static Request from_value(const canonical::Value& v);
};

struct NodeRef {
    Bytes id;
    std::string label;

    bool operator==(const NodeRef&) const = default;
};

struct Response {
    enum class Status {
        found,
        metadata,   // existence known, content not stored here
        absent,     // `definite` says whether absence is authoritative
        nodes,      // find_node / find_value routing answer
        providers,  // find_value: who can serve the content
        stored,
        error,
    };

    Status status = Status::absent;
    std::optional<Bytes> object_bytes;
    std::string media_type;
    std::vector<std::string> provenance;  // serving node first, then relays
    std::optional<model::DocumentHandle> metadata;
    bool definite = false;
    std::vector<Bytes> visited;
    std::vector<NodeRef> nodes;
    std::vector<NodeRef> providers;
    std::string error;

    canonical::Value to_value() const;
    static Response from_value(const canonical::Value& v);
};

// Framing: 4-byte big-endian payload size, then the canonical bytes.
Bytes frame(const canonical::Value& payload);

// Consumes one frame from the front of `data`; returns nullopt when more
// bytes are needed. Throws MalformedEncoding on oversized or corrupt frames.
std::optional<canonical::Value> unframe(std::span<const uint8_t> data, size_t& consumed);

inline Bytes encode_request(const Request& r) {
    return frame(r.to_value());
}
inline Bytes encode_response(const Response& r) {
    return frame(r.to_value());
}

inline constexpr size_t kMaxFrameSize = 64 * 1024 * 1024;

}  // namespace pubfab::wire
