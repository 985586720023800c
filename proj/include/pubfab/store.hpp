// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Data-store nodes in the two network roles:
//
//  - institutional: contractual peering, "home" stores responsible for
//    long-term persistence, TTL flood of unsatisfied requests with a sound
//    definitely-absent verdict, optional affiliation-gated submission, and
//    metadata-only indexing of legacy works;
//  - peer-to-peer: owner-only insertion, Kademlia-style lookup over the XOR
//    metric (content stays at its owner; provider records are published to
//    the nodes closest to the key), transient caching of fetched copies,
//    and absence that is never definite.
//
// Every served copy carries the serving node's label (its owner identity in
// the p2p network) as provenance.

#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pubfab/errors.hpp"
#include "pubfab/fingerprint.hpp"
#include "pubfab/model.hpp"
#include "pubfab/wire.hpp"

namespace pubfab::store {

using NodeId = std::array<uint8_t, 32>;

NodeId node_id_from_bytes(std::span<const uint8_t> bytes);  // must be 32 bytes
Bytes node_id_bytes(const NodeId& id);

// XOR-metric comparison: is `a` closer to `key` than `b`?
bool xor_closer(const NodeId& a, const NodeId& b, const NodeId& key);

enum class StoreMode { institutional, p2p };
enum class SubmissionPolicy { open, affiliated_only };

struct StoreConfig {
    StoreMode mode = StoreMode::institutional;
    NodeId node_id{};
    std::string label;                     // institution name; owner name in p2p
    std::optional<model::Identity> owner;  // required in p2p mode
    SubmissionPolicy submission_policy = SubmissionPolicy::open;
    std::optional<std::string> affiliation;  // accepted affiliation when gated
    int request_ttl = 6;
    size_t cache_capacity = 64;  // cached non-home objects
    size_t dht_k = 8;
    size_t dht_alpha = 3;
};

struct StoredObject {
    Bytes bytes;
    std::string media_type;
};

struct LookupOutcome {
    enum class Kind { found, metadata_only, definitely_absent, possibly_absent };

    Kind kind = Kind::possibly_absent;
    std::optional<StoredObject> object;
    std::optional<model::DocumentHandle> metadata;
    std::vector<std::string> provenance;
    size_t hops = 0;
};

const char* outcome_name(LookupOutcome::Kind k);

// --- storage backends ---------------------------------------------------------

// Byte store under string keys plus an append-only record file; backends:
// in-memory (harness, survives simulated restarts by sharing the instance)
// and filesystem (key = relative path).
class ObjectStorage {
public:
    virtual ~ObjectStorage() = default;
    virtual void put(const std::string& key, const Bytes& data) = 0;
    virtual std::optional<Bytes> get(const std::string& key) const = 0;
    virtual void erase(const std::string& key) = 0;
    virtual std::vector<std::string> keys() const = 0;  // sorted
    virtual void append_record(const std::string& file, const Bytes& record) = 0;
    virtual std::vector<Bytes> read_records(const std::string& file) const = 0;
};

class MemStorage : public ObjectStorage {
public:
    void put(const std::string& key, const Bytes& data) override;
    std::optional<Bytes> get(const std::string& key) const override;
    void erase(const std::string& key) override;
    std::vector<std::string> keys() const override;
    void append_record(const std::string& file, const Bytes& record) override;
    std::vector<Bytes> read_records(const std::string& file) const override;

private:
    std::map<std::string, Bytes> blobs_;
    std::map<std::string, std::vector<Bytes>> records_;
};

class FsStorage : public ObjectStorage {
public:
    explicit FsStorage(std::string root);
    void put(const std::string& key, const Bytes& data) override;
    std::optional<Bytes> get(const std::string& key) const override;
    void erase(const std::string& key) override;
    std::vector<std::string> keys() const override;
    void append_record(const std::string& file, const Bytes& record) override;
    std::vector<Bytes> read_records(const std::string& file) const override;

private:
    std::string root_;
};

// --- node -----------------------------------------------------------------------

// Transport to one other node. The simulated transport injects drops and
// delays here; a real deployment would put a socket behind it. A nullopt
// return is a timeout.
class Peer {
public:
    virtual ~Peer() = default;
    virtual NodeId id() const = 0;
    virtual std::optional<wire::Response> call(const wire::Request& request) = 0;
};

using PeerDial = std::function<std::shared_ptr<Peer>(const NodeId&)>;

class StoreNode {
public:
    StoreNode(StoreConfig config, std::shared_ptr<ObjectStorage> storage);

    const StoreConfig& config() const { return config_; }
    const NodeId& id() const { return config_.node_id; }
    const std::string& label() const;

    // Peering links (institutional flood follows these in order).
    void add_peer(std::shared_ptr<Peer> peer);
    void reset_peers();
    // Routing-table insertion (p2p); call for every node this one learns of.
    void observe_node(const NodeId& id);
    // Used to dial nodes learned from lookup responses.
    void set_dialer(PeerDial dial);

    // Accepts an object under the node's submission policy, persists it
    // under its fingerprint (idempotent), indexes metadata, and in
    // institutional mode becomes the object's home if it has none here.
    // Throws SubmissionRefused / NotOwner.
    model::DocumentHandle submit(const model::PublishedObject& object,
                                 const model::Identity& submitter,
                                 std::optional<std::string> title = std::nullopt,
                                 std::optional<std::vector<std::string>> authors = std::nullopt);

    // Local-only lookup: content, metadata-only record, or the
    // mode-appropriate absence verdict.
    LookupOutcome get_local(const Fingerprint& fp);
    std::optional<model::DocumentHandle> get_metadata(const Fingerprint& fp) const;

    // Indexes a legacy work without storing content (§ dual-network mode).
    void add_metadata_only(const model::DocumentHandle& handle, std::string media_type);

    // Home management: first accepting institutional node becomes home;
    // further homes are explicit.
    void designate_home(const Fingerprint& fp);
    bool is_home_of(const Fingerprint& fp) const;

    // Deletes cached copies whose home is elsewhere, least recently served
    // first, until at most cache_capacity cached objects remain. Never
    // touches home objects or this node's own submissions.
    std::vector<Fingerprint> evict_non_home();

    // Institutional flood along peering links. Sound absence: definite only
    // when the reachable frontier was exhausted within the TTL and nobody
    // had the object.
    LookupOutcome propagate_request(const Fingerprint& fp);
    LookupOutcome propagate_request(const Fingerprint& fp, int ttl,
                                    const std::vector<Bytes>& visited_in);

    // Publishes provider records for an object this node serves to the k
    // nodes closest to the key.
    void announce_provider(const Fingerprint& fp);

    // Iterative DHT lookup; hops = query waves + the direct fetch. Fetched
    // content is cached here (subject to capacity) and re-announced so the
    // copy becomes a candidate for later searches.
    LookupOutcome dht_lookup(const Fingerprint& fp);

    // Wire server side; every remote operation lands here.
    wire::Response handle_request(const wire::Request& request);

    size_t stored_object_count() const;
    std::vector<wire::NodeRef> closest_nodes(const NodeId& target, size_t k) const;

    // Everything this node knows of, content-bearing or metadata-only.
    std::vector<Fingerprint> indexed_fingerprints() const;
    bool is_metadata_only(const Fingerprint& fp) const;
    std::string media_type_of(const Fingerprint& fp) const;

private:
    std::string content_key(const Fingerprint& fp) const;
    void persist_meta(const model::DocumentHandle& handle, const std::string& media_type,
                      bool metadata_only);
    void load_index();
    void touch(const Fingerprint& fp);
    std::optional<StoredObject> read_verified(const Fingerprint& fp);
    void store_bytes(const Fingerprint& fp, const Bytes& bytes, const std::string& media_type);
    LookupOutcome flood(const Fingerprint& fp, int ttl, std::set<Bytes>& visited);
    std::vector<wire::NodeRef> iterative_find_node(const NodeId& target, size_t* hops);

    StoreConfig config_;
    std::shared_ptr<ObjectStorage> storage_;
    std::vector<std::shared_ptr<Peer>> peers_;
    PeerDial dial_;

    struct MetaRecord {
        model::DocumentHandle handle;
        std::string media_type;
        bool metadata_only = false;
    };
    std::map<Fingerprint, MetaRecord> index_;
    std::set<Fingerprint> home_of_;
    std::set<Fingerprint> own_submissions_;
    std::map<Fingerprint, uint64_t> last_served_;
    uint64_t serve_counter_ = 0;

    // p2p state: routing table (bucketed by shared prefix with our id) and
    // provider records we hold for keys near us.
    std::array<std::vector<NodeId>, 257> buckets_;
    std::map<Fingerprint, std::vector<wire::NodeRef>> providers_;
};

}  // namespace pubfab::store
