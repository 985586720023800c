// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/store.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace pubfab::store {

namespace fs = std::filesystem;
using canonical::Value;

NodeId node_id_from_bytes(std::span<const uint8_t> bytes) {
    if (bytes.size() != 32) throw MalformedEncoding("node ids are 32 bytes");
    NodeId id;
    std::copy(bytes.begin(), bytes.end(), id.begin());
    return id;
}

Bytes node_id_bytes(const NodeId& id) {
    return Bytes(id.begin(), id.end());
}

bool xor_closer(const NodeId& a, const NodeId& b, const NodeId& key) {
    for (size_t i = 0; i < a.size(); ++i) {
        uint8_t da = a[i] ^ key[i];
        uint8_t db = b[i] ^ key[i];
        if (da != db) return da < db;
    }
    return false;
}

const char* outcome_name(LookupOutcome::Kind k) {
    switch (k) {
        case LookupOutcome::Kind::found: return "found";
        case LookupOutcome::Kind::metadata_only: return "metadata_only";
        case LookupOutcome::Kind::definitely_absent: return "definitely_absent";
        case LookupOutcome::Kind::possibly_absent: return "possibly_absent";
    }
    return "?";
}

// --- storage ---------------------------------------------------------------

void MemStorage::put(const std::string& key, const Bytes& data) {
    blobs_[key] = data;
}

std::optional<Bytes> MemStorage::get(const std::string& key) const {
    auto it = blobs_.find(key);
    if (it == blobs_.end()) return std::nullopt;
    return it->second;
}

void MemStorage::erase(const std::string& key) {
    blobs_.erase(key);
}

std::vector<std::string> MemStorage::keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : blobs_) out.push_back(k);
    return out;
}

void MemStorage::append_record(const std::string& file, const Bytes& record) {
    records_[file].push_back(record);
}

std::vector<Bytes> MemStorage::read_records(const std::string& file) const {
    auto it = records_.find(file);
    return it == records_.end() ? std::vector<Bytes>{} : it->second;
}

FsStorage::FsStorage(std::string root) : root_(std::move(root)) {
    fs::create_directories(root_);
}

void FsStorage::put(const std::string& key, const Bytes& data) {
    fs::path path = fs::path(root_) / key;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

std::optional<Bytes> FsStorage::get(const std::string& key) const {
    fs::path path = fs::path(root_) / key;
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void FsStorage::erase(const std::string& key) {
    std::error_code ec;
    fs::remove(fs::path(root_) / key, ec);
}

std::vector<std::string> FsStorage::keys() const {
    std::vector<std::string> out;
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(root_, ec);
         it != fs::recursive_directory_iterator(); ++it) {
        if (it->is_regular_file()) {
            out.push_back(fs::relative(it->path(), root_).generic_string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Canonical encodings contain no raw control bytes, so records are
// newline-delimited.
void FsStorage::append_record(const std::string& file, const Bytes& record) {
    fs::path path = fs::path(root_) / file;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.write(reinterpret_cast<const char*>(record.data()),
              static_cast<std::streamsize>(record.size()));
    out.put('\n');
}

std::vector<Bytes> FsStorage::read_records(const std::string& file) const {
    std::ifstream in(fs::path(root_) / file, std::ios::binary);
    std::vector<Bytes> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(to_bytes(line));
    }
    return out;
}

// --- node ------------------------------------------------------------------

namespace {

constexpr const char* kIndexFile = "index.pce";

size_t bucket_of(const NodeId& self, const NodeId& other) {
    // Shared-prefix length in bits; identical ids land in the last bucket.
    for (size_t byte = 0; byte < self.size(); ++byte) {
        uint8_t diff = self[byte] ^ other[byte];
        if (diff != 0) {
            size_t bit = 0;
            while (!(diff & 0x80)) {
                diff <<= 1;
                ++bit;
            }
            return byte * 8 + bit;
        }
    }
    return 256;
}

NodeId key_of(const Fingerprint& fp) {
    return node_id_from_bytes(fp.digest());
}

std::optional<wire::Response> call_with_retry(Peer& peer, const wire::Request& request) {
    auto response = peer.call(request);
    if (!response) response = peer.call(request);  // one retry on timeout
    return response;
}

}  // namespace

StoreNode::StoreNode(StoreConfig config, std::shared_ptr<ObjectStorage> storage)
    : config_(std::move(config)), storage_(std::move(storage)) {
    if (config_.mode == StoreMode::p2p && !config_.owner) {
        throw SubmissionRefused("p2p nodes are managed by an individual person: owner required");
    }
    load_index();
}

const std::string& StoreNode::label() const {
    if (config_.owner) return config_.owner->display_name;
    return config_.label;
}

void StoreNode::add_peer(std::shared_ptr<Peer> peer) {
    peers_.push_back(std::move(peer));
}

void StoreNode::reset_peers() {
    peers_.clear();
}

void StoreNode::observe_node(const NodeId& id) {
    if (id == config_.node_id) return;
    auto& bucket = buckets_[bucket_of(config_.node_id, id)];
    for (const auto& existing : bucket) {
        if (existing == id) return;
    }
    if (bucket.size() < config_.dht_k) bucket.push_back(id);
}

void StoreNode::set_dialer(PeerDial dial) {
    dial_ = std::move(dial);
}

std::string StoreNode::content_key(const Fingerprint& fp) const {
    std::string hex = hex_encode(fp.digest());
    return "objects/" + fp.algorithm() + "/" + hex.substr(0, 2) + "/" + hex.substr(2);
}

void StoreNode::persist_meta(const model::DocumentHandle& handle, const std::string& media_type,
                             bool metadata_only) {
    MetaRecord record{handle, media_type, metadata_only};
    index_[handle.fingerprint] = record;

    std::vector<std::pair<std::string, Value>> fields;
    fields.emplace_back("handle", model::to_value(handle));
    fields.emplace_back("media_type", Value::text(media_type));
    fields.emplace_back("metadata_only", Value::boolean(metadata_only));
    fields.emplace_back("home", Value::boolean(home_of_.contains(handle.fingerprint)));
    fields.emplace_back("own", Value::boolean(own_submissions_.contains(handle.fingerprint)));
    storage_->append_record(kIndexFile, canonical::encode(Value::map(std::move(fields))));
}

void StoreNode::load_index() {
    for (const auto& record : storage_->read_records(kIndexFile)) {
        try {
            Value v = canonical::decode(record);
            MetaRecord meta;
            meta.handle = model::handle_from_value(v.at("handle"));
            meta.media_type = v.at("media_type").as_text();
            meta.metadata_only = v.at("metadata_only").as_bool();
            index_[meta.handle.fingerprint] = meta;
            if (v.at("home").as_bool()) home_of_.insert(meta.handle.fingerprint);
            if (v.at("own").as_bool()) own_submissions_.insert(meta.handle.fingerprint);
        } catch (const DomainError&) {
            // A truncated trailing record does not poison the index.
        }
    }
}

void StoreNode::touch(const Fingerprint& fp) {
    last_served_[fp] = ++serve_counter_;
}

std::optional<StoredObject> StoreNode::read_verified(const Fingerprint& fp) {
    auto bytes = storage_->get(content_key(fp));
    if (!bytes) return std::nullopt;
    // Integrity gate on every read path: served bytes must re-fingerprint.
    if (fingerprint(*bytes, fp.algorithm()) != fp) {
        storage_->erase(content_key(fp));
        return std::nullopt;
    }
    StoredObject object;
    object.bytes = std::move(*bytes);
    auto it = index_.find(fp);
    object.media_type = it != index_.end() ? it->second.media_type : "application/octet-stream";
    return object;
}

void StoreNode::store_bytes(const Fingerprint& fp, const Bytes& bytes,
                            const std::string& media_type) {
    storage_->put(content_key(fp), bytes);
    if (!index_.contains(fp)) {
        model::DocumentHandle handle;
        handle.fingerprint = fp;
        persist_meta(handle, media_type, false);
    } else if (index_.at(fp).metadata_only) {
        MetaRecord meta = index_.at(fp);
        meta.metadata_only = false;
        persist_meta(meta.handle, meta.media_type, false);
    }
}

model::DocumentHandle StoreNode::submit(const model::PublishedObject& object,
                                        const model::Identity& submitter,
                                        std::optional<std::string> title,
                                        std::optional<std::vector<std::string>> authors) {
    if (config_.mode == StoreMode::p2p) {
        if (!config_.owner || !(submitter == *config_.owner)) {
            throw NotOwner("only the node owner can insert objects on a p2p node");
        }
    } else if (config_.submission_policy == SubmissionPolicy::affiliated_only) {
        if (!submitter.affiliation || !config_.affiliation ||
            *submitter.affiliation != *config_.affiliation) {
            throw SubmissionRefused("submissions are restricted to affiliation '" +
                                    config_.affiliation.value_or("?") + "'");
        }
    }

    Bytes bytes = model::object_canonical_bytes(object);
    Fingerprint fp = fingerprint(bytes);
    std::string media_type = "application/octet-stream";
    if (const auto* blob = std::get_if<model::Blob>(&object)) media_type = blob->media_type;
    if (std::holds_alternative<model::Dictionary>(object)) media_type = "application/vnd.dict";

    model::DocumentHandle handle;
    handle.title = std::move(title);
    handle.authors = std::move(authors);
    handle.fingerprint = fp;

    storage_->put(content_key(fp), bytes);
    own_submissions_.insert(fp);
    if (config_.mode == StoreMode::institutional && !home_of_.contains(fp)) {
        // First accepting institutional node becomes the object's home.
        home_of_.insert(fp);
    }
    persist_meta(handle, media_type, false);
    touch(fp);
    return handle;
}

LookupOutcome StoreNode::get_local(const Fingerprint& fp) {
    LookupOutcome out;
    auto meta = index_.find(fp);
    if (meta != index_.end() && meta->second.metadata_only) {
        out.kind = LookupOutcome::Kind::metadata_only;
        out.metadata = meta->second.handle;
        return out;
    }
    if (auto object = read_verified(fp)) {
        touch(fp);
        out.kind = LookupOutcome::Kind::found;
        out.object = std::move(object);
        if (meta != index_.end()) out.metadata = meta->second.handle;
        out.provenance = {label()};
        return out;
    }
    out.kind = config_.mode == StoreMode::institutional
                   ? LookupOutcome::Kind::definitely_absent
                   : LookupOutcome::Kind::possibly_absent;
    return out;
}

std::optional<model::DocumentHandle> StoreNode::get_metadata(const Fingerprint& fp) const {
    auto it = index_.find(fp);
    if (it == index_.end()) return std::nullopt;
    return it->second.handle;
}

void StoreNode::add_metadata_only(const model::DocumentHandle& handle, std::string media_type) {
    // Legacy-work indexing: existence becomes searchable, content stays with
    // the rights holder.
    persist_meta(handle, media_type, true);
}

void StoreNode::designate_home(const Fingerprint& fp) {
    // A home is responsible for long-term storage, so it must actually hold
    // the object before taking the role.
    if (!storage_->get(content_key(fp))) {
        throw SubmissionRefused("cannot become home of " + fp.path_form() +
                                ": object is not stored locally");
    }
    home_of_.insert(fp);
    auto it = index_.find(fp);
    persist_meta(it->second.handle, it->second.media_type, it->second.metadata_only);
}

bool StoreNode::is_home_of(const Fingerprint& fp) const {
    return home_of_.contains(fp);
}

std::vector<Fingerprint> StoreNode::evict_non_home() {
    struct Candidate {
        uint64_t served;
        Fingerprint fp;
    };
    std::vector<Candidate> cached;
    for (const auto& [fp, meta] : index_) {
        if (meta.metadata_only) continue;
        if (home_of_.contains(fp) || own_submissions_.contains(fp)) continue;
        if (!storage_->get(content_key(fp))) continue;
        auto it = last_served_.find(fp);
        cached.push_back({it == last_served_.end() ? 0 : it->second, fp});
    }
    std::vector<Fingerprint> evicted;
    if (cached.size() <= config_.cache_capacity) return evicted;
    std::sort(cached.begin(), cached.end(), [](const Candidate& a, const Candidate& b) {
        if (a.served != b.served) return a.served < b.served;  // least recently served first
        return a.fp < b.fp;
    });
    size_t excess = cached.size() - config_.cache_capacity;
    for (size_t i = 0; i < excess; ++i) {
        storage_->erase(content_key(cached[i].fp));
        evicted.push_back(cached[i].fp);
    }
    return evicted;
}

// --- institutional flood ----------------------------------------------------

LookupOutcome StoreNode::flood(const Fingerprint& fp, int ttl, std::set<Bytes>& visited) {
    visited.insert(node_id_bytes(config_.node_id));

    LookupOutcome out;
    std::optional<model::DocumentHandle> metadata_seen;

    auto meta = index_.find(fp);
    if (meta != index_.end() && meta->second.metadata_only) {
        metadata_seen = meta->second.handle;
    } else if (auto object = read_verified(fp)) {
        touch(fp);
        out.kind = LookupOutcome::Kind::found;
        out.object = std::move(object);
        out.provenance = {label()};
        return out;
    }

    bool exhausted = true;
    for (const auto& peer : peers_) {
        Bytes peer_id = node_id_bytes(peer->id());
        if (visited.contains(peer_id)) continue;
        if (ttl <= 0) {
            exhausted = false;  // an unvisited peer beyond the frontier
            continue;
        }
        wire::Request request;
        request.op = wire::Request::Op::get_object;
        request.fp = fp;
        request.ttl = ttl - 1;
        request.visited.assign(visited.begin(), visited.end());
        auto response = peer->call(request);
        if (!response) {
            exhausted = false;  // timeout degrades the verdict, never lies
            continue;
        }
        for (const auto& id : response->visited) visited.insert(id);
        visited.insert(peer_id);
        if (response->status == wire::Response::Status::found && response->object_bytes) {
            out.kind = LookupOutcome::Kind::found;
            out.object = StoredObject{*response->object_bytes, response->media_type};
            out.provenance = response->provenance;
            out.provenance.push_back(label());
            return out;
        }
        if (response->status == wire::Response::Status::metadata && response->metadata) {
            if (!metadata_seen) metadata_seen = response->metadata;
        }
        if (response->status == wire::Response::Status::absent && !response->definite) {
            exhausted = false;
        }
        if (response->status == wire::Response::Status::error) exhausted = false;
    }

    if (metadata_seen) {
        out.kind = LookupOutcome::Kind::metadata_only;
        out.metadata = metadata_seen;
        return out;
    }
    out.kind = exhausted ? LookupOutcome::Kind::definitely_absent
                         : LookupOutcome::Kind::possibly_absent;
    return out;
}

LookupOutcome StoreNode::propagate_request(const Fingerprint& fp) {
    return propagate_request(fp, config_.request_ttl, {});
}

LookupOutcome StoreNode::propagate_request(const Fingerprint& fp, int ttl,
                                           const std::vector<Bytes>& visited_in) {
    if (config_.mode != StoreMode::institutional) {
        throw SubmissionRefused("request propagation runs on institutional nodes");
    }
    std::set<Bytes> visited(visited_in.begin(), visited_in.end());
    LookupOutcome out = flood(fp, ttl, visited);
    if (out.kind == LookupOutcome::Kind::found && !is_home_of(fp) &&
        !own_submissions_.contains(fp) && !storage_->get(content_key(fp))) {
        // Keep a copy; eviction may reclaim it later.
        store_bytes(fp, out.object->bytes, out.object->media_type);
        touch(fp);
        evict_non_home();
    }
    return out;
}

// --- DHT ---------------------------------------------------------------------

std::vector<wire::NodeRef> StoreNode::closest_nodes(const NodeId& target, size_t k) const {
    std::vector<NodeId> all;
    for (const auto& bucket : buckets_) {
        for (const auto& id : bucket) all.push_back(id);
    }
    std::sort(all.begin(), all.end(), [&](const NodeId& a, const NodeId& b) {
        return xor_closer(a, b, target);
    });
    if (all.size() > k) all.resize(k);
    std::vector<wire::NodeRef> out;
    for (const auto& id : all) out.push_back(wire::NodeRef{node_id_bytes(id), ""});
    return out;
}

std::vector<wire::NodeRef> StoreNode::iterative_find_node(const NodeId& target, size_t* hops) {
    std::vector<NodeId> shortlist;
    for (const auto& ref : closest_nodes(target, config_.dht_k)) {
        shortlist.push_back(node_id_from_bytes(ref.id));
    }
    std::set<Bytes> queried;
    size_t waves = 0;

    for (int round = 0; round < 32; ++round) {
        std::sort(shortlist.begin(), shortlist.end(), [&](const NodeId& a, const NodeId& b) {
            return xor_closer(a, b, target);
        });
        std::vector<NodeId> wave;
        for (const auto& id : shortlist) {
            if (wave.size() >= config_.dht_alpha) break;
            if (!queried.contains(node_id_bytes(id))) wave.push_back(id);
        }
        if (wave.empty()) break;
        ++waves;
        for (const auto& id : wave) {
            queried.insert(node_id_bytes(id));
            if (!dial_) continue;
            auto peer = dial_(id);
            if (!peer) continue;
            wire::Request request;
            request.op = wire::Request::Op::find_node;
            request.target_id = node_id_bytes(target);
            auto response = call_with_retry(*peer, request);
            if (!response || response->status != wire::Response::Status::nodes) continue;
            for (const auto& ref : response->nodes) {
                NodeId id2 = node_id_from_bytes(ref.id);
                observe_node(id2);
                if (id2 == config_.node_id) continue;
                if (std::find(shortlist.begin(), shortlist.end(), id2) == shortlist.end()) {
                    shortlist.push_back(id2);
                }
            }
        }
    }
    if (hops) *hops = waves;

    std::sort(shortlist.begin(), shortlist.end(), [&](const NodeId& a, const NodeId& b) {
        return xor_closer(a, b, target);
    });
    if (shortlist.size() > config_.dht_k) shortlist.resize(config_.dht_k);
    std::vector<wire::NodeRef> out;
    for (const auto& id : shortlist) out.push_back(wire::NodeRef{node_id_bytes(id), ""});
    return out;
}

void StoreNode::announce_provider(const Fingerprint& fp) {
    NodeId key = key_of(fp);
    wire::NodeRef self{node_id_bytes(config_.node_id), label()};

    // Hold the record locally too; a later lookup may land here.
    auto& own = providers_[fp];
    bool known = false;
    for (const auto& p : own) {
        if (p.id == self.id) known = true;
    }
    if (!known) own.push_back(self);

    for (const auto& ref : iterative_find_node(key, nullptr)) {
        if (!dial_) break;
        auto peer = dial_(node_id_from_bytes(ref.id));
        if (!peer) continue;
        wire::Request request;
        request.op = wire::Request::Op::store_provider;
        request.fp = fp;
        request.provider_id = self.id;
        request.provider_label = self.label;
        call_with_retry(*peer, request);
    }
}

LookupOutcome StoreNode::dht_lookup(const Fingerprint& fp) {
    if (config_.mode != StoreMode::p2p) {
        throw SubmissionRefused("DHT lookups run on p2p nodes");
    }

    LookupOutcome out;
    if (auto object = read_verified(fp)) {
        touch(fp);
        out.kind = LookupOutcome::Kind::found;
        out.object = std::move(object);
        out.provenance = {label()};
        out.hops = 0;
        return out;
    }

    NodeId key = key_of(fp);
    std::vector<NodeId> shortlist;
    for (const auto& ref : closest_nodes(key, config_.dht_k)) {
        shortlist.push_back(node_id_from_bytes(ref.id));
    }
    std::set<Bytes> queried;
    std::set<Bytes> tried_providers;
    size_t waves = 0;

    auto fetch_from = [&](const wire::NodeRef& provider,
                          size_t hop_count) -> std::optional<LookupOutcome> {
        if (provider.id == node_id_bytes(config_.node_id)) {
            return std::nullopt;  // that's us; local copy already checked
        }
        if (!tried_providers.insert(provider.id).second) return std::nullopt;
        if (!dial_) return std::nullopt;
        auto peer = dial_(node_id_from_bytes(provider.id));
        if (!peer) return std::nullopt;
        wire::Request request;
        request.op = wire::Request::Op::get_object;
        request.fp = fp;
        auto response = call_with_retry(*peer, request);
        if (!response || response->status != wire::Response::Status::found ||
            !response->object_bytes) {
            return std::nullopt;
        }
        if (fingerprint(*response->object_bytes) != fp) return std::nullopt;
        LookupOutcome found;
        found.kind = LookupOutcome::Kind::found;
        found.object = StoredObject{*response->object_bytes, response->media_type};
        found.provenance = response->provenance;
        found.hops = hop_count;
        // Transient cache: the copy becomes a candidate for later searches.
        store_bytes(fp, found.object->bytes, found.object->media_type);
        touch(fp);
        evict_non_home();
        announce_provider(fp);
        return found;
    };

    for (int round = 0; round < 32; ++round) {
        std::sort(shortlist.begin(), shortlist.end(), [&](const NodeId& a, const NodeId& b) {
            return xor_closer(a, b, key);
        });
        std::vector<NodeId> wave;
        for (const auto& id : shortlist) {
            if (wave.size() >= config_.dht_alpha) break;
            if (!queried.contains(node_id_bytes(id))) wave.push_back(id);
        }
        if (wave.empty()) break;
        ++waves;
        for (const auto& id : wave) {
            queried.insert(node_id_bytes(id));
            if (!dial_) continue;
            auto peer = dial_(id);
            if (!peer) continue;
            wire::Request request;
            request.op = wire::Request::Op::find_value;
            request.fp = fp;
            auto response = call_with_retry(*peer, request);
            if (!response) continue;
            if (response->status == wire::Response::Status::found && response->object_bytes) {
                if (fingerprint(*response->object_bytes) != fp) continue;
                out.kind = LookupOutcome::Kind::found;
                out.object = StoredObject{*response->object_bytes, response->media_type};
                out.provenance = response->provenance;
                out.hops = waves;
                store_bytes(fp, out.object->bytes, out.object->media_type);
                touch(fp);
                evict_non_home();
                announce_provider(fp);
                return out;
            }
            if (response->status == wire::Response::Status::providers) {
                for (const auto& provider : response->providers) {
                    if (auto found = fetch_from(provider, waves + 1)) return *found;
                }
            }
            if (response->status == wire::Response::Status::nodes) {
                for (const auto& ref : response->nodes) {
                    NodeId id2 = node_id_from_bytes(ref.id);
                    observe_node(id2);
                    if (id2 == config_.node_id) continue;
                    if (std::find(shortlist.begin(), shortlist.end(), id2) ==
                        shortlist.end()) {
                        shortlist.push_back(id2);
                    }
                }
            }
        }
    }

    out.kind = LookupOutcome::Kind::possibly_absent;  // never definite in p2p
    out.hops = waves;
    return out;
}

// --- wire server -----------------------------------------------------------------

wire::Response StoreNode::handle_request(const wire::Request& request) {
    wire::Response response;
    try {
        switch (request.op) {
            case wire::Request::Op::get_object: {
                if (!request.fp) throw MalformedEncoding("get_object needs a fingerprint");
                if (config_.mode == StoreMode::institutional &&
                    (request.ttl > 0 || !request.visited.empty())) {
                    std::set<Bytes> visited(request.visited.begin(), request.visited.end());
                    LookupOutcome out = flood(*request.fp, request.ttl, visited);
                    response.visited.assign(visited.begin(), visited.end());
                    switch (out.kind) {
                        case LookupOutcome::Kind::found:
                            response.status = wire::Response::Status::found;
                            response.object_bytes = out.object->bytes;
                            response.media_type = out.object->media_type;
                            response.provenance = out.provenance;
                            break;
                        case LookupOutcome::Kind::metadata_only:
                            response.status = wire::Response::Status::metadata;
                            response.metadata = out.metadata;
                            break;
                        default:
                            response.status = wire::Response::Status::absent;
                            response.definite =
                                out.kind == LookupOutcome::Kind::definitely_absent;
                    }
                    break;
                }
                LookupOutcome out = get_local(*request.fp);
                response.visited = {node_id_bytes(config_.node_id)};
                switch (out.kind) {
                    case LookupOutcome::Kind::found:
                        response.status = wire::Response::Status::found;
                        response.object_bytes = out.object->bytes;
                        response.media_type = out.object->media_type;
                        response.provenance = out.provenance;
                        break;
                    case LookupOutcome::Kind::metadata_only:
                        response.status = wire::Response::Status::metadata;
                        response.metadata = out.metadata;
                        break;
                    default:
                        response.status = wire::Response::Status::absent;
                        response.definite = out.kind == LookupOutcome::Kind::definitely_absent;
                }
                break;
            }
            case wire::Request::Op::get_metadata: {
                if (!request.fp) throw MalformedEncoding("get_metadata needs a fingerprint");
                auto meta = get_metadata(*request.fp);
                if (meta) {
                    response.status = wire::Response::Status::metadata;
                    response.metadata = meta;
                } else {
                    response.status = wire::Response::Status::absent;
                    response.definite = config_.mode == StoreMode::institutional;
                }
                break;
            }
            case wire::Request::Op::put_object: {
                if (!request.object_bytes || !request.submitter) {
                    throw MalformedEncoding("put_object needs bytes and a submitter");
                }
                model::Blob blob{*request.object_bytes,
                                 request.media_type.empty() ? "application/octet-stream"
                                                            : request.media_type};
                auto handle = submit(blob, *request.submitter, request.title, request.authors);
                response.status = wire::Response::Status::stored;
                response.metadata = handle;
                break;
            }
            case wire::Request::Op::find_node: {
                if (!request.target_id) throw MalformedEncoding("find_node needs a target");
                response.status = wire::Response::Status::nodes;
                response.nodes =
                    closest_nodes(node_id_from_bytes(*request.target_id), config_.dht_k);
                break;
            }
            case wire::Request::Op::find_value: {
                if (!request.fp) throw MalformedEncoding("find_value needs a fingerprint");
                auto meta = index_.find(*request.fp);
                bool metadata_only = meta != index_.end() && meta->second.metadata_only;
                if (!metadata_only) {
                    if (auto object = read_verified(*request.fp)) {
                        touch(*request.fp);
                        response.status = wire::Response::Status::found;
                        response.object_bytes = object->bytes;
                        response.media_type = object->media_type;
                        response.provenance = {label()};
                        break;
                    }
                }
                auto providers = providers_.find(*request.fp);
                if (providers != providers_.end() && !providers->second.empty()) {
                    response.status = wire::Response::Status::providers;
                    response.providers = providers->second;
                    break;
                }
                response.status = wire::Response::Status::nodes;
                response.nodes = closest_nodes(key_of(*request.fp), config_.dht_k);
                break;
            }
            case wire::Request::Op::store_provider: {
                if (!request.fp || !request.provider_id) {
                    throw MalformedEncoding("store_provider needs a fingerprint and provider");
                }
                auto& list = providers_[*request.fp];
                bool known = false;
                for (const auto& p : list) {
                    if (p.id == *request.provider_id) known = true;
                }
                if (!known && list.size() < config_.dht_k) {
                    list.push_back(wire::NodeRef{*request.provider_id, request.provider_label});
                }
                observe_node(node_id_from_bytes(*request.provider_id));
                response.status = wire::Response::Status::stored;
                break;
            }
        }
    } catch (const DomainError& e) {
        response = wire::Response{};
        response.status = wire::Response::Status::error;
        response.error = e.what();
    }
    return response;
}

size_t StoreNode::stored_object_count() const {
    size_t n = 0;
    for (const auto& key : storage_->keys()) {
        if (key.starts_with("objects/")) ++n;
    }
    return n;
}

std::vector<Fingerprint> StoreNode::indexed_fingerprints() const {
    std::vector<Fingerprint> out;
    for (const auto& [fp, meta] : index_) out.push_back(fp);
    return out;
}

bool StoreNode::is_metadata_only(const Fingerprint& fp) const {
    auto it = index_.find(fp);
    return it != index_.end() && it->second.metadata_only;
}

std::string StoreNode::media_type_of(const Fingerprint& fp) const {
    auto it = index_.find(fp);
    return it == index_.end() ? "application/octet-stream" : it->second.media_type;
}

}  // namespace pubfab::store
