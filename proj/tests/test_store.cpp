#include "pubfab/store.hpp"

#include <filesystem>

#include "doctest.h"
#include "fixtures_data.hpp"
#include "pubfab/rng.hpp"
#include "store_helpers.hpp"

using namespace pubfab;
using namespace pubfab::store;
using pubfab::testing::DirectPeer;
using pubfab::testing::InstitutionalNet;
using pubfab::testing::P2pNet;

namespace {

model::Blob blob_of(const std::string& text) {
    return model::Blob{to_bytes(text), "text/plain"};
}

model::Identity anyone() {
    return testing::person("Any Author", "Any University");
}

// Reachability oracle for flood soundness: BFS over the edge list.
std::vector<bool> reachable_from(size_t n, const std::vector<std::pair<size_t, size_t>>& edges,
                                 size_t origin) {
    std::vector<std::vector<size_t>> adj(n);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(n, false);
    std::vector<size_t> queue = {origin};
    seen[origin] = true;
    while (!queue.empty()) {
        size_t u = queue.back();
        queue.pop_back();
        for (size_t v : adj[u]) {
            if (!seen[v]) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    return seen;
}

}  // namespace

TEST_CASE("submit then get round trips with provenance") {
    InstitutionalNet net(1, {});
    auto handle = net.nodes[0]->submit(blob_of("open submission"), anyone(), "A Work");
    auto out = net.nodes[0]->get_local(handle.fingerprint);
    REQUIRE(out.kind == LookupOutcome::Kind::found);
    CHECK(out.object->bytes == to_bytes("open submission"));
    CHECK(out.provenance == std::vector<std::string>{"library-0"});
    CHECK(net.nodes[0]->is_home_of(handle.fingerprint));  // first accepting node
}

TEST_CASE("duplicate submission is idempotent") {
    InstitutionalNet net(1, {});
    auto h1 = net.nodes[0]->submit(blob_of("dup"), anyone());
    size_t count = net.nodes[0]->stored_object_count();
    auto h2 = net.nodes[0]->submit(blob_of("dup"), anyone());
    CHECK(h1 == h2);
    CHECK(net.nodes[0]->stored_object_count() == count);
}

TEST_CASE("affiliation-gated submission") {
    StoreConfig config;
    config.mode = StoreMode::institutional;
    config.node_id = testing::numbered_id(1);
    config.label = "gated";
    config.submission_policy = SubmissionPolicy::affiliated_only;
    config.affiliation = "Proper University";
    StoreNode node(config, std::make_shared<MemStorage>());

    CHECK_THROWS_AS(node.submit(blob_of("nope"), anyone()), SubmissionRefused);
    CHECK_NOTHROW(node.submit(blob_of("yes"), testing::person("Member", "Proper University")));
}

TEST_CASE("p2p nodes accept only their owner") {
    Rng rng(301);
    P2pNet net(2, rng);
    model::Identity owner;
    owner.display_name = "Owner 0";
    CHECK_NOTHROW(net.nodes[0]->submit(blob_of("mine"), owner));
    CHECK_THROWS_AS(net.nodes[0]->submit(blob_of("theirs"), anyone()), NotOwner);

    StoreConfig config;
    config.mode = StoreMode::p2p;
    config.node_id = testing::numbered_id(9);
    CHECK_THROWS_AS(StoreNode(config, std::make_shared<MemStorage>()), SubmissionRefused);
}

TEST_CASE("local absence verdicts by mode") {
    InstitutionalNet net(1, {});
    Fingerprint missing = fingerprint(to_bytes("not here"));
    CHECK(net.nodes[0]->get_local(missing).kind == LookupOutcome::Kind::definitely_absent);

    Rng rng(303);
    P2pNet p2p(1, rng);
    CHECK(p2p.nodes[0]->get_local(missing).kind == LookupOutcome::Kind::possibly_absent);
}

TEST_CASE("metadata-only entries answer with existence, not content") {
    InstitutionalNet net(1, {});
    model::DocumentHandle legacy;
    legacy.title = "A Paywalled Classic";
    legacy.fingerprint = fingerprint(to_bytes("the pdf the publisher holds"));
    net.nodes[0]->add_metadata_only(legacy, "application/pdf");

    auto out = net.nodes[0]->get_local(legacy.fingerprint);
    CHECK(out.kind == LookupOutcome::Kind::metadata_only);
    REQUIRE(out.metadata.has_value());
    CHECK(out.metadata->title == "A Paywalled Classic");
    CHECK(!out.object.has_value());
}

TEST_CASE("three connected nodes: flood finds the object with a short path") {
    // A - B - C, object at C, query at A.
    InstitutionalNet net(3, {{0, 1}, {1, 2}});
    auto handle = net.nodes[2]->submit(blob_of("remote object"), anyone());
    auto out = net.nodes[0]->propagate_request(handle.fingerprint);
    REQUIRE(out.kind == LookupOutcome::Kind::found);
    CHECK(out.object->bytes == to_bytes("remote object"));
    // Serving node first, then the relay path back to the requester.
    CHECK(out.provenance ==
          std::vector<std::string>{"library-2", "library-1", "library-0"});
}

TEST_CASE("absent object on a line: definite only with enough ttl") {
    InstitutionalNet net(4, {{0, 1}, {1, 2}, {2, 3}});
    Fingerprint missing = fingerprint(to_bytes("nowhere"));
    CHECK(net.nodes[0]->propagate_request(missing, 6, {}).kind ==
          LookupOutcome::Kind::definitely_absent);
    // TTL smaller than the distance to the far end: unvisited frontier.
    CHECK(net.nodes[0]->propagate_request(missing, 1, {}).kind ==
          LookupOutcome::Kind::possibly_absent);

    auto far = net.nodes[3]->submit(blob_of("at the far end"), anyone());
    CHECK(net.nodes[0]->propagate_request(far.fingerprint, 1, {}).kind ==
          LookupOutcome::Kind::possibly_absent);
    CHECK(net.nodes[0]->propagate_request(far.fingerprint, 3, {}).kind ==
          LookupOutcome::Kind::found);
}

TEST_CASE("exhaustive soundness over all connected topologies up to 4 nodes") {
    for (size_t n = 1; n <= 4; ++n) {
        std::vector<std::pair<size_t, size_t>> all_edges;
        for (size_t a = 0; a < n; ++a) {
            for (size_t b = a + 1; b < n; ++b) all_edges.emplace_back(a, b);
        }
        for (uint32_t mask = 0; mask < (1u << all_edges.size()); ++mask) {
            std::vector<std::pair<size_t, size_t>> edges;
            for (size_t e = 0; e < all_edges.size(); ++e) {
                if (mask & (1u << e)) edges.push_back(all_edges[e]);
            }
            if (!reachable_from(n, edges, 0).back() && n > 1) {
                // Quick connectivity screen: node n-1 unreachable from 0.
                auto seen = reachable_from(n, edges, 0);
                bool connected = true;
                for (bool s : seen) connected = connected && s;
                if (!connected) continue;
            }
            auto seen = reachable_from(n, edges, 0);
            bool connected = true;
            for (bool s : seen) connected = connected && s;
            if (!connected) continue;

            for (size_t holder = 0; holder <= n; ++holder) {
                InstitutionalNet net(n, edges);
                std::optional<Fingerprint> fp;
                if (holder < n) {
                    fp = net.nodes[holder]->submit(blob_of("payload"), anyone()).fingerprint;
                } else {
                    fp = fingerprint(to_bytes("absent payload"));
                }
                for (size_t origin = 0; origin < n; ++origin) {
                    auto out = net.nodes[origin]->propagate_request(*fp, 6, {});
                    if (holder < n) {
                        CHECK(out.kind == LookupOutcome::Kind::found);
                        CHECK(fingerprint(out.object->bytes) == *fp);
                    } else {
                        CHECK(out.kind == LookupOutcome::Kind::definitely_absent);
                    }
                }
            }
        }
    }
}

TEST_CASE("flood caches a copy, eviction reclaims it, home survives") {
    InstitutionalNet net(2, {{0, 1}}, 6, /*cache_capacity=*/0);
    auto handle = net.nodes[1]->submit(blob_of("cachable"), anyone());

    auto out = net.nodes[0]->propagate_request(handle.fingerprint);
    CHECK(out.kind == LookupOutcome::Kind::found);
    // Capacity 0: the copy was cached then immediately evicted.
    CHECK(net.nodes[0]->get_local(handle.fingerprint).kind ==
          LookupOutcome::Kind::definitely_absent);
    // The home keeps it and the network still resolves it.
    CHECK(net.nodes[1]->is_home_of(handle.fingerprint));
    CHECK(net.nodes[0]->propagate_request(handle.fingerprint).kind ==
          LookupOutcome::Kind::found);
}

TEST_CASE("eviction is least-recently-served first and spares homes") {
    InstitutionalNet net(2, {{0, 1}}, 6, /*cache_capacity=*/1);
    auto own = net.nodes[0]->submit(blob_of("my own"), anyone());
    auto h1 = net.nodes[1]->submit(blob_of("first remote"), anyone());
    auto h2 = net.nodes[1]->submit(blob_of("second remote"), anyone());

    net.nodes[0]->propagate_request(h1.fingerprint);
    net.nodes[0]->propagate_request(h2.fingerprint);  // h1 is now least recent

    CHECK(net.nodes[0]->get_local(h1.fingerprint).kind ==
          LookupOutcome::Kind::definitely_absent);
    CHECK(net.nodes[0]->get_local(h2.fingerprint).kind == LookupOutcome::Kind::found);
    CHECK(net.nodes[0]->get_local(own.fingerprint).kind == LookupOutcome::Kind::found);
    CHECK(net.nodes[0]->evict_non_home().empty());  // already within capacity
}

TEST_CASE("only locally stored objects can be designated home") {
    InstitutionalNet net(2, {{0, 1}});
    auto handle = net.nodes[1]->submit(blob_of("homed elsewhere"), anyone());
    CHECK_THROWS_AS(net.nodes[0]->designate_home(handle.fingerprint), SubmissionRefused);

    // After fetching a copy over the network, the node can take the role.
    net.nodes[0]->propagate_request(handle.fingerprint);
    CHECK_NOTHROW(net.nodes[0]->designate_home(handle.fingerprint));
    CHECK(net.nodes[0]->is_home_of(handle.fingerprint));
    // A second home coexists with the first.
    CHECK(net.nodes[1]->is_home_of(handle.fingerprint));
    // Home status protects the copy from eviction now.
    net.nodes[0]->evict_non_home();
    CHECK(net.nodes[0]->get_local(handle.fingerprint).kind ==
          LookupOutcome::Kind::found);
}

TEST_CASE("home objects survive restarts") {
    std::vector<std::pair<size_t, size_t>> edges = {{0, 1}};
    InstitutionalNet net(2, edges);
    auto handle = net.nodes[0]->submit(blob_of("durable"), anyone(), "Durable Work");
    CHECK(net.nodes[0]->is_home_of(handle.fingerprint));

    net.restart(0, edges);
    CHECK(net.nodes[0]->is_home_of(handle.fingerprint));
    auto out = net.nodes[0]->get_local(handle.fingerprint);
    REQUIRE(out.kind == LookupOutcome::Kind::found);
    CHECK(out.object->bytes == to_bytes("durable"));
    CHECK(out.metadata->title == "Durable Work");
    CHECK(net.nodes[1]->propagate_request(handle.fingerprint).kind ==
          LookupOutcome::Kind::found);
}

TEST_CASE("corrupted content is never served") {
    auto disk = std::make_shared<MemStorage>();
    StoreConfig config;
    config.mode = StoreMode::institutional;
    config.node_id = testing::numbered_id(1);
    config.label = "x";
    StoreNode node(config, disk);
    auto handle = node.submit(blob_of("pristine"), anyone());

    // Corrupt the stored bytes behind the node's back.
    std::string key;
    for (const auto& k : disk->keys()) {
        if (k.rfind("objects/", 0) == 0) key = k;
    }
    disk->put(key, to_bytes("tampered"));
    CHECK(node.get_local(handle.fingerprint).kind == LookupOutcome::Kind::definitely_absent);
}

TEST_CASE("dht: insert at owner, lookup from elsewhere, cache speeds repeat") {
    Rng rng(307);
    P2pNet net(16, rng);
    model::Identity owner;
    owner.display_name = "Owner 3";
    auto handle = net.nodes[3]->submit(blob_of("p2p payload"), owner);
    net.nodes[3]->announce_provider(handle.fingerprint);

    auto out = net.nodes[9]->dht_lookup(handle.fingerprint);
    REQUIRE(out.kind == LookupOutcome::Kind::found);
    CHECK(out.object->bytes == to_bytes("p2p payload"));
    REQUIRE(!out.provenance.empty());
    CHECK(out.provenance[0] == "Owner 3");  // audit trail names the sharer
    CHECK(out.hops >= 1);

    // Second lookup from the same origin hits the local transient cache.
    auto again = net.nodes[9]->dht_lookup(handle.fingerprint);
    CHECK(again.kind == LookupOutcome::Kind::found);
    CHECK(again.hops < out.hops);

    // Absent keys are never definitively absent.
    auto absent = net.nodes[5]->dht_lookup(fingerprint(to_bytes("missing key")));
    CHECK(absent.kind == LookupOutcome::Kind::possibly_absent);
}

TEST_CASE("dht lookup works across 64 nodes within the hop bound") {
    Rng rng(311);
    P2pNet net(64, rng);
    for (int trial = 0; trial < 20; ++trial) {
        size_t owner_idx = rng.below(64);
        model::Identity owner;
        owner.display_name = "Owner " + std::to_string(owner_idx);
        auto handle = net.nodes[owner_idx]->submit(
            blob_of("object " + std::to_string(trial)), owner);
        net.nodes[owner_idx]->announce_provider(handle.fingerprint);

        size_t origin = rng.below(64);
        auto out = net.nodes[origin]->dht_lookup(handle.fingerprint);
        REQUIRE(out.kind == LookupOutcome::Kind::found);
        CHECK(out.hops <= 8);  // ceil(log2 64) + 2
        CHECK(fingerprint(out.object->bytes) == handle.fingerprint);
    }
}

TEST_CASE("wire server handles the client-facing operations") {
    InstitutionalNet net(1, {});
    auto handle = net.nodes[0]->submit(blob_of("served"), anyone(), "Served Work");

    wire::Request get;
    get.op = wire::Request::Op::get_object;
    get.fp = handle.fingerprint;
    auto r1 = net.nodes[0]->handle_request(get);
    CHECK(r1.status == wire::Response::Status::found);
    CHECK(r1.object_bytes == to_bytes("served"));

    wire::Request meta;
    meta.op = wire::Request::Op::get_metadata;
    meta.fp = handle.fingerprint;
    auto r2 = net.nodes[0]->handle_request(meta);
    CHECK(r2.status == wire::Response::Status::metadata);
    CHECK(r2.metadata->title == "Served Work");

    wire::Request put;
    put.op = wire::Request::Op::put_object;
    put.object_bytes = to_bytes("wired in");
    put.media_type = "text/plain";
    put.submitter = anyone();
    auto r3 = net.nodes[0]->handle_request(put);
    CHECK(r3.status == wire::Response::Status::stored);
    CHECK(net.nodes[0]->get_local(r3.metadata->fingerprint).kind ==
          LookupOutcome::Kind::found);

    wire::Request find;
    find.op = wire::Request::Op::find_node;
    find.target_id = Bytes(32, 0);
    auto r4 = net.nodes[0]->handle_request(find);
    CHECK(r4.status == wire::Response::Status::nodes);

    // Domain errors surface as error responses, not exceptions.
    wire::Request bad;
    bad.op = wire::Request::Op::put_object;
    auto r5 = net.nodes[0]->handle_request(bad);
    CHECK(r5.status == wire::Response::Status::error);
}

TEST_CASE("filesystem storage layout and restart") {
    std::string root = (std::filesystem::temp_directory_path() /
                        ("pubfab_store_test_" + std::to_string(::getpid())))
                           .string();
    struct Cleanup {
        std::string path;
        ~Cleanup() { std::filesystem::remove_all(path); }
    } cleanup{root};

    StoreConfig config;
    config.mode = StoreMode::institutional;
    config.node_id = testing::numbered_id(1);
    config.label = "disk";

    Fingerprint fp;
    {
        StoreNode node(config, std::make_shared<FsStorage>(root));
        fp = node.submit(blob_of("on disk"), anyone(), "Disk Work").fingerprint;
    }
    // objects/<algorithm>/<2 hex>/<62 hex>
    std::string hex = hex_encode(fp.digest());
    std::filesystem::path expected =
        std::filesystem::path(root) / "objects" / "sha256" / hex.substr(0, 2) / hex.substr(2);
    CHECK(std::filesystem::exists(expected));
    CHECK(std::filesystem::exists(std::filesystem::path(root) / "index.pce"));

    StoreNode reopened(config, std::make_shared<FsStorage>(root));
    auto out = reopened.get_local(fp);
    REQUIRE(out.kind == LookupOutcome::Kind::found);
    CHECK(out.object->bytes == to_bytes("on disk"));
    CHECK(out.metadata->title == "Disk Work");
    CHECK(reopened.is_home_of(fp));
}
