#include "pubfab/sim.hpp"

#include "doctest.h"
#include "fixtures_data.hpp"
#include "pubfab/store.hpp"

using namespace pubfab;
using namespace pubfab::sim;

TEST_CASE("identical seed and scenario give bitwise-identical logs") {
    for (const auto& name : scenario_names()) {
        canonical::Value params = canonical::Value::map({});
        if (name == "drop_and_retry") {
            params = canonical::Value::map({
                {"nodes", canonical::Value::integer(16)},
                {"pairs", canonical::Value::integer(10)},
            });
        }
        auto a = run_scenario(name, 42, params);
        auto b = run_scenario(name, 42, params);
        CHECK(a.log == b.log);
        CHECK(a.detail == b.detail);
        CHECK(canonical::encode(a.measurements) == canonical::encode(b.measurements));
    }
}

TEST_CASE("different seeds change the log") {
    auto a = run_scenario("double_blind_round", 1, canonical::Value::map({}));
    auto b = run_scenario("double_blind_round", 2, canonical::Value::map({}));
    CHECK(a.log != b.log);
}

TEST_CASE("unknown scenarios are rejected") {
    CHECK_THROWS_AS(run_scenario("nonesuch", 1, canonical::Value::map({})),
                    UnknownScenario);
}

TEST_CASE("credit_loss ends with both sides in the query output") {
    auto result = run_scenario("credit_loss", 42, canonical::Value::map({}));
    CHECK(result.verdict);
    CHECK(result.detail.find("original=expanded") != std::string::npos);
    CHECK(result.log.find("obtained_private_stamp") != std::string::npos);
    CHECK(result.log.find("published_citation") != std::string::npos);
}

TEST_CASE("double_blind_round verdict holds across multiple rounds") {
    auto result = run_scenario(
        "double_blind_round", 7,
        canonical::Value::map({{"rounds", canonical::Value::integer(5)}}));
    CHECK(result.verdict);
    CHECK(result.measurements.at("links_verified").as_int() == 10);
    CHECK(result.measurements.at("author_name_leaks").as_int() == 0);
    CHECK(result.measurements.at("early_review_publications").as_int() == 0);
}

TEST_CASE("dual_network_consult separates existence from content") {
    auto result = run_scenario("dual_network_consult", 11, canonical::Value::map({}));
    CHECK(result.verdict);
    CHECK(result.measurements.at("institutional_metadata_only").as_bool());
    CHECK(result.measurements.at("provenance_named").as_bool());
}

TEST_CASE("drop_and_retry at zero drop finds everything quickly") {
    auto result = run_scenario("drop_and_retry", 13,
                               canonical::Value::map({
                                   {"nodes", canonical::Value::integer(16)},
                                   {"pairs", canonical::Value::integer(20)},
                               }));
    CHECK(result.verdict);
    CHECK(result.measurements.at("found").as_int() == 20);
    CHECK(result.measurements.at("within_hop_bound").as_int() == 20);
}

TEST_CASE("fault injection") {
    SimWorld world(5);

    store::StoreConfig a;
    a.mode = store::StoreMode::institutional;
    store::NodeId ida{};
    ida[0] = 1;
    a.node_id = ida;
    a.label = "a";
    world.add_store("a", a);

    store::StoreConfig b = a;
    store::NodeId idb{};
    idb[0] = 2;
    b.node_id = idb;
    b.label = "b";
    world.add_store("b", b);
    world.connect("a", "b");

    auto handle = world.get_store("b").submit(
        model::Blob{to_bytes("homed at b"), "text/plain"}, testing::person("X", "Y"));

    // Working link: found.
    CHECK(world.get_store("a").propagate_request(handle.fingerprint).kind ==
          store::LookupOutcome::Kind::found);

    // Kill the only home node: timeout degrades to possibly-absent.
    world.inject_fault(FaultKind::kill_node, "b");
    Fingerprint other = fingerprint(to_bytes("somewhere else"));
    CHECK(world.get_store("a").propagate_request(other).kind ==
          store::LookupOutcome::Kind::possibly_absent);

    CHECK_THROWS_AS(world.inject_fault(FaultKind::kill_node, "zz"), UnknownTarget);
    CHECK_THROWS_AS(world.inject_fault(FaultKind::drop_link, "a"), UnknownTarget);
    CHECK_THROWS_AS(world.inject_fault(FaultKind::drop_link, "a:zz"), UnknownTarget);
}

TEST_CASE("drop probability one isolates a node; delay preserves delivery") {
    SimWorld world(6);
    store::StoreConfig a;
    a.mode = store::StoreMode::institutional;
    store::NodeId ida{};
    ida[0] = 1;
    a.node_id = ida;
    a.label = "a";
    world.add_store("a", a);
    store::StoreConfig b = a;
    store::NodeId idb{};
    idb[0] = 2;
    b.node_id = idb;
    b.label = "b";
    world.add_store("b", b);
    world.connect("a", "b");

    auto handle = world.get_store("b").submit(
        model::Blob{to_bytes("reachable?"), "text/plain"}, testing::person("X", "Y"));

    world.inject_fault(FaultKind::drop_link, "a:b", 1.0);
    Fingerprint fresh = fingerprint(to_bytes("fresh item"));
    CHECK(world.get_store("a").propagate_request(fresh).kind ==
          store::LookupOutcome::Kind::possibly_absent);

    // Restore the link with a long delay: delivery still succeeds, later.
    world.set_link("a", "b", LinkModel{10, 0.0});
    uint64_t before = world.now();
    CHECK(world.get_store("a").propagate_request(handle.fingerprint).kind ==
          store::LookupOutcome::Kind::found);
    CHECK(world.now() >= before + 20);  // request + response latency
}
