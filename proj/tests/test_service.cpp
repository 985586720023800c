#include "pubfab/service.hpp"

#include <httplib.h>

#include "doctest.h"
#include "fixtures_data.hpp"
#include "pubfab/feed.hpp"
#include "store_helpers.hpp"

using namespace pubfab;

namespace {

struct ServiceFixture {
    std::shared_ptr<store::MemStorage> disk = std::make_shared<store::MemStorage>();
    std::unique_ptr<store::StoreNode> node;
    std::unique_ptr<service::HttpService> svc;
    int port = 0;

    ServiceFixture() {
        store::StoreConfig config;
        config.mode = store::StoreMode::institutional;
        config.node_id = testing::numbered_id(5);
        config.label = "service-node";
        node = std::make_unique<store::StoreNode>(config, disk);

        query::SavedQuery everything;
        everything.id = "everything";
        everything.owner = testing::person("Portal", "Org");
        everything.filter = query::Filter::match_all();

        query::SavedQuery secret = everything;
        secret.id = "secret";
        secret.is_public = false;

        svc = std::make_unique<service::HttpService>(
            *node, std::map<std::string, query::SavedQuery>{{"everything", everything},
                                                            {"secret", secret}});
        port = svc->start("127.0.0.1");
    }
};

}  // namespace

TEST_CASE("objects round trip over HTTP with provenance") {
    ServiceFixture f;
    httplib::Client client("127.0.0.1", f.port);

    auto handle = f.node->submit(model::Blob{to_bytes("served over http"), "text/plain"},
                                 testing::person("Poster", "Org"), "HTTP Work");

    auto res = client.Get("/objects/" + handle.fingerprint.path_form());
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == "served over http");
    CHECK(res->get_header_value("X-Provenance") == "service-node");
    CHECK(res->get_header_value("Content-Type").find("text/plain") == 0);

    auto meta = client.Get("/metadata/" + handle.fingerprint.path_form());
    REQUIRE(meta);
    CHECK(meta->status == 200);
    auto v = canonical::decode_text(meta->body);
    CHECK(v.at("title").as_text() == "HTTP Work");

    auto missing = client.Get(
        "/objects/sha256/00000000000000000000000000000000000000000000000000"
        "00000000000000");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(missing->get_header_value("X-Lookup-Outcome") == "definitely_absent");
}

TEST_CASE("PUT /objects submits under the policy") {
    ServiceFixture f;
    httplib::Client client("127.0.0.1", f.port);

    httplib::Headers headers = {{"X-Submitter", "Uploader"}, {"X-Title", "Uploaded Work"}};
    auto res = client.Put("/objects", headers, "uploaded bytes", "text/plain");
    REQUIRE(res);
    CHECK(res->status == 201);
    auto handle = model::handle_from_value(canonical::decode_text(res->body));
    CHECK(handle.title == "Uploaded Work");
    CHECK(handle.fingerprint == fingerprint(to_bytes("uploaded bytes")));

    auto no_submitter = client.Put("/objects", {}, "x", "text/plain");
    REQUIRE(no_submitter);
    CHECK(no_submitter->status == 400);
}

TEST_CASE("metadata-only entries return existence without content") {
    ServiceFixture f;
    httplib::Client client("127.0.0.1", f.port);

    model::DocumentHandle legacy;
    legacy.title = "Legacy Paper";
    legacy.fingerprint = fingerprint(to_bytes("held by the original publisher"));
    f.node->add_metadata_only(legacy, "application/pdf");

    auto res = client.Get("/objects/" + legacy.fingerprint.path_form());
    REQUIRE(res);
    CHECK(res->status == 404);
    CHECK(res->get_header_value("X-Lookup-Outcome") == "metadata_only");
    auto v = canonical::decode_text(res->body);
    CHECK(v.at("title").as_text() == "Legacy Paper");
}

TEST_CASE("query endpoints serve results, definition and feed") {
    ServiceFixture f;
    httplib::Client client("127.0.0.1", f.port);
    f.node->submit(model::Blob{to_bytes("queryable"), "text/plain"},
                   testing::person("Poster", "Org"), "Queryable Work");

    auto results = client.Get("/queries/everything/results");
    REQUIRE(results);
    CHECK(results->status == 200);
    auto list = canonical::decode_text(results->body);
    CHECK(list.as_list().size() == 1);

    auto definition = client.Get("/queries/everything/definition");
    REQUIRE(definition);
    CHECK(definition->status == 200);
    auto q = query::SavedQuery::from_value(canonical::decode_text(definition->body));
    CHECK(q.id == "everything");

    auto feed = client.Get("/queries/everything/feed?limit=5");
    REQUIRE(feed);
    CHECK(feed->status == 200);
    CHECK(feed->get_header_value("Content-Type").find("application/atom+xml") == 0);
    CHECK(feed->body.find("<feed xmlns=") != std::string::npos);
    CHECK(feed->body.find("Queryable Work") != std::string::npos);

    CHECK(client.Get("/queries/nonesuch/results")->status == 404);
    CHECK(client.Get("/queries/secret/results")->status == 403);
    CHECK(client.Get("/queries/secret/feed")->status == 403);
}

TEST_CASE("graph_from_store carries handles and metadata-only entries") {
    ServiceFixture f;
    auto handle = f.node->submit(model::Blob{to_bytes("content a"), "text/plain"},
                                 testing::person("P", "O"), "Work A");
    model::DocumentHandle legacy;
    legacy.title = "Legacy B";
    legacy.fingerprint = fingerprint(to_bytes("unavailable content"));
    f.node->add_metadata_only(legacy, "application/pdf");

    auto graph = service::graph_from_store(*f.node);
    REQUIRE(graph.find(handle.fingerprint) != nullptr);
    CHECK(graph.find(handle.fingerprint)->title == "Work A");
    REQUIRE(graph.find(legacy.fingerprint) != nullptr);
    CHECK(graph.find(legacy.fingerprint)->title == "Legacy B");
    CHECK(graph.find(legacy.fingerprint)->unresolved);
}
