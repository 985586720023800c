#include "pubfab/wire.hpp"

#include "doctest.h"
#include "fixtures_data.hpp"

using namespace pubfab;
using namespace pubfab::wire;

TEST_CASE("request round trips through frames") {
    Request r;
    r.op = Request::Op::get_object;
    r.fp = fingerprint(to_bytes("thing"));
    r.ttl = 4;
    r.visited = {Bytes(32, 1), Bytes(32, 2)};

    Bytes framed = encode_request(r);
    // 4-byte big-endian length prefix.
    uint32_t n = (uint32_t(framed[0]) << 24) | (uint32_t(framed[1]) << 16) |
                 (uint32_t(framed[2]) << 8) | framed[3];
    CHECK(n == framed.size() - 4);

    size_t consumed = 0;
    auto v = unframe(framed, consumed);
    REQUIRE(v.has_value());
    CHECK(consumed == framed.size());
    Request back = Request::from_value(*v);
    CHECK(back.op == Request::Op::get_object);
    CHECK(*back.fp == *r.fp);
    CHECK(back.ttl == 4);
    CHECK(back.visited == r.visited);
}

TEST_CASE("put_object request carries submitter and metadata") {
    Request r;
    r.op = Request::Op::put_object;
    r.object_bytes = to_bytes("content");
    r.media_type = "application/pdf";
    r.submitter = testing::person("Submitter", "Org");
    r.title = "A Title";
    r.authors = std::vector<std::string>{"A", "B"};

    size_t consumed;
    auto v = unframe(encode_request(r), consumed);
    Request back = Request::from_value(*v);
    CHECK(back.object_bytes == to_bytes("content"));
    CHECK(back.submitter->display_name == "Submitter");
    CHECK(back.title == "A Title");
    CHECK(back.authors->size() == 2);
}

TEST_CASE("response round trips") {
    Response r;
    r.status = Response::Status::found;
    r.object_bytes = to_bytes("payload");
    r.media_type = "text/plain";
    r.provenance = {"Owner A", "Relay B"};
    r.definite = true;
    r.nodes = {NodeRef{Bytes(32, 9), "node nine"}};

    size_t consumed;
    auto v = unframe(encode_response(r), consumed);
    Response back = Response::from_value(*v);
    CHECK(back.status == Response::Status::found);
    CHECK(back.object_bytes == to_bytes("payload"));
    CHECK(back.provenance == r.provenance);
    CHECK(back.definite);
    CHECK(back.nodes == r.nodes);
}

TEST_CASE("partial frames wait for more bytes") {
    Request r;
    r.op = Request::Op::find_node;
    r.target_id = Bytes(32, 3);
    Bytes framed = encode_request(r);

    size_t consumed = 99;
    CHECK(!unframe(std::span<const uint8_t>(framed.data(), 2), consumed));
    CHECK(consumed == 0);
    CHECK(!unframe(std::span<const uint8_t>(framed.data(), framed.size() - 1), consumed));
    CHECK(consumed == 0);

    // Two frames back to back are consumed one at a time.
    Bytes two = framed;
    two.insert(two.end(), framed.begin(), framed.end());
    auto first = unframe(two, consumed);
    CHECK(first.has_value());
    CHECK(consumed == framed.size());
}

TEST_CASE("oversized frames are rejected") {
    Bytes bogus = {0x7f, 0xff, 0xff, 0xff};
    size_t consumed;
    CHECK_THROWS_AS(unframe(bogus, consumed), MalformedEncoding);
}
