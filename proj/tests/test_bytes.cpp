#include "pubfab/bytes.hpp"

#include "doctest.h"
#include "pubfab/rng.hpp"
#include "test_util.hpp"

using namespace pubfab;

TEST_CASE("hex round trip") {
    Bytes data = {0x00, 0x0f, 0xa5, 0xff};
    CHECK(hex_encode(data) == "000fa5ff");
    CHECK(hex_decode("000fa5ff") == data);
}

TEST_CASE("hex rejects bad input") {
    CHECK(!hex_decode("abc"));       // odd length
    CHECK(!hex_decode("0G"));        // bad digit
    CHECK(!hex_decode("AB"));        // uppercase is not canonical
    CHECK(hex_decode("")->empty());
}

TEST_CASE("base64url round trip on random data") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        Bytes data = testing::random_bytes(rng, 64);
        auto back = base64url_decode(base64url_encode(data));
        REQUIRE(back.has_value());
        CHECK(*back == data);
    }
}

TEST_CASE("base64url canonicality") {
    CHECK(base64url_encode(Bytes{0xfb}) == "-w");
    CHECK(!base64url_decode("-x"));   // trailing bits set
    CHECK(!base64url_decode("ab=="));  // padding not accepted
    CHECK(!base64url_decode("a"));    // impossible length
    CHECK(!base64url_decode("a+b/")); // standard alphabet not accepted
}

TEST_CASE("utf8 validation") {
    CHECK(is_valid_utf8("plain ascii"));
    CHECK(is_valid_utf8("caf\xc3\xa9"));
    CHECK(is_valid_utf8("\xe6\x97\xa5\xe6\x9c\xac"));
    CHECK(is_valid_utf8("\xf0\x9f\x8e\x89"));
    CHECK(!is_valid_utf8("\x80"));              // stray continuation
    CHECK(!is_valid_utf8("\xc3"));              // truncated
    CHECK(!is_valid_utf8("\xc0\xaf"));          // overlong
    CHECK(!is_valid_utf8("\xed\xa0\x80"));      // surrogate
    CHECK(!is_valid_utf8("\xf4\x90\x80\x80"));  // > U+10FFFF
}
