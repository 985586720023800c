#include "pubfab/sha256.hpp"

#include <sodium.h>

#include "doctest.h"
#include "pubfab/bytes.hpp"
#include "pubfab/rng.hpp"
#include "test_util.hpp"

using namespace pubfab;

namespace {

std::string hex_of(const sha256::Digest& d) {
    return hex_encode(Bytes(d.begin(), d.end()));
}

// Independent oracle: libsodium's SHA-256.
sha256::Digest oracle(std::span<const uint8_t> data) {
    sha256::Digest out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

}  // namespace

TEST_CASE("known vectors") {
    CHECK(hex_of(sha256::hash({})) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    Bytes abc = to_bytes("abc");
    CHECK(hex_of(sha256::hash(abc)) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    Bytes two_blocks = to_bytes(
        "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq");
    CHECK(hex_of(sha256::hash(two_blocks)) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("matches libsodium oracle on random lengths") {
    REQUIRE(sodium_init() >= 0);
    Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        Bytes data = testing::random_bytes(rng, 300);
        CHECK(sha256::hash(data) == oracle(data));
    }
}

TEST_CASE("chunked feeding equals whole buffer") {
    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
        Bytes data = testing::random_bytes(rng, 400);
        sha256::Hasher h;
        size_t pos = 0;
        while (pos < data.size()) {
            size_t take = std::min<size_t>(rng.below(70) + 1, data.size() - pos);
            h.update(std::span<const uint8_t>(data.data() + pos, take));
            pos += take;
        }
        CHECK(h.finish() == sha256::hash(data));
    }
}

TEST_CASE("batch kernel equals scalar reference") {
    Rng rng(17);
    for (size_t count : {0u, 1u, 3u, 7u, 8u, 9u, 16u, 25u}) {
        Bytes in(count * 64);
        for (auto& b : in) b = static_cast<uint8_t>(rng.below(256));

        Bytes ref(count * 32);
        sha256::detail::hash64_batch_scalar(in.data(), count, ref.data());

        // Reference path must agree with the one-shot hasher.
        for (size_t i = 0; i < count; ++i) {
            auto whole = sha256::hash(std::span<const uint8_t>(in.data() + i * 64, 64));
            CHECK(Bytes(whole.begin(), whole.end()) ==
                  Bytes(ref.begin() + i * 32, ref.begin() + (i + 1) * 32));
        }

        for (auto backend : {sha256::Backend::scalar, sha256::Backend::avx2}) {
            if (!sha256::backend_available(backend)) continue;
            REQUIRE(sha256::set_backend(backend));
            Bytes out(count * 32, 0xee);
            sha256::hash64_batch(in.data(), count, out.data());
            CHECK(out == ref);
        }
    }
    sha256::set_backend(sha256::active_backend());
}

TEST_CASE("single bit flips change the digest") {
    Rng rng(19);
    for (int i = 0; i < 100; ++i) {
        Bytes data = testing::random_bytes(rng, 128);
        if (data.empty()) data.push_back(0);
        auto before = sha256::hash(data);
        size_t byte = rng.below(data.size());
        data[byte] ^= static_cast<uint8_t>(1u << rng.below(8));
        CHECK(sha256::hash(data) != before);
    }
}

TEST_CASE("backend selection") {
    CHECK(sha256::backend_available(sha256::Backend::scalar));
    CHECK(sha256::set_backend(sha256::Backend::scalar));
    CHECK(sha256::active_backend() == sha256::Backend::scalar);
    if (sha256::backend_available(sha256::Backend::avx2)) {
        CHECK(sha256::set_backend(sha256::Backend::avx2));
        CHECK(sha256::active_backend() == sha256::Backend::avx2);
    } else {
        CHECK(!sha256::set_backend(sha256::Backend::avx2));
        CHECK(sha256::active_backend() == sha256::Backend::scalar);
    }
}
