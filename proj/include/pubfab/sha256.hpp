// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace pubfab::sha256 {

inline constexpr size_t kDigestSize = 32;
inline constexpr size_t kBlockSize = 64;

using Digest = std::array<uint8_t, kDigestSize>;

// Incremental hashing over arbitrary chunk boundaries.
class Hasher {
public:
    Hasher();
    void update(std::span<const uint8_t> data);
    Digest finish();

private:
    std::array<uint32_t, 8> state_;
    std::array<uint8_t, kBlockSize> buffer_;
    uint64_t total_bytes_ = 0;
    size_t buffered_ = 0;
};

Digest hash(std::span<const uint8_t> data);

// Hashes `count` independent 64-byte messages: in = count*64 bytes,
// out = count*32 bytes. This is the hot loop of Merkle round closing
// (parent = SHA-256(left || right) over two 32-byte child digests) and is
// what the AVX2 backend accelerates, eight messages per pass.
void hash64_batch(const uint8_t* in, size_t count, uint8_t* out);

// Backend selection. The scalar kernel is the reference; the AVX2 kernel
// must be byte-equivalent and is chosen at startup when the CPU supports it.
enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_available(Backend b);
bool set_backend(Backend b);  // false (and no change) if unavailable
const char* backend_name(Backend b);

namespace detail {
void transform_scalar(std::array<uint32_t, 8>& state, const uint8_t block[kBlockSize]);
void hash64_batch_scalar(const uint8_t* in, size_t count, uint8_t* out);
#if defined(PUBFAB_HAVE_AVX2_BUILD)
void hash64_x8_avx2(const uint8_t in[8 * kBlockSize], uint8_t out[8 * kDigestSize]);
#endif
}  // namespace detail

}  // namespace pubfab::sha256
