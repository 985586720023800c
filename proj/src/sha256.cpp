// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// FIPS 180-4 SHA-256. Scalar reference kernel plus dispatch to the AVX2
// eight-way batch kernel in sha256_avx2.cpp.

#include "pubfab/sha256.hpp"

#include <cstring>

namespace pubfab::sha256 {

namespace {

constexpr std::array<uint32_t, 8> kInit = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                                           0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

constexpr uint32_t kRound[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

inline uint32_t rotr(uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
}

inline uint32_t load_be32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | p[3];
}

inline void store_be32(uint8_t* p, uint32_t v) {
    p[0] = static_cast<uint8_t>(v >> 24);
    p[1] = static_cast<uint8_t>(v >> 16);
    p[2] = static_cast<uint8_t>(v >> 8);
    p[3] = static_cast<uint8_t>(v);
}

Backend g_backend = [] {
#if defined(PUBFAB_HAVE_AVX2_BUILD)
    if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
    return Backend::scalar;
}();

}  // namespace

namespace detail {

void transform_scalar(std::array<uint32_t, 8>& state, const uint8_t block[kBlockSize]) {
    uint32_t w[64];
    for (int t = 0; t < 16; ++t) w[t] = load_be32(block + 4 * t);
    for (int t = 16; t < 64; ++t) {
        uint32_t s0 = rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
        uint32_t s1 = rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
        w[t] = w[t - 16] + s0 + w[t - 7] + s1;
    }

    uint32_t a = state[0], b = state[1], c = state[2], d = state[3];
    uint32_t e = state[4], f = state[5], g = state[6], h = state[7];
    for (int t = 0; t < 64; ++t) {
        uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        uint32_t ch = g ^ (e & (f ^ g));
        uint32_t t1 = h + S1 + ch + kRound[t] + w[t];
        uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        uint32_t maj = (a & b) ^ (c & (a ^ b));
        uint32_t t2 = S0 + maj;
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    state[0] += a;
    state[1] += b;
    state[2] += c;
    state[3] += d;
    state[4] += e;
    state[5] += f;
    state[6] += g;
    state[7] += h;
}

void hash64_batch_scalar(const uint8_t* in, size_t count, uint8_t* out) {
    // Padding block for a 64-byte message: 0x80, zeros, bit length 512.
    uint8_t pad[kBlockSize] = {0x80};
    pad[62] = 0x02;  // 512 = 0x0200
    for (size_t i = 0; i < count; ++i) {
        std::array<uint32_t, 8> st = kInit;
        transform_scalar(st, in + i * kBlockSize);
        transform_scalar(st, pad);
        for (int t = 0; t < 8; ++t) store_be32(out + i * kDigestSize + 4 * t, st[t]);
    }
}

}  // namespace detail

Hasher::Hasher() : state_(kInit) {}

void Hasher::update(std::span<const uint8_t> data) {
    total_bytes_ += data.size();
    size_t pos = 0;
    if (buffered_ > 0) {
        size_t take = std::min(kBlockSize - buffered_, data.size());
        std::memcpy(buffer_.data() + buffered_, data.data(), take);
        buffered_ += take;
        pos = take;
        if (buffered_ == kBlockSize) {
            detail::transform_scalar(state_, buffer_.data());
            buffered_ = 0;
        }
    }
    while (pos + kBlockSize <= data.size()) {
        detail::transform_scalar(state_, data.data() + pos);
        pos += kBlockSize;
    }
    if (pos < data.size()) {
        std::memcpy(buffer_.data(), data.data() + pos, data.size() - pos);
        buffered_ = data.size() - pos;
    }
}

Digest Hasher::finish() {
    uint64_t bit_len = total_bytes_ * 8;
    uint8_t trailer[kBlockSize * 2] = {};
    size_t n = 0;
    trailer[n++] = 0x80;
    size_t fill = (buffered_ + n) % kBlockSize;
    size_t zeros = (fill <= kBlockSize - 8) ? (kBlockSize - 8 - fill)
                                            : (2 * kBlockSize - 8 - fill);
    n += zeros;
    for (int i = 7; i >= 0; --i) trailer[n++] = static_cast<uint8_t>(bit_len >> (8 * i));
    update(std::span<const uint8_t>(trailer, n));
    // update() consumed the padding, so total_bytes_ is now stale; the
    // hasher is single-shot by contract.
    Digest out;
    for (int t = 0; t < 8; ++t) store_be32(out.data() + 4 * t, state_[t]);
    return out;
}

Digest hash(std::span<const uint8_t> data) {
    Hasher h;
    h.update(data);
    return h.finish();
}

void hash64_batch(const uint8_t* in, size_t count, uint8_t* out) {
    size_t done = 0;
#if defined(PUBFAB_HAVE_AVX2_BUILD)
    if (g_backend == Backend::avx2) {
        while (count - done >= 8) {
            detail::hash64_x8_avx2(in + done * kBlockSize, out + done * kDigestSize);
            done += 8;
        }
    }
#endif
    if (done < count) {
        detail::hash64_batch_scalar(in + done * kBlockSize, count - done,
                                    out + done * kDigestSize);
    }
}

Backend active_backend() {
    return g_backend;
}

bool backend_available(Backend b) {
    if (b == Backend::scalar) return true;
#if defined(PUBFAB_HAVE_AVX2_BUILD)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool set_backend(Backend b) {
    if (!backend_available(b)) return false;
    g_backend = b;
    return true;
}

const char* backend_name(Backend b) {
    return b == Backend::scalar ? "scalar" : "avx2";
}

}  // namespace pubfab::sha256
