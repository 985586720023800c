// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Eight-way SHA-256 for batches of independent 64-byte messages. Each
// 32-bit lane of a ymm register carries one message's state, so the
// compression rounds are a direct vector transcription of the scalar
// kernel. Compiled with -mavx2; callers gate on runtime CPU support.

#include "pubfab/sha256.hpp"

#if defined(PUBFAB_HAVE_AVX2_BUILD)

#include <immintrin.h>

namespace pubfab::sha256::detail {

namespace {

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

inline __m256i rotr(__m256i x, int n) {
    return _mm256_or_si256(_mm256_srli_epi32(x, n), _mm256_slli_epi32(x, 32 - n));
}

inline __m256i big_sigma0(__m256i a) {
    return _mm256_xor_si256(_mm256_xor_si256(rotr(a, 2), rotr(a, 13)), rotr(a, 22));
}

inline __m256i big_sigma1(__m256i e) {
    return _mm256_xor_si256(_mm256_xor_si256(rotr(e, 6), rotr(e, 11)), rotr(e, 25));
}

inline __m256i small_sigma0(__m256i x) {
    return _mm256_xor_si256(_mm256_xor_si256(rotr(x, 7), rotr(x, 18)),
                            _mm256_srli_epi32(x, 3));
}

inline __m256i small_sigma1(__m256i x) {
    return _mm256_xor_si256(_mm256_xor_si256(rotr(x, 17), rotr(x, 19)),
                            _mm256_srli_epi32(x, 10));
}

inline __m256i choose(__m256i e, __m256i f, __m256i g) {
    return _mm256_xor_si256(g, _mm256_and_si256(e, _mm256_xor_si256(f, g)));
}

inline __m256i majority(__m256i a, __m256i b, __m256i c) {
    return _mm256_xor_si256(_mm256_and_si256(a, b),
                            _mm256_and_si256(c, _mm256_xor_si256(a, b)));
}

inline __m256i byteswap32(__m256i v) {
    const __m256i shuffle = _mm256_setr_epi8(3, 2, 1, 0, 7, 6, 5, 4, 11, 10, 9, 8, 15, 14,
                                             13, 12, 3, 2, 1, 0, 7, 6, 5, 4, 11, 10, 9, 8,
                                             15, 14, 13, 12);
    return _mm256_shuffle_epi8(v, shuffle);
}

// Transposes an 8x8 matrix of dwords: in[r] holds row r (one message's
// eight consecutive dwords), out[c] holds column c across all messages.
inline void transpose8x8(const __m256i in[8], __m256i out[8]) {
    __m256i t0 = _mm256_unpacklo_epi32(in[0], in[1]);
    __m256i t1 = _mm256_unpackhi_epi32(in[0], in[1]);
    __m256i t2 = _mm256_unpacklo_epi32(in[2], in[3]);
    __m256i t3 = _mm256_unpackhi_epi32(in[2], in[3]);
    __m256i t4 = _mm256_unpacklo_epi32(in[4], in[5]);
    __m256i t5 = _mm256_unpackhi_epi32(in[4], in[5]);
    __m256i t6 = _mm256_unpacklo_epi32(in[6], in[7]);
    __m256i t7 = _mm256_unpackhi_epi32(in[6], in[7]);

    __m256i u0 = _mm256_unpacklo_epi64(t0, t2);
    __m256i u1 = _mm256_unpackhi_epi64(t0, t2);
    __m256i u2 = _mm256_unpacklo_epi64(t1, t3);
    __m256i u3 = _mm256_unpackhi_epi64(t1, t3);
    __m256i u4 = _mm256_unpacklo_epi64(t4, t6);
    __m256i u5 = _mm256_unpackhi_epi64(t4, t6);
    __m256i u6 = _mm256_unpacklo_epi64(t5, t7);
    __m256i u7 = _mm256_unpackhi_epi64(t5, t7);

    out[0] = _mm256_permute2x128_si256(u0, u4, 0x20);
    out[1] = _mm256_permute2x128_si256(u1, u5, 0x20);
    out[2] = _mm256_permute2x128_si256(u2, u6, 0x20);
    out[3] = _mm256_permute2x128_si256(u3, u7, 0x20);
    out[4] = _mm256_permute2x128_si256(u0, u4, 0x31);
    out[5] = _mm256_permute2x128_si256(u1, u5, 0x31);
    out[6] = _mm256_permute2x128_si256(u2, u6, 0x31);
    out[7] = _mm256_permute2x128_si256(u3, u7, 0x31);
}

struct State8 {
    __m256i h[8];
};

inline void compress8(State8& st, const __m256i w_in[16]) {
    __m256i w[16];
    for (int i = 0; i < 16; ++i) w[i] = w_in[i];

    __m256i a = st.h[0], b = st.h[1], c = st.h[2], d = st.h[3];
    __m256i e = st.h[4], f = st.h[5], g = st.h[6], h = st.h[7];

    for (int t = 0; t < 64; ++t) {
        if (t >= 16) {
            __m256i wt = _mm256_add_epi32(
                _mm256_add_epi32(small_sigma1(w[(t - 2) & 15]), w[(t - 7) & 15]),
                _mm256_add_epi32(small_sigma0(w[(t - 15) & 15]), w[t & 15]));
            w[t & 15] = wt;
        }
        __m256i t1 = _mm256_add_epi32(
            _mm256_add_epi32(_mm256_add_epi32(h, big_sigma1(e)), choose(e, f, g)),
            _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(kRound[t])), w[t & 15]));
        __m256i t2 = _mm256_add_epi32(big_sigma0(a), majority(a, b, c));
        h = g;
        g = f;
        f = e;
        e = _mm256_add_epi32(d, t1);
        d = c;
        c = b;
        b = a;
        a = _mm256_add_epi32(t1, t2);
    }

    st.h[0] = _mm256_add_epi32(st.h[0], a);
    st.h[1] = _mm256_add_epi32(st.h[1], b);
    st.h[2] = _mm256_add_epi32(st.h[2], c);
    st.h[3] = _mm256_add_epi32(st.h[3], d);
    st.h[4] = _mm256_add_epi32(st.h[4], e);
    st.h[5] = _mm256_add_epi32(st.h[5], f);
    st.h[6] = _mm256_add_epi32(st.h[6], g);
    st.h[7] = _mm256_add_epi32(st.h[7], h);
}

}  // namespace

void hash64_x8_avx2(const uint8_t in[8 * kBlockSize], uint8_t out[8 * kDigestSize]) {
    State8 st;
    st.h[0] = _mm256_set1_epi32(0x6a09e667);
    st.h[1] = _mm256_set1_epi32(static_cast<int>(0xbb67ae85));
    st.h[2] = _mm256_set1_epi32(0x3c6ef372);
    st.h[3] = _mm256_set1_epi32(static_cast<int>(0xa54ff53a));
    st.h[4] = _mm256_set1_epi32(0x510e527f);
    st.h[5] = _mm256_set1_epi32(static_cast<int>(0x9b05688c));
    st.h[6] = _mm256_set1_epi32(0x1f83d9ab);
    st.h[7] = _mm256_set1_epi32(0x5be0cd19);

    // Message block: gather dwords 0..7 and 8..15 of each message, swap to
    // big-endian, transpose so w[t] holds dword t of all eight messages.
    __m256i rows[8], w[16];
    for (int m = 0; m < 8; ++m) {
        rows[m] = byteswap32(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + m * kBlockSize)));
    }
    transpose8x8(rows, w);
    for (int m = 0; m < 8; ++m) {
        rows[m] = byteswap32(
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + m * kBlockSize + 32)));
    }
    transpose8x8(rows, w + 8);
    compress8(st, w);

    // Padding block for a 64-byte message, identical in every lane.
    __m256i pad[16];
    pad[0] = _mm256_set1_epi32(static_cast<int>(0x80000000));
    for (int i = 1; i < 15; ++i) pad[i] = _mm256_setzero_si256();
    pad[15] = _mm256_set1_epi32(512);
    compress8(st, pad);

    // Transpose back so each message's eight state words are contiguous.
    __m256i digests[8];
    transpose8x8(st.h, digests);
    for (int m = 0; m < 8; ++m) {
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + m * kDigestSize),
                            byteswap32(digests[m]));
    }
}

}  // namespace pubfab::sha256::detail

#endif  // PUBFAB_HAVE_AVX2_BUILD
