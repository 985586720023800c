// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pubfab {

using Bytes = std::vector<uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(std::span<const uint8_t> b) {
    return std::string(b.begin(), b.end());
}

// Lowercase hex. Decoding is strict: even length, [0-9a-f] only.
std::string hex_encode(std::span<const uint8_t> data);
std::optional<Bytes> hex_decode(std::string_view text);

// Unpadded base64url (alphabet A-Za-z0-9-_). Decoding rejects padding,
// non-canonical trailing bits and lengths of the form 4k+1, so every byte
// sequence has exactly one accepted spelling.
std::string base64url_encode(std::span<const uint8_t> data);
std::optional<Bytes> base64url_decode(std::string_view text);

// Strict UTF-8 validity check (rejects overlongs, surrogates, > U+10FFFF).
bool is_valid_utf8(std::string_view text);

}  // namespace pubfab
