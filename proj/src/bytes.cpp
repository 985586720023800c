// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/bytes.hpp"

namespace pubfab {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '-') return 62;
    if (c == '_') return 63;
    return -1;
}

}  // namespace

std::string hex_encode(std::span<const uint8_t> data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

std::optional<Bytes> hex_decode(std::string_view text) {
    if (text.size() % 2 != 0) return std::nullopt;
    Bytes out;
    out.reserve(text.size() / 2);
    for (size_t i = 0; i < text.size(); i += 2) {
        int hi = -1, lo = -1;
        char a = text[i], b = text[i + 1];
        if (a >= '0' && a <= '9') hi = a - '0';
        else if (a >= 'a' && a <= 'f') hi = a - 'a' + 10;
        if (b >= '0' && b <= '9') lo = b - '0';
        else if (b >= 'a' && b <= 'f') lo = b - 'a' + 10;
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string base64url_encode(std::span<const uint8_t> data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        uint32_t v = (uint32_t(data[i]) << 16) | (uint32_t(data[i + 1]) << 8) | data[i + 2];
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back(kB64Alphabet[v & 63]);
    }
    size_t rem = data.size() - i;
    if (rem == 1) {
        uint32_t v = uint32_t(data[i]) << 16;
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
    } else if (rem == 2) {
        uint32_t v = (uint32_t(data[i]) << 16) | (uint32_t(data[i + 1]) << 8);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
    }
    return out;
}

std::optional<Bytes> base64url_decode(std::string_view text) {
    size_t rem = text.size() % 4;
    if (rem == 1) return std::nullopt;
    Bytes out;
    out.reserve(text.size() / 4 * 3 + 2);
    size_t i = 0;
    for (; i + 4 <= text.size(); i += 4) {
        int a = b64_value(text[i]), b = b64_value(text[i + 1]);
        int c = b64_value(text[i + 2]), d = b64_value(text[i + 3]);
        if (a < 0 || b < 0 || c < 0 || d < 0) return std::nullopt;
        uint32_t v = (uint32_t(a) << 18) | (uint32_t(b) << 12) | (uint32_t(c) << 6) | uint32_t(d);
        out.push_back(static_cast<uint8_t>(v >> 16));
        out.push_back(static_cast<uint8_t>(v >> 8));
        out.push_back(static_cast<uint8_t>(v));
    }
    if (rem == 2) {
        int a = b64_value(text[i]), b = b64_value(text[i + 1]);
        if (a < 0 || b < 0) return std::nullopt;
        if (b & 0x0f) return std::nullopt;  // non-canonical trailing bits
        out.push_back(static_cast<uint8_t>((a << 2) | (b >> 4)));
    } else if (rem == 3) {
        int a = b64_value(text[i]), b = b64_value(text[i + 1]), c = b64_value(text[i + 2]);
        if (a < 0 || b < 0 || c < 0) return std::nullopt;
        if (c & 0x03) return std::nullopt;
        out.push_back(static_cast<uint8_t>((a << 2) | (b >> 4)));
        out.push_back(static_cast<uint8_t>(((b & 0x0f) << 4) | (c >> 2)));
    }
    return out;
}

bool is_valid_utf8(std::string_view text) {
    const auto* p = reinterpret_cast<const uint8_t*>(text.data());
    const auto* end = p + text.size();
    while (p < end) {
        uint8_t c = *p;
        if (c < 0x80) {
            ++p;
        } else if ((c & 0xe0) == 0xc0) {
            if (end - p < 2 || (p[1] & 0xc0) != 0x80) return false;
            uint32_t cp = (uint32_t(c & 0x1f) << 6) | (p[1] & 0x3f);
            if (cp < 0x80) return false;
            p += 2;
        } else if ((c & 0xf0) == 0xe0) {
            if (end - p < 3 || (p[1] & 0xc0) != 0x80 || (p[2] & 0xc0) != 0x80) return false;
            uint32_t cp = (uint32_t(c & 0x0f) << 12) | (uint32_t(p[1] & 0x3f) << 6) | (p[2] & 0x3f);
            if (cp < 0x800 || (cp >= 0xd800 && cp <= 0xdfff)) return false;
            p += 3;
        } else if ((c & 0xf8) == 0xf0) {
            if (end - p < 4 || (p[1] & 0xc0) != 0x80 || (p[2] & 0xc0) != 0x80 ||
                (p[3] & 0xc0) != 0x80) {
                return false;
            }
            uint32_t cp = (uint32_t(c & 0x07) << 18) | (uint32_t(p[1] & 0x3f) << 12) |
                          (uint32_t(p[2] & 0x3f) << 6) | (p[3] & 0x3f);
            if (cp < 0x10000 || cp > 0x10ffff) return false;
            p += 4;
        } else {
            return false;
        }
    }
    return true;
}

}  // namespace pubfab
