// Shared helpers for unit tests.
#pragma once

#include <string>
#include <vector>

#include "pubfab/bytes.hpp"
#include "pubfab/canonical.hpp"
#include "pubfab/rng.hpp"

namespace pubfab::testing {

inline Bytes random_bytes(Rng& rng, size_t max_len) {
    Bytes out(rng.below(max_len + 1));
    for (auto& b : out) b = static_cast<uint8_t>(rng.below(256));
    return out;
}

inline std::string random_text(Rng& rng, size_t max_len) {
    // ASCII plus a few multi-byte code points, including combining marks so
    // NFC normalization actually fires.
    static const std::vector<std::string> pool = {
        "a",  "b",  "z",    "0",        "_",        " ",  "\"", "\\",
        "\n", "é",  "é", "ß",     "日",       "ω",  "→",  "é",
        "A",  "mu", "x",    "Å",  // A + ring
    };
    size_t n = rng.below(max_len + 1);
    std::string out;
    for (size_t i = 0; i < n; ++i) out += rng.pick(pool);
    return out;
}

inline canonical::Value random_value(Rng& rng, int depth) {
    using canonical::Value;
    int kind = static_cast<int>(rng.below(depth > 0 ? 6 : 4));
    switch (kind) {
        case 0: return Value::boolean(rng.below(2) == 1);
        case 1: return Value::integer(static_cast<int64_t>(rng.next_u64()));
        case 2: return Value::text(random_text(rng, 12));
        case 3: return Value::bytes(random_bytes(rng, 24));
        case 4: {
            Value::List items;
            size_t n = rng.below(4);
            for (size_t i = 0; i < n; ++i) items.push_back(random_value(rng, depth - 1));
            return Value::list(std::move(items));
        }
        default: {
            std::vector<std::pair<std::string, Value>> entries;
            size_t n = rng.below(4);
            for (size_t i = 0; i < n; ++i) {
                std::string key = random_text(rng, 6) + std::to_string(i);
                entries.emplace_back(key, random_value(rng, depth - 1));
            }
            return Value::map(std::move(entries));
        }
    }
}

}  // namespace pubfab::testing
