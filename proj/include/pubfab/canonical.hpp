// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic byte encoding for semantic objects. Two logically equal
// values always encode to identical bytes, so content fingerprints of
// structured objects are stable across platforms and insertion orders.
//
// Grammar (UTF-8, no insignificant whitespace):
//   value  := "true" | "false" | int | text | bytes | list | map
//   int    := "-"? digits          (base 10, no leading zeros, no "-0")
//   text   := '"' chars '"'        (escapes: \" \\ \u00xx for U+0000..1F)
//   bytes  := 'b"' base64url '"'   (unpadded, canonical trailing bits)
//   list   := '[' value (',' value)* ']' | '[]'
//   map    := '{' text ':' value (',' text ':' value)* '}' | '{}'
//
// Map keys are sorted by code point (bytewise UTF-8 order), text is
// NFC-normalized at construction, and decode() accepts only the canonical
// spelling, so encode(decode(b)) == b for every accepted b.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pubfab/bytes.hpp"
#include "pubfab/errors.hpp"

namespace pubfab::canonical {

class Value {
public:
    enum class Kind { boolean, integer, text, bytes, list, map };

    struct Entry;
    using List = std::vector<Value>;
    using Map = std::vector<Entry>;  // sorted by key, keys unique

    Value() : kind_(Kind::map) {}  // empty map

    static Value boolean(bool v);
    static Value integer(int64_t v);
    static Value text(std::string_view v);  // NFC-normalizes; rejects bad UTF-8
    static Value bytes(Bytes v);
    static Value list(List v);
    static Value map(std::vector<std::pair<std::string, Value>> entries);

    Kind kind() const { return kind_; }

    bool as_bool() const;
    int64_t as_int() const;
    const std::string& as_text() const;
    const Bytes& as_bytes() const;
    const List& as_list() const;
    const Map& as_map() const;

    // Map lookup; nullptr when the key is absent or this is not a map.
    const Value* get(std::string_view key) const;
    // Map lookup that throws MalformedEncoding when the key is absent.
    const Value& at(std::string_view key) const;

    bool operator==(const Value& other) const;

private:
    Kind kind_;
    bool bool_ = false;
    int64_t int_ = 0;
    std::string text_;
    Bytes bytes_;
    List list_;
    Map map_;
};

struct Value::Entry {
    std::string key;
    Value value;
    bool operator==(const Entry& other) const = default;
};

// NFC normalization of valid UTF-8; throws UnencodableValue otherwise.
std::string nfc_normalize(std::string_view text);

Bytes encode(const Value& value);
Value decode(std::span<const uint8_t> data);  // throws MalformedEncoding

inline Value decode(const Bytes& data) {
    return decode(std::span<const uint8_t>(data.data(), data.size()));
}
inline Value decode_text(std::string_view text) {
    return decode(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

}  // namespace pubfab::canonical
