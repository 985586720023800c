// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/canonical.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace pubfab::canonical {

namespace {

constexpr int kMaxDepth = 128;

[[noreturn]] void bad(const std::string& why) {
    throw MalformedEncoding(why);
}

}  // namespace

std::string nfc_normalize(std::string_view text) {
    if (!is_valid_utf8(text)) throw UnencodableValue("text is not valid UTF-8");
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw UnencodableValue("NFC normalizer unavailable");
    icu::UnicodeString units =
        icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), text.size()));
    if (nfc->isNormalized(units, status) && U_SUCCESS(status)) {
        return std::string(text);
    }
    status = U_ZERO_ERROR;
    icu::UnicodeString normalized = nfc->normalize(units, status);
    if (U_FAILURE(status)) throw UnencodableValue("NFC normalization failed");
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

Value Value::boolean(bool v) {
    Value r;
    r.kind_ = Kind::boolean;
    r.bool_ = v;
    return r;
}

Value Value::integer(int64_t v) {
    Value r;
    r.kind_ = Kind::integer;
    r.int_ = v;
    return r;
}

Value Value::text(std::string_view v) {
    Value r;
    r.kind_ = Kind::text;
    r.text_ = nfc_normalize(v);
    return r;
}

Value Value::bytes(Bytes v) {
    Value r;
    r.kind_ = Kind::bytes;
    r.bytes_ = std::move(v);
    return r;
}

Value Value::list(List v) {
    Value r;
    r.kind_ = Kind::list;
    r.list_ = std::move(v);
    return r;
}

Value Value::map(std::vector<std::pair<std::string, Value>> entries) {
    Value r;
    r.kind_ = Kind::map;
    r.map_.reserve(entries.size());
    for (auto& [key, value] : entries) {
        r.map_.push_back(Entry{nfc_normalize(key), std::move(value)});
    }
    std::sort(r.map_.begin(), r.map_.end(),
              [](const Entry& a, const Entry& b) { return a.key < b.key; });
    for (size_t i = 1; i < r.map_.size(); ++i) {
        if (r.map_[i - 1].key == r.map_[i].key) {
            throw UnencodableValue("duplicate map key: " + r.map_[i].key);
        }
    }
    return r;
}

bool Value::as_bool() const {
    if (kind_ != Kind::boolean) bad("expected boolean");
    return bool_;
}

int64_t Value::as_int() const {
    if (kind_ != Kind::integer) bad("expected integer");
    return int_;
}

const std::string& Value::as_text() const {
    if (kind_ != Kind::text) bad("expected text");
    return text_;
}

const Bytes& Value::as_bytes() const {
    if (kind_ != Kind::bytes) bad("expected bytes");
    return bytes_;
}

const Value::List& Value::as_list() const {
    if (kind_ != Kind::list) bad("expected list");
    return list_;
}

const Value::Map& Value::as_map() const {
    if (kind_ != Kind::map) bad("expected map");
    return map_;
}

const Value* Value::get(std::string_view key) const {
    if (kind_ != Kind::map) return nullptr;
    auto it = std::lower_bound(map_.begin(), map_.end(), key,
                               [](const Entry& e, std::string_view k) { return e.key < k; });
    if (it == map_.end() || it->key != key) return nullptr;
    return &it->value;
}

const Value& Value::at(std::string_view key) const {
    const Value* v = get(key);
    if (!v) bad("missing map key: " + std::string(key));
    return *v;
}

bool Value::operator==(const Value& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
        case Kind::boolean: return bool_ == other.bool_;
        case Kind::integer: return int_ == other.int_;
        case Kind::text: return text_ == other.text_;
        case Kind::bytes: return bytes_ == other.bytes_;
        case Kind::list: return list_ == other.list_;
        case Kind::map: return map_ == other.map_;
    }
    return false;
}

// --- encoding --------------------------------------------------------------

namespace {

void encode_text(const std::string& text, Bytes& out) {
    out.push_back('"');
    for (unsigned char c : text) {
        if (c == '"') {
            out.push_back('\\');
            out.push_back('"');
        } else if (c == '\\') {
            out.push_back('\\');
            out.push_back('\\');
        } else if (c < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out.insert(out.end(), buf, buf + 6);
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
}

void encode_value(const Value& v, Bytes& out) {
    switch (v.kind()) {
        case Value::Kind::boolean: {
            std::string_view t = v.as_bool() ? "true" : "false";
            out.insert(out.end(), t.begin(), t.end());
            break;
        }
        case Value::Kind::integer: {
            char buf[24];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.as_int());
            out.insert(out.end(), buf, end);
            break;
        }
        case Value::Kind::text:
            encode_text(v.as_text(), out);
            break;
        case Value::Kind::bytes: {
            out.push_back('b');
            out.push_back('"');
            std::string b64 = base64url_encode(v.as_bytes());
            out.insert(out.end(), b64.begin(), b64.end());
            out.push_back('"');
            break;
        }
        case Value::Kind::list: {
            out.push_back('[');
            bool first = true;
            for (const Value& item : v.as_list()) {
                if (!first) out.push_back(',');
                first = false;
                encode_value(item, out);
            }
            out.push_back(']');
            break;
        }
        case Value::Kind::map: {
            out.push_back('{');
            bool first = true;
            for (const auto& entry : v.as_map()) {
                if (!first) out.push_back(',');
                first = false;
                encode_text(entry.key, out);
                out.push_back(':');
                encode_value(entry.value, out);
            }
            out.push_back('}');
            break;
        }
    }
}

}  // namespace

Bytes encode(const Value& value) {
    Bytes out;
    encode_value(value, out);
    return out;
}

// --- decoding --------------------------------------------------------------

namespace {

class Decoder {
public:
    explicit Decoder(std::span<const uint8_t> data) : data_(data) {}

    Value run() {
        Value v = parse_value(0);
        if (pos_ != data_.size()) bad("trailing bytes after value");
        return v;
    }

private:
    std::span<const uint8_t> data_;
    size_t pos_ = 0;

    uint8_t peek() {
        if (pos_ >= data_.size()) bad("unexpected end of input");
        return data_[pos_];
    }

    uint8_t take() {
        uint8_t c = peek();
        ++pos_;
        return c;
    }

    void expect(char c) {
        if (take() != static_cast<uint8_t>(c)) bad(std::string("expected '") + c + "'");
    }

    bool try_take(char c) {
        if (pos_ < data_.size() && data_[pos_] == static_cast<uint8_t>(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect_keyword(std::string_view kw) {
        for (char c : kw) expect(c);
    }

    Value parse_value(int depth) {
        if (depth > kMaxDepth) bad("nesting too deep");
        uint8_t c = peek();
        switch (c) {
            case 't':
                expect_keyword("true");
                return Value::boolean(true);
            case 'f':
                expect_keyword("false");
                return Value::boolean(false);
            case '"':
                return Value::text(parse_text());
            case 'b':
                return parse_bytes();
            case '[':
                return parse_list(depth);
            case '{':
                return parse_map(depth);
            default:
                if (c == '-' || (c >= '0' && c <= '9')) return parse_integer();
                bad("unexpected byte");
        }
    }

    Value parse_integer() {
        size_t start = pos_;
        if (try_take('-')) {
            if (peek() < '0' || peek() > '9') bad("bare minus sign");
        }
        size_t digits_start = pos_;
        while (pos_ < data_.size() && data_[pos_] >= '0' && data_[pos_] <= '9') ++pos_;
        size_t n_digits = pos_ - digits_start;
        if (n_digits == 0) bad("expected digits");
        if (n_digits > 1 && data_[digits_start] == '0') bad("leading zeros");
        std::string_view text(reinterpret_cast<const char*>(data_.data()) + start,
                              pos_ - start);
        if (text == "-0") bad("negative zero");
        int64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) bad("integer out of range");
        return Value::integer(v);
    }

    std::string parse_text() {
        expect('"');
        std::string out;
        for (;;) {
            uint8_t c = take();
            if (c == '"') break;
            if (c == '\\') {
                uint8_t e = take();
                if (e == '"') {
                    out.push_back('"');
                } else if (e == '\\') {
                    out.push_back('\\');
                } else if (e == 'u') {
                    int v = 0;
                    for (int i = 0; i < 4; ++i) {
                        uint8_t h = take();
                        int d;
                        if (h >= '0' && h <= '9') d = h - '0';
                        else if (h >= 'a' && h <= 'f') d = h - 'a' + 10;
                        else { bad("bad \\u escape"); }
                        v = v * 16 + d;
                    }
                    // Only control characters may (and must) be escaped.
                    if (v >= 0x20) bad("non-canonical \\u escape");
                    out.push_back(static_cast<char>(v));
                } else {
                    bad("unknown escape");
                }
            } else if (c < 0x20) {
                bad("unescaped control character");
            } else {
                out.push_back(static_cast<char>(c));
            }
        }
        if (!is_valid_utf8(out)) bad("text is not valid UTF-8");
        if (nfc_normalize(out) != out) bad("text is not NFC-normalized");
        return out;
    }

    Value parse_bytes() {
        expect('b');
        expect('"');
        size_t start = pos_;
        while (pos_ < data_.size() && data_[pos_] != '"') ++pos_;
        std::string_view b64(reinterpret_cast<const char*>(data_.data()) + start,
                             pos_ - start);
        expect('"');
        auto decoded = base64url_decode(b64);
        if (!decoded) bad("invalid base64url byte blob");
        return Value::bytes(std::move(*decoded));
    }

    Value parse_list(int depth) {
        expect('[');
        Value::List items;
        if (try_take(']')) return Value::list(std::move(items));
        for (;;) {
            items.push_back(parse_value(depth + 1));
            if (try_take(']')) break;
            expect(',');
        }
        return Value::list(std::move(items));
    }

    Value parse_map(int depth) {
        expect('{');
        std::vector<std::pair<std::string, Value>> entries;
        if (try_take('}')) return Value::map(std::move(entries));
        std::string prev_key;
        for (;;) {
            std::string key = parse_text();
            if (!entries.empty() && key <= prev_key) bad("map keys out of order");
            expect(':');
            Value v = parse_value(depth + 1);
            prev_key = key;
            entries.emplace_back(std::move(key), std::move(v));
            if (try_take('}')) break;
            expect(',');
        }
        return Value::map(std::move(entries));
    }
};

}  // namespace

Value decode(std::span<const uint8_t> data) {
    try {
        return Decoder(data).run();
    } catch (const UnencodableValue& e) {
        // Strict decoding surfaces every defect as a malformed encoding.
        throw MalformedEncoding(e.what());
    }
}

}  // namespace pubfab::canonical
