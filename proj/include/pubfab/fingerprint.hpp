// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>

#include "pubfab/bytes.hpp"
#include "pubfab/canonical.hpp"
#include "pubfab/errors.hpp"
#include "pubfab/sha256.hpp"

namespace pubfab {

// Content identity of a published object: a registered hash algorithm name
// plus its digest. Two textual spellings are accepted on input; the path
// form is emitted everywhere because it is self-describing.
//
//   path form:    sha256/<64 lowercase hex>
//   compact form: fp:<unpadded base64url of algorithm-tag byte + digest>
class Fingerprint {
public:
    Fingerprint() = default;  // all-zero sha256 digest

    // Validates the algorithm is registered and the digest length matches.
    static Fingerprint make(std::string_view algorithm, Bytes digest);
    static Fingerprint parse(std::string_view text);  // throws MalformedFingerprint

    const std::string& algorithm() const { return algorithm_; }
    const Bytes& digest() const { return digest_; }

    std::string path_form() const;
    std::string compact_form() const;

    friend auto operator<=>(const Fingerprint& a, const Fingerprint& b) = default;

private:
    std::string algorithm_ = "sha256";
    Bytes digest_ = Bytes(sha256::kDigestSize, 0);
};

bool algorithm_registered(std::string_view algorithm);

// Hash of raw bytes under a registered algorithm; throws UnknownAlgorithm.
Fingerprint fingerprint(std::span<const uint8_t> data, std::string_view algorithm = "sha256");

inline Fingerprint fingerprint(const Bytes& data, std::string_view algorithm = "sha256") {
    return fingerprint(std::span<const uint8_t>(data.data(), data.size()), algorithm);
}

// Fingerprint of a semantic object's canonical bytes.
Fingerprint fingerprint_value(const canonical::Value& value);

// Chunked feeding for large inputs (files); whole-buffer semantics.
class Digester {
public:
    explicit Digester(std::string_view algorithm = "sha256");
    void update(std::span<const uint8_t> data);
    Fingerprint finish();

private:
    std::string algorithm_;
    sha256::Hasher hasher_;
};

}  // namespace pubfab
