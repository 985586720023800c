// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/fingerprint.hpp"

namespace pubfab {

namespace {

// Registered digest algorithms. The tag byte prefixes the digest in the
// compact textual form.
struct AlgorithmInfo {
    std::string_view name;
    uint8_t tag;
    size_t digest_size;
};

constexpr AlgorithmInfo kAlgorithms[] = {
    {"sha256", 0x01, sha256::kDigestSize},
};

const AlgorithmInfo* find_algorithm(std::string_view name) {
    for (const auto& a : kAlgorithms) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

const AlgorithmInfo* find_algorithm_by_tag(uint8_t tag) {
    for (const auto& a : kAlgorithms) {
        if (a.tag == tag) return &a;
    }
    return nullptr;
}

}  // namespace

bool algorithm_registered(std::string_view algorithm) {
    return find_algorithm(algorithm) != nullptr;
}

Fingerprint Fingerprint::make(std::string_view algorithm, Bytes digest) {
    const AlgorithmInfo* info = find_algorithm(algorithm);
    if (!info) throw MalformedFingerprint("unregistered algorithm: " + std::string(algorithm));
    if (digest.size() != info->digest_size) {
        throw MalformedFingerprint("digest length " + std::to_string(digest.size()) +
                                   " does not match " + std::string(algorithm));
    }
    Fingerprint fp;
    fp.algorithm_ = std::string(algorithm);
    fp.digest_ = std::move(digest);
    return fp;
}

Fingerprint Fingerprint::parse(std::string_view text) {
    if (text.starts_with("fp:")) {
        auto raw = base64url_decode(text.substr(3));
        if (!raw || raw->empty()) throw MalformedFingerprint("bad compact fingerprint");
        const AlgorithmInfo* info = find_algorithm_by_tag((*raw)[0]);
        if (!info) throw MalformedFingerprint("unknown algorithm tag in compact fingerprint");
        return make(info->name, Bytes(raw->begin() + 1, raw->end()));
    }
    size_t slash = text.find('/');
    if (slash == std::string_view::npos) {
        throw MalformedFingerprint("expected '<algorithm>/<hex>' or 'fp:...'");
    }
    std::string_view alg = text.substr(0, slash);
    auto digest = hex_decode(text.substr(slash + 1));
    if (!digest) throw MalformedFingerprint("digest is not lowercase hex");
    return make(alg, std::move(*digest));
}

std::string Fingerprint::path_form() const {
    return algorithm_ + "/" + hex_encode(digest_);
}

std::string Fingerprint::compact_form() const {
    const AlgorithmInfo* info = find_algorithm(algorithm_);
    Bytes tagged;
    tagged.reserve(digest_.size() + 1);
    tagged.push_back(info->tag);
    tagged.insert(tagged.end(), digest_.begin(), digest_.end());
    return "fp:" + base64url_encode(tagged);
}

Fingerprint fingerprint(std::span<const uint8_t> data, std::string_view algorithm) {
    if (!algorithm_registered(algorithm)) {
        throw UnknownAlgorithm(std::string(algorithm));
    }
    sha256::Digest d = sha256::hash(data);
    return Fingerprint::make(algorithm, Bytes(d.begin(), d.end()));
}

Fingerprint fingerprint_value(const canonical::Value& value) {
    return fingerprint(canonical::encode(value));
}

Digester::Digester(std::string_view algorithm) : algorithm_(algorithm) {
    if (!algorithm_registered(algorithm)) {
        throw UnknownAlgorithm(std::string(algorithm));
    }
}

void Digester::update(std::span<const uint8_t> data) {
    hasher_.update(data);
}

Fingerprint Digester::finish() {
    sha256::Digest d = hasher_.finish();
    return Fingerprint::make(algorithm_, Bytes(d.begin(), d.end()));
}

}  // namespace pubfab
