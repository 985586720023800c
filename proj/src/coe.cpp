// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/coe.hpp"

#include <sodium.h>

#include <algorithm>
#include <charconv>
#include <sstream>

#include "pubfab/sha256.hpp"

namespace pubfab::coe {

namespace {

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw DomainError("CryptoInit", "libsodium initialization failed");
}

bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
        if (!ok) return false;
    }
    return true;
}

Bytes sha256_of(std::span<const uint8_t> data) {
    auto d = sha256::hash(data);
    return Bytes(d.begin(), d.end());
}

}  // namespace

// --- textual forms ----------------------------------------------------------

std::string to_text(const CoERef& coe) {
    if (const auto* reg = std::get_if<RegistryStamp>(&coe)) {
        return reg->authority + ":" + reg->date.to_string() + ":" + reg->external_id;
    }
    const auto& link = std::get<LinkedStamp>(coe);
    // The receipt carries everything needed to re-fold the proof.
    canonical::Value::List path;
    for (const auto& node : link.audit_path) {
        path.push_back(canonical::Value::map({
            {"side", canonical::Value::text(node.side == Side::left ? "left" : "right")},
            {"digest", canonical::Value::bytes(node.digest)},
        }));
    }
    auto receipt = canonical::Value::map({
        {"leaf", canonical::Value::integer(static_cast<int64_t>(link.leaf_index))},
        {"path", canonical::Value::list(std::move(path))},
        {"head", canonical::Value::bytes(link.round_head)},
        {"prev", canonical::Value::bytes(link.prev_head)},
    });
    return "link:" + link.authority + ":" + std::to_string(link.round) + ":" +
           base64url_encode(canonical::encode(receipt));
}

CoERef parse_coe(std::string_view text) {
    if (text.starts_with("link:")) {
        std::string_view rest = text.substr(5);
        size_t c1 = rest.find(':');
        if (c1 == std::string_view::npos) throw MalformedCoE("missing round in linked stamp");
        size_t c2 = rest.find(':', c1 + 1);
        if (c2 == std::string_view::npos) throw MalformedCoE("missing receipt in linked stamp");
        LinkedStamp link;
        link.authority = std::string(rest.substr(0, c1));
        if (!valid_identifier(link.authority)) throw MalformedCoE("bad authority identifier");
        std::string_view round_text = rest.substr(c1 + 1, c2 - c1 - 1);
        auto [p, ec] = std::from_chars(round_text.data(), round_text.data() + round_text.size(),
                                       link.round);
        if (ec != std::errc() || p != round_text.data() + round_text.size()) {
            throw MalformedCoE("bad round number");
        }
        auto raw = base64url_decode(rest.substr(c2 + 1));
        if (!raw) throw MalformedCoE("receipt is not base64url");
        try {
            canonical::Value receipt = canonical::decode(*raw);
            link.leaf_index = static_cast<uint64_t>(receipt.at("leaf").as_int());
            for (const auto& node : receipt.at("path").as_list()) {
                const std::string& side = node.at("side").as_text();
                if (side != "left" && side != "right") throw MalformedCoE("bad side");
                link.audit_path.push_back(
                    AuditNode{side == "left" ? Side::left : Side::right,
                              node.at("digest").as_bytes()});
            }
            link.round_head = receipt.at("head").as_bytes();
            link.prev_head = receipt.at("prev").as_bytes();
        } catch (const MalformedEncoding& e) {
            throw MalformedCoE(std::string("bad receipt: ") + e.what());
        }
        if (link.audit_path.size() > kMaxAuditPath) throw MalformedCoE("audit path too long");
        return link;
    }

    // authority:YYYY-MM-DD:external_id
    size_t c1 = text.find(':');
    if (c1 == std::string_view::npos) throw MalformedCoE("expected ':' separators");
    size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw MalformedCoE("missing external id");
    RegistryStamp reg;
    reg.authority = std::string(text.substr(0, c1));
    if (!valid_identifier(reg.authority)) throw MalformedCoE("bad authority identifier");
    auto date = Date::parse(text.substr(c1 + 1, c2 - c1 - 1));
    if (!date) throw MalformedCoE("bad date");
    reg.date = *date;
    reg.external_id = std::string(text.substr(c2 + 1));
    if (reg.external_id.empty()) throw MalformedCoE("empty external id");
    return reg;
}

canonical::Value to_value(const CoERef& coe) {
    using canonical::Value;
    if (const auto* reg = std::get_if<RegistryStamp>(&coe)) {
        std::vector<std::pair<std::string, Value>> fields = {
            {"kind", Value::text("registry")},
            {"authority", Value::text(reg->authority)},
            {"date", Value::text(reg->date.to_string())},
            {"external_id", Value::text(reg->external_id)},
        };
        if (!reg->scheme.empty()) fields.emplace_back("scheme", Value::text(reg->scheme));
        if (!reg->signature.empty()) fields.emplace_back("sig", Value::bytes(reg->signature));
        return Value::map(std::move(fields));
    }
    return canonical::Value::map({
        {"kind", canonical::Value::text("linked")},
        {"ref", canonical::Value::text(to_text(coe))},
    });
}

CoERef coe_from_value(const canonical::Value& v) {
    const std::string& kind = v.at("kind").as_text();
    if (kind == "linked") return parse_coe(v.at("ref").as_text());
    if (kind != "registry") throw MalformedCoE("unknown CoE kind: " + kind);
    RegistryStamp reg;
    reg.authority = v.at("authority").as_text();
    auto date = Date::parse(v.at("date").as_text());
    if (!date) throw MalformedCoE("bad date");
    reg.date = *date;
    reg.external_id = v.at("external_id").as_text();
    if (const auto* scheme = v.get("scheme")) reg.scheme = scheme->as_text();
    if (const auto* sig = v.get("sig")) reg.signature = sig->as_bytes();
    return reg;
}

// --- Merkle rounds ----------------------------------------------------------

namespace {

// One level up: pairs hashed with the batch kernel, odd tail duplicated.
std::vector<Bytes> next_level(const std::vector<Bytes>& level) {
    size_t pairs = (level.size() + 1) / 2;
    Bytes input(pairs * 64);
    for (size_t i = 0; i < pairs; ++i) {
        const Bytes& left = level[2 * i];
        const Bytes& right = (2 * i + 1 < level.size()) ? level[2 * i + 1] : level[2 * i];
        std::copy(left.begin(), left.end(), input.begin() + i * 64);
        std::copy(right.begin(), right.end(), input.begin() + i * 64 + 32);
    }
    Bytes output(pairs * 32);
    sha256::hash64_batch(input.data(), pairs, output.data());
    std::vector<Bytes> up(pairs);
    for (size_t i = 0; i < pairs; ++i) {
        up[i] = Bytes(output.begin() + i * 32, output.begin() + (i + 1) * 32);
    }
    return up;
}

std::vector<std::vector<Bytes>> build_levels(const std::vector<Bytes>& leaves) {
    std::vector<std::vector<Bytes>> levels = {leaves};
    while (levels.back().size() > 1) {
        levels.push_back(next_level(levels.back()));
    }
    return levels;
}

}  // namespace

Bytes merkle_root(const std::vector<Bytes>& leaves) {
    if (leaves.empty()) throw EmptyRound("cannot build a tree without leaves");
    return build_levels(leaves).back().front();
}

std::vector<AuditNode> merkle_audit_path(const std::vector<Bytes>& leaves, size_t index) {
    auto levels = build_levels(leaves);
    std::vector<AuditNode> path;
    size_t pos = index;
    for (size_t l = 0; l + 1 < levels.size(); ++l) {
        const auto& level = levels[l];
        size_t sibling = (pos % 2 == 0) ? pos + 1 : pos - 1;
        if (sibling >= level.size()) sibling = pos;  // odd tail pairs with itself
        path.push_back(AuditNode{pos % 2 == 0 ? Side::right : Side::left, level[sibling]});
        pos /= 2;
    }
    return path;
}

Bytes fold_audit_path(const Bytes& leaf, const std::vector<AuditNode>& path) {
    Bytes current = leaf;
    for (const auto& node : path) {
        Bytes joined;
        joined.reserve(64);
        if (node.side == Side::left) {
            joined.insert(joined.end(), node.digest.begin(), node.digest.end());
            joined.insert(joined.end(), current.begin(), current.end());
        } else {
            joined.insert(joined.end(), current.begin(), current.end());
            joined.insert(joined.end(), node.digest.begin(), node.digest.end());
        }
        current = sha256_of(joined);
    }
    return current;
}

Bytes chain_head(const Bytes& prev_head, const Bytes& root) {
    Bytes joined;
    joined.reserve(prev_head.size() + root.size());
    joined.insert(joined.end(), prev_head.begin(), prev_head.end());
    joined.insert(joined.end(), root.begin(), root.end());
    return sha256_of(joined);
}

Bytes genesis_head() {
    return Bytes(32, 0);
}

Bytes registry_signing_bytes(std::string_view authority, const Date& date,
                             const Fingerprint& fp) {
    return canonical::encode(canonical::Value::map({
        {"authority", canonical::Value::text(authority)},
        {"date", canonical::Value::text(date.to_string())},
        {"fp", canonical::Value::text(fp.path_form())},
    }));
}

// --- TimestampAuthority -------------------------------------------------------

TimestampAuthority TimestampAuthority::create(std::string id) {
    ensure_sodium();
    Bytes seed(crypto_sign_SEEDBYTES);
    randombytes_buf(seed.data(), seed.size());
    return create_with_seed(std::move(id), seed);
}

TimestampAuthority TimestampAuthority::create_with_seed(std::string id,
                                                        std::span<const uint8_t> seed32) {
    ensure_sodium();
    if (!valid_identifier(id)) throw MalformedCoE("bad authority identifier: " + id);
    if (seed32.size() != crypto_sign_SEEDBYTES) {
        throw DomainError("CryptoInit", "signing seed must be 32 bytes");
    }
    TimestampAuthority a;
    a.id_ = std::move(id);
    a.sign_public_.resize(crypto_sign_PUBLICKEYBYTES);
    a.sign_secret_.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(a.sign_public_.data(), a.sign_secret_.data(), seed32.data());
    return a;
}

RegistryStamp TimestampAuthority::stamp_registry(const Fingerprint& fp, const Date& date,
                                                 std::string external_id) {
    ensure_sodium();
    RegistryStamp stamp;
    stamp.authority = id_;
    stamp.date = date;
    stamp.external_id = std::move(external_id);
    stamp.scheme = "ed25519";
    Bytes message = registry_signing_bytes(id_, date, fp);
    stamp.signature.resize(crypto_sign_BYTES);
    crypto_sign_detached(stamp.signature.data(), nullptr, message.data(), message.size(),
                         sign_secret_.data());
    return stamp;
}

TimestampAuthority::PendingReceipt TimestampAuthority::round_append(const Fingerprint& fp) {
    pending_.push_back(fp);
    return PendingReceipt{open_round(), static_cast<uint64_t>(pending_.size() - 1)};
}

TimestampAuthority::RoundResult TimestampAuthority::round_close(std::string publication_note) {
    if (pending_.empty()) {
        throw EmptyRound("no fingerprints in round " + std::to_string(open_round()));
    }
    std::vector<Bytes> leaves;
    leaves.reserve(pending_.size());
    for (const auto& fp : pending_) leaves.push_back(fp.digest());

    uint64_t round = open_round();
    Bytes prev = heads_.empty() ? genesis_head() : heads_.back().head;
    Bytes root = merkle_root(leaves);
    Bytes head = chain_head(prev, root);

    RoundResult result;
    result.head = head;
    for (size_t i = 0; i < leaves.size(); ++i) {
        LinkedStamp stamp;
        stamp.authority = id_;
        stamp.round = round;
        stamp.leaf_index = i;
        stamp.audit_path = merkle_audit_path(leaves, i);
        stamp.round_head = head;
        stamp.prev_head = prev;
        result.receipts.push_back(std::move(stamp));
    }
    heads_.push_back(HeadRecord{round, head, std::move(publication_note)});
    pending_.clear();
    return result;
}

std::string TimestampAuthority::heads_file() const {
    std::string out;
    for (const auto& rec : heads_) {
        out += "round " + std::to_string(rec.round) + " " + hex_encode(rec.head) + "\n";
    }
    return out;
}

canonical::Value TimestampAuthority::to_value() const {
    using canonical::Value;
    Value::List heads;
    for (const auto& rec : heads_) {
        heads.push_back(Value::map({
            {"round", Value::integer(static_cast<int64_t>(rec.round))},
            {"head", Value::bytes(rec.head)},
            {"note", Value::text(rec.publication_note)},
        }));
    }
    Value::List pending;
    for (const auto& fp : pending_) pending.push_back(Value::text(fp.path_form()));
    return Value::map({
        {"id", Value::text(id_)},
        {"secret_key", Value::bytes(sign_secret_)},
        {"public_key", Value::bytes(sign_public_)},
        {"heads", Value::list(std::move(heads))},
        {"pending", Value::list(std::move(pending))},
    });
}

TimestampAuthority TimestampAuthority::from_value(const canonical::Value& v) {
    TimestampAuthority a;
    a.id_ = v.at("id").as_text();
    a.sign_secret_ = v.at("secret_key").as_bytes();
    a.sign_public_ = v.at("public_key").as_bytes();
    uint64_t prev_round = 0;
    bool first = true;
    for (const auto& rec : v.at("heads").as_list()) {
        HeadRecord hr;
        hr.round = static_cast<uint64_t>(rec.at("round").as_int());
        hr.head = rec.at("head").as_bytes();
        hr.publication_note = rec.at("note").as_text();
        if (!first && hr.round <= prev_round) {
            throw MalformedCoE("head rounds must be strictly increasing");
        }
        first = false;
        prev_round = hr.round;
        a.heads_.push_back(std::move(hr));
    }
    for (const auto& fp : v.at("pending").as_list()) {
        a.pending_.push_back(Fingerprint::parse(fp.as_text()));
    }
    return a;
}

// --- TrustAnchors -------------------------------------------------------------

const Bytes* AnchorEntry::head_for(uint64_t round) const {
    auto it = std::lower_bound(heads.begin(), heads.end(), round,
                               [](const auto& p, uint64_t r) { return p.first < r; });
    if (it == heads.end() || it->first != round) return nullptr;
    return &it->second;
}

void TrustAnchors::set_verify_key(const std::string& authority, Bytes key) {
    entries_[authority].verify_key = std::move(key);
}

void TrustAnchors::add_head(const std::string& authority, uint64_t round, Bytes head) {
    auto& heads = entries_[authority].heads;
    auto it = std::lower_bound(heads.begin(), heads.end(), round,
                               [](const auto& p, uint64_t r) { return p.first < r; });
    if (it != heads.end() && it->first == round) {
        it->second = std::move(head);
    } else {
        heads.insert(it, {round, std::move(head)});
    }
}

void TrustAnchors::load_heads_file(const std::string& authority, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string word;
    while (in >> word) {
        if (word != "round") throw MalformedCoE("head file lines must start with 'round'");
        uint64_t round;
        std::string hex;
        if (!(in >> round >> hex)) throw MalformedCoE("truncated head file line");
        auto head = hex_decode(hex);
        if (!head) throw MalformedCoE("bad head hex");
        add_head(authority, round, std::move(*head));
    }
}

const AnchorEntry* TrustAnchors::find(const std::string& authority) const {
    auto it = entries_.find(authority);
    return it == entries_.end() ? nullptr : &it->second;
}

canonical::Value TrustAnchors::to_value() const {
    using canonical::Value;
    std::vector<std::pair<std::string, Value>> out;
    for (const auto& [authority, entry] : entries_) {
        std::vector<std::pair<std::string, Value>> fields;
        if (entry.verify_key) fields.emplace_back("verify_key", Value::bytes(*entry.verify_key));
        Value::List heads;
        for (const auto& [round, head] : entry.heads) {
            heads.push_back(Value::map({
                {"round", Value::integer(static_cast<int64_t>(round))},
                {"head", Value::bytes(head)},
            }));
        }
        fields.emplace_back("heads", Value::list(std::move(heads)));
        out.emplace_back(authority, Value::map(std::move(fields)));
    }
    return Value::map(std::move(out));
}

TrustAnchors TrustAnchors::from_value(const canonical::Value& v) {
    TrustAnchors anchors;
    for (const auto& entry : v.as_map()) {
        if (const auto* key = entry.value.get("verify_key")) {
            anchors.set_verify_key(entry.key, key->as_bytes());
        }
        for (const auto& rec : entry.value.at("heads").as_list()) {
            anchors.add_head(entry.key, static_cast<uint64_t>(rec.at("round").as_int()),
                             rec.at("head").as_bytes());
        }
    }
    return anchors;
}

// --- verification -------------------------------------------------------------

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::valid: return "valid";
        case Verdict::invalid: return "invalid";
        case Verdict::unknown_authority: return "unknown_authority";
    }
    return "?";
}

Verdict verify(const CoERef& coe, const Fingerprint& fp, const TrustAnchors& anchors) {
    ensure_sodium();
    if (const auto* reg = std::get_if<RegistryStamp>(&coe)) {
        const AnchorEntry* entry = anchors.find(reg->authority);
        if (!entry || !entry->verify_key) return Verdict::unknown_authority;
        if (reg->scheme != "ed25519") return Verdict::invalid;
        if (reg->signature.size() != crypto_sign_BYTES ||
            entry->verify_key->size() != crypto_sign_PUBLICKEYBYTES) {
            return Verdict::invalid;
        }
        Bytes message = registry_signing_bytes(reg->authority, reg->date, fp);
        int rc = crypto_sign_verify_detached(reg->signature.data(), message.data(),
                                             message.size(), entry->verify_key->data());
        return rc == 0 ? Verdict::valid : Verdict::invalid;
    }

    const auto& link = std::get<LinkedStamp>(coe);
    const AnchorEntry* entry = anchors.find(link.authority);
    if (!entry) return Verdict::unknown_authority;
    const Bytes* anchored = entry->head_for(link.round);
    if (!anchored) return Verdict::unknown_authority;
    if (link.audit_path.size() > kMaxAuditPath) return Verdict::invalid;

    Bytes root = fold_audit_path(fp.digest(), link.audit_path);
    if (chain_head(link.prev_head, root) != *anchored) return Verdict::invalid;
    if (link.round_head != *anchored) return Verdict::invalid;
    if (link.round == 0) {
        if (link.prev_head != genesis_head()) return Verdict::invalid;
    } else if (const Bytes* prev = entry->head_for(link.round - 1)) {
        if (*prev != link.prev_head) return Verdict::invalid;
    }
    return Verdict::valid;
}

}  // namespace pubfab::coe
