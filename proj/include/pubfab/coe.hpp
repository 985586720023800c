// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Certificates of existence: proofs that a fingerprint existed at or by
// some time, verifiable long after issuance. Two sources are recognized
// side by side: registry stamps (a signature by a named authority over the
// fingerprint, never the content) and linked stamps (membership in a
// Merkle round whose head is chained to the previous round's head and
// published widely).

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pubfab/bytes.hpp"
#include "pubfab/canonical.hpp"
#include "pubfab/date.hpp"
#include "pubfab/errors.hpp"
#include "pubfab/fingerprint.hpp"

namespace pubfab::coe {

// Textual form "authority:YYYY-MM-DD:external_id". The signature binds
// (authority, date, fingerprint); content bytes never reach the authority.
struct RegistryStamp {
    std::string authority;
    Date date;
    std::string external_id;
    std::string scheme;  // "ed25519"; empty for bare references parsed from text
    Bytes signature;

    bool operator==(const RegistryStamp&) const = default;
};

enum class Side : uint8_t { left, right };

struct AuditNode {
    Side side;  // which side the sibling digest sits on
    Bytes digest;

    bool operator==(const AuditNode&) const = default;
};

inline constexpr size_t kMaxAuditPath = 40;

// Textual form "link:<authority>:<round>:<base64url receipt>".
struct LinkedStamp {
    std::string authority;
    uint64_t round = 0;
    uint64_t leaf_index = 0;
    std::vector<AuditNode> audit_path;  // length <= kMaxAuditPath
    Bytes round_head;
    Bytes prev_head;

    bool operator==(const LinkedStamp&) const = default;
};

using CoERef = std::variant<RegistryStamp, LinkedStamp>;

std::string to_text(const CoERef& coe);
CoERef parse_coe(std::string_view text);  // throws MalformedCoE

canonical::Value to_value(const CoERef& coe);
CoERef coe_from_value(const canonical::Value& v);

// --- Merkle round machinery --------------------------------------------
// Leaves are fingerprint digests; parent = SHA-256(left || right); an odd
// node at any level is paired with a copy of itself. Round heads chain as
// head_n = SHA-256(prev_head ++ root_n), with 32 zero bytes before round 0.

Bytes merkle_root(const std::vector<Bytes>& leaves);
std::vector<AuditNode> merkle_audit_path(const std::vector<Bytes>& leaves, size_t index);
Bytes fold_audit_path(const Bytes& leaf, const std::vector<AuditNode>& path);
Bytes chain_head(const Bytes& prev_head, const Bytes& root);
Bytes genesis_head();

// Bytes covered by a registry stamp's signature.
Bytes registry_signing_bytes(std::string_view authority, const Date& date,
                             const Fingerprint& fp);

// --- Authority ------------------------------------------------------------

// Single-writer state machine: issues registry stamps, accumulates
// fingerprints into rounds, and closes rounds by publishing a chained head.
class TimestampAuthority {
public:
    struct HeadRecord {
        uint64_t round = 0;
        Bytes head;
        std::string publication_note;
    };

    struct PendingReceipt {
        uint64_t round = 0;
        uint64_t leaf_index = 0;
    };

    struct RoundResult {
        Bytes head;
        std::vector<LinkedStamp> receipts;
    };

    static TimestampAuthority create(std::string id);  // fresh random keypair
    static TimestampAuthority create_with_seed(std::string id,
                                               std::span<const uint8_t> seed32);

    const std::string& id() const { return id_; }
    const Bytes& verify_key() const { return sign_public_; }
    const std::vector<HeadRecord>& published_heads() const { return heads_; }
    uint64_t open_round() const { return heads_.size(); }
    size_t pending_count() const { return pending_.size(); }
    const std::vector<Fingerprint>& pending() const { return pending_; }

    RegistryStamp stamp_registry(const Fingerprint& fp, const Date& date,
                                 std::string external_id);

    PendingReceipt round_append(const Fingerprint& fp);
    RoundResult round_close(std::string publication_note = "");  // throws EmptyRound

    // Append-only head publication file: one line "round <n> <hex head>".
    std::string heads_file() const;

    canonical::Value to_value() const;  // includes the secret key
    static TimestampAuthority from_value(const canonical::Value& v);

private:
    TimestampAuthority() = default;

    std::string id_;
    Bytes sign_secret_;
    Bytes sign_public_;
    std::vector<HeadRecord> heads_;
    std::vector<Fingerprint> pending_;
};

// --- Verification -----------------------------------------------------------

struct AnchorEntry {
    std::optional<Bytes> verify_key;
    std::vector<std::pair<uint64_t, Bytes>> heads;  // sorted by round

    const Bytes* head_for(uint64_t round) const;
};

class TrustAnchors {
public:
    void set_verify_key(const std::string& authority, Bytes key);
    void add_head(const std::string& authority, uint64_t round, Bytes head);
    void load_heads_file(const std::string& authority, std::string_view text);

    const AnchorEntry* find(const std::string& authority) const;
    bool has(const std::string& authority) const { return find(authority) != nullptr; }

    canonical::Value to_value() const;
    static TrustAnchors from_value(const canonical::Value& v);

private:
    std::map<std::string, AnchorEntry> entries_;
};

enum class Verdict { valid, invalid, unknown_authority };

const char* verdict_name(Verdict v);

// Registry stamps verify the signature under the anchored key. Linked
// stamps fold the audit path from the fingerprint digest and compare with
// the anchored head for that round, then check chain consistency with the
// anchored previous head. unknown_authority also covers an anchored
// authority whose relevant round head is not in the anchor set.
Verdict verify(const CoERef& coe, const Fingerprint& fp, const TrustAnchors& anchors);

}  // namespace pubfab::coe
