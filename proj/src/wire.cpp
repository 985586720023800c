// Copyright 2026
// SPDX-License-Identifier: Apache-2.0

#include "pubfab/wire.hpp"

namespace pubfab::wire {

using canonical::Value;

namespace {

constexpr std::pair<Request::Op, std::string_view> kOps[] = {
    {Request::Op::get_object, "get_object"},
    {Request::Op::get_metadata, "get_metadata"},
    {Request::Op::put_object, "put_object"},
    {Request::Op::find_node, "find_node"},
    {Request::Op::find_value, "find_value"},
    {Request::Op::store_provider, "store_provider"},
};

constexpr std::pair<Response::Status, std::string_view> kStatuses[] = {
    {Response::Status::found, "found"},
    {Response::Status::metadata, "metadata"},
    {Response::Status::absent, "absent"},
    {Response::Status::nodes, "nodes"},
    {Response::Status::providers, "providers"},
    {Response::Status::stored, "stored"},
    {Response::Status::error, "error"},
};

template <typename E, size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E v) {
    for (const auto& [e, n] : table) {
        if (e == v) return n;
    }
    throw MalformedEncoding("unknown enum");
}

template <typename E, size_t N>
E value_of(const std::pair<E, std::string_view> (&table)[N], const std::string& name) {
    for (const auto& [e, n] : table) {
        if (n == name) return e;
    }
    throw MalformedEncoding("unknown name: " + name);
}

Value ids_to_value(const std::vector<Bytes>& ids) {
    Value::List out;
    for (const auto& id : ids) out.push_back(Value::bytes(id));
    return Value::list(std::move(out));
}

std::vector<Bytes> ids_from_value(const Value& v) {
    std::vector<Bytes> out;
    for (const auto& id : v.as_list()) out.push_back(id.as_bytes());
    return out;
}

Value noderefs_to_value(const std::vector<NodeRef>& refs) {
    Value::List out;
    for (const auto& r : refs) {
        out.push_back(Value::map({
            {"id", Value::bytes(r.id)},
            {"label", Value::text(r.label)},
        }));
    }
    return Value::list(std::move(out));
}

std::vector<NodeRef> noderefs_from_value(const Value& v) {
    std::vector<NodeRef> out;
    for (const auto& r : v.as_list()) {
        out.push_back(NodeRef{r.at("id").as_bytes(), r.at("label").as_text()});
    }
    return out;
}

}  // namespace

Value Request::to_value() const {
    std::vector<std::pair<std::string, Value>> fields;
    fields.emplace_back("op", Value::text(name_of(kOps, op)));
    if (fp) fields.emplace_back("fp", Value::text(fp->path_form()));
    if (ttl != 0) fields.emplace_back("ttl", Value::integer(ttl));
    if (!visited.empty()) fields.emplace_back("visited", ids_to_value(visited));
    if (object_bytes) fields.emplace_back("bytes", Value::bytes(*object_bytes));
    if (!media_type.empty()) fields.emplace_back("media_type", Value::text(media_type));
    if (submitter) fields.emplace_back("submitter", model::to_value(*submitter));
    if (title) fields.emplace_back("title", Value::text(*title));
    if (authors) {
        Value::List list;
        for (const auto& a : *authors) list.push_back(Value::text(a));
        fields.emplace_back("authors", Value::list(std::move(list)));
    }
    if (target_id) fields.emplace_back("target", Value::bytes(*target_id));
    if (provider_id) fields.emplace_back("provider", Value::bytes(*provider_id));
    if (!provider_label.empty()) {
        fields.emplace_back("provider_label", Value::text(provider_label));
    }
    return Value::map(std::move(fields));
}

Request Request::from_value(const Value& v) {
    Request r;
    r.op = value_of(kOps, v.at("op").as_text());
    if (const auto* fp = v.get("fp")) r.fp = Fingerprint::parse(fp->as_text());
    if (const auto* ttl = v.get("ttl")) r.ttl = static_cast<int>(ttl->as_int());
    if (const auto* visited = v.get("visited")) r.visited = ids_from_value(*visited);
    if (const auto* bytes = v.get("bytes")) r.object_bytes = bytes->as_bytes();
    if (const auto* mt = v.get("media_type")) r.media_type = mt->as_text();
    if (const auto* s = v.get("submitter")) r.submitter = model::identity_from_value(*s);
    if (const auto* t = v.get("title")) r.title = t->as_text();
    if (const auto* authors = v.get("authors")) {
        std::vector<std::string> list;
        for (const auto& a : authors->as_list()) list.push_back(a.as_text());
        r.authors = std::move(list);
    }
    if (const auto* t = v.get("target")) r.target_id = t->as_bytes();
    if (const auto* p = v.get("provider")) r.provider_id = p->as_bytes();
    if (const auto* pl = v.get("provider_label")) r.provider_label = pl->as_text();
    return r;
}

Value Response::to_value() const {
    std::vector<std::pair<std::string, Value>> fields;
    fields.emplace_back("status", Value::text(name_of(kStatuses, status)));
    if (object_bytes) fields.emplace_back("bytes", Value::bytes(*object_bytes));
    if (!media_type.empty()) fields.emplace_back("media_type", Value::text(media_type));
    if (!provenance.empty()) {
        Value::List list;
        for (const auto& p : provenance) list.push_back(Value::text(p));
        fields.emplace_back("provenance", Value::list(std::move(list)));
    }
    if (metadata) fields.emplace_back("metadata", model::to_value(*metadata));
    if (definite) fields.emplace_back("definite", Value::boolean(true));
    if (!visited.empty()) fields.emplace_back("visited", ids_to_value(visited));
    if (!nodes.empty()) fields.emplace_back("nodes", noderefs_to_value(nodes));
    if (!providers.empty()) fields.emplace_back("providers", noderefs_to_value(providers));
    if (!error.empty()) fields.emplace_back("error", Value::text(error));
    return Value::map(std::move(fields));
}

Response Response::from_value(const Value& v) {
    Response r;
    r.status = value_of(kStatuses, v.at("status").as_text());
    if (const auto* b = v.get("bytes")) r.object_bytes = b->as_bytes();
    if (const auto* mt = v.get("media_type")) r.media_type = mt->as_text();
    if (const auto* p = v.get("provenance")) {
        for (const auto& e : p->as_list()) r.provenance.push_back(e.as_text());
    }
    if (const auto* m = v.get("metadata")) r.metadata = model::handle_from_value(*m);
    if (const auto* d = v.get("definite")) r.definite = d->as_bool();
    if (const auto* vis = v.get("visited")) r.visited = ids_from_value(*vis);
    if (const auto* n = v.get("nodes")) r.nodes = noderefs_from_value(*n);
    if (const auto* pr = v.get("providers")) r.providers = noderefs_from_value(*pr);
    if (const auto* e = v.get("error")) r.error = e->as_text();
    return r;
}

Bytes frame(const Value& payload) {
    Bytes body = canonical::encode(payload);
    if (body.size() > kMaxFrameSize) throw MalformedEncoding("frame too large");
    Bytes out;
    out.reserve(body.size() + 4);
    uint32_t n = static_cast<uint32_t>(body.size());
    out.push_back(static_cast<uint8_t>(n >> 24));
    out.push_back(static_cast<uint8_t>(n >> 16));
    out.push_back(static_cast<uint8_t>(n >> 8));
    out.push_back(static_cast<uint8_t>(n));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::optional<canonical::Value> unframe(std::span<const uint8_t> data, size_t& consumed) {
    consumed = 0;
    if (data.size() < 4) return std::nullopt;
    uint32_t n = (uint32_t(data[0]) << 24) | (uint32_t(data[1]) << 16) |
                 (uint32_t(data[2]) << 8) | data[3];
    if (n > kMaxFrameSize) throw MalformedEncoding("frame size exceeds limit");
    if (data.size() < 4 + size_t(n)) return std::nullopt;
    consumed = 4 + n;
    return canonical::decode(data.subspan(4, n));
}

}  // namespace pubfab::wire
