// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry point binding all components: stamping, publishing,
// reviewing, round orchestration, escrow, queries, the store service and
// the scenario simulator. Exit codes: 0 success, 1 domain error (one
// diagnostic line on stderr), 2 usage error. Dates are always explicit
// flags; nothing here reads the system clock except the serve loop.

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "pubfab/coe.hpp"
#include "pubfab/escrow.hpp"
#include "pubfab/feed.hpp"
#include "pubfab/fingerprint.hpp"
#include "pubfab/model.hpp"
#include "pubfab/query.hpp"
#include "pubfab/review_round.hpp"
#include "pubfab/service.hpp"
#include "pubfab/sim.hpp"
#include "pubfab/store.hpp"

namespace fs = std::filesystem;
using namespace pubfab;

namespace {

// --- file helpers -------------------------------------------------------------

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("FileError", "cannot read " + path);
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const uint8_t> data) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("FileError", "cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

void write_stdout(std::span<const uint8_t> data) {
    std::cout.write(reinterpret_cast<const char*>(data.data()),
                    static_cast<std::streamsize>(data.size()));
    std::cout << "\n";
}

Date parse_date_flag(const std::string& text) {
    auto d = Date::parse(text);
    if (!d) throw DomainError("BadDate", "dates are written YYYY-MM-DD: " + text);
    return *d;
}

// --- JSON bridge ----------------------------------------------------------------

// Human-authored inputs are JSON with the same field structure as the
// canonical encoding; floats must be integral and byte fields are not used
// on this path.
canonical::Value json_to_value(const nlohmann::json& j) {
    using canonical::Value;
    switch (j.type()) {
        case nlohmann::json::value_t::boolean:
            return Value::boolean(j.get<bool>());
        case nlohmann::json::value_t::number_integer:
            return Value::integer(j.get<int64_t>());
        case nlohmann::json::value_t::number_unsigned: {
            uint64_t u = j.get<uint64_t>();
            if (u > uint64_t(INT64_MAX)) throw UnencodableValue("integer out of range");
            return Value::integer(static_cast<int64_t>(u));
        }
        case nlohmann::json::value_t::number_float: {
            double d = j.get<double>();
            if (!std::isfinite(d)) throw UnencodableValue("non-finite number");
            auto i = static_cast<int64_t>(d);
            if (static_cast<double>(i) != d) throw UnencodableValue("non-integer number");
            return Value::integer(i);
        }
        case nlohmann::json::value_t::string:
            return Value::text(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            Value::List items;
            for (const auto& item : j) items.push_back(json_to_value(item));
            return Value::list(std::move(items));
        }
        case nlohmann::json::value_t::object: {
            std::vector<std::pair<std::string, Value>> entries;
            for (auto it = j.begin(); it != j.end(); ++it) {
                entries.emplace_back(it.key(), json_to_value(it.value()));
            }
            return Value::map(std::move(entries));
        }
        case nlohmann::json::value_t::null:
            throw UnencodableValue("null has no canonical form");
        default:
            throw UnencodableValue("unsupported JSON value");
    }
}

// Accepts either the canonical encoding or JSON with the same shape.
canonical::Value load_value(const std::string& path) {
    Bytes raw = read_file(path);
    try {
        return canonical::decode(raw);
    } catch (const MalformedEncoding&) {
    }
    auto j = nlohmann::json::parse(raw.begin(), raw.end(), nullptr, false);
    if (j.is_discarded()) {
        throw MalformedEncoding(path + " is neither canonical bytes nor JSON");
    }
    return json_to_value(j);
}

// --- data directory -----------------------------------------------------------

struct Paths {
    fs::path data;
    fs::path anchors_override;

    fs::path authority(const std::string& id) const {
        return data / "authority" / (id + ".pce");
    }
    fs::path anchors() const {
        return anchors_override.empty() ? data / "anchors.pce" : anchors_override;
    }
    fs::path stamps() const { return data / "stamps.pce"; }
    fs::path store_root() const { return data / "store"; }
    fs::path query(const std::string& id) const { return data / "queries" / (id + ".pce"); }
    fs::path escrow(const std::string& label) const {
        return data / "escrow" / (label + ".enc");
    }
};

canonical::Value load_or(const fs::path& path, canonical::Value fallback) {
    if (!fs::exists(path)) return fallback;
    return canonical::decode(read_file(path.string()));
}

void save_value(const fs::path& path, const canonical::Value& v) {
    write_file(path.string(), canonical::encode(v));
}

coe::TimestampAuthority load_or_create_authority(const Paths& paths, const std::string& id) {
    if (fs::exists(paths.authority(id))) {
        return coe::TimestampAuthority::from_value(
            canonical::decode(read_file(paths.authority(id).string())));
    }
    return coe::TimestampAuthority::create(id);
}

void save_authority(const Paths& paths, const coe::TimestampAuthority& authority) {
    save_value(paths.authority(authority.id()), authority.to_value());
    // A locally created authority is implicitly trusted by this data dir.
    coe::TrustAnchors anchors = coe::TrustAnchors::from_value(
        load_or(paths.anchors(), canonical::Value::map({})));
    anchors.set_verify_key(authority.id(), authority.verify_key());
    for (const auto& head : authority.published_heads()) {
        anchors.add_head(authority.id(), head.round, head.head);
    }
    save_value(paths.anchors(), anchors.to_value());
}

// Stamp book: fingerprint path form -> list of CoE texts, used to enrich
// handles printed by this CLI.
void record_stamp(const Paths& paths, const Fingerprint& fp, const std::string& coe_text) {
    using canonical::Value;
    Value book = load_or(paths.stamps(), Value::map({}));
    std::vector<std::pair<std::string, Value>> entries;
    bool merged = false;
    for (const auto& entry : book.as_map()) {
        if (entry.key == fp.path_form()) {
            Value::List list = entry.value.as_list();
            bool present = false;
            for (const auto& item : list) present = present || item.as_text() == coe_text;
            if (!present) list.push_back(Value::text(coe_text));
            entries.emplace_back(entry.key, Value::list(std::move(list)));
            merged = true;
        } else {
            entries.emplace_back(entry.key, entry.value);
        }
    }
    if (!merged) {
        entries.emplace_back(fp.path_form(), Value::list(Value::List{Value::text(coe_text)}));
    }
    save_value(paths.stamps(), Value::map(std::move(entries)));
}

std::vector<coe::CoERef> stamps_for(const Paths& paths, const Fingerprint& fp) {
    canonical::Value book = load_or(paths.stamps(), canonical::Value::map({}));
    std::vector<coe::CoERef> out;
    if (const auto* list = book.get(fp.path_form())) {
        for (const auto& item : list->as_list()) out.push_back(coe::parse_coe(item.as_text()));
    }
    return out;
}

store::StoreNode open_local_store(const Paths& paths, store::StoreMode mode,
                                  std::optional<std::string> owner_name = std::nullopt) {
    store::StoreConfig config;
    config.mode = mode;
    config.label = "local-store";
    // A stable node id derived from the data directory path.
    Bytes id_seed = to_bytes("node:" + fs::absolute(paths.data).string());
    config.node_id = store::node_id_from_bytes(fingerprint(id_seed).digest());
    if (owner_name) {
        model::Identity owner;
        owner.display_name = *owner_name;
        config.owner = owner;
    }
    return store::StoreNode(config,
                            std::make_shared<store::FsStorage>(paths.store_root().string()));
}

query::KnowledgeGraph local_graph(const Paths& paths) {
    auto node = open_local_store(paths, store::StoreMode::institutional);
    return service::graph_from_store(node);
}

void print_handle(const model::DocumentHandle& handle, const std::string& format) {
    if (format == "canonical") {
        write_stdout(canonical::encode(model::to_value(handle)));
        return;
    }
    std::cout << "title: " << handle.title.value_or("-") << "\n";
    std::string authors = "-";
    if (handle.authors) {
        authors.clear();
        for (const auto& a : *handle.authors) {
            if (!authors.empty()) authors += ", ";
            authors += a;
        }
    }
    std::cout << "authors: " << authors << "\n";
    std::cout << "fingerprint: " << handle.fingerprint.path_form() << "\n";
    std::string coes = "-";
    if (!handle.coes.empty()) {
        coes.clear();
        for (const auto& c : handle.coes) {
            if (!coes.empty()) coes += "; ";
            coes += coe::to_text(c);
        }
    }
    std::cout << "coes: " << coes << "\n";
}

std::string require_passphrase() {
    const char* pass = std::getenv("PUBFAB_ESCROW_PASSPHRASE");
    if (!pass || !*pass) {
        throw DomainError("EscrowSealed",
                          "set PUBFAB_ESCROW_PASSPHRASE to unlock the escrow file");
    }
    return pass;
}

model::Identity identity_from_spec(const std::string& spec) {
    // "Name" or "Name:affiliation"
    model::Identity id;
    size_t colon = spec.find(':');
    if (colon == std::string::npos) {
        id.display_name = spec;
    } else {
        id.display_name = spec.substr(0, colon);
        id.affiliation = spec.substr(colon + 1);
    }
    if (id.display_name.empty()) throw DomainError("BadIdentity", "empty display name");
    return id;
}

// Persistent CLI defaults; round-trips through its canonical file form.
struct CliConfig {
    std::string data_dir = "pubfab-data";
    std::string default_authority = "local";
    std::string anchors_file;  // relative to the data dir when empty
    std::string format = "text";

    canonical::Value to_value() const {
        using canonical::Value;
        return Value::map({
            {"data_dir", Value::text(data_dir)},
            {"default_authority", Value::text(default_authority)},
            {"anchors_file", Value::text(anchors_file)},
            {"format", Value::text(format)},
        });
    }

    static CliConfig from_value(const canonical::Value& v) {
        CliConfig c;
        c.data_dir = v.at("data_dir").as_text();
        c.default_authority = v.at("default_authority").as_text();
        c.anchors_file = v.at("anchors_file").as_text();
        c.format = v.at("format").as_text();
        return c;
    }
};

// Resolution order: --config flag, PUBFAB_CONFIG, <data>/config.pce. The
// data directory (and a default config file) are created on first use.
CliConfig load_config(const std::string& explicit_path, const std::string& data_dir) {
    fs::path path;
    if (!explicit_path.empty()) {
        path = explicit_path;
    } else if (const char* env = std::getenv("PUBFAB_CONFIG")) {
        path = env;
    } else {
        path = fs::path(data_dir) / "config.pce";
    }
    if (fs::exists(path)) {
        return CliConfig::from_value(canonical::decode(read_file(path.string())));
    }
    CliConfig config;
    config.data_dir = data_dir;
    if (explicit_path.empty() && std::getenv("PUBFAB_CONFIG") == nullptr) {
        fs::create_directories(data_dir);
        write_file(path.string(), canonical::encode(config.to_value()));
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"content-addressed scholarly publication fabric"};
    app.require_subcommand(1);

    std::string data_dir = "pubfab-data";
    std::string format;
    std::string config_path;
    app.add_option("--data", data_dir, "data directory")->envname("PUBFAB_DATA");
    app.add_option("--config", config_path, "config file (canonical encoding)")
        ->envname("PUBFAB_CONFIG");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "canonical", "feed"}));

    // --- handle ---------------------------------------------------------------
    auto* cmd_handle = app.add_subcommand("handle", "print a file's document handle");
    std::string handle_file;
    std::string handle_title;
    std::vector<std::string> handle_authors;
    cmd_handle->add_option("file", handle_file)->required();
    cmd_handle->add_option("--title", handle_title);
    cmd_handle->add_option("--author", handle_authors);

    // --- stamp ----------------------------------------------------------------
    auto* cmd_stamp = app.add_subcommand("stamp", "obtain a registry stamp on a file");
    std::string stamp_file, stamp_date, stamp_authority = "local", stamp_external;
    cmd_stamp->add_option("file", stamp_file)->required();
    cmd_stamp->add_option("--date", stamp_date, "stamp date YYYY-MM-DD")->required();
    cmd_stamp->add_option("--authority", stamp_authority);
    cmd_stamp->add_option("--external-id", stamp_external);

    // --- round-append / round-close --------------------------------------------
    auto* cmd_rappend =
        app.add_subcommand("round-append", "add a fingerprint to the open round");
    std::string rappend_fp, rappend_authority = "local";
    cmd_rappend->add_option("fingerprint", rappend_fp)->required();
    cmd_rappend->add_option("--authority", rappend_authority);

    auto* cmd_rclose = app.add_subcommand("round-close", "close the open timestamp round");
    std::string rclose_authority = "local", rclose_note;
    cmd_rclose->add_option("--authority", rclose_authority);
    cmd_rclose->add_option("--note", rclose_note, "publication note");

    // --- verify-coe --------------------------------------------------------------
    auto* cmd_verify = app.add_subcommand("verify-coe", "verify a certificate of existence");
    std::string verify_coe_text, verify_fp;
    cmd_verify->add_option("coe", verify_coe_text)->required();
    cmd_verify->add_option("fingerprint", verify_fp)->required();

    // --- publish -----------------------------------------------------------------
    auto* cmd_publish = app.add_subcommand("publish", "submit a file to the local data store");
    std::string pub_file, pub_title, pub_submitter = "anonymous";
    std::string pub_media = "application/octet-stream";
    std::vector<std::string> pub_authors;
    cmd_publish->add_option("file", pub_file)->required();
    cmd_publish->add_option("--title", pub_title);
    cmd_publish->add_option("--author", pub_authors);
    cmd_publish->add_option("--submitter", pub_submitter);
    cmd_publish->add_option("--media-type", pub_media);

    // --- review -------------------------------------------------------------------
    auto* cmd_review = app.add_subcommand("review", "author and validate review objects");
    cmd_review->require_subcommand(1);
    auto* cmd_review_new = cmd_review->add_subcommand("new", "build a review from JSON");
    std::string review_in, review_out;
    cmd_review_new->add_option("input", review_in)->required();
    cmd_review_new->add_option("--out", review_out);
    auto* cmd_review_validate = cmd_review->add_subcommand("validate", "list violations");
    std::string review_validate_in;
    cmd_review_validate->add_option("input", review_validate_in)->required();
    auto* cmd_review_seal =
        cmd_review->add_subcommand("seal", "print the review's own handle");
    std::string review_seal_in, review_seal_out;
    cmd_review_seal->add_option("input", review_seal_in)->required();
    cmd_review_seal->add_option("--out", review_seal_out, "write publishable bytes here");

    // --- round ----------------------------------------------------------------------
    auto* cmd_round = app.add_subcommand("round", "orchestrate a review round");
    cmd_round->require_subcommand(1);
    auto* cmd_round_start = cmd_round->add_subcommand("start", "open a round");
    std::string rs_spec, rs_state, rs_mode = "blind";
    std::vector<std::string> rs_works, rs_anons, rs_coes, rs_titles;
    cmd_round_start->add_option("--spec", rs_spec, "process spec (JSON or canonical)")
        ->required();
    cmd_round_start->add_option("--state", rs_state, "round state file")->required();
    cmd_round_start->add_option("--mode", rs_mode)
        ->check(CLI::IsMember({"blind", "double_blind"}));
    cmd_round_start->add_option("--work", rs_works, "non-anonymized work file")->required();
    cmd_round_start->add_option("--anon", rs_anons, "anonymized variant file");
    cmd_round_start->add_option("--coe", rs_coes, "CoE text for the work")->required();
    cmd_round_start->add_option("--title", rs_titles);

    auto* cmd_round_submit = cmd_round->add_subcommand("submit", "submit a review");
    std::string rsub_state, rsub_review, rsub_date;
    cmd_round_submit->add_option("--state", rsub_state)->required();
    cmd_round_submit->add_option("--review", rsub_review)->required();
    cmd_round_submit->add_option("--date", rsub_date)->required();

    auto* cmd_round_release = cmd_round->add_subcommand("release", "release the round");
    std::string rrel_state, rrel_date, rrel_outdir;
    cmd_round_release->add_option("--state", rrel_state)->required();
    cmd_round_release->add_option("--date", rrel_date)->required();
    cmd_round_release->add_option("--out-dir", rrel_outdir);

    // --- escrow -------------------------------------------------------------------
    auto* cmd_escrow = app.add_subcommand("escrow", "identity escrow board operations");
    cmd_escrow->require_subcommand(1);
    std::string es_label = "board";
    cmd_escrow->add_option("--label", es_label, "escrow board label");

    auto* cmd_es_create = cmd_escrow->add_subcommand("create", "create an escrow service");
    std::vector<std::string> es_members;
    uint64_t es_seed = 0;
    cmd_es_create->add_option("--member", es_members, "board member Name[:affiliation]")
        ->required();
    cmd_es_create->add_option("--seed", es_seed, "pseudonym assignment seed");

    auto* cmd_es_register = cmd_escrow->add_subcommand("register", "issue a pseudonym");
    std::string es_reg_name, es_reg_affiliation;
    cmd_es_register->add_option("--name", es_reg_name)->required();
    cmd_es_register->add_option("--affiliation", es_reg_affiliation);

    auto* cmd_es_petition = cmd_escrow->add_subcommand("petition", "open an investigation");
    std::vector<std::string> es_pet_names, es_pet_reviews;
    std::string es_pet_date;
    size_t es_pet_min = escrow::kDefaultMinPetitioners;
    cmd_es_petition->add_option("--petitioner", es_pet_names)->required();
    cmd_es_petition->add_option("--review", es_pet_reviews, "review fingerprint")->required();
    cmd_es_petition->add_option("--date", es_pet_date)->required();
    cmd_es_petition->add_option("--min", es_pet_min);

    auto* cmd_es_resolve = cmd_escrow->add_subcommand("resolve", "answer an investigation");
    uint64_t es_res_id = 0;
    std::string es_res_action;
    cmd_es_resolve->add_option("--id", es_res_id)->required();
    cmd_es_resolve->add_option("--action", es_res_action)
        ->required()
        ->check(CLI::IsMember({"retraction", "clarification"}));

    auto* cmd_es_expire =
        cmd_escrow->add_subcommand("expire", "expire an unanswered petition");
    uint64_t es_exp_id = 0;
    std::string es_exp_date;
    cmd_es_expire->add_option("--id", es_exp_id)->required();
    cmd_es_expire->add_option("--date", es_exp_date)->required();

    auto* cmd_es_log = cmd_escrow->add_subcommand("log", "print the public investigation log");

    // --- query --------------------------------------------------------------------
    auto* cmd_query = app.add_subcommand("query", "saved queries over the local store");
    cmd_query->require_subcommand(1);
    auto* cmd_q_define = cmd_query->add_subcommand("define", "save a query definition");
    std::string q_def_file, q_def_id;
    cmd_q_define->add_option("input", q_def_file)->required();
    cmd_q_define->add_option("--id", q_def_id, "override the id in the file");
    auto* cmd_q_run = cmd_query->add_subcommand("run", "execute a saved query");
    std::string q_run_id;
    size_t q_run_limit = 50;
    bool q_run_as_owner = false;
    cmd_q_run->add_option("id", q_run_id)->required();
    cmd_q_run->add_option("--limit", q_run_limit);
    cmd_q_run->add_flag("--as-owner", q_run_as_owner);
    auto* cmd_q_feed = cmd_query->add_subcommand("feed", "emit the Atom feed");
    std::string q_feed_id;
    size_t q_feed_limit = 20;
    cmd_q_feed->add_option("id", q_feed_id)->required();
    cmd_q_feed->add_option("--limit", q_feed_limit);

    // --- store serve ------------------------------------------------------------------
    auto* cmd_store = app.add_subcommand("store", "data-store node");
    cmd_store->require_subcommand(1);
    auto* cmd_serve = cmd_store->add_subcommand("serve", "serve the local store over HTTP");
    std::string serve_mode = "institutional", serve_owner, serve_host = "127.0.0.1";
    std::string serve_authority = "local";
    int serve_port = 8470;
    int serve_round_interval = 60;
    bool serve_once = false;
    cmd_serve->add_option("--mode", serve_mode)
        ->check(CLI::IsMember({"institutional", "p2p"}));
    cmd_serve->add_option("--owner", serve_owner, "owner name (required for p2p)");
    cmd_serve->add_option("--host", serve_host);
    cmd_serve->add_option("--port", serve_port);
    cmd_serve->add_option("--authority", serve_authority,
                          "authority whose open round is closed on the interval");
    cmd_serve->add_option("--round-interval", serve_round_interval,
                          "seconds between automatic round closes (0 disables)");
    cmd_serve->add_flag("--check", serve_once, "bind, print the port, and exit");

    // --- simulate ----------------------------------------------------------------------
    auto* cmd_sim = app.add_subcommand("simulate", "run a deterministic scenario");
    std::string sim_scenario;
    uint64_t sim_seed = 0;
    int64_t sim_rounds = -1, sim_nodes = -1, sim_pairs = -1;
    std::string sim_drop;
    std::string sim_params_file;
    cmd_sim->add_option("scenario", sim_scenario)->required();
    cmd_sim->add_option("--seed", sim_seed)->required();
    cmd_sim->add_option("--rounds", sim_rounds);
    cmd_sim->add_option("--nodes", sim_nodes);
    cmd_sim->add_option("--pairs", sim_pairs);
    cmd_sim->add_option("--drop", sim_drop, "drop probability as a rational, e.g. 1/10");
    cmd_sim->add_option("--params", sim_params_file,
                        "scenario params file (canonical encoding); flags override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CliConfig config = load_config(config_path, data_dir);
        if (app.count("--data") == 0 && config_path.empty() &&
            std::getenv("PUBFAB_DATA") == nullptr) {
            data_dir = config.data_dir;
        }
        if (format.empty()) format = config.format;
        if (stamp_authority == "local") stamp_authority = config.default_authority;
        if (rappend_authority == "local") rappend_authority = config.default_authority;
        if (rclose_authority == "local") rclose_authority = config.default_authority;

        Paths paths{fs::path(data_dir),
                    config.anchors_file.empty() ? fs::path() : fs::path(config.anchors_file)};
        fs::create_directories(paths.data);

        if (*cmd_handle) {
            Bytes bytes = read_file(handle_file);
            model::Blob blob{bytes, "application/octet-stream"};
            Fingerprint fp = model::object_fingerprint(blob);
            auto handle = model::make_handle(
                blob, handle_title.empty() ? std::nullopt : std::optional(handle_title),
                handle_authors.empty() ? std::nullopt : std::optional(handle_authors),
                stamps_for(paths, fp));
            print_handle(handle, format);
        } else if (*cmd_stamp) {
            auto authority = load_or_create_authority(paths, stamp_authority);
            Fingerprint fp = fingerprint(read_file(stamp_file));
            std::string external =
                stamp_external.empty() ? fp.path_form().substr(7, 12) : stamp_external;
            coe::RegistryStamp stamp =
                authority.stamp_registry(fp, parse_date_flag(stamp_date), external);
            save_authority(paths, authority);
            record_stamp(paths, fp, coe::to_text(stamp));
            // The full stamp (with signature) is kept beside the short form.
            save_value(paths.data / "stamps" / (external + ".pce"), coe::to_value(stamp));
            std::cout << coe::to_text(stamp) << "\n";
        } else if (*cmd_rappend) {
            auto authority = load_or_create_authority(paths, rappend_authority);
            auto receipt = authority.round_append(Fingerprint::parse(rappend_fp));
            save_authority(paths, authority);
            std::cout << "round " << receipt.round << " leaf " << receipt.leaf_index << "\n";
        } else if (*cmd_rclose) {
            auto authority = load_or_create_authority(paths, rclose_authority);
            std::vector<Fingerprint> fps = authority.pending();
            auto result = authority.round_close(rclose_note);
            save_authority(paths, authority);
            uint64_t round = authority.published_heads().back().round;
            std::cout << "round " << round << " head " << hex_encode(result.head) << "\n";
            for (size_t i = 0; i < result.receipts.size(); ++i) {
                std::string text = coe::to_text(result.receipts[i]);
                record_stamp(paths, fps[i], text);
                std::cout << fps[i].path_form() << "\t" << text << "\n";
            }
        } else if (*cmd_verify) {
            coe::TrustAnchors anchors = coe::TrustAnchors::from_value(
                load_or(paths.anchors(), canonical::Value::map({})));
            coe::CoERef ref = coe::parse_coe(verify_coe_text);
            // Prefer the signed stamp file when the short registry form is given.
            if (const auto* reg = std::get_if<coe::RegistryStamp>(&ref)) {
                fs::path full = paths.data / "stamps" / (reg->external_id + ".pce");
                if (reg->signature.empty() && fs::exists(full)) {
                    ref = coe::coe_from_value(canonical::decode(read_file(full.string())));
                }
            }
            coe::Verdict verdict = coe::verify(ref, Fingerprint::parse(verify_fp), anchors);
            if (verdict == coe::Verdict::valid) {
                std::cout << "valid\n";
            } else {
                std::cerr << coe::verdict_name(verdict) << "\n";
                return 1;
            }
        } else if (*cmd_publish) {
            Bytes bytes = read_file(pub_file);
            auto node = open_local_store(paths, store::StoreMode::institutional);
            model::Identity submitter;
            submitter.display_name = pub_submitter;
            auto handle =
                node.submit(model::Blob{bytes, pub_media}, submitter,
                            pub_title.empty() ? std::nullopt : std::optional(pub_title),
                            pub_authors.empty() ? std::nullopt : std::optional(pub_authors));
            print_handle(handle, format);
        } else if (*cmd_review_new) {
            model::ReviewObject review = model::review_from_value(load_value(review_in));
            auto violations = model::validate_review(review);
            if (!violations.empty()) {
                for (const auto& v : violations) {
                    std::cerr << v.rule << " (" << v.field << "): " << v.detail << "\n";
                }
                return 1;
            }
            Bytes bytes = canonical::encode(model::to_value(review));
            if (review_out.empty()) {
                write_stdout(bytes);
            } else {
                write_file(review_out, bytes);
                std::cout << "wrote " << review_out << "\n";
            }
        } else if (*cmd_review_validate) {
            model::ReviewObject review =
                model::review_from_value(load_value(review_validate_in));
            auto violations = model::validate_review(review);
            for (const auto& v : violations) {
                std::cout << v.rule << " (" << v.field << "): " << v.detail << "\n";
            }
            if (!violations.empty()) return 1;
            std::cout << "ok\n";
        } else if (*cmd_review_seal) {
            model::ReviewObject review = model::review_from_value(load_value(review_seal_in));
            auto [object, handle] = model::review_as_object(review);
            if (!review_seal_out.empty()) {
                write_file(review_seal_out, model::object_canonical_bytes(object));
            }
            print_handle(handle, format);
        } else if (*cmd_round_start) {
            if (!rs_anons.empty() && rs_anons.size() != rs_works.size()) {
                throw DomainError("BadArguments", "--anon must repeat once per --work");
            }
            if (rs_coes.size() != rs_works.size()) {
                throw DomainError("BadArguments", "--coe must repeat once per --work");
            }
            std::vector<review::WorkSubmission> works;
            for (size_t i = 0; i < rs_works.size(); ++i) {
                review::WorkSubmission sub;
                Bytes bytes = read_file(rs_works[i]);
                sub.private_object = model::Blob{bytes, "application/octet-stream"};
                sub.nonanon_fingerprint = fingerprint(bytes);
                sub.nonanon_coe = coe::parse_coe(rs_coes[i]);
                if (i < rs_anons.size()) {
                    sub.anonymized_object =
                        model::Blob{read_file(rs_anons[i]), "application/octet-stream"};
                }
                if (i < rs_titles.size()) sub.title = rs_titles[i];
                works.push_back(std::move(sub));
            }
            auto round = review::ReviewRound::start(
                model::process_from_value(load_value(rs_spec)), std::move(works),
                rs_mode == "double_blind" ? review::Mode::double_blind : review::Mode::blind);
            write_file(rs_state, canonical::encode(round.to_value()));
            std::cout << "round started: " << review::phase_name(round.phase()) << ", "
                      << round.reviewer_packets().size() << " reviewer packet(s)\n";
        } else if (*cmd_round_submit) {
            auto round =
                review::ReviewRound::from_value(canonical::decode(read_file(rsub_state)));
            model::ReviewObject review = model::review_from_value(load_value(rsub_review));
            auto receipt = round.submit(review, parse_date_flag(rsub_date));
            write_file(rsub_state, canonical::encode(round.to_value()));
            std::cout << "accepted review " << receipt.review_fp.path_form() << "\n";
        } else if (*cmd_round_release) {
            auto round =
                review::ReviewRound::from_value(canonical::decode(read_file(rrel_state)));
            auto output = round.release(parse_date_flag(rrel_date));
            write_file(rrel_state, canonical::encode(round.to_value()));
            for (const auto& [object, handle] : output.published) {
                if (!rrel_outdir.empty()) {
                    Bytes bytes = model::object_canonical_bytes(object);
                    write_file((fs::path(rrel_outdir) /
                                (hex_encode(handle.fingerprint.digest()) + ".bin"))
                                   .string(),
                               bytes);
                }
                std::cout << "published " << handle.fingerprint.path_form();
                if (handle.title) std::cout << "  " << *handle.title;
                std::cout << "\n";
            }
            for (const auto& handle : output.withheld) {
                std::cout << "withheld " << handle.fingerprint.path_form() << "\n";
            }
        } else if (*cmd_es_create) {
            std::vector<model::Identity> board;
            for (const auto& m : es_members) board.push_back(identity_from_spec(m));
            escrow::EscrowService service(es_label, board, es_seed);
            write_file(paths.escrow(es_label).string(), service.seal(require_passphrase()));
            std::cout << "escrow '" << es_label << "' created, board key "
                      << service.board_key() << "\n";
        } else if (*cmd_es_register || *cmd_es_petition || *cmd_es_resolve ||
                   *cmd_es_expire || *cmd_es_log) {
            std::string pass = require_passphrase();
            auto service =
                escrow::EscrowService::unseal(read_file(paths.escrow(es_label).string()), pass);
            if (*cmd_es_register) {
                model::Identity id;
                id.display_name = es_reg_name;
                if (!es_reg_affiliation.empty()) id.affiliation = es_reg_affiliation;
                std::cout << service.register_identity(id) << "\n";
            } else if (*cmd_es_petition) {
                std::vector<model::Identity> petitioners;
                for (const auto& p : es_pet_names) {
                    petitioners.push_back(identity_from_spec(p));
                }
                std::vector<model::DocumentHandle> reviews;
                for (const auto& r : es_pet_reviews) {
                    model::DocumentHandle h;
                    h.fingerprint = Fingerprint::parse(r);
                    reviews.push_back(h);
                }
                const auto& inv = service.open_investigation(
                    petitioners, reviews, parse_date_flag(es_pet_date), es_pet_min);
                std::cout << "investigation " << inv.id << " open, deadline "
                          << inv.deadline.to_string() << "\n";
            } else if (*cmd_es_resolve) {
                auto templates = service.resolve_investigation(
                    es_res_id, es_res_action == "retraction"
                                   ? escrow::ResolutionAction::retraction
                                   : escrow::ResolutionAction::clarification);
                for (const auto& t : templates) {
                    write_stdout(canonical::encode(model::to_value(t)));
                }
                std::cout << "investigation " << es_res_id << " resolved (" << es_res_action
                          << ")\n";
            } else if (*cmd_es_expire) {
                service.expire_investigation(es_exp_id, parse_date_flag(es_exp_date));
                std::cout << "escrow_nonresponsive\n";
            } else {
                write_stdout(canonical::encode(service.public_log()));
            }
            write_file(paths.escrow(es_label).string(), service.seal(pass));
        } else if (*cmd_q_define) {
            query::SavedQuery q = query::SavedQuery::from_value(load_value(q_def_file));
            if (!q_def_id.empty()) q.id = q_def_id;
            save_value(paths.query(q.id), q.to_value());
            std::cout << "saved query '" << q.id << "'\n";
        } else if (*cmd_q_run) {
            query::SavedQuery q = query::SavedQuery::from_value(
                canonical::decode(read_file(paths.query(q_run_id).string())));
            auto graph = local_graph(paths);
            auto results = query::execute(graph, q, q_run_as_owner);
            if (results.size() > q_run_limit) results.resize(q_run_limit);
            if (format == "canonical") {
                write_stdout(query::results_canonical(graph, q, q_run_limit));
            } else {
                size_t rank = 1;
                for (const auto& r : results) {
                    std::cout << rank++ << ". "
                              << (r.score ? rational_to_string(*r.score) : "unscored") << "  "
                              << r.handle.fingerprint.path_form();
                    if (r.handle.title) std::cout << "  " << *r.handle.title;
                    if (r.expansion) std::cout << "  [posthoc-expansion]";
                    std::cout << "\n";
                    for (const auto& n : r.notes) std::cout << "   - " << n << "\n";
                }
            }
        } else if (*cmd_q_feed) {
            query::SavedQuery q = query::SavedQuery::from_value(
                canonical::decode(read_file(paths.query(q_feed_id).string())));
            auto graph = local_graph(paths);
            std::cout << query::feed(graph, q, q_feed_limit);
        } else if (*cmd_serve) {
            auto node = open_local_store(
                paths,
                serve_mode == "p2p" ? store::StoreMode::p2p : store::StoreMode::institutional,
                serve_owner.empty() ? std::nullopt : std::optional(serve_owner));
            std::map<std::string, query::SavedQuery> queries;
            if (fs::exists(paths.data / "queries")) {
                for (const auto& entry : fs::directory_iterator(paths.data / "queries")) {
                    if (entry.path().extension() != ".pce") continue;
                    auto q = query::SavedQuery::from_value(
                        canonical::decode(read_file(entry.path().string())));
                    queries.emplace(q.id, std::move(q));
                }
            }
            service::HttpService svc(node, std::move(queries));
            int port = svc.start(serve_host, serve_port);
            std::cout << "listening on " << serve_host << ":" << port << std::endl;
            if (serve_once) return 0;
            static std::atomic<bool> stop{false};
            std::signal(SIGINT, [](int) { stop = true; });
            std::signal(SIGTERM, [](int) { stop = true; });

            // Service mode is the one place real time drives anything: the
            // open timestamp round closes on a fixed interval when it has
            // pending fingerprints.
            std::thread roller;
            if (serve_round_interval > 0) {
                roller = std::thread([&paths, &serve_authority, serve_round_interval] {
                    int elapsed_ms = 0;
                    while (!stop) {
                        std::this_thread::sleep_for(std::chrono::milliseconds(100));
                        elapsed_ms += 100;
                        if (elapsed_ms < serve_round_interval * 1000) continue;
                        elapsed_ms = 0;
                        try {
                            auto authority =
                                load_or_create_authority(paths, serve_authority);
                            if (authority.pending_count() > 0) {
                                std::vector<Fingerprint> fps = authority.pending();
                                auto result = authority.round_close("interval close");
                                save_authority(paths, authority);
                                for (size_t i = 0; i < result.receipts.size(); ++i) {
                                    record_stamp(paths, fps[i],
                                                 coe::to_text(result.receipts[i]));
                                }
                                std::cout << "closed round "
                                          << authority.published_heads().back().round
                                          << " head " << hex_encode(result.head)
                                          << std::endl;
                            }
                        } catch (const DomainError& e) {
                            std::cerr << e.what() << std::endl;
                        }
                    }
                });
            }
            while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            if (roller.joinable()) roller.join();
        } else if (*cmd_sim) {
            std::vector<std::pair<std::string, canonical::Value>> params;
            if (!sim_params_file.empty()) {
                for (const auto& entry :
                     canonical::decode(read_file(sim_params_file)).as_map()) {
                    params.emplace_back(entry.key, entry.value);
                }
            }
            auto override_param = [&](const std::string& key, canonical::Value v) {
                for (auto& [k, existing] : params) {
                    if (k == key) {
                        existing = std::move(v);
                        return;
                    }
                }
                params.emplace_back(key, std::move(v));
            };
            if (sim_rounds >= 0) override_param("rounds", canonical::Value::integer(sim_rounds));
            if (sim_nodes >= 0) override_param("nodes", canonical::Value::integer(sim_nodes));
            if (sim_pairs >= 0) override_param("pairs", canonical::Value::integer(sim_pairs));
            if (!sim_drop.empty()) override_param("drop", canonical::Value::text(sim_drop));
            auto result = sim::run_scenario(sim_scenario, sim_seed,
                                            canonical::Value::map(std::move(params)));
            std::cout << result.log;
            Bytes measurements = canonical::encode(result.measurements);
            std::cout << "measurements\t";
            std::cout.write(reinterpret_cast<const char*>(measurements.data()),
                            static_cast<std::streamsize>(measurements.size()));
            std::cout << "\n";
            std::cout << "verdict\t" << (result.verdict ? "pass" : "fail") << "\t"
                      << result.detail << "\n";
            if (!result.verdict) return 1;
        }
        return 0;
    } catch (const DomainError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
