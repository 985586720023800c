// Acceptance suite: one criterion per section, one pass/fail line each.
//
//   acceptance <fixtures-dir>           run all criteria
//   acceptance <fixtures-dir> --write   regenerate the checked-in fixtures
//
// Exit code 0 only when every criterion passes.

#include <sodium.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "corpus_gen.hpp"
#include "fixtures_data.hpp"
#include "test_util.hpp"
#include "pubfab/coe.hpp"
#include "pubfab/escrow.hpp"
#include "pubfab/feed.hpp"
#include "pubfab/query.hpp"
#include "pubfab/review_round.hpp"
#include "pubfab/rng.hpp"
#include "pubfab/sim.hpp"
#include "pubfab/store.hpp"
#include "ranking_oracle.hpp"
#include "store_helpers.hpp"

using namespace pubfab;

namespace {

struct Criterion {
    std::string name;
    std::function<std::string()> run;  // empty string = pass, else failure detail
};

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const Bytes& data) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

// --- criterion 1: fixture fidelity -------------------------------------------

std::string criterion_fixtures(const std::filesystem::path& dir) {
    Bytes review_bytes = read_file(dir / "table1_review.pce");
    model::ReviewObject review = model::review_from_value(canonical::decode(review_bytes));

    if (canonical::encode(model::to_value(review)) != review_bytes) {
        return "review does not re-serialize byte-identically";
    }
    if (!model::validate_review(review).empty()) return "review has violations";
    if (review.grades.size() != 2 || review.grades[0].value != 2 ||
        review.grades[0].scale_max != 3 || review.grades[1].value != 4 ||
        review.grades[1].scale_max != 5) {
        return "grades are not 2/3 and 4/5";
    }
    if (review.process.start_date != Date{2014, 3, 14} ||
        review.process.end_date != Date{2014, 4, 14}) {
        return "process dates are not 2014-03-14 / 2014-04-14";
    }
    if (review.targets.size() != 1 ||
        review.targets[0].fingerprint.path_form() !=
            "sha256/e83b0a9861eec4906f52d269056925bd0692c77882ee54d0a62eb876cc61be69") {
        return "target fingerprint mismatch";
    }

    Bytes handle_bytes = read_file(dir / "qa_handle.pce");
    model::DocumentHandle handle = model::handle_from_value(canonical::decode(handle_bytes));
    if (canonical::encode(model::to_value(handle)) != handle_bytes) {
        return "handle does not re-serialize byte-identically";
    }
    if (handle.title != "Aca 2.0 Q&A") return "handle title mismatch";
    if (handle.coes.size() != 1 ||
        coe::to_text(handle.coes[0]) != "arxiv:2014-05-10:1404.7753v2") {
        return "handle CoE mismatch";
    }
    return "";
}

// --- criterion 2: fingerprint / CoE soundness ------------------------------------

std::string criterion_coe() {
    if (sodium_init() < 0) return "libsodium init failed";

    // Independent oracle for the empty input, plus the published constant.
    Bytes empty_digest(32);
    crypto_hash_sha256(empty_digest.data(), nullptr, 0);
    Fingerprint empty_fp = fingerprint(Bytes{});
    if (empty_fp.digest() != empty_digest) return "empty digest disagrees with oracle";
    if (empty_fp.path_form() !=
        "sha256/e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855") {
        return "empty digest disagrees with the published constant";
    }

    Rng rng(1001);
    auto authority = coe::TimestampAuthority::create("acceptance");
    coe::TrustAnchors anchors;
    anchors.set_verify_key("acceptance", authority.verify_key());

    // 100 single-bit tamper trials on registry stamps.
    for (int i = 0; i < 100; ++i) {
        Bytes content = testing::random_bytes(rng, 100);
        content.push_back(static_cast<uint8_t>(i));
        Fingerprint fp = fingerprint(content);
        coe::RegistryStamp stamp =
            authority.stamp_registry(fp, Date{2014, 5, 10}, "t" + std::to_string(i));
        if (coe::verify(stamp, fp, anchors) != coe::Verdict::valid) {
            return "fresh registry stamp does not verify";
        }
        Bytes tampered = fp.digest();
        size_t byte = rng.below(tampered.size());
        tampered[byte] ^= static_cast<uint8_t>(1u << rng.below(8));
        if (coe::verify(stamp, Fingerprint::make("sha256", tampered), anchors) !=
            coe::Verdict::invalid) {
            return "tampered registry stamp still verifies";
        }
    }

    // A 4-leaf round: every audit path has length 2 and verifies; 100
    // single-bit tamper trials across the linked receipts all fail.
    std::vector<Fingerprint> fps;
    for (int i = 0; i < 4; ++i) {
        fps.push_back(fingerprint(to_bytes("leaf " + std::to_string(i))));
        authority.round_append(fps.back());
    }
    auto round0 = authority.round_close();
    anchors.add_head("acceptance", 0, round0.head);
    for (int i = 0; i < 4; ++i) {
        if (round0.receipts[i].audit_path.size() != 2) return "audit path length is not 2";
        if (coe::verify(round0.receipts[i], fps[i], anchors) != coe::Verdict::valid) {
            return "linked receipt does not verify against the published head";
        }
    }
    for (int trial = 0; trial < 100; ++trial) {
        const auto& receipt = round0.receipts[rng.below(4)];
        Fingerprint fp = fps[receipt.leaf_index];
        coe::LinkedStamp mutated = receipt;
        size_t node = rng.below(mutated.audit_path.size());
        size_t byte = rng.below(32);
        mutated.audit_path[node].digest[byte] ^= static_cast<uint8_t>(1u << rng.below(8));
        if (coe::verify(mutated, fp, anchors) != coe::Verdict::invalid) {
            return "tampered audit path still verifies";
        }
    }

    // Cross-round verification fails.
    authority.round_append(fingerprint(to_bytes("second round leaf")));
    auto round1 = authority.round_close();
    anchors.add_head("acceptance", 1, round1.head);
    coe::LinkedStamp misplaced = round0.receipts[0];
    misplaced.round = 1;
    if (coe::verify(misplaced, fps[0], anchors) != coe::Verdict::invalid) {
        return "receipt verified against another round's head";
    }
    return "";
}

// --- criterion 3: double-blind protocol --------------------------------------------

std::string criterion_double_blind() {
    auto result = sim::run_scenario(
        "double_blind_round", 2014,
        canonical::Value::map({{"rounds", canonical::Value::integer(50)}}));
    if (!result.verdict) return result.detail;
    if (result.measurements.at("links_verified").as_int() != 100) {
        return "expected 100 verified links over 50 rounds";
    }
    if (result.measurements.at("wrong_reveals_accepted").as_int() != 0) {
        return "a wrong reveal was accepted";
    }
    if (result.measurements.at("author_name_leaks").as_int() != 0) {
        return "an anonymized deliverable contained an author name";
    }
    if (result.measurements.at("early_review_publications").as_int() != 0) {
        return "review bytes appeared before the end date";
    }
    return "";
}

// --- criterion 4: escrow ---------------------------------------------------------------

std::string criterion_escrow() {
    escrow::EscrowService service("the acceptance program committee",
                                  {testing::person("Board One", "Univ A"),
                                   testing::person("Board Two", "Univ B")},
                                  4242);
    Rng rng(4242);
    std::vector<std::string> names;
    std::vector<std::string> outputs;
    for (int i = 0; i < 1000; ++i) {
        std::string name = "Identity" + std::to_string(rng.next_u64());
        names.push_back(name);
        outputs.push_back(service.register_identity(
            testing::person(name, "Affiliation " + std::to_string(i))));
    }
    // An investigation exercises every public output path.
    auto disputed = fingerprint(to_bytes("disputed review"));
    service.attribute_review(disputed, outputs[0]);
    model::DocumentHandle disputed_handle;
    disputed_handle.fingerprint = disputed;
    const auto& inv = service.open_investigation(
        {testing::person("Pet One", "X"), testing::person("Pet Two", "Y"),
         testing::person("Pet Three", "Z")},
        {disputed_handle}, Date{2015, 1, 1});
    auto templates = service.resolve_investigation(inv.id, escrow::ResolutionAction::retraction);
    for (const auto& t : templates) {
        outputs.push_back(to_string(canonical::encode(model::to_value(t))));
    }
    outputs.push_back(to_string(canonical::encode(service.public_log())));

    for (const auto& output : outputs) {
        for (const auto& name : names) {
            if (output.find(name) != std::string::npos) {
                return "identity substring leaked into a public output";
            }
        }
    }

    // Expiry flips exactly the affected weights, matching the oracle.
    query::KnowledgeGraph graph;
    model::Blob work{to_bytes("escrow acceptance work"), "text/plain"};
    auto wh = model::make_handle(work, "Escrowed");
    graph.index(work, wh);
    model::Blob other_work{to_bytes("other acceptance work"), "text/plain"};
    auto oh = model::make_handle(other_work, "Other");
    graph.index(other_work, oh);

    model::ReviewObject escrowed;
    model::PseudonymousAttribution attribution;
    attribution.pseudonym = outputs[0];
    attribution.escrow_board = service.board();
    escrowed.author = attribution;
    escrowed.title = "escrowed review";
    escrowed.targets = {wh};
    escrowed.grades = {{"overall", 1, 1, model::Grade::Orientation::higher_is_better}};
    escrowed.process = testing::plain_process(service.board(), true);
    auto [eo, ehandle] = model::review_as_object(escrowed);
    graph.index(eo, ehandle);

    model::ReviewObject open;
    open.author = model::OpenAttribution{testing::person("Open Reviewer", "Lab")};
    open.title = "open review";
    open.targets = {wh};
    open.grades = {{"overall", 1, 2, model::Grade::Orientation::higher_is_better}};
    open.process = testing::plain_process({}, false);
    auto [oo, ohandle] = model::review_as_object(open);
    graph.index(oo, ohandle);

    model::ReviewObject open2 = open;
    open2.title = "open review 2";
    open2.targets = {oh};
    auto [o2o, o2handle] = model::review_as_object(open2);
    graph.index(o2o, o2handle);

    query::RankingSpec spec;
    auto before = graph.score(wh.fingerprint, spec);
    auto other_before = graph.score(oh.fingerprint, spec);
    if (!before || *before != Rational(3, 4)) return "pre-expiry score is not 3/4";

    auto inv2 = service.open_investigation({testing::person("Q1", "X"),
                                            testing::person("Q2", "Y"),
                                            testing::person("Q3", "Z")},
                                           {disputed_handle}, Date{2015, 2, 1});
    service.expire_investigation(inv2.id, Date{2015, 4, 3});
    graph.set_escrow_responsive(service.board_key(), service.responsive());

    testing::OracleCorpus oracle;
    oracle.works.push_back({wh.fingerprint, std::nullopt});
    oracle.works.push_back({oh.fingerprint, std::nullopt});
    oracle.reviews.push_back(
        {ehandle.fingerprint, {wh.fingerprint}, escrowed.grades, service.board_key()});
    oracle.reviews.push_back({ohandle.fingerprint, {wh.fingerprint}, open.grades, ""});
    oracle.reviews.push_back({o2handle.fingerprint, {oh.fingerprint}, open2.grades, ""});
    oracle.nonresponsive_boards.insert(service.board_key());

    auto after = graph.score(wh.fingerprint, spec);
    auto oracle_after = testing::oracle_score(oracle, wh.fingerprint);
    if (!after || !oracle_after || *after != *oracle_after || *after != Rational(1, 2)) {
        return "post-expiry score does not match the oracle";
    }
    if (graph.score(oh.fingerprint, spec) != other_before) {
        return "an unaffected work's score changed";
    }
    return "";
}

// --- criterion 5: store soundness -----------------------------------------------------

std::string criterion_store() {
    // Exhaustive: all connected labeled topologies with <= 6 nodes; every
    // node holds its own distinct object so every placement is covered by
    // one network; an absent fingerprint checks the definite verdict.
    for (size_t n = 1; n <= 6; ++n) {
        std::vector<std::pair<size_t, size_t>> all_edges;
        for (size_t a = 0; a < n; ++a) {
            for (size_t b = a + 1; b < n; ++b) all_edges.emplace_back(a, b);
        }
        for (uint64_t mask = 0; mask < (1ull << all_edges.size()); ++mask) {
            std::vector<std::pair<size_t, size_t>> edges;
            std::vector<std::vector<size_t>> adjacency(n);
            for (size_t e = 0; e < all_edges.size(); ++e) {
                if (mask & (1ull << e)) {
                    edges.push_back(all_edges[e]);
                    adjacency[all_edges[e].first].push_back(all_edges[e].second);
                    adjacency[all_edges[e].second].push_back(all_edges[e].first);
                }
            }
            // Connectivity screen.
            std::vector<bool> seen(n, false);
            std::vector<size_t> stack = {0};
            seen[0] = true;
            while (!stack.empty()) {
                size_t u = stack.back();
                stack.pop_back();
                for (size_t v : adjacency[u]) {
                    if (!seen[v]) {
                        seen[v] = true;
                        stack.push_back(v);
                    }
                }
            }
            bool connected = true;
            for (bool s : seen) connected = connected && s;
            if (!connected) continue;

            testing::InstitutionalNet net(n, edges, 6, /*cache_capacity=*/0);
            std::vector<Fingerprint> fps;
            for (size_t holder = 0; holder < n; ++holder) {
                auto handle = net.nodes[holder]->submit(
                    model::Blob{to_bytes("object of node " + std::to_string(holder)),
                                "text/plain"},
                    testing::person("A", "B"));
                fps.push_back(handle.fingerprint);
            }
            Fingerprint absent = fingerprint(to_bytes("absent everywhere"));
            for (size_t origin = 0; origin < n; ++origin) {
                for (size_t holder = 0; holder < n; ++holder) {
                    auto out = net.nodes[origin]->propagate_request(fps[holder], 6, {});
                    if (out.kind != store::LookupOutcome::Kind::found) {
                        return "present object not found (n=" + std::to_string(n) + ")";
                    }
                    if (fingerprint(out.object->bytes) != fps[holder]) {
                        return "served bytes do not re-fingerprint";
                    }
                }
                auto miss = net.nodes[origin]->propagate_request(absent, 6, {});
                if (miss.kind != store::LookupOutcome::Kind::definitely_absent) {
                    return "absent object not reported definitely absent";
                }
            }
        }
    }

    // Home durability under arbitrary eviction and restart sequences.
    Rng rng(5005);
    std::vector<std::pair<size_t, size_t>> line = {{0, 1}, {1, 2}};
    testing::InstitutionalNet net(3, line, 6, /*cache_capacity=*/1);
    std::vector<Fingerprint> homes;
    for (size_t i = 0; i < 3; ++i) {
        homes.push_back(net.nodes[i]
                            ->submit(model::Blob{to_bytes("home object " + std::to_string(i)),
                                                 "text/plain"},
                                     testing::person("A", "B"))
                            .fingerprint);
    }
    for (int step = 0; step < 60; ++step) {
        switch (rng.below(3)) {
            case 0: net.nodes[rng.below(3)]->evict_non_home(); break;
            case 1: net.restart(rng.below(3), line); break;
            default: {
                size_t origin = rng.below(3);
                size_t target = rng.below(3);
                auto out = net.nodes[origin]->propagate_request(homes[target], 6, {});
                if (out.kind != store::LookupOutcome::Kind::found) {
                    return "home object lost after eviction/restart sequence";
                }
                if (fingerprint(out.object->bytes) != homes[target]) {
                    return "home object bytes corrupted";
                }
            }
        }
    }
    for (size_t i = 0; i < 3; ++i) {
        if (net.nodes[i]->get_local(homes[i]).kind != store::LookupOutcome::Kind::found) {
            return "home node no longer serves its own object";
        }
    }
    return "";
}

// --- criterion 6: DHT --------------------------------------------------------------------

std::string criterion_dht() {
    auto clean = sim::run_scenario("drop_and_retry", 64,
                                   canonical::Value::map({
                                       {"nodes", canonical::Value::integer(64)},
                                       {"pairs", canonical::Value::integer(100)},
                                   }));
    if (!clean.verdict) return "0% drop: " + clean.detail;
    if (clean.measurements.at("found").as_int() != 100 ||
        clean.measurements.at("within_hop_bound").as_int() != 100) {
        return "0% drop: not all lookups found within 8 hops: " + clean.detail;
    }
    if (clean.measurements.at("absent_reported_possibly").as_int() != 100) {
        return "0% drop: absent keys not always possibly-absent";
    }

    auto lossy = sim::run_scenario("drop_and_retry", 65,
                                   canonical::Value::map({
                                       {"nodes", canonical::Value::integer(64)},
                                       {"pairs", canonical::Value::integer(100)},
                                       {"drop", canonical::Value::text("1/10")},
                                   }));
    if (!lossy.verdict) return "10% drop: " + lossy.detail;
    if (lossy.measurements.at("found").as_int() < 95) {
        return "10% drop: found rate below 95%: " + lossy.detail;
    }
    if (lossy.measurements.at("absent_reported_possibly").as_int() != 100) {
        return "10% drop: absent keys not always possibly-absent";
    }
    return "";
}

// --- criterion 7: ranking ---------------------------------------------------------------

std::string criterion_ranking() {
    Rng rng(7007);
    for (int trial = 0; trial < 200; ++trial) {
        auto corpus = testing::generate_corpus(rng, 10, 20);
        for (const auto& w : corpus.works) {
            auto engine = corpus.graph.score(w, query::RankingSpec{});
            auto oracle = testing::oracle_score(corpus.oracle, w);
            if (engine.has_value() != oracle.has_value()) {
                return "score presence disagrees with the oracle";
            }
            if (engine && *engine != *oracle) return "score value disagrees with the oracle";
        }
        auto engine_order = testing::engine_work_ranking(corpus);
        auto oracle_order = testing::oracle_ranking(corpus.oracle);
        if (engine_order != oracle_order) return "ordering disagrees with the oracle";
    }

    // Monotonicity: 500 randomized trials.
    Rng mono_rng(7013);
    int done = 0;
    while (done < 500) {
        auto corpus = testing::generate_corpus(mono_rng, 6, 10);
        std::optional<size_t> pick;
        for (size_t i = 0; i < corpus.works.size(); ++i) {
            auto s = corpus.graph.score(corpus.works[i], query::RankingSpec{});
            if (s && *s < 1) {
                pick = i;
                break;
            }
        }
        if (!pick) continue;
        Fingerprint w = corpus.works[*pick];
        auto before = testing::engine_work_ranking(corpus);
        size_t before_pos =
            std::find(before.begin(), before.end(), w) - before.begin();

        model::ReviewObject boost;
        boost.author = model::OpenAttribution{testing::person("Booster", "Lab")};
        boost.title = "boost " + std::to_string(mono_rng.next_u64());
        model::DocumentHandle th;
        th.fingerprint = w;
        boost.targets = {th};
        boost.grades = {{"g", 1, 1, model::Grade::Orientation::higher_is_better}};
        boost.process = testing::plain_process({}, false);
        auto [bo, bh] = model::review_as_object(boost);
        corpus.graph.index(bo, bh);

        auto after = testing::engine_work_ranking(corpus);
        size_t after_pos = std::find(after.begin(), after.end(), w) - after.begin();
        if (after_pos > before_pos) return "an above-score review lowered a work's rank";
        ++done;
    }

    // Post-hoc expansion surfaces both sides, both ways.
    query::KnowledgeGraph graph;
    model::Blob original{to_bytes("expansion original"), "text/plain"};
    auto oh = model::make_handle(original, "Expansion Original");
    graph.index(original, oh);
    model::Blob derived{to_bytes("expansion derived"), "text/plain"};
    auto dh = model::make_handle(derived, "Expansion Derived");
    graph.index(derived, dh);
    model::PostHocCitation cite;
    cite.source = oh;
    cite.target = dh;
    cite.relation = model::PostHocCitation::Relation::prior_work;
    cite.statement = "same method";
    cite.author = testing::person("Peer", "Lab");
    auto [cobj, chandle] = model::posthoc_as_object(cite);
    graph.index(cobj, chandle);

    for (std::string term : {"original", "derived"}) {
        query::SavedQuery q;
        q.id = "expansion";
        q.owner = testing::person("O", "X");
        q.filter = query::Filter::title_term(term);
        auto results = query::execute(graph, q);
        bool saw_original = false, saw_derived = false;
        for (const auto& r : results) {
            if (r.handle.fingerprint == oh.fingerprint) saw_original = true;
            if (r.handle.fingerprint == dh.fingerprint) saw_derived = true;
        }
        if (!saw_original || !saw_derived) {
            return "expansion missed one side for term '" + term + "'";
        }
    }
    return "";
}

// --- criterion 8: scenario reproducibility --------------------------------------------------

std::string criterion_reproducibility() {
    auto a = sim::run_scenario("credit_loss", 42, canonical::Value::map({}));
    auto b = sim::run_scenario("credit_loss", 42, canonical::Value::map({}));
    if (a.log != b.log) return "logs differ between identical runs";
    if (a.detail != b.detail) return "details differ between identical runs";
    if (!a.verdict) return "credit_loss verdict failed: " + a.detail;
    if (a.log.find("obtained_private_stamp") == std::string::npos) {
        return "log lacks the private stamping step";
    }
    if (a.detail.find("original=expanded") == std::string::npos ||
        a.detail.find("context=attached") == std::string::npos) {
        return "final query output lacks the expanded original with context";
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <fixtures-dir> [--write]\n";
        return 2;
    }
    std::filesystem::path fixtures(argv[1]);

    if (argc > 2 && std::string(argv[2]) == "--write") {
        write_file(fixtures / "table1_review.pce",
                   canonical::encode(model::to_value(testing::trust14_review())));
        write_file(fixtures / "qa_handle.pce",
                   canonical::encode(model::to_value(testing::qa_report_handle())));
        std::cout << "fixtures written to " << fixtures << "\n";
        return 0;
    }

    std::vector<Criterion> criteria = {
        {"fixture-fidelity", [&] { return criterion_fixtures(fixtures); }},
        {"fingerprint-coe-soundness", criterion_coe},
        {"double-blind-protocol", criterion_double_blind},
        {"escrow", criterion_escrow},
        {"store-soundness", criterion_store},
        {"dht", criterion_dht},
        {"ranking", criterion_ranking},
        {"scenario-reproducibility", criterion_reproducibility},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        try {
            detail = criteria[i].run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (detail.empty()) {
            std::cout << "[PASS] " << (i + 1) << " " << criteria[i].name << "\n";
        } else {
            std::cout << "[FAIL] " << (i + 1) << " " << criteria[i].name << " — " << detail
                      << "\n";
            ++failures;
        }
        std::cout.flush();
    }
    if (failures == 0) {
        std::cout << "all " << criteria.size() << " acceptance criteria passed\n";
        return 0;
    }
    std::cout << failures << " acceptance criteria failed\n";
    return 1;
}
