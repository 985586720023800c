#include "pubfab/escrow.hpp"

#include <set>

#include "corpus_gen.hpp"
#include "doctest.h"
#include "fixtures_data.hpp"
#include "pubfab/query.hpp"
#include "pubfab/rng.hpp"
#include "ranking_oracle.hpp"

using namespace pubfab;
using namespace pubfab::escrow;

namespace {

EscrowService make_service(uint64_t seed = 7) {
    return EscrowService("the TRUST'14 program committee",
                         {testing::person("Board Member One", "Univ A"),
                          testing::person("Board Member Two", "Univ B"),
                          testing::person("Board Member Three", "Univ C")},
                         seed);
}

std::vector<model::Identity> petitioners(int n) {
    std::vector<model::Identity> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(testing::person("Petitioner " + std::to_string(i), "Ext"));
    }
    return out;
}

model::DocumentHandle fake_review_handle(const std::string& salt) {
    model::DocumentHandle h;
    h.title = "Review " + salt;
    h.fingerprint = fingerprint(to_bytes("review " + salt));
    return h;
}

}  // namespace

TEST_CASE("pseudonyms carry the board label and no identity substrings") {
    auto service = make_service();
    model::Identity alice = testing::person("J. Doe", "Example University");
    std::string pseudonym = service.register_identity(alice);
    CHECK(pseudonym.find("Anonymous reviewer ") == 0);
    CHECK(pseudonym.find("mandated by the TRUST'14 program committee") != std::string::npos);
    CHECK(pseudonym.find("J. Doe") == std::string::npos);
    CHECK(pseudonym.find("Example University") == std::string::npos);
    CHECK(service.knows_pseudonym(pseudonym));
}

TEST_CASE("re-registration yields distinct, unlinkable pseudonyms") {
    auto service = make_service();
    model::Identity alice = testing::person("J. Doe", "Example University");
    std::string p1 = service.register_identity(alice);
    std::string p2 = service.register_identity(alice);
    CHECK(p1 != p2);
    CHECK(service.sealed_record_count() == 2);
}

TEST_CASE("pseudonym leak scan over 1000 random identities") {
    auto service = make_service(99);
    Rng rng(171);
    std::set<std::string> pseudonyms;
    std::vector<std::string> names;
    for (int i = 0; i < 1000; ++i) {
        std::string name = "Person" + std::to_string(rng.next_u64());
        names.push_back(name);
        std::string p = service.register_identity(testing::person(name, "Aff" +
                                                                  std::to_string(i)));
        CHECK(pseudonyms.insert(p).second);  // unique
    }
    // No pseudonym contains any registered display name, and the public log
    // is clean too.
    std::string log(to_string(canonical::encode(service.public_log())));
    for (const auto& p : pseudonyms) {
        for (const auto& n : names) {
            CHECK(p.find(n) == std::string::npos);
        }
    }
    for (const auto& n : names) {
        CHECK(log.find(n) == std::string::npos);
    }
}

TEST_CASE("petition thresholds") {
    auto service = make_service();
    CHECK_NOTHROW(
        service.open_investigation(petitioners(3), {fake_review_handle("a")}, Date{2015, 1, 1}));
    CHECK_THROWS_AS(
        service.open_investigation(petitioners(2), {fake_review_handle("b")}, Date{2015, 1, 1}),
        PetitionTooSmall);

    auto dupes = petitioners(2);
    dupes.push_back(dupes[0]);
    CHECK_THROWS_AS(service.open_investigation(dupes, {}, Date{2015, 1, 1}), PetitionTooSmall);

    auto with_board = petitioners(2);
    with_board.push_back(testing::person("Board Member Two", "Univ B"));
    CHECK_THROWS_AS(service.open_investigation(with_board, {}, Date{2015, 1, 1}),
                    PetitionerOnBoard);

    // Configurable threshold.
    CHECK_NOTHROW(service.open_investigation(petitioners(5), {}, Date{2015, 1, 1}, 5));
    CHECK_THROWS_AS(service.open_investigation(petitioners(4), {}, Date{2015, 1, 1}, 5),
                    PetitionTooSmall);
}

TEST_CASE("investigation deadline and expiry") {
    auto service = make_service();
    const auto& inv =
        service.open_investigation(petitioners(3), {fake_review_handle("x")}, Date{2015, 1, 1});
    CHECK(inv.deadline == Date{2015, 3, 2});  // 60 days later
    uint64_t id = inv.id;

    CHECK_THROWS_AS(service.expire_investigation(id, Date{2015, 3, 2}), NotYetExpired);
    CHECK(service.responsive());
    service.expire_investigation(id, Date{2015, 3, 3});
    CHECK(!service.responsive());
    CHECK(service.investigations()[0].state == Investigation::State::escrow_nonresponsive);
    CHECK_THROWS_AS(service.expire_investigation(id, Date{2015, 3, 4}), UnknownInvestigation);
    CHECK_THROWS_AS(service.resolve_investigation(id, ResolutionAction::retraction),
                    UnknownInvestigation);
    CHECK_THROWS_AS(service.expire_investigation(999, Date{2016, 1, 1}), UnknownInvestigation);
}

TEST_CASE("retraction produces counter-reviews by the same pseudonym") {
    auto service = make_service();
    std::string pseudonym =
        service.register_identity(testing::person("Real Reviewer", "Hidden U"));
    auto handle = fake_review_handle("disputed");
    service.attribute_review(handle.fingerprint, pseudonym);

    const auto& inv =
        service.open_investigation(petitioners(3), {handle}, Date{2015, 1, 1});
    auto templates = service.resolve_investigation(inv.id, ResolutionAction::retraction);
    REQUIRE(templates.size() == 1);
    const auto& counter = templates[0];
    const auto& author = std::get<model::PseudonymousAttribution>(counter.author);
    CHECK(author.pseudonym == pseudonym);
    CHECK(counter.targets[0].fingerprint == handle.fingerprint);
    CHECK(counter.title.find("Retraction of") == 0);
    CHECK(service.investigations()[0].state == Investigation::State::resolved_retraction);

    // The template never contains the sealed identity.
    Bytes encoded = canonical::encode(model::to_value(counter));
    std::string text(encoded.begin(), encoded.end());
    CHECK(text.find("Real Reviewer") == std::string::npos);
    CHECK(text.find("Hidden U") == std::string::npos);
}

TEST_CASE("clarification closes without templates") {
    auto service = make_service();
    const auto& inv = service.open_investigation(petitioners(3), {}, Date{2015, 1, 1});
    auto templates = service.resolve_investigation(inv.id, ResolutionAction::clarification);
    CHECK(templates.empty());
    CHECK(service.investigations()[0].state == Investigation::State::resolved_clarification);
}

TEST_CASE("public log carries no identities") {
    auto service = make_service();
    service.register_identity(testing::person("Sealed Name", "Sealed Org"));
    service.open_investigation(petitioners(3), {fake_review_handle("q")}, Date{2015, 1, 1});
    std::string log(to_string(canonical::encode(service.public_log())));
    CHECK(log.find("Sealed Name") == std::string::npos);
    CHECK(log.find("Sealed Org") == std::string::npos);
    CHECK(log.find("Petitioner 0") == std::string::npos);
    CHECK(log.find("\"state\":\"open\"") != std::string::npos);
}

TEST_CASE("the public log records state transitions in order, with dates") {
    auto service = make_service();
    auto inv1 = service.open_investigation(petitioners(3), {}, Date{2015, 1, 1}).id;
    auto inv2 = service.open_investigation(petitioners(3), {}, Date{2015, 1, 5}).id;
    service.resolve_investigation(inv1, ResolutionAction::clarification);
    service.expire_investigation(inv2, Date{2015, 3, 10});

    const auto& transitions = service.transitions();
    REQUIRE(transitions.size() == 4);
    CHECK(transitions[0].investigation == inv1);
    CHECK(transitions[0].state == Investigation::State::open);
    CHECK(transitions[0].date == Date{2015, 1, 1});
    CHECK(transitions[2].state == Investigation::State::resolved_clarification);
    CHECK(transitions[3].state == Investigation::State::escrow_nonresponsive);
    CHECK(transitions[3].date == Date{2015, 3, 10});

    // The rendered log includes the transition list and survives sealing.
    std::string log(to_string(canonical::encode(service.public_log())));
    CHECK(log.find("\"transitions\":[") != std::string::npos);
    auto restored = EscrowService::unseal(service.seal("pw"), "pw");
    CHECK(restored.transitions().size() == 4);
}

TEST_CASE("expiry flips exactly the affected reviews' weights, matching the oracle") {
    // Toy corpus: one work, one review from this escrow, one open review.
    query::KnowledgeGraph graph;
    model::Blob work{to_bytes("escrow-ranked work"), "text/plain"};
    auto wh = model::make_handle(work, "Escrowed Work");
    graph.index(work, wh);

    auto service = make_service();
    std::string pseudonym =
        service.register_identity(testing::person("Hidden Author", "Hidden Lab"));

    model::ReviewObject escrowed;
    model::PseudonymousAttribution attribution;
    attribution.pseudonym = pseudonym;
    attribution.escrow_board = service.board();
    escrowed.author = attribution;
    escrowed.title = "escrowed review";
    escrowed.targets = {wh};
    escrowed.grades = {{"overall", 1, 1, model::Grade::Orientation::higher_is_better}};
    escrowed.process = testing::plain_process(service.board(), true);
    auto [eo, ehandle] = model::review_as_object(escrowed);
    graph.index(eo, ehandle);
    service.attribute_review(ehandle.fingerprint, pseudonym);

    model::ReviewObject open;
    open.author = model::OpenAttribution{testing::person("Open Reviewer", "Lab")};
    open.title = "open review";
    open.targets = {wh};
    open.grades = {{"overall", 1, 2, model::Grade::Orientation::higher_is_better}};
    open.process = testing::plain_process({}, false);
    auto [oo, ohandle] = model::review_as_object(open);
    graph.index(oo, ohandle);

    // Second work reviewed only by the open reviewer: must be unaffected.
    model::Blob other{to_bytes("unaffected work"), "text/plain"};
    auto other_handle = model::make_handle(other, "Unaffected");
    graph.index(other, other_handle);
    model::ReviewObject open2 = open;
    open2.title = "open review 2";
    open2.targets = {other_handle};
    auto [o2o, o2handle] = model::review_as_object(open2);
    graph.index(o2o, o2handle);

    query::RankingSpec spec;
    CHECK(*graph.score(wh.fingerprint, spec) == Rational(3, 4));  // (1 + 1/2)/2
    auto other_before = graph.score(other_handle.fingerprint, spec);

    // Petition, deadline passes, service expires: ranking drops the board.
    const auto& inv = service.open_investigation(
        petitioners(3), {model::DocumentHandle{{}, {}, ehandle.fingerprint, {}}},
        Date{2015, 1, 1});
    service.expire_investigation(inv.id, Date{2015, 3, 3});
    graph.set_escrow_responsive(service.board_key(), service.responsive());

    CHECK(*graph.score(wh.fingerprint, spec) == Rational(1, 2));  // only the open review
    CHECK(graph.score(other_handle.fingerprint, spec) == other_before);

    // Matches the brute-force oracle on the same corpus.
    testing::OracleCorpus oracle;
    oracle.works.push_back({wh.fingerprint, std::nullopt});
    oracle.works.push_back({other_handle.fingerprint, std::nullopt});
    oracle.reviews.push_back(
        {ehandle.fingerprint, {wh.fingerprint}, escrowed.grades, service.board_key()});
    oracle.reviews.push_back({ohandle.fingerprint, {wh.fingerprint}, open.grades, ""});
    oracle.reviews.push_back(
        {o2handle.fingerprint, {other_handle.fingerprint}, open2.grades, ""});
    oracle.nonresponsive_boards.insert(service.board_key());
    CHECK(*testing::oracle_score(oracle, wh.fingerprint) ==
          *graph.score(wh.fingerprint, spec));
    CHECK(*testing::oracle_score(oracle, other_handle.fingerprint) == *other_before);
}

TEST_CASE("sealed persistence round trips only with the right passphrase") {
    auto service = make_service(31);
    std::string pseudonym = service.register_identity(testing::person("Very Secret", "Org"));
    auto handle = fake_review_handle("persisted");
    service.attribute_review(handle.fingerprint, pseudonym);
    service.open_investigation(petitioners(3), {handle}, Date{2015, 1, 1});

    Bytes sealed = service.seal("board passphrase");
    // Ciphertext leaks nothing.
    std::string blob(sealed.begin(), sealed.end());
    CHECK(blob.find("Very Secret") == std::string::npos);
    CHECK(blob.find(pseudonym) == std::string::npos);

    auto restored = EscrowService::unseal(sealed, "board passphrase");
    CHECK(restored.label() == service.label());
    CHECK(restored.board_key() == service.board_key());
    CHECK(restored.knows_pseudonym(pseudonym));
    CHECK(restored.pseudonym_for_review(handle.fingerprint) == pseudonym);
    CHECK(restored.investigations().size() == 1);

    CHECK_THROWS_AS(EscrowService::unseal(sealed, "wrong passphrase"), EscrowSealed);
    Bytes tampered = sealed;
    tampered[tampered.size() / 2] ^= 1;
    CHECK_THROWS_AS(EscrowService::unseal(tampered, "board passphrase"), EscrowSealed);

    // A restored service still issues fresh pseudonyms.
    std::string next = restored.register_identity(testing::person("Another", "Org"));
    CHECK(next != pseudonym);
}

TEST_CASE("attribute_review requires a known pseudonym") {
    auto service = make_service();
    CHECK_THROWS_AS(service.attribute_review(fingerprint(to_bytes("r")), "Anonymous reviewer 1"),
                    UnknownInvestigation);
}
