// Copyright 2026
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic discrete-event simulation of multi-node networks and
// multi-party review scenarios. One single-threaded event loop, one seeded
// generator, logical ticks only (1 tick = 1 day against the scenario
// epoch); identical (seed, scenario, params) always reproduce the event log
// bit for bit. No simulated component ever reads a wall clock.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pubfab/canonical.hpp"
#include "pubfab/date.hpp"
#include "pubfab/errors.hpp"
#include "pubfab/rng.hpp"
#include "pubfab/store.hpp"

namespace pubfab::sim {

struct LinkModel {
    uint64_t latency_ticks = 1;
    double drop_probability = 0.0;
};

struct LogLine {
    uint64_t tick = 0;
    std::string node;
    std::string kind;
    std::string payload_digest;  // hex SHA-256 of the event payload

    bool operator==(const LogLine&) const = default;
};

enum class FaultKind { drop_link, kill_node, delay };

class SimWorld {
public:
    explicit SimWorld(uint64_t seed, Date epoch = Date{2014, 1, 1});

    uint64_t now() const { return clock_; }
    Date today() const { return epoch_.plus_days(static_cast<int64_t>(clock_)); }
    Rng& rng() { return rng_; }
    void advance(uint64_t ticks) { clock_ += ticks; }

    void log_event(const std::string& node, const std::string& kind,
                   std::span<const uint8_t> payload);
    void log_note(const std::string& node, const std::string& kind, const std::string& text);
    const std::vector<LogLine>& events() const { return events_; }
    std::string render_log() const;  // tab-separated, one line per event

    // --- components ---------------------------------------------------------
    store::StoreNode& add_store(const std::string& name, store::StoreConfig config);
    store::StoreNode& get_store(const std::string& name);  // throws UnknownTarget

    // Institutional peering over the simulated transport, both directions.
    void connect(const std::string& a, const std::string& b);
    // Gives every p2p store a dialer routed through the simulated links and
    // seeds every routing table with every other p2p node.
    void mesh_p2p();

    std::shared_ptr<store::Peer> link_peer(const std::string& from, const std::string& to);

    void set_link(const std::string& a, const std::string& b, LinkModel model);
    void inject_fault(FaultKind kind, const std::string& target, double probability = 1.0,
                      uint64_t latency = 1);
    bool is_killed(const std::string& name) const { return killed_.contains(name); }
    const LinkModel& link_between(const std::string& a, const std::string& b) const;

    // --- event queue ----------------------------------------------------------
    void schedule(uint64_t at_tick, const std::string& name, std::function<void()> action);
    void run_queue();

private:
    friend class SimPeer;

    uint64_t clock_ = 0;
    Date epoch_;
    Rng rng_;
    std::vector<LogLine> events_;

    std::map<std::string, std::shared_ptr<store::MemStorage>> storages_;
    std::map<std::string, std::unique_ptr<store::StoreNode>> stores_;
    std::map<std::string, std::string> node_names_;  // hex node id -> name
    std::map<std::string, std::map<std::string, LinkModel>> links_;
    std::set<std::string> killed_;
    LinkModel default_link_;

    struct Pending {
        uint64_t tick;
        uint64_t seq;
        std::string name;
        std::function<void()> action;
    };
    std::vector<Pending> queue_;
    uint64_t next_seq_ = 0;
};

struct ScenarioResult {
    bool verdict = false;
    std::string detail;            // one-line human summary
    canonical::Value measurements; // scenario-specific numbers
    std::string log;               // rendered event log
};

// Built-in scenarios: credit_loss, double_blind_round, dual_network_consult,
// drop_and_retry. Throws UnknownScenario otherwise.
ScenarioResult run_scenario(const std::string& scenario, uint64_t seed,
                            const canonical::Value& params);

std::vector<std::string> scenario_names();

}  // namespace pubfab::sim
