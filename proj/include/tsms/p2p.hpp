#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tsms/expr.hpp"
#include "tsms/segment.hpp"
#include "tsms/time_series.hpp"

namespace tsms::p2p {

// Position on the 2^m identifier ring.
using PeerId = std::uint64_t;

struct DhtEntry {
    PeerId peer = 0;
    std::size_t start = 0; // first calendar index held
    std::size_t end = 0;   // last calendar index held, inclusive

    friend bool operator==(const DhtEntry&, const DhtEntry&) = default;
};

struct SimConfig {
    std::size_t peers = 8;
    unsigned m_bits = 32;
    SegmentSpec segment{1024, 128};
    std::size_t cache_capacity = 256; // derived segments per peer
    std::uint64_t seed = 1;
    std::size_t client_peer = 0; // peer index issuing queries

    // Simulated clock constants (milliseconds).
    double lookup_base_ms = 5.5;
    double hop_ms = 0.75;
    double compute_ms_per_entry = 1e-4;          // default per-operator cost
    std::map<std::string, double> op_cost_ms;    // per-operator override
    double net_ms_per_entry = 0.0008;
    double query_ship_ms = 0.5;

    bool parallel = false;        // evaluate ordinals concurrently
    bool check_coherence = false; // verify cache/DHT invariant after every event
    bool record_trace = false;

    static SimConfig from_json_file(const std::string& path);
};

// Simulated wall of one query. All fields are integer nanoseconds on the
// simulated clock, so T_P2P = T_R + T_P + T_Q + T_NET holds exactly.
struct TimingProbe {
    std::int64_t t_r_ns = 0;
    std::int64_t t_p_ns = 0;
    std::int64_t t_q_ns = 0;
    std::int64_t t_net_ns = 0;
    std::size_t lookup_count = 0;

    std::int64_t t_p2p_ns() const { return t_r_ns + t_p_ns + t_q_ns + t_net_ns; }
    double t_index_ms() const {
        return lookup_count == 0 ? 0.0 : t_r_ms() / double(lookup_count);
    }
    double t_r_ms() const { return double(t_r_ns) / 1e6; }
    double t_p_ms() const { return double(t_p_ns) / 1e6; }
    double t_q_ms() const { return double(t_q_ns) / 1e6; }
    double t_net_ms() const { return double(t_net_ns) / 1e6; }
    double t_p2p_ms() const { return double(t_p2p_ns()) / 1e6; }
};

struct ExecResult {
    TimeSeries series;
    TimingProbe probe;
    std::uint64_t ops_executed = 0;
    std::size_t cells_shipped = 0;
    double wall_ms = 0.0;
};

// Per-segment annotated plan, mirroring the query tree with pruned
// descendants removed. A node with an assignment has no children.
struct PlanNode {
    const expr::ExprNode* node = nullptr;
    std::optional<DhtEntry> assign;
    std::vector<std::unique_ptr<PlanNode>> children;

    bool annotated() const { return assign.has_value(); }
    std::size_t count_nodes() const;
};

struct AnnotatedQuery {
    expr::ExprPtr tree; // execution-form tree owning the nodes
    std::vector<std::size_t> ordinals;
    std::vector<std::unique_ptr<PlanNode>> plans; // one per ordinal
};

// Deterministic in-process simulation of the peer network: a Chord ring
// with per-peer finger tables, per-peer pinned stores for base segments,
// FIFO caches for derived segments (with DHT unpublish on eviction), the
// annotation/pruning planner and the distributed executor.
class Network {
public:
    Network(SimConfig cfg, CalendarPtr calendar);

    const SimConfig& config() const { return cfg_; }
    std::size_t peer_count() const { return peers_.size(); }
    PeerId peer_id(std::size_t index) const;

    // Split a base series into segments, pin them on their holder peers and
    // publish them in the DHT. The series must cover the whole calendar.
    void load_base(const TimeSeries& s);

    // --- DHT surface -------------------------------------------------
    std::uint64_t key_id(const std::string& key) const;
    std::size_t successor_index(std::uint64_t id) const;
    void dht_put(const std::string& key, const DhtEntry& entry);
    std::vector<DhtEntry> dht_lookup(const std::string& key);
    void dht_remove(const std::string& key, const DhtEntry& entry); // idempotent
    std::size_t last_lookup_hops() const { return last_lookup_hops_; }

    // --- cache surface -----------------------------------------------
    // Insert into the peer's FIFO cache (evicting + unpublishing the
    // oldest entry if full), then publish in the DHT.
    void publish_segment(std::size_t peer_index, Segment seg);
    std::size_t cache_size(std::size_t peer_index) const;

    // Holder of segment `ordinal` of a base series (placement by hash).
    std::size_t base_holder(const std::string& name, std::size_t ordinal) const;

    // --- planner / executor --------------------------------------------
    // Depth-first annotation and pruning, one plan per overlapped segment;
    // peer choice among multiple holders uses the config seed.
    AnnotatedQuery annotate(const expr::ExprPtr& query, const QueryInterval& interval);

    // Full distributed execution; result is value-identical to the
    // centralized evaluator. Throws CoverageGap, InfeasibleWindow.
    ExecResult execute(const expr::ExprPtr& query, const QueryInterval& interval,
                       std::uint64_t seed);

    // --- introspection --------------------------------------------------
    bool coherent() const; // DHT contents == pinned stores + caches
    const std::vector<std::string>& trace() const { return trace_; }
    std::uint64_t ops_executed_total() const { return ops_total_; }

private:
    struct CachedSegment {
        Segment seg;
    };
    struct PeerState {
        PeerId id = 0;
        std::map<std::pair<std::string, std::size_t>, Segment> store; // pinned base segments
        std::list<Segment> cache;                                     // FIFO, front = oldest
        std::map<std::pair<std::string, std::size_t>, std::list<Segment>::iterator> cache_index;
        std::map<std::string, std::vector<DhtEntry>> dht; // ring partition stored here
    };

    std::uint64_t ring_mask() const;
    std::size_t route_hops(std::size_t from_index, std::uint64_t id) const;
    std::size_t closest_preceding(std::size_t from_index, std::uint64_t id) const;
    std::vector<DhtEntry> lookup_accounted(const std::string& key, TimingProbe* probe);
    const Segment* find_segment(std::size_t peer_index, const std::string& name,
                                std::size_t ordinal) const;
    std::unique_ptr<PlanNode> annotate_node(const expr::ExprNode& node,
                                            const Segment& frame, std::mt19937_64& rng,
                                            TimingProbe* probe);
    AnnotatedQuery annotate_impl(const expr::ExprPtr& exec_tree,
                                 const QueryInterval& interval, std::mt19937_64& rng,
                                 TimingProbe* probe);
    void check_coherence_or_die(const char* when) const;
    void trace_line(std::string line);

    SimConfig cfg_;
    CalendarPtr calendar_;
    std::size_t n_ = 0;
    std::vector<PeerState> peers_;
    std::vector<PeerId> ring_; // sorted peer ids, index-aligned with peers_
    std::vector<std::vector<std::size_t>> fingers_;
    std::map<std::string, std::size_t> base_length_;
    std::vector<std::string> trace_;
    std::size_t last_lookup_hops_ = 0;
    std::uint64_t ops_total_ = 0;

    // clock constants in integer nanoseconds
    std::int64_t lookup_base_ns_ = 0;
    std::int64_t hop_ns_ = 0;
    std::int64_t net_ns_per_entry_ = 0;
    std::int64_t query_ship_ns_ = 0;
    std::int64_t op_cost_ns(const std::string& op, std::size_t cells) const;
};

} // namespace tsms::p2p
