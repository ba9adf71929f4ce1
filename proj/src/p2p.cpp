#include "tsms/p2p.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <openssl/evp.h>

#include <json.hpp>

#include "tsms/errors.hpp"

namespace tsms::p2p {

namespace {

using Key = std::pair<std::string, std::size_t>;

std::int64_t ms_to_ns(double ms) { return std::llround(ms * 1e6); }

} // namespace

std::size_t PlanNode::count_nodes() const {
    std::size_t total = 1;
    for (const auto& c : children) total += c->count_nodes();
    return total;
}

SimConfig SimConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open simulation config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad simulation config: ") + e.what());
    }
    SimConfig cfg;
    cfg.peers = j.value("peers", cfg.peers);
    cfg.m_bits = j.value("m_bits", cfg.m_bits);
    cfg.segment.seg_len = j.value("seg_len", cfg.segment.seg_len);
    cfg.segment.overlap = j.value("overlap", cfg.segment.overlap);
    cfg.cache_capacity = j.value("cache_capacity", cfg.cache_capacity);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.client_peer = j.value("client_peer", cfg.client_peer);
    cfg.lookup_base_ms = j.value("lookup_base_ms", cfg.lookup_base_ms);
    cfg.hop_ms = j.value("hop_ms", cfg.hop_ms);
    cfg.compute_ms_per_entry = j.value("compute_ms_per_entry", cfg.compute_ms_per_entry);
    cfg.net_ms_per_entry = j.value("net_ms_per_entry", cfg.net_ms_per_entry);
    cfg.query_ship_ms = j.value("query_ship_ms", cfg.query_ship_ms);
    cfg.parallel = j.value("parallel", cfg.parallel);
    cfg.check_coherence = j.value("check_coherence", cfg.check_coherence);
    cfg.record_trace = j.value("record_trace", cfg.record_trace);
    if (j.contains("op_cost_ms"))
        for (const auto& [op, v] : j.at("op_cost_ms").items())
            cfg.op_cost_ms[op] = v.get<double>();
    return cfg;
}

Network::Network(SimConfig cfg, CalendarPtr calendar)
    : cfg_(std::move(cfg)), calendar_(std::move(calendar)) {
    if (!calendar_) throw EngineError("network needs a calendar");
    if (cfg_.peers < 1) throw EngineError("network needs at least one peer");
    if (cfg_.m_bits < 8 || cfg_.m_bits > 63)
        throw EngineError("ring bits must lie in [8,63]");
    if (cfg_.cache_capacity < 1) throw EngineError("cache capacity must be at least 1");
    if (cfg_.client_peer >= cfg_.peers) throw EngineError("client peer out of range");
    if (cfg_.segment.overlap >= cfg_.segment.seg_len)
        throw EngineError("overlap must be smaller than the segment length");
    n_ = calendar_->size();

    // Evenly spaced ring ids: uniform load and a deterministic O(log P)
    // routing bound.
    const unsigned __int128 ring_size = (unsigned __int128)1 << cfg_.m_bits;
    peers_.resize(cfg_.peers);
    ring_.resize(cfg_.peers);
    for (std::size_t i = 0; i < cfg_.peers; ++i) {
        ring_[i] = static_cast<PeerId>(ring_size * i / cfg_.peers);
        peers_[i].id = ring_[i];
    }

    fingers_.assign(cfg_.peers, {});
    for (std::size_t i = 0; i < cfg_.peers; ++i) {
        fingers_[i].reserve(cfg_.m_bits);
        for (unsigned k = 0; k < cfg_.m_bits; ++k) {
            PeerId target = (ring_[i] + (PeerId(1) << k)) & ring_mask();
            fingers_[i].push_back(successor_index(target));
        }
    }

    lookup_base_ns_ = ms_to_ns(cfg_.lookup_base_ms);
    hop_ns_ = ms_to_ns(cfg_.hop_ms);
    net_ns_per_entry_ = ms_to_ns(cfg_.net_ms_per_entry);
    query_ship_ns_ = ms_to_ns(cfg_.query_ship_ms);
}

std::uint64_t Network::ring_mask() const {
    return (std::uint64_t(1) << cfg_.m_bits) - 1;
}

PeerId Network::peer_id(std::size_t index) const { return peers_.at(index).id; }

std::uint64_t Network::key_id(const std::string& key) const {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(key.data(), key.size(), digest, &len, EVP_sha1(), nullptr);
    std::uint64_t h = 0;
    for (int i = 0; i < 8; ++i) h = (h << 8) | digest[i];
    return h & ring_mask();
}

std::size_t Network::successor_index(std::uint64_t id) const {
    auto it = std::lower_bound(ring_.begin(), ring_.end(), id);
    if (it == ring_.end()) return 0;
    return static_cast<std::size_t>(it - ring_.begin());
}

namespace {

// x in the cyclic half-open interval (a, b].
bool in_interval_oc(std::uint64_t x, std::uint64_t a, std::uint64_t b) {
    if (a == b) return true; // full circle
    if (a < b) return x > a && x <= b;
    return x > a || x <= b;
}

// x in the cyclic open interval (a, b).
bool in_interval_oo(std::uint64_t x, std::uint64_t a, std::uint64_t b) {
    if (a == b) return x != a;
    if (a < b) return x > a && x < b;
    return x > a || x < b;
}

} // namespace

std::size_t Network::closest_preceding(std::size_t from_index, std::uint64_t id) const {
    const auto& f = fingers_[from_index];
    for (std::size_t k = f.size(); k-- > 0;) {
        std::size_t cand = f[k];
        if (in_interval_oo(ring_[cand], ring_[from_index], id)) return cand;
    }
    return from_index;
}

std::size_t Network::route_hops(std::size_t from_index, std::uint64_t id) const {
    std::size_t owner = successor_index(id);
    if (owner == from_index) return 0;
    std::size_t cur = from_index;
    std::size_t hops = 0;
    std::size_t guard = 0;
    while (true) {
        std::size_t succ = (cur + 1) % peers_.size();
        if (in_interval_oc(id, ring_[cur], ring_[succ])) {
            ++hops; // contact the owner
            break;
        }
        std::size_t next = closest_preceding(cur, id);
        if (next == cur) next = succ;
        cur = next;
        ++hops;
        if (++guard > peers_.size() + cfg_.m_bits)
            throw EngineError("routing did not converge");
    }
    return hops;
}

void Network::trace_line(std::string line) {
    if (cfg_.record_trace) trace_.push_back(std::move(line));
}

std::vector<DhtEntry> Network::lookup_accounted(const std::string& key,
                                                TimingProbe* probe) {
    std::uint64_t id = key_id(key);
    std::size_t hops = route_hops(cfg_.client_peer, id);
    last_lookup_hops_ = hops;
    if (probe) {
        probe->t_r_ns += lookup_base_ns_ + std::int64_t(hops) * hop_ns_;
        ++probe->lookup_count;
    }
    std::size_t owner = successor_index(id);
    const auto& dht = peers_[owner].dht;
    auto it = dht.find(key);
    std::vector<DhtEntry> out = it == dht.end() ? std::vector<DhtEntry>{} : it->second;
    trace_line("LOOKUP key=" + key + " owner=" + std::to_string(owner) +
               " hops=" + std::to_string(hops) + " entries=" + std::to_string(out.size()));
    return out;
}

std::vector<DhtEntry> Network::dht_lookup(const std::string& key) {
    return lookup_accounted(key, nullptr);
}

void Network::dht_put(const std::string& key, const DhtEntry& entry) {
    std::size_t owner = successor_index(key_id(key));
    auto& list = peers_[owner].dht[key];
    if (std::find(list.begin(), list.end(), entry) == list.end()) list.push_back(entry);
    trace_line("PUT key=" + key + " owner=" + std::to_string(owner) + " peer=" +
               std::to_string(entry.peer) + " range=[" + std::to_string(entry.start) +
               "," + std::to_string(entry.end) + "]");
}

void Network::dht_remove(const std::string& key, const DhtEntry& entry) {
    std::size_t owner = successor_index(key_id(key));
    auto& dht = peers_[owner].dht;
    auto it = dht.find(key);
    if (it == dht.end()) return;
    auto& list = it->second;
    list.erase(std::remove(list.begin(), list.end(), entry), list.end());
    if (list.empty()) dht.erase(it);
    trace_line("REMOVE key=" + key + " peer=" + std::to_string(entry.peer));
}

const Segment* Network::find_segment(std::size_t peer_index, const std::string& name,
                                     std::size_t ordinal) const {
    const PeerState& peer = peers_[peer_index];
    Key key{name, ordinal};
    if (auto it = peer.store.find(key); it != peer.store.end()) return &it->second;
    if (auto it = peer.cache_index.find(key); it != peer.cache_index.end())
        return &*it->second;
    return nullptr;
}

std::size_t Network::cache_size(std::size_t peer_index) const {
    return peers_.at(peer_index).cache.size();
}

void Network::publish_segment(std::size_t peer_index, Segment seg) {
    PeerState& peer = peers_.at(peer_index);
    Key key{seg.series_name, seg.ordinal};
    DhtEntry entry{peer.id, seg.core_start, seg.core_end_real - 1};
    if (peer.store.count(key)) return;        // pinned base segment, already public
    if (peer.cache_index.count(key)) return;  // one slot per segment
    if (peer.cache.size() >= cfg_.cache_capacity) {
        Segment& victim = peer.cache.front();
        dht_remove(victim.series_name,
                   DhtEntry{peer.id, victim.core_start, victim.core_end_real - 1});
        trace_line("EVICT peer=" + std::to_string(peer_index) + " key=" +
                   victim.series_name + "#" + std::to_string(victim.ordinal));
        peer.cache_index.erase({victim.series_name, victim.ordinal});
        peer.cache.pop_front();
    }
    peer.cache.push_back(std::move(seg));
    peer.cache_index[key] = std::prev(peer.cache.end());
    dht_put(key.first, entry);
    if (cfg_.check_coherence) check_coherence_or_die("publish_segment");
}

std::size_t Network::base_holder(const std::string& name, std::size_t ordinal) const {
    return successor_index(key_id(name + "/" + std::to_string(ordinal)));
}

void Network::load_base(const TimeSeries& s) {
    if (base_length_.count(s.name()))
        throw EngineError("base series already loaded: " + s.name());
    if (s.start() != 0 || s.end() != n_ - 1)
        throw EngineError("base series must cover the whole calendar");
    for (Segment& seg : split(s, cfg_.segment)) {
        std::size_t holder = base_holder(s.name(), seg.ordinal);
        DhtEntry entry{peers_[holder].id, seg.core_start, seg.core_end_real - 1};
        trace_line("LOAD key=" + s.name() + "#" + std::to_string(seg.ordinal) +
                   " peer=" + std::to_string(holder));
        peers_[holder].store[{s.name(), seg.ordinal}] = std::move(seg);
        dht_put(s.name(), entry);
    }
    base_length_[s.name()] = n_;
    if (cfg_.check_coherence) check_coherence_or_die("load_base");
}

// ---------------------------------------------------------------------------
// Planner

std::unique_ptr<PlanNode> Network::annotate_node(const expr::ExprNode& node,
                                                 const Segment& frame,
                                                 std::mt19937_64& rng,
                                                 TimingProbe* probe) {
    auto pn = std::make_unique<PlanNode>();
    pn->node = &node;
    std::vector<DhtEntry> entries = lookup_accounted(expr::canonical_name(node), probe);
    std::vector<DhtEntry> covering;
    for (const DhtEntry& e : entries)
        if (e.start <= frame.core_start && e.end + 1 >= frame.core_end_real)
            covering.push_back(e);
    if (!covering.empty()) {
        // Several peers may hold the segment; pick one at random and drop
        // all descendants.
        pn->assign = covering[rng() % covering.size()];
        return pn;
    }
    for (const auto& child : node.children)
        pn->children.push_back(annotate_node(*child, frame, rng, probe));
    return pn;
}

AnnotatedQuery Network::annotate_impl(const expr::ExprPtr& exec_tree,
                                      const QueryInterval& interval,
                                      std::mt19937_64& rng, TimingProbe* probe) {
    AnnotatedQuery aq;
    aq.tree = exec_tree;
    aq.ordinals = locate(interval, cfg_.segment);
    for (std::size_t j : aq.ordinals) {
        Segment frame = segment_frame(j, cfg_.segment, n_);
        aq.plans.push_back(annotate_node(*exec_tree, frame, rng, probe));
    }
    return aq;
}

AnnotatedQuery Network::annotate(const expr::ExprPtr& query,
                                 const QueryInterval& interval) {
    if (interval.start > interval.end || interval.end >= n_)
        throw EngineError("query interval outside the calendar");
    expr::ExprPtr exec_tree = expr::rewrite_joins(expr::canonicalize(query));
    std::mt19937_64 rng(cfg_.seed);
    return annotate_impl(exec_tree, interval, rng, nullptr);
}

// ---------------------------------------------------------------------------
// Executor

namespace {

// Side effects of evaluating one segment, applied after the compute phase
// so parallel ordinals stay deterministic.
struct OrdinalLedger {
    std::vector<std::pair<std::size_t, Segment>> publishes; // (peer, segment)
    std::vector<std::pair<std::size_t, std::int64_t>> compute_ns; // (peer, cost)
    std::int64_t net_ns = 0;
    std::size_t cells_shipped = 0;
    std::uint64_t ops = 0;
    Segment root;
};

} // namespace

std::int64_t Network::op_cost_ns(const std::string& op, std::size_t cells) const {
    double ms = cfg_.compute_ms_per_entry;
    if (auto it = cfg_.op_cost_ms.find(op); it != cfg_.op_cost_ms.end()) ms = it->second;
    return std::llround(ms * 1e6 * double(cells));
}

ExecResult Network::execute(const expr::ExprPtr& query, const QueryInterval& interval,
                            std::uint64_t seed) {
    auto wall_begin = std::chrono::steady_clock::now();
    if (interval.start > interval.end || interval.end >= n_)
        throw EngineError("query interval outside the calendar");

    expr::ExprPtr canonical = expr::canonicalize(query);
    expr::ExprPtr exec_tree = expr::rewrite_joins(canonical);

    std::size_t need = expr::lookback(*exec_tree);
    if (need > cfg_.segment.overlap)
        throw InfeasibleWindow("expression needs " + std::to_string(need) +
                               " entries of lookback but segments overlap by " +
                               std::to_string(cfg_.segment.overlap));

    TimingProbe probe;
    std::mt19937_64 rng(seed);
    AnnotatedQuery aq = annotate_impl(exec_tree, interval, rng, &probe);

    const std::size_t client = cfg_.client_peer;
    auto index_of_peer = [&](PeerId id) {
        std::size_t idx = successor_index(id);
        if (idx >= peers_.size() || peers_[idx].id != id)
            throw EngineError("unknown peer id in DHT entry");
        return idx;
    };
    // An atomic chain runs on the peer holding its base segment; everything
    // else runs on the client.
    auto exec_peer = [&](const expr::ExprNode& node, std::size_t ordinal) {
        if (expr::is_atomic(node))
            return base_holder(expr::base_names(node).front(), ordinal);
        return client;
    };

    // Fetch every assigned segment up front; later evictions cannot
    // invalidate the plan snapshot.
    std::map<Key, Segment> fetched;
    std::size_t cells_shipped = 0;
    auto fetch_walk = [&](auto&& self, const PlanNode& pn, std::size_t ordinal,
                          std::size_t consumer) -> void {
        if (pn.assign) {
            std::string name = expr::canonical_name(*pn.node);
            std::size_t holder = index_of_peer(pn.assign->peer);
            const Segment* seg = find_segment(holder, name, ordinal);
            if (!seg)
                throw CoverageGap("peer " + std::to_string(holder) +
                                  " no longer holds " + name + "#" +
                                  std::to_string(ordinal));
            fetched.emplace(Key{name, ordinal}, *seg);
            if (holder != consumer) {
                probe.t_net_ns += std::int64_t(seg->values.size()) * net_ns_per_entry_;
                cells_shipped += seg->values.size();
                trace_line("SHIP key=" + name + "#" + std::to_string(ordinal) +
                           " from=" + std::to_string(holder) + " to=" +
                           std::to_string(consumer) + " cells=" +
                           std::to_string(seg->values.size()));
            }
            return;
        }
        std::size_t mine = exec_peer(*pn.node, ordinal);
        for (const auto& child : pn.children) self(self, *child, ordinal, mine);
    };
    for (std::size_t k = 0; k < aq.ordinals.size(); ++k)
        fetch_walk(fetch_walk, *aq.plans[k], aq.ordinals[k], client);

    // Compute phase: pure per-ordinal jobs collecting their side effects.
    auto run_ordinal = [&](std::size_t k) {
        const std::size_t ordinal = aq.ordinals[k];
        const PlanNode& plan = *aq.plans[k];
        OrdinalLedger ledger;
        std::map<std::string, Segment> memo;
        auto eval = [&](auto&& self, const PlanNode& pn) -> const Segment& {
            std::string name = expr::canonical_name(*pn.node);
            if (auto it = memo.find(name); it != memo.end()) return it->second;
            if (pn.assign)
                return memo.emplace(name, fetched.at(Key{name, ordinal})).first->second;
            if (pn.node->is_base())
                throw CoverageGap("base series " + name + " has no published segment " +
                                  std::to_string(ordinal));
            std::size_t mine = exec_peer(*pn.node, ordinal);
            std::vector<std::span<const Value>> child_values;
            child_values.reserve(pn.children.size());
            for (const auto& child : pn.children) {
                const Segment& cseg = self(self, *child);
                if (!child->assign) {
                    std::size_t producer = exec_peer(*child->node, ordinal);
                    if (producer != mine) {
                        ledger.net_ns +=
                            std::int64_t(cseg.values.size()) * net_ns_per_entry_;
                        ledger.cells_shipped += cseg.values.size();
                    }
                }
                child_values.push_back(cseg.values);
            }
            Segment seg = segment_frame(ordinal, cfg_.segment, n_);
            seg.series_name = name;
            seg.values = expr::apply_op(*pn.node, child_values);
            ledger.compute_ns.emplace_back(
                mine, op_cost_ns(expr::op_name(pn.node->op), seg.values.size()));
            ++ledger.ops;
            ledger.publishes.emplace_back(mine, seg);
            return memo.emplace(std::move(name), std::move(seg)).first->second;
        };
        const Segment& root = eval(eval, plan);
        // Result rows travel to the client.
        if (!plan.assign) {
            std::size_t producer = exec_peer(*plan.node, ordinal);
            if (producer != client) {
                std::size_t core_cells = root.core_end_real - root.core_start;
                ledger.net_ns += std::int64_t(core_cells) * net_ns_per_entry_;
                ledger.cells_shipped += core_cells;
            }
        }
        ledger.root = root;
        return ledger;
    };

    std::vector<OrdinalLedger> ledgers(aq.ordinals.size());
    if (cfg_.parallel && aq.ordinals.size() > 1) {
        std::atomic<std::size_t> next{0};
        std::size_t workers =
            std::min<std::size_t>(std::thread::hardware_concurrency() > 0
                                      ? std::thread::hardware_concurrency()
                                      : 2,
                                  aq.ordinals.size());
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                while (true) {
                    std::size_t k = next.fetch_add(1);
                    if (k >= aq.ordinals.size()) return;
                    try {
                        ledgers[k] = run_ordinal(k);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    } else {
        for (std::size_t k = 0; k < aq.ordinals.size(); ++k) ledgers[k] = run_ordinal(k);
    }

    // Merge in ordinal order: costs, shipping, publications.
    std::vector<std::int64_t> per_peer_ns(peers_.size(), 0);
    std::uint64_t ops = 0;
    std::vector<Segment> roots;
    roots.reserve(ledgers.size());
    for (OrdinalLedger& ledger : ledgers) {
        for (const auto& [peer, ns] : ledger.compute_ns) per_peer_ns[peer] += ns;
        probe.t_net_ns += ledger.net_ns;
        cells_shipped += ledger.cells_shipped;
        ops += ledger.ops;
        for (auto& [peer, seg] : ledger.publishes) {
            trace_line("TASK peer=" + std::to_string(peer) + " key=" + seg.series_name +
                       "#" + std::to_string(seg.ordinal) + " cells=" +
                       std::to_string(seg.values.size()));
            publish_segment(peer, std::move(seg));
        }
        roots.push_back(std::move(ledger.root));
    }
    ops_total_ += ops;
    // Peers work in parallel; the slowest one bounds the compute phase.
    probe.t_p_ns = *std::max_element(per_peer_ns.begin(), per_peer_ns.end());
    probe.t_q_ns = query_ship_ns_;

    TimeSeries assembled = assemble(roots, interval, calendar_);
    std::vector<Value> values(assembled.values().begin(), assembled.values().end());
    TimeSeries series(expr::canonical_name(canonical), calendar_, interval.start,
                      interval.end, std::move(values));

    ExecResult result{std::move(series), probe, ops, cells_shipped, 0.0};
    result.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - wall_begin)
                         .count();
    return result;
}

// ---------------------------------------------------------------------------
// Invariants

void Network::check_coherence_or_die(const char* when) const {
    if (!coherent())
        throw EngineError(std::string("cache/DHT coherence violated after ") + when);
}

bool Network::coherent() const {
    // Everything advertised must be held, everything held must be
    // advertised.
    std::multiset<std::tuple<std::string, PeerId, std::size_t, std::size_t>> advertised;
    for (const PeerState& peer : peers_)
        for (const auto& [key, entries] : peer.dht)
            for (const DhtEntry& e : entries)
                advertised.insert({key, e.peer, e.start, e.end});
    std::multiset<std::tuple<std::string, PeerId, std::size_t, std::size_t>> held;
    for (const PeerState& peer : peers_) {
        for (const auto& [key, seg] : peer.store)
            held.insert({key.first, peer.id, seg.core_start, seg.core_end_real - 1});
        for (const Segment& seg : peer.cache)
            held.insert({seg.series_name, peer.id, seg.core_start, seg.core_end_real - 1});
    }
    return advertised == held;
}

} // namespace tsms::p2p
