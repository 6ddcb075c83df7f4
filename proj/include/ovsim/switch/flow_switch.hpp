// flow_switch.hpp
//
// Virtual switch with a slow-path classifier and an exact-match fast-path
// cache. The first packet of a flow misses the cache and escalates to the
// classifier (an upcall); the decision is cached so later packets skip the
// slow path. MAC learning feeds a per-VNI FDB; remote MACs are served from
// a static neighbor table populated at topology-build time. An optional
// hardware table models NIC offload: hits there bypass the CPU entirely.
//
// Single-owner mutable state; distinct instances may live on distinct
// threads, one instance must not.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ovsim/net/frame.hpp"
#include "ovsim/switch/flow.hpp"

namespace ovsim {

struct FdbKey {
  std::optional<Vni> vni;
  MacAddress mac;
  auto operator<=>(const FdbKey&) const = default;
};

struct FdbEntry {
  PortId port;
  Tick last_seen = 0;
};

// Learned MAC-to-port map, scoped by VNI. At most one port per (vni, mac).
// Entries do not age out; runs are short relative to bridge ageing times.
class Fdb {
 public:
  // Returns true when the MAC moved to a different port.
  bool learn(std::optional<Vni> vni, MacAddress mac, PortId port, Tick now) {
    auto [it, inserted] = table_.try_emplace(FdbKey{vni, mac}, FdbEntry{port, now});
    if (inserted) return false;
    bool moved = it->second.port != port;
    it->second.port = port;
    it->second.last_seen = now;
    return moved;
  }

  std::optional<PortId> lookup(std::optional<Vni> vni, MacAddress mac) const {
    auto it = table_.find(FdbKey{vni, mac});
    if (it == table_.end()) return std::nullopt;
    return it->second.port;
  }

  const std::map<FdbKey, FdbEntry>& entries() const { return table_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::map<FdbKey, FdbEntry> table_;
};

struct FlowCacheEntry {
  FlowAction action;
  std::uint64_t hit_count = 0;
  Tick install_tick = 0;
  Tick last_hit_tick = 0;
};

struct SwitchOptions {
  std::size_t cache_capacity = 4096;
  Tick cache_idle_timeout = 1000;  // ticks; 10 ms at a 10 us tick
  bool hw_offload = false;
  std::size_t hw_table_capacity = 65536;
};

// Which path a packet would take, cheapest first.
enum class FastPath { hw, software, upcall };

class FlowSwitch {
 public:
  explicit FlowSwitch(SwitchOptions opt = {}) : opt_(opt) {}

  // -- topology wiring ------------------------------------------------

  void add_port(PortId id, PortRole role, std::optional<Vni> vni = {}) {
    ports_[id] = PortInfo{role, vni};
    if (role == PortRole::vtep) vtep_port_ = id;
    if (role == PortRole::uplink) uplink_port_ = id;
  }

  // Static neighbor entry: MAC reachable through a remote VTEP.
  void add_remote_mac(Vni vni, MacAddress mac, Ipv4Address remote_vtep) {
    remote_macs_[FdbKey{vni, mac}] = remote_vtep;
  }

  std::optional<Vni> port_vni(PortId id) const {
    auto it = ports_.find(id);
    if (it == ports_.end()) return std::nullopt;
    return it->second.vni;
  }
  std::optional<PortId> vtep_port() const { return vtep_port_; }
  std::optional<PortId> uplink_port() const { return uplink_port_; }

  // Member ports of a VNI, ascending. VTEP and uplink ports are not
  // members; they are reached through Encap/Decap actions.
  std::vector<PortId> member_ports(std::optional<Vni> vni) const {
    std::vector<PortId> out;
    for (const auto& [id, info] : ports_) {
      if (info.role != PortRole::endpoint && info.role != PortRole::representor)
        continue;
      if (info.vni == vni) out.push_back(id);
    }
    return out;
  }

  // -- slow path ------------------------------------------------------

  // Pure function of (key, fdb, static tables). Deterministic; enforces
  // VNI isolation: unicast output must land on a port attached to the
  // key's VNI, unknown destinations flood within the VNI only.
  FlowAction classify(const FlowKey& key) const {
    auto pit = ports_.find(key.in_port);
    if (pit == ports_.end()) return DropAction{DropReason::unattached};
    const PortInfo& in_info = pit->second;

    if (in_info.role == PortRole::uplink) return DecapAction{};
    if (in_info.role == PortRole::endpoint ||
        in_info.role == PortRole::representor) {
      // Access ports live in exactly the VNI they are attached to.
      if (in_info.vni != key.vni) return DropAction{DropReason::unattached};
    }

    if (key.dst.is_broadcast() || key.dst.is_multicast())
      return FloodAction{key.vni, key.in_port};

    if (auto port = fdb_.lookup(key.vni, key.dst)) {
      if (*port == key.in_port) return DropAction{DropReason::hairpin};
      if (port_vni(*port) == key.vni) return OutputAction{*port};
    }

    if (key.vni) {
      auto rit = remote_macs_.find(FdbKey{key.vni, key.dst});
      if (rit != remote_macs_.end() && uplink_port_)
        return EncapAction{*key.vni, rit->second, *uplink_port_};
    }

    return FloodAction{key.vni, key.in_port};
  }

  // -- fast path ------------------------------------------------------

  FastPath peek_path(const FlowKey& key) const {
    if (opt_.hw_offload && hw_table_.count(key) != 0) return FastPath::hw;
    if (cache_.count(key) != 0) return FastPath::software;
    return FastPath::upcall;
  }

  std::optional<FlowAction> hw_offload_lookup(const FlowKey& key) const {
    auto it = hw_table_.find(key);
    if (it == hw_table_.end()) return std::nullopt;
    return it->second;
  }

  struct BurstResult {
    FlowAction action;
    std::uint64_t upcalls = 0;
    std::uint64_t sw_hits = 0;
    std::uint64_t hw_hits = 0;
  };

  // Processes n packets sharing one key. At most the first packet misses;
  // the rest ride whichever fast path the upcall installed.
  BurstResult process_burst(const FlowKey& key, std::uint64_t n, Tick now) {
    BurstResult r{DropAction{DropReason::unattached}};
    if (n == 0) {
      r.action = classify(key);
      return r;
    }
    stats_.packets += n;

    if (opt_.hw_offload) {
      auto hit = hw_table_.find(key);
      if (hit != hw_table_.end()) {
        r.action = hit->second;
        r.hw_hits = n;
        stats_.hw_fast_path_hits += n;
        note_action(r.action, n);
        return r;
      }
    }

    auto cit = cache_.find(key);
    if (cit != cache_.end()) {
      cit->second.hit_count += n;
      cit->second.last_hit_tick = now;
      r.action = cit->second.action;
      r.sw_hits = n;
      stats_.fast_path_hits += n;
      note_action(r.action, n);
      return r;
    }

    // Miss: one upcall classifies, learns, installs.
    r.action = classify(key);
    r.upcalls = 1;
    stats_.upcalls += 1;
    maybe_learn(key, now);
    install(key, r.action, now);
    bool hw_installed = false;
    if (opt_.hw_offload && hw_table_.size() < opt_.hw_table_capacity) {
      hw_table_[key] = r.action;
      hw_installed = true;
    }
    if (n > 1) {
      if (hw_installed) {
        r.hw_hits = n - 1;
        stats_.hw_fast_path_hits += n - 1;
      } else {
        r.sw_hits = n - 1;
        stats_.fast_path_hits += n - 1;
        cache_[key].hit_count += n - 1;
      }
    }
    note_action(r.action, n);
    return r;
  }

  struct ProcessResult {
    FlowAction action;
    bool upcall = false;
  };

  ProcessResult process_key(const FlowKey& key, Tick now) {
    BurstResult r = process_burst(key, 1, now);
    return {r.action, r.upcalls != 0};
  }

  // Frame entry point for access ports: derives the key from the frame and
  // the port's VNI attachment. A multicast source address is malformed:
  // counted and dropped without an upcall.
  ProcessResult process_packet(PortId in_port, const InnerFrame& frame,
                               Tick now) {
    if (frame.eth.src.is_multicast()) {
      stats_.malformed += 1;
      stats_.drops[DropReason::malformed] += 1;
      return {DropAction{DropReason::malformed}, false};
    }
    FlowKey key{in_port, frame.eth.src, frame.eth.dst, frame.eth.ethertype,
                port_vni(in_port)};
    return process_key(key, now);
  }

  // Entry point for decapsulated frames arriving at the VTEP port.
  ProcessResult process_decapsulated(const InnerFrame& frame, Vni vni,
                                     Tick now) {
    if (frame.eth.src.is_multicast()) {
      stats_.malformed += 1;
      stats_.drops[DropReason::malformed] += 1;
      return {DropAction{DropReason::malformed}, false};
    }
    FlowKey key{vtep_port_.value_or(PortId{0}), frame.eth.src, frame.eth.dst,
                frame.eth.ethertype, vni};
    return process_key(key, now);
  }

  // -- learning -------------------------------------------------------

  // Records (vni, mac) -> port. A MAC moving ports overwrites the entry
  // and invalidates every cached decision that depended on it.
  void learn(std::optional<Vni> vni, MacAddress mac, PortId port, Tick now) {
    bool moved = fdb_.learn(vni, mac, port, now);
    if (moved) invalidate_dst(vni, mac);
  }

  // -- cache hygiene ----------------------------------------------------

  // Drops idle entries, re-runs the classifier under every cached key and
  // removes entries whose decision went stale. Both tables revalidate.
  void evict_and_revalidate(Tick now) {
    for (auto it = cache_.begin(); it != cache_.end();) {
      Tick idle = now - it->second.last_hit_tick;
      if (idle > opt_.cache_idle_timeout || classify(it->first) != it->second.action)
        it = cache_.erase(it);
      else
        ++it;
    }
    for (auto it = hw_table_.begin(); it != hw_table_.end();) {
      if (classify(it->first) != it->second)
        it = hw_table_.erase(it);
      else
        ++it;
    }
    enforce_capacity();
  }

  // -- introspection ----------------------------------------------------

  const SwitchStats& stats() const { return stats_; }
  const Fdb& fdb() const { return fdb_; }
  const std::map<FlowKey, FlowCacheEntry>& cache() const { return cache_; }
  std::size_t hw_table_size() const { return hw_table_.size(); }
  const SwitchOptions& options() const { return opt_; }

  // Structured-text state dump. One record per line, keys sorted, suitable
  // for golden tests. Schema documented in the README.
  void dump(std::ostream& os) const {
    os << "ports " << ports_.size() << "\n";
    for (const auto& [id, info] : ports_) {
      os << "port " << id.value << " role=" << to_string(info.role) << " vni=";
      if (info.vni)
        os << *info.vni;
      else
        os << "-";
      os << "\n";
    }
    os << "fdb " << fdb_.size() << "\n";
    for (const auto& [k, e] : fdb_.entries()) {
      os << "fdb_entry vni=";
      if (k.vni)
        os << *k.vni;
      else
        os << "-";
      os << " mac=" << k.mac.str() << " port=" << e.port.value
         << " last_seen=" << e.last_seen << "\n";
    }
    os << "cache " << cache_.size() << "\n";
    for (const auto& [k, e] : cache_) {
      os << "cache_entry " << key_str(k) << " action=" << to_string(e.action)
         << " hits=" << e.hit_count << " installed=" << e.install_tick
         << " last_hit=" << e.last_hit_tick << "\n";
    }
    os << "hw_table " << hw_table_.size() << "\n";
    for (const auto& [k, a] : hw_table_)
      os << "hw_entry " << key_str(k) << " action=" << to_string(a) << "\n";
    os << "stats packets=" << stats_.packets << " upcalls=" << stats_.upcalls
       << " fast_path_hits=" << stats_.fast_path_hits
       << " hw_fast_path_hits=" << stats_.hw_fast_path_hits
       << " floods=" << stats_.flood_count
       << " malformed=" << stats_.malformed;
    for (const auto& [reason, count] : stats_.drops)
      os << " drop_" << to_string(reason) << "=" << count;
    os << "\n";
  }

 private:
  struct PortInfo {
    PortRole role;
    std::optional<Vni> vni;
  };

  static std::string key_str(const FlowKey& k) {
    std::ostringstream os;
    os << "in_port=" << k.in_port.value << " src=" << k.src.str()
       << " dst=" << k.dst.str() << " ethertype=" << k.ethertype << " vni=";
    if (k.vni)
      os << *k.vni;
    else
      os << "-";
    return os.str();
  }

  void note_action(const FlowAction& a, std::uint64_t n) {
    if (std::holds_alternative<FloodAction>(a)) stats_.flood_count += n;
    if (const auto* d = std::get_if<DropAction>(&a)) stats_.drops[d->reason] += n;
  }

  void maybe_learn(const FlowKey& key, Tick now) {
    auto it = ports_.find(key.in_port);
    if (it == ports_.end()) return;
    if (it->second.role != PortRole::endpoint &&
        it->second.role != PortRole::representor)
      return;  // remote MACs stay in the static neighbor table
    if (key.src.is_broadcast() || key.src.is_multicast()) return;
    learn(key.vni, key.src, key.in_port, now);
  }

  void install(const FlowKey& key, const FlowAction& action, Tick now) {
    if (cache_.size() >= opt_.cache_capacity) evict_least_recently_hit();
    cache_[key] = FlowCacheEntry{action, 0, now, now};
  }

  void evict_least_recently_hit() {
    if (cache_.empty()) return;
    auto victim = cache_.begin();
    for (auto it = cache_.begin(); it != cache_.end(); ++it)
      if (it->second.last_hit_tick < victim->second.last_hit_tick) victim = it;
    cache_.erase(victim);  // ties resolve to the smallest key
  }

  void enforce_capacity() {
    while (cache_.size() > opt_.cache_capacity) evict_least_recently_hit();
  }

  void invalidate_dst(std::optional<Vni> vni, MacAddress mac) {
    for (auto it = cache_.begin(); it != cache_.end();) {
      if (it->first.vni == vni && it->first.dst == mac)
        it = cache_.erase(it);
      else
        ++it;
    }
    for (auto it = hw_table_.begin(); it != hw_table_.end();) {
      if (it->first.vni == vni && it->first.dst == mac)
        it = hw_table_.erase(it);
      else
        ++it;
    }
  }

  SwitchOptions opt_;
  std::map<PortId, PortInfo> ports_;
  std::optional<PortId> vtep_port_;
  std::optional<PortId> uplink_port_;
  std::map<FdbKey, Ipv4Address> remote_macs_;
  Fdb fdb_;
  std::map<FlowKey, FlowCacheEntry> cache_;
  std::map<FlowKey, FlowAction> hw_table_;
  SwitchStats stats_;
};

}  // namespace ovsim
