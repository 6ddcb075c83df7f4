// topology.hpp
//
// Experiment world: hosts, endpoints, virtual networks, and the per-mode
// packet path. Topologies are immutable after build; switch instances are
// manufactured from them, never stored in them.

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ovsim/core.hpp"
#include "ovsim/net/vxlan.hpp"
#include "ovsim/switch/flow_switch.hpp"

namespace ovsim {

struct PoolSpec {
  int cores = 32;
  double freq_hz = 2.5e9;

  double cycles_per_tick(double tick_seconds) const {
    return cores * freq_hz * tick_seconds;
  }
};

struct Host {
  HostIndex id = 0;
  PoolSpec host_pool;
  std::optional<PoolSpec> dpu_pool;  // present iff dpu_offload
  VtepAddress vtep;
  double uplink_bits_per_s = 100e9;
};

enum class EndpointRole { none, client, server };

struct Endpoint {
  EndpointIndex id = 0;
  HostIndex host = 0;
  MacAddress mac;
  std::vector<Vni> vnis;  // sorted, unique
  EndpointRole role = EndpointRole::none;
  std::optional<EndpointIndex> peer;
  PortId port;  // attachment point on the host's switch

  bool in_vni(Vni v) const {
    return std::binary_search(vnis.begin(), vnis.end(), v);
  }
};

struct VirtualNetwork {
  Vni vni = 0;
  std::vector<EndpointIndex> members;
  std::vector<HostIndex> member_vteps;
};

struct PipelineStage {
  StageKind kind = StageKind::wire;
  PoolKind pool = PoolKind::none;
  HostIndex host = 0;  // whose pool; meaningless when pool == none

  auto operator<=>(const PipelineStage&) const = default;
};

using Pipeline = std::vector<PipelineStage>;

struct TopologyParams {
  PlacementMode mode = PlacementMode::host_overlay;
  int pairs = 1;
  int vni_count = 1;  // pairs join VNIs round-robin
  Vni base_vni = 1;
  PoolSpec host_pool{32, 2.5e9};
  PoolSpec dpu_pool{8, 2.0e9};
  double link_gbps = 100.0;
  SwitchOptions switch_options;
};

class Topology {
 public:
  PlacementMode mode() const { return mode_; }
  const std::vector<Host>& hosts() const { return hosts_; }
  const std::vector<Endpoint>& endpoints() const { return endpoints_; }
  const std::vector<VirtualNetwork>& networks() const { return networks_; }
  const SwitchOptions& switch_options() const { return switch_options_; }

  const Endpoint& endpoint(EndpointIndex i) const { return endpoints_.at(i); }
  const Host& host(HostIndex i) const { return hosts_.at(i); }

  std::optional<Vni> shared_vni(EndpointIndex a, EndpointIndex b) const {
    const auto& ea = endpoints_.at(a).vnis;
    const auto& eb = endpoints_.at(b).vnis;
    std::vector<Vni> common;
    std::set_intersection(ea.begin(), ea.end(), eb.begin(), eb.end(),
                          std::back_inserter(common));
    if (common.empty()) return std::nullopt;
    return common.front();
  }

  std::optional<HostIndex> host_by_vtep(Ipv4Address ip) const {
    for (const auto& h : hosts_)
      if (h.vtep.ip == ip) return h.id;
    return std::nullopt;
  }

  // Access ports: an endpoint owns a small range starting at its base
  // port, one port per VNI it joined (native endpoints use the base).
  PortId endpoint_port(EndpointIndex i, std::optional<Vni> vni = {}) const {
    const Endpoint& e = endpoints_.at(i);
    if (!vni || e.vnis.empty()) return e.port;
    auto it = std::find(e.vnis.begin(), e.vnis.end(), *vni);
    if (it == e.vnis.end())
      throw std::invalid_argument("endpoint not a member of vni");
    return PortId{e.port.value +
                  static_cast<std::uint32_t>(it - e.vnis.begin())};
  }

  std::optional<EndpointIndex> endpoint_by_port(HostIndex host,
                                                PortId port) const {
    for (const auto& e : endpoints_) {
      if (e.host != host) continue;
      std::uint32_t span =
          e.vnis.empty() ? 1 : static_cast<std::uint32_t>(e.vnis.size());
      if (port.value >= e.port.value && port.value < e.port.value + span)
        return e.id;
    }
    return std::nullopt;
  }

  std::optional<EndpointIndex> endpoint_by_mac(MacAddress mac) const {
    for (const auto& e : endpoints_)
      if (e.mac == mac) return e.id;
    return std::nullopt;
  }

  bool has_switches() const { return mode_ != PlacementMode::host_direct; }

  // Builds the bridge for one host: access ports for local endpoints, a
  // VTEP port, an uplink port, and the statically distributed remote MAC
  // table. In dpu_offload the same bridge lives on the DPU, the access
  // ports are VF representors, and the hardware fast path is on.
  FlowSwitch make_switch(HostIndex h) const {
    if (!has_switches())
      throw std::logic_error("host_direct topology has no switches");
    SwitchOptions opt = switch_options_;
    if (mode_ == PlacementMode::dpu_offload) opt.hw_offload = true;
    FlowSwitch sw(opt);
    PortRole access = mode_ == PlacementMode::dpu_offload
                          ? PortRole::representor
                          : PortRole::endpoint;
    for (const auto& e : endpoints_) {
      if (e.host != h) continue;
      // One access port per (endpoint, vni); native endpoints get one.
      if (e.vnis.empty()) {
        sw.add_port(e.port, access, std::nullopt);
        continue;
      }
      for (std::size_t k = 0; k < e.vnis.size(); ++k)
        sw.add_port(PortId{e.port.value + static_cast<std::uint32_t>(k)},
                    access, e.vnis[k]);
    }
    sw.add_port(kVtepPort, PortRole::vtep);
    sw.add_port(kUplinkPort, PortRole::uplink);
    // Neighbor state is distributed out-of-band: remote MACs point at
    // their VTEPs and local MACs are pre-learned, so no flood-and-learn
    // warmup is needed.
    for (const auto& e : endpoints_) {
      if (e.host == h) {
        if (e.vnis.empty()) {
          sw.learn(std::nullopt, e.mac, e.port, 0);
        } else {
          for (std::size_t k = 0; k < e.vnis.size(); ++k)
            sw.learn(e.vnis[k], e.mac,
                     PortId{e.port.value + static_cast<std::uint32_t>(k)}, 0);
        }
        continue;
      }
      for (Vni v : e.vnis) sw.add_remote_mac(v, e.mac, hosts_[e.host].vtep.ip);
    }
    return sw;
  }

  // endpoint x endpoint reachability: true iff distinct endpoints share a
  // VNI. The delivery oracle for isolation tests.
  std::vector<std::vector<bool>> validate_isolation() const {
    std::size_t n = endpoints_.size();
    std::vector<std::vector<bool>> m(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j)
          m[i][j] = shared_vni(static_cast<EndpointIndex>(i),
                               static_cast<EndpointIndex>(j))
                        .has_value();
    return m;
  }

  static constexpr PortId kVtepPort{10};
  static constexpr PortId kUplinkPort{11};

 private:
  friend class TopologyBuilder;

  PlacementMode mode_ = PlacementMode::host_overlay;
  std::vector<Host> hosts_;
  std::vector<Endpoint> endpoints_;
  std::vector<VirtualNetwork> networks_;
  SwitchOptions switch_options_;
};

class TopologyBuilder {
 public:
  TopologyBuilder& mode(PlacementMode m) {
    mode_ = m;
    return *this;
  }
  TopologyBuilder& switch_options(SwitchOptions opt) {
    switch_options_ = opt;
    return *this;
  }

  HostIndex add_host(PoolSpec host_pool = {32, 2.5e9},
                     PoolSpec dpu_pool = {8, 2.0e9},
                     double link_gbps = 100.0) {
    Host h;
    h.id = static_cast<HostIndex>(hosts_.size());
    h.host_pool = host_pool;
    if (mode_ == PlacementMode::dpu_offload) h.dpu_pool = dpu_pool;
    h.vtep.ip = Ipv4Address::from_octets(
        10, 0, 0, static_cast<std::uint8_t>(h.id + 1));
    h.vtep.mac = MacAddress::local(0xee, 0, static_cast<std::uint16_t>(h.id));
    h.uplink_bits_per_s = link_gbps * 1e9;
    hosts_.push_back(h);
    return h.id;
  }

  EndpointIndex add_endpoint(HostIndex host, std::vector<Vni> vnis,
                             EndpointRole role = EndpointRole::none,
                             std::optional<EndpointIndex> peer = {}) {
    Endpoint e;
    e.id = static_cast<EndpointIndex>(endpoints_.size());
    e.host = host;
    std::sort(vnis.begin(), vnis.end());
    vnis.erase(std::unique(vnis.begin(), vnis.end()), vnis.end());
    e.vnis = std::move(vnis);
    e.role = role;
    e.peer = peer;
    e.mac = MacAddress::local(static_cast<std::uint8_t>(host), 0,
                              static_cast<std::uint16_t>(e.id));
    e.port = PortId{100 + 8 * static_cast<std::uint32_t>(e.id)};
    endpoints_.push_back(e);
    return e.id;
  }

  Topology build() {
    validate();
    Topology t;
    t.mode_ = mode_;
    t.hosts_ = hosts_;
    t.endpoints_ = endpoints_;
    t.switch_options_ = switch_options_;

    std::set<Vni> vnis;
    for (const auto& e : endpoints_)
      for (Vni v : e.vnis) vnis.insert(v);
    for (Vni v : vnis) {
      VirtualNetwork net;
      net.vni = v;
      std::set<HostIndex> vteps;
      for (const auto& e : endpoints_)
        if (e.in_vni(v)) {
          net.members.push_back(e.id);
          vteps.insert(e.host);
        }
      net.member_vteps.assign(vteps.begin(), vteps.end());
      t.networks_.push_back(net);
    }
    return t;
  }

 private:
  void validate() const {
    if (hosts_.empty()) throw std::invalid_argument("topology: no hosts");
    std::set<MacAddress> macs;
    for (const auto& e : endpoints_) {
      if (e.host < 0 || e.host >= static_cast<HostIndex>(hosts_.size()))
        throw std::invalid_argument("topology: endpoint on unknown host");
      for (Vni v : e.vnis)
        if (v > kVniMax) throw std::invalid_argument("topology: vni out of range");
      if (!macs.insert(e.mac).second)
        throw std::invalid_argument("topology: duplicate endpoint mac");
      if (e.peer) {
        const Endpoint& p = endpoints_.at(*e.peer);
        if (p.host == e.host)
          throw std::invalid_argument(
              "topology: client/server peers must live on different hosts");
      }
    }
  }

  PlacementMode mode_ = PlacementMode::host_overlay;
  SwitchOptions switch_options_;
  std::vector<Host> hosts_;
  std::vector<Endpoint> endpoints_;
};

// Standard two-host world: N client endpoints on host 0 paired with N
// servers on host 1. Pairs join VNIs round-robin; the default is one
// shared network.
inline Topology build_topology(const TopologyParams& p) {
  if (p.pairs < 1) throw std::invalid_argument("topology: pair count must be >= 1");
  if (p.vni_count < 1)
    throw std::invalid_argument("topology: vni count must be >= 1");
  if (p.base_vni + static_cast<Vni>(p.vni_count) - 1 > kVniMax)
    throw std::invalid_argument("topology: vni out of range");

  TopologyBuilder b;
  b.mode(p.mode);
  b.switch_options(p.switch_options);
  HostIndex a = b.add_host(p.host_pool, p.dpu_pool, p.link_gbps);
  HostIndex z = b.add_host(p.host_pool, p.dpu_pool, p.link_gbps);
  for (int i = 0; i < p.pairs; ++i) {
    Vni v = p.base_vni + static_cast<Vni>(i % p.vni_count);
    b.add_endpoint(a, {v}, EndpointRole::client,
                   static_cast<EndpointIndex>(p.pairs + i));
  }
  for (int i = 0; i < p.pairs; ++i) {
    Vni v = p.base_vni + static_cast<Vni>(i % p.vni_count);
    b.add_endpoint(z, {v}, EndpointRole::server,
                   static_cast<EndpointIndex>(i));
  }
  return b.build();
}

namespace detail {
inline StageKind mirror(StageKind k) {
  switch (k) {
    case StageKind::endpoint_tx: return StageKind::endpoint_rx;
    case StageKind::endpoint_rx: return StageKind::endpoint_tx;
    case StageKind::nic_tx: return StageKind::nic_rx;
    case StageKind::nic_rx: return StageKind::nic_tx;
    case StageKind::vxlan_encap: return StageKind::vxlan_decap;
    case StageKind::vxlan_decap: return StageKind::vxlan_encap;
    default: return k;
  }
}
}  // namespace detail

// Ordered charged path from src to dst for the topology's placement mode.
inline Pipeline build_pipeline(const Topology& t, EndpointIndex src,
                               EndpointIndex dst) {
  if (!t.shared_vni(src, dst))
    throw std::invalid_argument("pipeline: endpoints share no vni");
  const HostIndex s = t.endpoint(src).host;
  const HostIndex d = t.endpoint(dst).host;
  const PoolKind H = PoolKind::host;
  const PoolKind D = PoolKind::dpu;
  const PoolKind N = PoolKind::none;
  Pipeline p;
  auto st = [&](StageKind k, PoolKind pool, HostIndex h) {
    p.push_back(PipelineStage{k, pool, h});
  };
  // Direction-neutral placeholder so forward and reverse pipelines mirror.
  auto wire = [&] { st(StageKind::wire, N, std::min(s, d)); };

  st(StageKind::endpoint_tx, H, s);
  switch (t.mode()) {
    case PlacementMode::host_direct:
      if (s != d) {
        st(StageKind::nic_tx, H, s);
        wire();
        st(StageKind::nic_rx, H, d);
      }
      break;
    case PlacementMode::host_overlay:
      st(StageKind::bridge_switch, H, s);
      if (s != d) {
        st(StageKind::vxlan_encap, H, s);
        st(StageKind::nic_tx, H, s);
        wire();
        st(StageKind::nic_rx, H, d);
        st(StageKind::vxlan_decap, H, d);
        st(StageKind::bridge_switch, H, d);
      }
      break;
    case PlacementMode::dpu_offload:
      st(StageKind::vf_dma, H, s);
      st(StageKind::representor, D, s);
      st(StageKind::bridge_switch, D, s);
      if (s != d) {
        st(StageKind::vxlan_encap, D, s);
        st(StageKind::nic_tx, D, s);
        wire();
        st(StageKind::nic_rx, D, d);
        st(StageKind::vxlan_decap, D, d);
        st(StageKind::bridge_switch, D, d);
      }
      st(StageKind::representor, D, d);
      st(StageKind::vf_dma, H, d);
      break;
  }
  st(StageKind::endpoint_rx, H, d);
  return p;
}

inline Pipeline mirrored(const Pipeline& p) {
  Pipeline out(p.rbegin(), p.rend());
  for (auto& s : out) s.kind = detail::mirror(s.kind);
  return out;
}

}  // namespace ovsim
