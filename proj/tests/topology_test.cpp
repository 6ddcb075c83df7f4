#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "ovsim/topo/dataplane.hpp"
#include "ovsim/topo/topology.hpp"

using namespace ovsim;

namespace {

int count_stages(const Pipeline& p, StageKind k) {
  return static_cast<int>(
      std::count_if(p.begin(), p.end(),
                    [k](const PipelineStage& s) { return s.kind == k; }));
}

int count_pool(const Pipeline& p, PoolKind pool) {
  return static_cast<int>(
      std::count_if(p.begin(), p.end(),
                    [pool](const PipelineStage& s) { return s.pool == pool; }));
}

// Two networks spread over two hosts: host 0 runs three containers (two in
// VNI 1, one in VNI 2), host 1 runs one container in VNI 1.
Topology two_network_fixture(PlacementMode mode = PlacementMode::host_overlay) {
  TopologyBuilder b;
  b.mode(mode);
  b.add_host();
  b.add_host();
  b.add_endpoint(0, {1});  // 0
  b.add_endpoint(0, {1});  // 1
  b.add_endpoint(0, {2});  // 2
  b.add_endpoint(1, {1});  // 3
  return b.build();
}

}  // namespace

TEST_CASE("single pair overlay topology", "[topology]") {
  Topology t = build_topology({.mode = PlacementMode::host_overlay, .pairs = 1});
  CHECK(t.hosts().size() == 2);
  REQUIRE(t.endpoints().size() == 2);
  REQUIRE(t.networks().size() == 1);
  CHECK(t.networks()[0].vni == 1);
  CHECK(t.networks()[0].members == std::vector<EndpointIndex>{0, 1});
  CHECK(t.networks()[0].member_vteps == std::vector<HostIndex>{0, 1});
  CHECK(t.endpoint(0).role == EndpointRole::client);
  CHECK(t.endpoint(1).role == EndpointRole::server);
  CHECK(t.endpoint(0).peer == std::optional<EndpointIndex>(1));
  CHECK_FALSE(t.host(0).dpu_pool.has_value());

  Pipeline p = build_pipeline(t, 0, 1);
  CHECK(count_stages(p, StageKind::bridge_switch) == 2);
  CHECK(count_stages(p, StageKind::vxlan_encap) == 1);
  CHECK(count_stages(p, StageKind::vxlan_decap) == 1);
  CHECK(count_pool(p, PoolKind::dpu) == 0);
}

TEST_CASE("mac addresses are deterministic and locally administered",
          "[topology]") {
  Topology a = build_topology({.mode = PlacementMode::host_overlay, .pairs = 3});
  Topology b = build_topology({.mode = PlacementMode::host_overlay, .pairs = 3});
  std::set<MacAddress> seen;
  for (const auto& e : a.endpoints()) {
    CHECK(e.mac.is_locally_administered());
    CHECK_FALSE(e.mac.is_multicast());
    CHECK(e.mac == b.endpoint(e.id).mac);
    CHECK(seen.insert(e.mac).second);
  }
}

TEST_CASE("dpu offload creates one representor per endpoint", "[topology]") {
  Topology t = build_topology({.mode = PlacementMode::dpu_offload, .pairs = 20});
  REQUIRE(t.endpoints().size() == 40);
  CHECK(t.host(0).dpu_pool.has_value());

  for (HostIndex h : {0, 1}) {
    FlowSwitch sw = t.make_switch(h);
    int representors = 0;
    for (const auto& e : t.endpoints()) {
      if (e.host != h) continue;
      if (sw.port_vni(t.endpoint_port(e.id, e.vnis.front())).has_value())
        ++representors;
    }
    CHECK(representors == 20);
    CHECK(sw.member_ports(1).size() == 20);
    CHECK(sw.options().hw_offload);
  }

  // No representor stages outside dpu mode.
  Topology h = build_topology({.mode = PlacementMode::host_overlay, .pairs = 2});
  Pipeline p = build_pipeline(h, 0, 2);
  CHECK(count_stages(p, StageKind::representor) == 0);
  CHECK(count_stages(build_pipeline(t, 0, 20), StageKind::representor) == 2);
}

TEST_CASE("two-network fixture matches its membership sets", "[topology]") {
  Topology t = two_network_fixture();
  REQUIRE(t.networks().size() == 2);
  CHECK(t.networks()[0].vni == 1);
  CHECK(t.networks()[0].members == std::vector<EndpointIndex>{0, 1, 3});
  CHECK(t.networks()[1].vni == 2);
  CHECK(t.networks()[1].members == std::vector<EndpointIndex>{2});
  CHECK(t.networks()[0].member_vteps == std::vector<HostIndex>{0, 1});

  // Cross-host unicast inside VNI 1 classifies to an encapsulation.
  FlowSwitch sw = t.make_switch(0);
  FlowKey k{t.endpoint_port(0, 1), t.endpoint(0).mac, t.endpoint(3).mac,
            Dataplane::kPayloadEthertype, 1};
  FlowAction a = sw.classify(k);
  REQUIRE(std::holds_alternative<EncapAction>(a));
  CHECK(std::get<EncapAction>(a).vni == 1);
  CHECK(std::get<EncapAction>(a).remote_vtep == t.host(1).vtep.ip);
}

TEST_CASE("isolation matrix is shared-vni membership", "[topology]") {
  Topology t = two_network_fixture();
  auto m = t.validate_isolation();
  // VNI 2's only member reaches nobody and nobody reaches it.
  for (int j = 0; j < 4; ++j) {
    CHECK_FALSE(m[2][j]);
    CHECK_FALSE(m[j][2]);
  }
  CHECK(m[0][1]);
  CHECK(m[0][3]);
  CHECK(m[1][3]);
  CHECK_FALSE(m[0][0]);
}

TEST_CASE("single-vni default matrix is all true off-diagonal", "[topology]") {
  Topology t = build_topology({.mode = PlacementMode::host_overlay, .pairs = 3});
  auto m = t.validate_isolation();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      CHECK(m[i][j] == (i != j));
}

TEST_CASE("an endpoint in no network reaches nothing", "[topology]") {
  TopologyBuilder b;
  b.add_host();
  b.add_host();
  b.add_endpoint(0, {});
  b.add_endpoint(0, {1});
  b.add_endpoint(1, {1});
  Topology t = b.build();
  auto m = t.validate_isolation();
  for (std::size_t j = 0; j < m.size(); ++j) {
    CHECK_FALSE(m[0][j]);
    CHECK_FALSE(m[j][0]);
  }
}

TEST_CASE("pipelines per mode carry the expected stages", "[topology]") {
  auto direct =
      build_topology({.mode = PlacementMode::host_direct, .pairs = 1});
  auto overlay =
      build_topology({.mode = PlacementMode::host_overlay, .pairs = 1});
  auto dpu = build_topology({.mode = PlacementMode::dpu_offload, .pairs = 1});

  Pipeline pd = build_pipeline(direct, 0, 1);
  Pipeline po = build_pipeline(overlay, 0, 1);
  Pipeline pp = build_pipeline(dpu, 0, 1);

  CHECK(count_stages(pd, StageKind::vxlan_encap) == 0);
  CHECK(count_stages(pd, StageKind::vxlan_decap) == 0);
  CHECK(count_stages(po, StageKind::vxlan_encap) == 1);
  CHECK(count_stages(po, StageKind::vxlan_decap) == 1);

  // DPU mode leaves only endpoint and VF-DMA work on the host pools.
  for (const auto& s : pp) {
    if (s.pool != PoolKind::host) continue;
    bool allowed = s.kind == StageKind::endpoint_tx ||
                   s.kind == StageKind::endpoint_rx ||
                   s.kind == StageKind::vf_dma;
    CHECK(allowed);
  }

  // Host-charged stage counts order the modes.
  CHECK(count_pool(po, PoolKind::host) > count_pool(pd, PoolKind::host));
  CHECK(count_pool(pp, PoolKind::host) < count_pool(po, PoolKind::host));
}

TEST_CASE("reverse pipeline is the stage-wise mirror", "[topology]") {
  for (auto mode : {PlacementMode::host_direct, PlacementMode::host_overlay,
                    PlacementMode::dpu_offload}) {
    Topology t = build_topology({.mode = mode, .pairs = 2});
    for (auto [s, d] : {std::pair{0, 2}, std::pair{1, 3}}) {
      Pipeline fwd = build_pipeline(t, s, d);
      Pipeline rev = build_pipeline(t, d, s);
      CHECK(mirrored(fwd) == rev);
    }
  }
}

TEST_CASE("build validation rejects bad configs", "[topology]") {
  CHECK_THROWS_AS(build_topology({.pairs = 0}), std::invalid_argument);
  CHECK_THROWS_AS(
      build_topology({.pairs = 1, .vni_count = 1, .base_vni = kVniMax + 1}),
      std::invalid_argument);

  TopologyBuilder same_host;
  same_host.add_host();
  same_host.add_endpoint(0, {1}, EndpointRole::client, 1);
  same_host.add_endpoint(0, {1}, EndpointRole::server, 0);
  CHECK_THROWS_AS(same_host.build(), std::invalid_argument);

  Topology t = build_topology({.pairs = 2, .vni_count = 2});
  CHECK_THROWS_AS(build_pipeline(t, 0, 3), std::invalid_argument);
}

TEST_CASE("dataplane delivers within the vni and nowhere else",
          "[topology]") {
  Topology t = two_network_fixture();
  Dataplane dp(t);
  auto matrix = t.validate_isolation();

  // Unicast every ordered pair; delivery must match the oracle.
  for (const auto& s : t.endpoints()) {
    for (const auto& d : t.endpoints()) {
      if (s.id == d.id) continue;
      auto got = dp.send(s.id, d.mac, {0xaa}, 1);
      bool delivered = false;
      for (const auto& dv : got) {
        delivered |= dv.endpoint == d.id;
        // no cross-vni deliveries, ever
        CHECK(t.shared_vni(s.id, dv.endpoint).has_value());
      }
      CHECK(delivered == matrix[s.id][d.id]);
    }
  }
}

TEST_CASE("broadcast floods the vni but never echoes", "[topology]") {
  Topology t = two_network_fixture();
  Dataplane dp(t);
  auto got = dp.send(0, MacAddress::broadcast(), {0x01}, 1);
  std::set<EndpointIndex> reached;
  for (const auto& dv : got) reached.insert(dv.endpoint);
  CHECK(reached.count(0) == 0);  // no echo
  CHECK(reached.count(1) == 1);  // same host, same vni
  CHECK(reached.count(2) == 0);  // other vni
  // Flooding is local under static neighbor distribution; the remote
  // member is reached by unicast, not broadcast.
  CHECK(reached.count(3) == 0);
}

TEST_CASE("dataplane wire frames are valid vxlan", "[topology]") {
  Topology t = build_topology({.mode = PlacementMode::host_overlay, .pairs = 1});
  Dataplane dp(t);
  auto got = dp.send(0, t.endpoint(1).mac, Bytes(100, 0x42), 1);
  REQUIRE(got.size() == 1);
  CHECK(got[0].endpoint == 1);
  REQUIRE(dp.wire_tap().size() == 1);
  const OuterFrame& w = dp.wire_tap()[0].frame;
  CHECK(w.vxlan.vni == 1);
  CHECK(w.wire_size() == got[0].frame.wire_size() + 50);
  CHECK(w.ip.src == t.host(0).vtep.ip);
  CHECK(w.ip.dst == t.host(1).vtep.ip);
}

TEST_CASE("delivery works identically in dpu mode", "[topology]") {
  Topology t = build_topology({.mode = PlacementMode::dpu_offload, .pairs = 2});
  Dataplane dp(t);
  auto got = dp.send(1, t.endpoint(3).mac, {0x1}, 1);
  REQUIRE(got.size() == 1);
  CHECK(got[0].endpoint == 3);
  // hardware path engaged on the second frame
  dp.send(1, t.endpoint(3).mac, {0x2}, 2);
  CHECK(dp.host_switch(0).stats().hw_fast_path_hits >= 1);
}
