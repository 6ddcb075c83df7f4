// cost_model.hpp
//
// Per-stage cycle charges and noise accounting knobs. The magnitudes are
// calibration parameters, not measurements: run the calibration against
// throughput anchors before trusting absolute outputs. Orderings between
// placement modes hold for the default vector.

#pragma once

#include <stdexcept>

#include "ovsim/core.hpp"

namespace ovsim {

struct CostModel {
  // cycles per packet, by stage kind
  double endpoint_tx = 300;
  double endpoint_rx = 300;
  double nic_tx = 200;
  double nic_rx = 200;
  double bridge_switch = 350;
  double vxlan_encap = 500;
  double vxlan_decap = 500;
  double vf_dma = 150;
  double representor = 100;

  // slow-path escalation
  double upcall_cost = 20000;       // cycles, charged to the switch's pool
  int upcall_context_switches = 2;  // per upcall

  // message-level accounting
  double syscall_cost = 0;          // cycles per message, sender side
  int wakeup_context_switches = 1;  // per message per receive wakeup point
  // Sender-side syscall return counts as a switch only under pool
  // oversubscription; off by default.
  bool sender_syscall_switch_when_oversubscribed = false;

  // interrupts
  double interrupt_cost = 4000;       // cycles per interrupt
  int interrupt_coalesce_batch = 64;  // packets per interrupt (B)

  // hardware fast path: charged to no pool
  double hw_fastpath_cost = 0;

  double stage_cost(StageKind k) const {
    switch (k) {
      case StageKind::endpoint_tx: return endpoint_tx;
      case StageKind::endpoint_rx: return endpoint_rx;
      case StageKind::nic_tx: return nic_tx;
      case StageKind::nic_rx: return nic_rx;
      case StageKind::bridge_switch: return bridge_switch;
      case StageKind::vxlan_encap: return vxlan_encap;
      case StageKind::vxlan_decap: return vxlan_decap;
      case StageKind::vf_dma: return vf_dma;
      case StageKind::representor: return representor;
      case StageKind::wire: return 0;
    }
    return 0;
  }

  void validate() const {
    const double costs[] = {endpoint_tx, endpoint_rx, nic_tx,      nic_rx,
                            bridge_switch, vxlan_encap, vxlan_decap, vf_dma,
                            representor,  upcall_cost, syscall_cost,
                            interrupt_cost, hw_fastpath_cost};
    for (double c : costs)
      if (c < 0) throw std::invalid_argument("cost model: negative cost");
    if (interrupt_coalesce_batch < 1)
      throw std::invalid_argument("cost model: coalesce batch must be >= 1");
    if (upcall_context_switches < 0 || wakeup_context_switches < 0)
      throw std::invalid_argument("cost model: negative context switches");
  }

  // Coordinate-wise scaling groups used by calibration.
  CostModel& scale_base(double m) {
    endpoint_tx *= m;
    endpoint_rx *= m;
    nic_tx *= m;
    nic_rx *= m;
    return *this;
  }
  CostModel& scale_overlay(double m) {
    bridge_switch *= m;
    vxlan_encap *= m;
    vxlan_decap *= m;
    return *this;
  }
  CostModel& scale_vf(double m) {
    vf_dma *= m;
    representor *= m;
    return *this;
  }
};

}  // namespace ovsim
