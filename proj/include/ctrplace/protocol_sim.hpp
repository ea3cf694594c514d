#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ctrplace/reaction.hpp"
#include "ctrplace/topology.hpp"

namespace ctrplace::sim {

enum class MessageKind {
  kUpdateEvent,     // switch -> master (packet-in)
  kRaftRequest,     // master -> leader
  kLogReplication,  // leader -> followers
  kLogReply,        // follower -> leader
  kLogCommit,       // leader -> followers
  kResponseEvent,   // master -> switch (packet-out / flow-mod reply)
  kAdvertisement,   // master -> peers, asynchronous replica update
  kArpRequest,
  kArpReply,
  kFlowMod,
};

std::string_view to_string(MessageKind k);

struct Entity {
  enum class Kind { kSwitch, kController, kHost };
  Kind kind = Kind::kSwitch;
  int id = 0;  // node id, controller index, or host number (1 = source, 2 = destination)

  std::string to_string() const;
  friend bool operator==(const Entity&, const Entity&) = default;
};

// One message. Delivery happens at time_ms + the one-way delay.
struct SimEvent {
  double time_ms = 0.0;    // send time
  double arrive_ms = 0.0;  // receive time
  MessageKind kind = MessageKind::kUpdateEvent;
  Entity src;
  Entity dst;
  std::uint64_t seq = 0;  // emission order
  int update = -1;        // control-plane update the message belongs to
};

struct EventTrace {
  std::vector<SimEvent> events;  // emission order

  std::size_t count(MessageKind k) const;
};

struct SimResult {
  double time_ms = 0.0;  // reaction time or flow setup time
  EventTrace trace;
  std::vector<NodeId> route;  // l2 flows only: src..dst switches
};

/// Replays one update under single data ownership: packet-in, Raft request
/// (skipped when the master leads), log replication, quorum of log replies,
/// log commit, response. `t_c_ms` is spent at the master before responding.
SimResult simulate_sdo_update(const DelayMatrix& d, const ClusterView& v, NodeId sw,
                              MajorityRule rule = MajorityRule::kPaper, double t_c_ms = 0.0);

/// Replays one update under multiple data ownership: the master answers at
/// once and advertises the update to its peers asynchronously.
SimResult simulate_mdo_update(const DelayMatrix& d, const ClusterView& v, NodeId sw,
                              double t_c_ms = 0.0);

/// Replays the l2-switch ARP exchange between hosts attached to `src` and
/// `dst`: flood along a spanning tree, one sequential update per switch on
/// the route, one more at the last switch for the ARP reply, then the reply
/// travels back. `t` supplies the data-plane graph; `d` may cover extra
/// (controller-only) nodes beyond t's switches.
SimResult simulate_l2switch_flow(const Topology& t, const DelayMatrix& d, const ClusterView& v,
                                 NodeId src, NodeId dst, double t_c_ms,
                                 MajorityRule rule = MajorityRule::kPaper,
                                 double host_in_ms = 0.0, double host_out_ms = 0.0);

/// Parent of every switch in the flooding tree (-1 at the root). The tree is
/// a shortest-path tree rooted at route.front() that contains `route`.
std::vector<NodeId> flooding_tree(const Topology& t, const DelayMatrix& d,
                                  const std::vector<NodeId>& route);

/// One JSON object per line: {time_ms, arrive_ms, kind, src, dst, seq},
/// prefixed by {"run": run} when `run` is non-empty.
void write_trace_jsonl(std::ostream& out, const EventTrace& trace, std::string_view run = {});

}  // namespace ctrplace::sim
