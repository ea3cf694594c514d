#include "ctrplace/protocol_sim.hpp"

#include <functional>
#include <limits>
#include <ostream>
#include <queue>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace ctrplace::sim {

std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::kUpdateEvent: return "update-event";
    case MessageKind::kRaftRequest: return "raft-request";
    case MessageKind::kLogReplication: return "log-replication";
    case MessageKind::kLogReply: return "log-reply";
    case MessageKind::kLogCommit: return "log-commit";
    case MessageKind::kResponseEvent: return "response-event";
    case MessageKind::kAdvertisement: return "advertisement";
    case MessageKind::kArpRequest: return "arp-request";
    case MessageKind::kArpReply: return "arp-reply";
    case MessageKind::kFlowMod: return "flow-mod";
  }
  return "?";
}

std::string Entity::to_string() const {
  switch (kind) {
    case Kind::kSwitch: return "sw" + std::to_string(id);
    case Kind::kController: return "ctr" + std::to_string(id);
    case Kind::kHost: return "h" + std::to_string(id);
  }
  return "?";
}

std::size_t EventTrace::count(MessageKind k) const {
  std::size_t n = 0;
  for (const auto& e : events) n += e.kind == k ? 1 : 0;
  return n;
}

namespace {

Entity switch_entity(NodeId n) { return {Entity::Kind::kSwitch, n}; }
Entity controller_entity(ControllerIndex c) { return {Entity::Kind::kController, c}; }
Entity host_entity(int h) { return {Entity::Kind::kHost, h}; }

// Discrete-event engine for one cluster. Messages are delivered in
// (arrival time, emission seq) order; controllers react per message kind.
class Engine {
 public:
  using Done = std::function<void(double arrived, double sent)>;

  Engine(const DelayMatrix& d, const ClusterView& v, MajorityRule rule, double t_c_ms)
      : d_(d), v_(v), rank_(majority_rank(v.placement.size(), rule)), t_c_(t_c_ms) {
    if (t_c_ms < 0.0) throw std::invalid_argument("t_c must be non-negative");
    v_.validate(d.size());
  }

  std::function<void(const SimEvent&)> on_data;

  int begin_update(NodeId sw, double now, bool single_owner, Done done) {
    if (sw < 0 || static_cast<std::size_t>(sw) >= d_.size()) {
      throw std::out_of_range("switch id out of range");
    }
    const int id = static_cast<int>(updates_.size());
    const ControllerIndex master = v_.masters.master_of[static_cast<std::size_t>(sw)];
    updates_.push_back({sw, master, single_owner, 0, false, false, std::move(done)});
    send(MessageKind::kUpdateEvent, switch_entity(sw), controller_entity(master), now,
         d_(sw, v_.placement[master]), id);
    return id;
  }

  void send(MessageKind kind, Entity src, Entity dst, double at, double delay, int update = -1) {
    SimEvent ev{at, at + delay, kind, src, dst, next_seq_++, update};
    queue_.push({ev.arrive_ms, ev.seq, trace_.events.size()});
    trace_.events.push_back(ev);
  }

  double ctr_delay(ControllerIndex a, ControllerIndex b) const {
    return d_(v_.placement[a], v_.placement[b]);
  }

  ControllerIndex controllers() const { return static_cast<ControllerIndex>(v_.placement.size()); }

  void run() {
    while (!queue_.empty()) {
      const Pending top = queue_.top();
      queue_.pop();
      const SimEvent ev = trace_.events[top.index];  // copy: dispatch may grow the trace
      dispatch(ev);
    }
  }

  EventTrace take_trace() { return std::move(trace_); }

 private:
  struct Update {
    NodeId sw;
    ControllerIndex master;
    bool single_owner;
    std::size_t replies;
    bool committed;
    bool responded;
    Done done;
  };

  struct Pending {
    double arrive;
    std::uint64_t seq;
    std::size_t index;
    bool operator>(const Pending& o) const {
      return arrive != o.arrive ? arrive > o.arrive : seq > o.seq;
    }
  };

  void dispatch(const SimEvent& ev) {
    const double now = ev.arrive_ms;
    switch (ev.kind) {
      case MessageKind::kUpdateEvent: {
        auto& u = updates_.at(static_cast<std::size_t>(ev.update));
        if (!u.single_owner) {
          respond(ev.update, now);
          for (ControllerIndex k = 0; k < controllers(); ++k) {
            if (k != u.master) {
              send(MessageKind::kAdvertisement, controller_entity(u.master), controller_entity(k),
                   now, ctr_delay(u.master, k), ev.update);
            }
          }
        } else if (u.master == v_.leader) {
          replicate(ev.update, now);
        } else {
          send(MessageKind::kRaftRequest, controller_entity(u.master),
               controller_entity(v_.leader), now, ctr_delay(u.master, v_.leader), ev.update);
        }
        break;
      }
      case MessageKind::kRaftRequest:
        replicate(ev.update, now);
        break;
      case MessageKind::kLogReplication:
        send(MessageKind::kLogReply, ev.dst, ev.src, now, ctr_delay(ev.dst.id, ev.src.id),
             ev.update);
        break;
      case MessageKind::kLogReply: {
        auto& u = updates_.at(static_cast<std::size_t>(ev.update));
        ++u.replies;
        if (!u.committed && u.replies == rank_) commit(ev.update, now);
        break;
      }
      case MessageKind::kLogCommit:
        if (ev.dst.id == updates_.at(static_cast<std::size_t>(ev.update)).master) {
          respond(ev.update, now);
        }
        break;
      case MessageKind::kResponseEvent: {
        // Copied out: the callback may start new updates and grow updates_.
        const Done done = updates_.at(static_cast<std::size_t>(ev.update)).done;
        if (done) done(now, ev.time_ms);
        break;
      }
      case MessageKind::kAdvertisement:
        break;
      case MessageKind::kArpRequest:
      case MessageKind::kArpReply:
      case MessageKind::kFlowMod:
        if (on_data) on_data(ev);
        break;
    }
  }

  // Leader appends the entry and replicates it to every follower.
  void replicate(int id, double now) {
    if (rank_ == 0) {
      commit(id, now);
      return;
    }
    for (ControllerIndex k = 0; k < controllers(); ++k) {
      if (k != v_.leader) {
        send(MessageKind::kLogReplication, controller_entity(v_.leader), controller_entity(k),
             now, ctr_delay(v_.leader, k), id);
      }
    }
  }

  void commit(int id, double now) {
    auto& u = updates_.at(static_cast<std::size_t>(id));
    u.committed = true;
    for (ControllerIndex k = 0; k < controllers(); ++k) {
      if (k != v_.leader) {
        send(MessageKind::kLogCommit, controller_entity(v_.leader), controller_entity(k), now,
             ctr_delay(v_.leader, k), id);
      }
    }
    if (u.master == v_.leader) respond(id, now);
  }

  // Master processes the committed update for t_c, then answers the switch.
  void respond(int id, double now) {
    auto& u = updates_.at(static_cast<std::size_t>(id));
    if (u.responded) return;
    u.responded = true;
    send(MessageKind::kResponseEvent, controller_entity(u.master), switch_entity(u.sw),
         now + t_c_, d_(u.sw, v_.placement[u.master]), id);
  }

  const DelayMatrix& d_;
  const ClusterView& v_;
  std::size_t rank_;
  double t_c_;
  std::uint64_t next_seq_ = 0;
  EventTrace trace_;
  std::vector<Update> updates_;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
};

SimResult simulate_single_update(const DelayMatrix& d, const ClusterView& v, NodeId sw,
                                 MajorityRule rule, double t_c_ms, bool single_owner) {
  Engine engine(d, v, rule, t_c_ms);
  double reaction = -1.0;
  engine.begin_update(sw, 0.0, single_owner, [&](double arrived, double) { reaction = arrived; });
  engine.run();
  if (reaction < 0.0) throw std::logic_error("update never completed");
  return {reaction, engine.take_trace(), {}};
}

}  // namespace

SimResult simulate_sdo_update(const DelayMatrix& d, const ClusterView& v, NodeId sw,
                              MajorityRule rule, double t_c_ms) {
  return simulate_single_update(d, v, sw, rule, t_c_ms, true);
}

SimResult simulate_mdo_update(const DelayMatrix& d, const ClusterView& v, NodeId sw,
                              double t_c_ms) {
  return simulate_single_update(d, v, sw, MajorityRule::kPaper, t_c_ms, false);
}

std::vector<NodeId> flooding_tree(const Topology& t, const DelayMatrix& d,
                                  const std::vector<NodeId>& route) {
  const std::size_t n = t.node_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, kInf);
  std::vector<NodeId> parent(n, -1);
  std::vector<bool> done(n, false);
  std::vector<bool> on_route(n, false);
  std::set<std::pair<double, NodeId>> frontier;

  double acc = 0.0;
  for (std::size_t k = 0; k < route.size(); ++k) {
    const auto node = static_cast<std::size_t>(route[k]);
    if (k > 0) acc += d(route[k - 1], route[k]);
    dist[node] = acc;
    on_route[node] = true;
    parent[node] = k > 0 ? route[k - 1] : -1;
    frontier.insert({acc, route[k]});
  }
  while (!frontier.empty()) {
    const auto [du, u] = *frontier.begin();
    frontier.erase(frontier.begin());
    done[static_cast<std::size_t>(u)] = true;
    for (const auto& nb : t.neighbors(u)) {
      const auto v = static_cast<std::size_t>(nb.node);
      if (done[v] || on_route[v]) continue;
      const double cand = du + nb.latency_ms;
      if (cand < dist[v] || (cand == dist[v] && u < parent[v])) {
        frontier.erase({dist[v], nb.node});
        dist[v] = cand;
        parent[v] = u;
        frontier.insert({cand, nb.node});
      }
    }
  }
  return parent;
}

SimResult simulate_l2switch_flow(const Topology& t, const DelayMatrix& d, const ClusterView& v,
                                 NodeId src, NodeId dst, double t_c_ms, MajorityRule rule,
                                 double host_in_ms, double host_out_ms) {
  const auto n = static_cast<NodeId>(t.node_count());
  if (src < 0 || src >= n || dst < 0 || dst >= n) throw std::out_of_range("switch out of range");
  if (src == dst) throw std::invalid_argument("source and destination switch must differ");
  if (d.size() < t.node_count()) throw std::invalid_argument("delay matrix smaller than topology");
  if (host_in_ms < 0.0 || host_out_ms < 0.0) {
    throw std::invalid_argument("host link delays must be non-negative");
  }

  SimResult result;
  result.route = shortest_path_nodes(t, d, src, dst);
  const auto& route = result.route;
  std::vector<int> position(t.node_count(), -1);
  for (std::size_t k = 0; k < route.size(); ++k) {
    position[static_cast<std::size_t>(route[k])] = static_cast<int>(k);
  }
  const auto parent = flooding_tree(t, d, route);
  std::vector<std::vector<NodeId>> children(t.node_count());
  for (NodeId s = 0; s < n; ++s) {
    if (parent[static_cast<std::size_t>(s)] >= 0) {
      children[static_cast<std::size_t>(parent[static_cast<std::size_t>(s)])].push_back(s);
    }
  }

  Engine engine(d, v, rule, t_c_ms);
  double setup = -1.0;

  auto flood_from = [&](NodeId s, double at) {
    for (NodeId c : children[static_cast<std::size_t>(s)]) {
      engine.send(MessageKind::kArpRequest, switch_entity(s), switch_entity(c), at, d(s, c));
    }
    if (s == dst) {
      engine.send(MessageKind::kArpRequest, switch_entity(s), host_entity(2), at, host_out_ms);
    }
  };
  auto reply_from = [&](NodeId s, double at) {
    const int k = position[static_cast<std::size_t>(s)];
    if (k == 0) {
      engine.send(MessageKind::kArpReply, switch_entity(s), host_entity(1), at, host_in_ms);
    } else {
      const NodeId prev = route[static_cast<std::size_t>(k - 1)];
      engine.send(MessageKind::kArpReply, switch_entity(s), switch_entity(prev), at, d(s, prev));
    }
  };

  engine.on_data = [&](const SimEvent& ev) {
    const double now = ev.arrive_ms;
    if (ev.kind == MessageKind::kArpRequest) {
      if (ev.dst.kind == Entity::Kind::kHost) {
        engine.send(MessageKind::kArpReply, ev.dst, switch_entity(dst), now, host_out_ms);
        return;
      }
      const NodeId s = ev.dst.id;
      if (position[static_cast<std::size_t>(s)] >= 0) {
        // Learning the source MAC at a route switch is an update; the ARP
        // request waits for the packet-out before moving on.
        engine.begin_update(s, now, true, [&, s](double arrived, double) {
          flood_from(s, arrived);
        });
      } else {
        flood_from(s, now);
      }
    } else if (ev.kind == MessageKind::kArpReply) {
      if (ev.dst.kind == Entity::Kind::kHost) {
        setup = now;
        return;
      }
      const NodeId s = ev.dst.id;
      if (ev.src.kind == Entity::Kind::kHost) {
        // Learning H2's port at the last switch: one more update, after
        // which the path rules are installed and the reply is released.
        engine.begin_update(s, now, true, [&, s](double arrived, double sent) {
          const ControllerIndex m = v.masters.master_of[static_cast<std::size_t>(s)];
          for (NodeId r : route) {
            engine.send(MessageKind::kFlowMod, controller_entity(m), switch_entity(r), sent,
                        d(v.placement[m], r));
          }
          reply_from(s, arrived);
        });
      } else {
        reply_from(s, now);
      }
    }
  };

  engine.send(MessageKind::kArpRequest, host_entity(1), switch_entity(src), 0.0, host_in_ms);
  engine.run();
  if (setup < 0.0) throw std::logic_error("ARP reply never reached the source host");
  result.time_ms = setup;
  result.trace = engine.take_trace();
  return result;
}

void write_trace_jsonl(std::ostream& out, const EventTrace& trace, std::string_view run) {
  for (const auto& e : trace.events) {
    nlohmann::ordered_json j;
    if (!run.empty()) j["run"] = run;
    j["time_ms"] = e.time_ms;
    j["arrive_ms"] = e.arrive_ms;
    j["kind"] = to_string(e.kind);
    j["src"] = e.src.to_string();
    j["dst"] = e.dst.to_string();
    j["seq"] = e.seq;
    out << j.dump() << '\n';
  }
}

}  // namespace ctrplace::sim
