#include "l2r/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace l2r {

NoPathError::NoPathError(const RouteQuery& query)
    : Error(ErrorKind::no_path, "no path from intersection " + std::to_string(query.origin) +
                                    " to " + std::to_string(query.destination) +
                                    " (interval " + std::to_string(query.departure_interval) +
                                    ")"),
      query_(query) {}

namespace {

constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Keeps the straight-line heuristic strictly consistent under rounding.
constexpr double kHeuristicMargin = 1.0 - 1e-9;

struct Label {
  double g = kInf;
  NodeId pred = kNoNode;
  EdgeId edge = kNoEdge;
  bool settled = false;
};

struct HeapEntry {
  double key;
  double g;
  NodeId node;
};

struct HeapAfter {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.key != b.key) return a.key > b.key;
    return a.node > b.node;
  }
};

void check_weights(const RoadNetwork& net, std::span<const double> weights) {
  if (weights.size() != net.edge_count()) {
    throw StructuralError("weight vector has " + std::to_string(weights.size()) +
                          " entries, network has " + std::to_string(net.edge_count()));
  }
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!(weights[j] > 0.0) || !std::isfinite(weights[j])) {
      throw DomainError("edge weight " + std::to_string(j) + " must be positive and finite");
    }
  }
}

// Label-setting search; heuristic(v) must be consistent (zero gives Dijkstra).
template <typename Heuristic>
TheoryRoute search(const RoadNetwork& net, std::span<const double> weights,
                   const RouteQuery& query, Heuristic&& heuristic) {
  check_query(net, query);
  std::vector<Label> labels(net.node_count());
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapAfter> heap;

  labels[query.origin].g = 0.0;
  heap.push({heuristic(query.origin), 0.0, query.origin});

  while (!heap.empty()) {
    const HeapEntry top = heap.top();
    heap.pop();
    Label& here = labels[top.node];
    if (here.settled || top.g != here.g) continue;  // stale
    here.settled = true;
    if (top.node == query.destination) break;

    for (EdgeId j : net.outgoing(top.node)) {
      const NodeId to = net.segments()[j].to;
      Label& there = labels[to];
      if (there.settled) continue;
      const double candidate = here.g + weights[j];
      if (candidate < there.g) {
        there.g = candidate;
        there.pred = top.node;
        there.edge = j;
        heap.push({candidate + heuristic(to), candidate, to});
      } else if (candidate == there.g &&
                 (top.node < there.pred || (top.node == there.pred && j < there.edge))) {
        there.pred = top.node;
        there.edge = j;
      }
    }
  }

  const Label& goal = labels[query.destination];
  if (!goal.settled) throw NoPathError(query);

  TheoryRoute out;
  for (NodeId at = query.destination; at != query.origin; at = labels[at].pred) {
    out.path.push_back(labels[at].edge);
  }
  std::reverse(out.path.begin(), out.path.end());
  out.edges = mask_from_path(net, out.path);
  for (EdgeId j : out.path) out.total_cost += weights[j];
  return out;
}

double heuristic_speed(const RoadNetwork& net, std::span<const double> speeds) {
  double v = net.max_speed_limit();
  for (double s : speeds) v = std::max(v, s);
  return v;
}

}  // namespace

TheoryRoute dijkstra(const RoadNetwork& net, std::span<const double> weights,
                     const RouteQuery& query) {
  check_weights(net, weights);
  return search(net, weights, query, [](NodeId) { return 0.0; });
}

double astar_heuristic(const RoadNetwork& net, const TrafficTensor& traffic,
                       std::size_t interval, NodeId from, NodeId destination) {
  const double v_max = heuristic_speed(net, traffic.speeds_at(interval));
  return euclidean_distance(net, from, destination) * net.min_length_ratio() *
         kHeuristicMargin / v_max;
}

TheoryRoute astar(const RoadNetwork& net, const TrafficTensor& traffic, const RouteQuery& query) {
  check_query(net, query);
  const auto times = travel_times(net, traffic, query.departure_interval);
  check_weights(net, times);
  const double v_max = heuristic_speed(net, traffic.speeds_at(query.departure_interval));
  const double scale = net.min_length_ratio() * kHeuristicMargin / v_max;
  const Point goal = net.intersection(query.destination).position;
  return search(net, times, query, [&](NodeId v) {
    const Point p = net.intersections()[v].position;
    return std::hypot(p.x - goal.x, p.y - goal.y) * scale;
  });
}

std::vector<double> segment_lengths(const RoadNetwork& net) {
  std::vector<double> lengths(net.edge_count());
  for (const auto& seg : net.segments()) lengths[seg.id] = seg.length;
  return lengths;
}

TheoryRoute route_di_dis(const RoadNetwork& net, const RouteQuery& query) {
  return dijkstra(net, segment_lengths(net), query);
}

TheoryRoute route_di_time(const RoadNetwork& net, const TrafficTensor& traffic,
                          const RouteQuery& query) {
  check_query(net, query);
  return dijkstra(net, travel_times(net, traffic, query.departure_interval), query);
}

}  // namespace l2r
