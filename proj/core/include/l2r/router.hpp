#pragma once

#include <span>
#include <vector>

#include "l2r/roadnet.hpp"
#include "l2r/traffic.hpp"

namespace l2r {

class NoPathError : public Error {
 public:
  explicit NoPathError(const RouteQuery& query);
  const RouteQuery& query() const noexcept { return query_; }

 private:
  RouteQuery query_;
};

struct TheoryRoute {
  EdgeMask edges;
  std::vector<EdgeId> path;  // travel order
  double total_cost = 0.0;
};

// Label-setting shortest path over strictly positive per-edge weights.
//
// Ties are resolved deterministically: among equal-cost labels for a node the
// one whose predecessor intersection id is smaller wins, then the smaller edge
// id; equal-priority heap entries pop in intersection-id order. Decrease-key is
// lazy, and stale heap entries are discarded before any comparison.
TheoryRoute dijkstra(const RoadNetwork& net, std::span<const double> weights,
                     const RouteQuery& query);

// A* on departure-interval travel times with h(x) = |x - e| / v_max, where v_max
// is the global maximum speed limit (or the fastest observed speed, if higher).
TheoryRoute astar(const RoadNetwork& net, const TrafficTensor& traffic, const RouteQuery& query);

// Heuristic value used by astar, exposed for admissibility checks.
double astar_heuristic(const RoadNetwork& net, const TrafficTensor& traffic,
                       std::size_t interval, NodeId from, NodeId destination);

TheoryRoute route_di_dis(const RoadNetwork& net, const RouteQuery& query);
TheoryRoute route_di_time(const RoadNetwork& net, const TrafficTensor& traffic,
                          const RouteQuery& query);

std::vector<double> segment_lengths(const RoadNetwork& net);

}  // namespace l2r
