#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "l2r/error.hpp"

namespace l2r {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr std::size_t kConditionWidth = 100;

// Named slots of the condition vector; the remaining entries are zero padding.
enum class ConditionFeature : std::size_t {
  speed_limit = 0,
  lane_count = 1,
  road_level = 2,
  lane_width = 3,
  bus_lines = 4,
};

struct ConditionVector {
  std::array<double, kConditionWidth> values{};

  double operator[](ConditionFeature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](ConditionFeature f) { return values[static_cast<std::size_t>(f)]; }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Intersection {
  NodeId id = 0;
  Point position;  // planar meters
};

struct RoadSegment {
  EdgeId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  double length = 0.0;       // meters
  double speed_limit = 0.0;  // meters / second
  ConditionVector condition;
};

struct BoundingBox {
  Point min;
  Point max;
};

// Directed road graph. Immutable once constructed; construction validates every
// invariant and builds the outgoing adjacency lists in segment-id order.
class RoadNetwork {
 public:
  RoadNetwork() = default;
  RoadNetwork(std::vector<Intersection> intersections, std::vector<RoadSegment> segments);

  std::size_t node_count() const noexcept { return intersections_.size(); }
  std::size_t edge_count() const noexcept { return segments_.size(); }

  const std::vector<Intersection>& intersections() const noexcept { return intersections_; }
  const std::vector<RoadSegment>& segments() const noexcept { return segments_; }

  const Intersection& intersection(NodeId id) const;
  const RoadSegment& segment(EdgeId id) const;
  std::span<const EdgeId> outgoing(NodeId id) const;

  bool has_node(NodeId id) const noexcept { return id < intersections_.size(); }
  double max_speed_limit() const noexcept { return max_speed_limit_; }
  const BoundingBox& bounds() const noexcept { return bounds_; }

  // Smallest length / straight-line-distance ratio over all segments, capped
  // at 1. Scaling a straight-line heuristic by this keeps it admissible
  // when a file stores segments shorter than their endpoint separation.
  double min_length_ratio() const noexcept { return min_length_ratio_; }

  // Row-major [segment][feature] copy of every condition vector.
  std::vector<double> flattened_conditions() const;

 private:
  std::vector<Intersection> intersections_;
  std::vector<RoadSegment> segments_;
  std::vector<std::vector<EdgeId>> adjacency_;
  double max_speed_limit_ = 0.0;
  double min_length_ratio_ = 1.0;
  BoundingBox bounds_;
};

struct RouteQuery {
  NodeId origin = 0;
  NodeId destination = 0;
  std::size_t departure_interval = 0;

  friend bool operator==(const RouteQuery&, const RouteQuery&) = default;
};

// Edge-incidence vector of length M; 1 marks a selected segment.
using EdgeMask = std::vector<std::uint8_t>;

struct Route {
  RouteQuery query;
  EdgeMask edges;

  friend bool operator==(const Route&, const Route&) = default;
};

// Throws LookupError / ValidationError for a query that cannot be answered on net.
void check_query(const RoadNetwork& net, const RouteQuery& query);

double euclidean_distance(const RoadNetwork& net, NodeId a, NodeId b);

// True iff the selected edges form exactly one simple directed path from the
// query origin to its destination. Throws StructuralError on a length mismatch.
bool is_valid_path(const RoadNetwork& net, const Route& route);

// Selected edges in travel order, origin first; empty if the mask is not a valid path.
std::vector<EdgeId> ordered_path(const RoadNetwork& net, const Route& route);

EdgeMask mask_from_path(const RoadNetwork& net, std::span<const EdgeId> path);
std::size_t selected_count(const EdgeMask& mask) noexcept;

RoadNetwork load_roadnet(const std::filesystem::path& path);
RoadNetwork parse_roadnet(const std::string& text);
std::string serialize_roadnet(const RoadNetwork& net);
void save_roadnet(const RoadNetwork& net, const std::filesystem::path& path);

}  // namespace l2r
