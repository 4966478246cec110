#include "l2r/roadnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json_include.hpp"
#include "l2r/dataset_io.hpp"

namespace l2r {

namespace {

using nlohmann::json;

std::string edge_name(EdgeId id) { return "segment " + std::to_string(id); }

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Segment length may exceed the straight-line distance (curvy roads) but must
// stay within this factor of it in either direction.
constexpr double kLengthSlack = 10.0;

}  // namespace

RoadNetwork::RoadNetwork(std::vector<Intersection> intersections,
                         std::vector<RoadSegment> segments)
    : intersections_(std::move(intersections)), segments_(std::move(segments)) {
  const auto n = intersections_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = intersections_[i];
    if (node.id != i) {
      throw ValidationError("intersection at position " + std::to_string(i) + " has id " +
                            std::to_string(node.id) + "; ids must be dense and in order");
    }
    if (!std::isfinite(node.position.x) || !std::isfinite(node.position.y)) {
      throw ValidationError("intersection " + std::to_string(i) + " has non-finite coordinates");
    }
  }

  adjacency_.assign(n, {});
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const auto& seg = segments_[j];
    if (seg.id != j) {
      throw ValidationError("segment at position " + std::to_string(j) + " has id " +
                            std::to_string(seg.id) + "; ids must be dense and in order");
    }
    if (seg.from >= n || seg.to >= n) {
      throw ValidationError(edge_name(seg.id) + " references intersection " +
                            std::to_string(std::max(seg.from, seg.to)) + " but only " +
                            std::to_string(n) + " exist");
    }
    if (seg.from == seg.to) throw ValidationError(edge_name(seg.id) + " is a self-loop");
    if (!(seg.length > 0.0) || !std::isfinite(seg.length)) {
      throw ValidationError(edge_name(seg.id) + " has non-positive length");
    }
    if (!(seg.speed_limit > 0.0) || !std::isfinite(seg.speed_limit)) {
      throw ValidationError(edge_name(seg.id) + " has non-positive speed limit");
    }
    const double straight = distance(intersections_[seg.from].position,
                                     intersections_[seg.to].position);
    if (seg.length > kLengthSlack * straight || seg.length * kLengthSlack < straight) {
      throw ValidationError(edge_name(seg.id) + " length " + std::to_string(seg.length) +
                            " is inconsistent with endpoint distance " +
                            std::to_string(straight));
    }
    for (double v : seg.condition.values) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError(edge_name(seg.id) + " has a condition feature outside [0,1]");
      }
    }
    adjacency_[seg.from].push_back(seg.id);
    max_speed_limit_ = std::max(max_speed_limit_, seg.speed_limit);
    if (straight > 0.0) min_length_ratio_ = std::min(min_length_ratio_, seg.length / straight);
  }

  if (n > 0) {
    bounds_.min = bounds_.max = intersections_.front().position;
    for (const auto& node : intersections_) {
      bounds_.min.x = std::min(bounds_.min.x, node.position.x);
      bounds_.min.y = std::min(bounds_.min.y, node.position.y);
      bounds_.max.x = std::max(bounds_.max.x, node.position.x);
      bounds_.max.y = std::max(bounds_.max.y, node.position.y);
    }
  }
}

const Intersection& RoadNetwork::intersection(NodeId id) const {
  if (id >= intersections_.size()) {
    throw LookupError("unknown intersection " + std::to_string(id));
  }
  return intersections_[id];
}

const RoadSegment& RoadNetwork::segment(EdgeId id) const {
  if (id >= segments_.size()) throw LookupError("unknown " + edge_name(id));
  return segments_[id];
}

std::span<const EdgeId> RoadNetwork::outgoing(NodeId id) const {
  if (id >= adjacency_.size()) throw LookupError("unknown intersection " + std::to_string(id));
  return adjacency_[id];
}

std::vector<double> RoadNetwork::flattened_conditions() const {
  std::vector<double> out;
  out.reserve(segments_.size() * kConditionWidth);
  for (const auto& seg : segments_) {
    out.insert(out.end(), seg.condition.values.begin(), seg.condition.values.end());
  }
  return out;
}

void check_query(const RoadNetwork& net, const RouteQuery& query) {
  if (!net.has_node(query.origin)) {
    throw LookupError("unknown origin intersection " + std::to_string(query.origin));
  }
  if (!net.has_node(query.destination)) {
    throw LookupError("unknown destination intersection " + std::to_string(query.destination));
  }
  if (query.origin == query.destination) {
    throw ValidationError("query origin equals destination (" + std::to_string(query.origin) +
                          ")");
  }
}

double euclidean_distance(const RoadNetwork& net, NodeId a, NodeId b) {
  return distance(net.intersection(a).position, net.intersection(b).position);
}

std::vector<EdgeId> ordered_path(const RoadNetwork& net, const Route& route) {
  const auto m = net.edge_count();
  if (route.edges.size() != m) {
    throw StructuralError("route has " + std::to_string(route.edges.size()) +
                          " edge entries, network has " + std::to_string(m));
  }
  const auto n = net.node_count();
  const auto& q = route.query;
  if (q.origin >= n || q.destination >= n || q.origin == q.destination) return {};

  // A simple path has out-degree 1 everywhere except the destination (0) and
  // in-degree 1 everywhere except the origin (0).
  std::vector<int> out_deg(n, 0), in_deg(n, 0);
  std::vector<EdgeId> next_edge(n, 0);
  std::size_t selected = 0;
  for (EdgeId j = 0; j < m; ++j) {
    if (!route.edges[j]) continue;
    const auto& seg = net.segments()[j];
    ++selected;
    ++out_deg[seg.from];
    ++in_deg[seg.to];
    next_edge[seg.from] = j;
  }
  if (selected == 0) return {};
  for (NodeId v = 0; v < n; ++v) {
    if (out_deg[v] > 1 || in_deg[v] > 1) return {};
  }
  if (out_deg[q.destination] != 0 || in_deg[q.origin] != 0) return {};

  std::vector<EdgeId> path;
  path.reserve(selected);
  NodeId at = q.origin;
  while (at != q.destination) {
    if (out_deg[at] == 0 || path.size() == selected) return {};
    const EdgeId j = next_edge[at];
    path.push_back(j);
    at = net.segments()[j].to;
  }
  // Any selected edge not walked belongs to a detached fragment or cycle.
  if (path.size() != selected) return {};
  return path;
}

bool is_valid_path(const RoadNetwork& net, const Route& route) {
  return !ordered_path(net, route).empty();
}

EdgeMask mask_from_path(const RoadNetwork& net, std::span<const EdgeId> path) {
  EdgeMask mask(net.edge_count(), 0);
  for (EdgeId j : path) {
    if (j >= mask.size()) throw LookupError("unknown " + edge_name(j));
    mask[j] = 1;
  }
  return mask;
}

std::size_t selected_count(const EdgeMask& mask) noexcept {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

template <typename T>
T field(const json& obj, const char* key, const std::string& entity) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(entity + " is missing field \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(entity + " field \"" + key + "\" has the wrong type");
  }
}

}  // namespace

RoadNetwork parse_roadnet(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("roadnet JSON malformed at line " + std::to_string(line_of_offset(text, e.byte)) +
                     ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("intersections") || !doc.contains("segments") ||
      !doc["intersections"].is_array() || !doc["segments"].is_array()) {
    throw ParseError("roadnet must be an object with \"intersections\" and \"segments\" arrays");
  }

  std::vector<Intersection> nodes;
  for (const auto& item : doc["intersections"]) {
    const std::string entity = "intersection #" + std::to_string(nodes.size());
    if (!item.is_object()) throw ParseError(entity + " is not an object");
    nodes.push_back({field<NodeId>(item, "id", entity),
                     {field<double>(item, "x", entity), field<double>(item, "y", entity)}});
  }

  std::vector<RoadSegment> segs;
  for (const auto& item : doc["segments"]) {
    const std::string entity = "segment #" + std::to_string(segs.size());
    if (!item.is_object()) throw ParseError(entity + " is not an object");
    RoadSegment seg;
    seg.id = field<EdgeId>(item, "id", entity);
    seg.from = field<NodeId>(item, "from", entity);
    seg.to = field<NodeId>(item, "to", entity);
    seg.length = field<double>(item, "length", entity);
    seg.speed_limit = field<double>(item, "speed_limit", entity);
    const auto cond = field<std::vector<double>>(item, "condition", entity);
    if (cond.size() != kConditionWidth) {
      throw ValidationError("segment " + std::to_string(seg.id) + " condition has " +
                            std::to_string(cond.size()) + " entries, expected " +
                            std::to_string(kConditionWidth));
    }
    std::copy(cond.begin(), cond.end(), seg.condition.values.begin());
    segs.push_back(seg);
  }
  return RoadNetwork(std::move(nodes), std::move(segs));
}

RoadNetwork load_roadnet(const std::filesystem::path& path) {
  return parse_roadnet(read_text_file(path));
}

std::string serialize_roadnet(const RoadNetwork& net) {
  json doc;
  doc["intersections"] = json::array();
  for (const auto& node : net.intersections()) {
    doc["intersections"].push_back({{"id", node.id}, {"x", node.position.x}, {"y", node.position.y}});
  }
  doc["segments"] = json::array();
  for (const auto& seg : net.segments()) {
    doc["segments"].push_back({{"id", seg.id},
                               {"from", seg.from},
                               {"to", seg.to},
                               {"length", seg.length},
                               {"speed_limit", seg.speed_limit},
                               {"condition", seg.condition.values}});
  }
  return doc.dump() + "\n";
}

void save_roadnet(const RoadNetwork& net, const std::filesystem::path& path) {
  write_text_file(path, serialize_roadnet(net));
}

}  // namespace l2r
