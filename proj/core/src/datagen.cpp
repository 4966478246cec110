#include "l2r/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "l2r/router.hpp"
#include "seeding.hpp"

namespace l2r {

namespace {

using detail::mix_seed;

constexpr double kSpeedNorm = 120.0 / 3.6;  // condition speed feature = limit / 120 km/h
constexpr double kMaxLanes = 6.0;
constexpr double kMaxLaneWidth = 5.0;
constexpr double kMaxBusLines = 10.0;
constexpr double kArterialLevel = 1.0;
constexpr double kLocalLevel = 0.25;

ConditionVector street_condition(bool arterial, std::mt19937_64& rng) {
  ConditionVector c;
  std::uniform_int_distribution<int> lanes(arterial ? 3 : 1, arterial ? 4 : 2);
  std::uniform_int_distribution<int> buses(arterial ? 2 : 0, arterial ? 5 : 1);
  const double limit = arterial ? kArterialSpeedLimit : kLocalSpeedLimit;
  c[ConditionFeature::speed_limit] = limit / kSpeedNorm;
  c[ConditionFeature::lane_count] = lanes(rng) / kMaxLanes;
  c[ConditionFeature::road_level] = arterial ? kArterialLevel : kLocalLevel;
  c[ConditionFeature::lane_width] = (arterial ? 3.5 : 3.0) / kMaxLaneWidth;
  c[ConditionFeature::bus_lines] = buses(rng) / kMaxBusLines;
  return c;
}

struct CongestionEvent {
  std::vector<std::uint8_t> congested;  // per segment
  std::size_t start = 0;
  std::size_t length = 0;
};

CongestionEvent draw_congestion(const RoadNetwork& net, const TrafficGenConfig& config,
                                std::mt19937_64& rng) {
  CongestionEvent ev;
  ev.length = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(config.congestion_window_fraction *
                                              static_cast<double>(config.intervals))));
  ev.length = std::min(ev.length, config.intervals);
  std::uniform_int_distribution<std::size_t> start(0, config.intervals - ev.length);
  ev.start = start(rng);
  std::bernoulli_distribution joins(std::clamp(config.congestion_probability, 0.0, 1.0));
  ev.congested.resize(net.edge_count());
  for (auto& flag : ev.congested) flag = joins(rng);
  return ev;
}

}  // namespace

bool is_arterial(const RoadSegment& segment) noexcept {
  return segment.condition[ConditionFeature::road_level] >= 0.5;
}

RoadNetwork gen_grid_city(const GridCityConfig& config, std::uint64_t seed) {
  if (config.rows < 2 || config.cols < 2) {
    throw ConfigError("grid needs at least 2 rows and 2 columns");
  }
  if (!(config.block_m > 0.0)) throw ConfigError("block length must be positive");

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution pick(std::clamp(config.arterial_probability, 0.0, 1.0));
  std::vector<std::uint8_t> arterial_row(config.rows), arterial_col(config.cols);
  for (auto& f : arterial_row) f = pick(rng);
  for (auto& f : arterial_col) f = pick(rng);
  const bool any = std::any_of(arterial_row.begin(), arterial_row.end(), [](auto f) { return f; }) ||
                   std::any_of(arterial_col.begin(), arterial_col.end(), [](auto f) { return f; });
  if (!any) {
    std::uniform_int_distribution<std::size_t> line(0, config.rows + config.cols - 1);
    const auto k = line(rng);
    if (k < config.rows) arterial_row[k] = 1; else arterial_col[k - config.rows] = 1;
  }

  std::vector<Intersection> nodes;
  for (std::size_t r = 0; r < config.rows; ++r) {
    for (std::size_t c = 0; c < config.cols; ++c) {
      nodes.push_back({static_cast<NodeId>(nodes.size()),
                       {static_cast<double>(c) * config.block_m,
                        static_cast<double>(r) * config.block_m}});
    }
  }

  std::vector<RoadSegment> segs;
  auto add_street = [&](NodeId a, NodeId b, bool arterial) {
    const ConditionVector cond = street_condition(arterial, rng);
    const double limit = arterial ? kArterialSpeedLimit : kLocalSpeedLimit;
    for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
      segs.push_back({static_cast<EdgeId>(segs.size()), from, to, config.block_m, limit, cond});
    }
  };
  for (std::size_t r = 0; r < config.rows; ++r) {
    for (std::size_t c = 0; c < config.cols; ++c) {
      const auto u = static_cast<NodeId>(r * config.cols + c);
      if (c + 1 < config.cols) add_street(u, u + 1, arterial_row[r] != 0);
      if (r + 1 < config.rows) {
        add_street(u, static_cast<NodeId>(u + config.cols), arterial_col[c] != 0);
      }
    }
  }
  return RoadNetwork(std::move(nodes), std::move(segs));
}

RoadNetwork gen_grid_city(std::size_t rows, std::size_t cols, double block_m,
                          std::uint64_t seed) {
  GridCityConfig config;
  config.rows = rows;
  config.cols = cols;
  config.block_m = block_m;
  return gen_grid_city(config, seed);
}

TrafficTensor gen_traffic(const RoadNetwork& net, const TrafficGenConfig& config,
                          std::uint64_t seed) {
  if (config.intervals == 0) throw ConfigError("traffic needs at least one interval");
  if (!(config.base_ratio > 0.0 && config.base_ratio <= kSpeedLimitTolerance)) {
    throw ConfigError("base speed ratio must be in (0, 1.2]");
  }
  if (!(config.congestion_ratio > 0.0) || config.arterial_amplitude < 0.0 ||
      config.arterial_amplitude >= 1.0 || config.local_amplitude < 0.0 ||
      config.local_amplitude >= 1.0) {
    throw ConfigError("traffic modulation parameters out of range");
  }

  std::mt19937_64 rng(seed);
  const auto event = draw_congestion(net, config, rng);
  constexpr double kPi = 3.14159265358979323846;

  TrafficTensor tensor(net.edge_count(), config.intervals, 0.0, config.interval_seconds);
  for (const auto& seg : net.segments()) {
    const double amplitude = is_arterial(seg) ? config.arterial_amplitude : config.local_amplitude;
    for (std::size_t t = 0; t < config.intervals; ++t) {
      const double phase = std::sin(kPi * static_cast<double>(t) /
                                    static_cast<double>(config.intervals));
      double speed = config.base_ratio * seg.speed_limit * (1.0 - amplitude * phase * phase);
      if (event.congested[seg.id] && t >= event.start && t < event.start + event.length) {
        speed = config.congestion_ratio * seg.speed_limit;
      }
      tensor.set(seg.id, t, speed);
    }
  }
  tensor.validate(net);
  return tensor;
}

TrafficTensor gen_traffic(const RoadNetwork& net, std::size_t intervals, std::uint64_t seed) {
  TrafficGenConfig config;
  config.intervals = intervals;
  return gen_traffic(net, config, seed);
}

double condition_disutility(const ConditionVector& c) noexcept {
  return 1.0 - 0.5 * c[ConditionFeature::road_level] - 0.3 * c[ConditionFeature::lane_count] -
         0.2 * c[ConditionFeature::bus_lines];
}

void validate_driver(const DriverModel& driver) {
  if (!(driver.alpha_time > 0.0)) throw ConfigError("alpha_time must be positive");
  if (!(driver.alpha_cond >= 0.0)) throw ConfigError("alpha_cond must be non-negative");
  if (!(driver.noise_scale >= 0.0)) throw ConfigError("noise_scale must be non-negative");
}

std::vector<Route> gen_routes(const RoadNetwork& net, const TrafficTensor& traffic,
                              const DriverModel& driver, std::size_t count, std::uint64_t seed) {
  validate_driver(driver);
  if (count == 0) throw ConfigError("route count must be at least 1");
  if (net.node_count() < 2) throw ConfigError("network needs at least two intersections");
  traffic.validate(net);

  std::vector<double> disutility(net.edge_count());
  for (const auto& seg : net.segments()) disutility[seg.id] = condition_disutility(seg.condition);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeId> origin_dist(0, static_cast<NodeId>(net.node_count() - 1));
  std::uniform_int_distribution<NodeId> dest_dist(0, static_cast<NodeId>(net.node_count() - 2));
  std::uniform_int_distribution<std::size_t> interval_dist(0, traffic.interval_count() - 1);
  std::uniform_real_distribution<double> unit(std::numeric_limits<double>::min(), 1.0);
  constexpr int kMaxRetries = 100;

  std::vector<Route> routes;
  routes.reserve(count);
  std::vector<double> cost(net.edge_count());
  for (std::size_t i = 0; i < count; ++i) {
    for (int attempt = 0;; ++attempt) {
      RouteQuery q;
      q.origin = origin_dist(rng);
      q.destination = dest_dist(rng);
      if (q.destination >= q.origin) ++q.destination;
      q.departure_interval = interval_dist(rng);

      const auto times = travel_times(net, traffic, q.departure_interval);
      for (std::size_t j = 0; j < cost.size(); ++j) {
        double c = driver.alpha_time * times[j] + driver.alpha_cond * disutility[j];
        if (driver.noise_scale > 0.0) c += -driver.noise_scale * std::log(-std::log(unit(rng)));
        cost[j] = std::max(c, kMinPerceivedCost);
      }
      try {
        routes.push_back({q, dijkstra(net, cost, q).edges});
        break;
      } catch (const NoPathError&) {
        if (attempt + 1 >= kMaxRetries) {
          throw ConfigError("could not sample a reachable origin/destination pair after " +
                            std::to_string(kMaxRetries) + " attempts");
        }
      }
    }
  }
  return routes;
}

SyntheticDataset generate_dataset(const GenerationConfig& config) {
  SyntheticDataset ds;
  ds.manifest = config;
  ds.net = gen_grid_city(config.city, mix_seed(config.seed, 1));
  ds.traffic = gen_traffic(ds.net, config.traffic, mix_seed(config.seed, 2));
  ds.routes = gen_routes(ds.net, ds.traffic, config.driver, config.route_count,
                         mix_seed(config.seed, 3));
  return ds;
}

std::vector<std::size_t> subsample_indices(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("subsample fraction must be in (0, 1]");
  }
  if (n == 0) throw ConfigError("cannot subsample an empty set");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  // The tolerance keeps exact products such as 0.05 * 1000 from rounding up.
  auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, n);
  perm.resize(keep);
  return perm;
}

std::vector<std::size_t> subsample(std::span<const std::size_t> train, double fraction,
                                   std::uint64_t seed) {
  std::vector<std::size_t> out;
  for (auto k : subsample_indices(train.size(), fraction, seed)) out.push_back(train[k]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace l2r
