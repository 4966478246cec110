#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "l2r/roadnet.hpp"
#include "l2r/traffic.hpp"

namespace l2r {

// Grid city: rows x cols intersections, two directed segments per block. Each
// full row and column independently becomes an arterial with
// arterial_probability (at least one line is always arterial); every other
// street is local.
struct GridCityConfig {
  std::size_t rows = 3;
  std::size_t cols = 3;
  double block_m = 300.0;
  double arterial_probability = 0.4;
};

inline constexpr double kArterialSpeedLimit = 50.0 / 3.6;
inline constexpr double kLocalSpeedLimit = 40.0 / 3.6;

RoadNetwork gen_grid_city(const GridCityConfig& config, std::uint64_t seed);
RoadNetwork gen_grid_city(std::size_t rows, std::size_t cols, double block_m, std::uint64_t seed);

// A segment is arterial when its road-level feature is at least 0.5.
bool is_arterial(const RoadSegment& segment) noexcept;

// Base speed 0.7 x limit scaled by 1 - A sin^2(pi t / T), A depending on road
// class, plus one congestion event: each segment joins with
// congestion_probability and drops to 0.15 x limit for a contiguous window.
struct TrafficGenConfig {
  std::size_t intervals = 32;
  double interval_seconds = kDefaultIntervalSeconds;
  double base_ratio = 0.7;
  double arterial_amplitude = 0.35;
  double local_amplitude = 0.1;
  double congestion_probability = 0.5;
  double congestion_ratio = 0.15;
  double congestion_window_fraction = 0.5;
};

TrafficTensor gen_traffic(const RoadNetwork& net, const TrafficGenConfig& config,
                          std::uint64_t seed);
TrafficTensor gen_traffic(const RoadNetwork& net, std::size_t intervals, std::uint64_t seed);

// Perceived cost of segment j for one synthetic driver:
//   alpha_time * travel_time_j + alpha_cond * condition_disutility(C_j) + G_j,
// G_j ~ Gumbel(0, noise_scale) drawn fresh per route and floored so the total
// stays positive.
struct DriverModel {
  double alpha_time = 1.0;
  double alpha_cond = 30.0;
  double noise_scale = 4.0;
};

inline constexpr double kMinPerceivedCost = 1e-3;

// 1 - 0.5 level - 0.3 lanes - 0.2 bus_lines, in [0,1]; lower on arterials.
double condition_disutility(const ConditionVector& condition) noexcept;

void validate_driver(const DriverModel& driver);

struct GenerationConfig {
  GridCityConfig city;
  TrafficGenConfig traffic;
  DriverModel driver;
  std::size_t route_count = 1200;
  std::uint64_t seed = 2024;
};

struct SyntheticDataset {
  RoadNetwork net;
  TrafficTensor traffic;
  std::vector<Route> routes;
  GenerationConfig manifest;
};

std::vector<Route> gen_routes(const RoadNetwork& net, const TrafficTensor& traffic,
                              const DriverModel& driver, std::size_t count, std::uint64_t seed);

// City, traffic and routes from one master seed; regenerating from the stored
// manifest reproduces the dataset exactly.
SyntheticDataset generate_dataset(const GenerationConfig& config);

// First ceil(fraction * n) ids of a seeded permutation of [0, n), at least one.
// For a fixed seed smaller fractions give subsets of larger ones.
std::vector<std::size_t> subsample_indices(std::size_t n, double fraction, std::uint64_t seed);

// Picks from the given train ids; returns them in ascending order.
std::vector<std::size_t> subsample(std::span<const std::size_t> train, double fraction,
                                   std::uint64_t seed);

}  // namespace l2r
