#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "l2r/roadnet.hpp"

namespace l2r {

inline constexpr double kDefaultIntervalSeconds = 900.0;
inline constexpr double kSpeedLimitTolerance = 1.2;

// Dense M x T matrix of average segment speeds (m/s), one column per interval.
class TrafficTensor {
 public:
  TrafficTensor() = default;
  TrafficTensor(std::size_t segments, std::size_t intervals, double fill,
                double interval_seconds = kDefaultIntervalSeconds);

  std::size_t segment_count() const noexcept { return segments_; }
  std::size_t interval_count() const noexcept { return intervals_; }
  double interval_seconds() const noexcept { return interval_seconds_; }

  double at(EdgeId segment, std::size_t interval) const;
  void set(EdgeId segment, std::size_t interval, double speed);

  // Column t of V. Throws IndexError when interval >= interval_count().
  std::vector<double> speeds_at(std::size_t interval) const;

  // Throws ValidationError unless every speed is in (0, 1.2 * limit] and the
  // shape matches the network.
  void validate(const RoadNetwork& net) const;

  friend bool operator==(const TrafficTensor&, const TrafficTensor&) = default;

 private:
  std::size_t segments_ = 0;
  std::size_t intervals_ = 0;
  double interval_seconds_ = kDefaultIntervalSeconds;
  std::vector<double> speeds_;  // interval-major: speeds_[t * M + j]
};

double travel_time(const RoadSegment& segment, double speed);

// Per-edge travel times at a departure interval.
std::vector<double> travel_times(const RoadNetwork& net, const TrafficTensor& traffic,
                                 std::size_t interval);

// CSV with header "segment_id,interval,speed_mps"; every (segment, interval)
// cell must appear exactly once.
TrafficTensor parse_traffic_csv(const std::string& text, std::size_t segments,
                                double interval_seconds = kDefaultIntervalSeconds);
TrafficTensor load_traffic(const std::filesystem::path& path, const RoadNetwork& net,
                           double interval_seconds = kDefaultIntervalSeconds);
std::string serialize_traffic_csv(const TrafficTensor& traffic);
void save_traffic(const TrafficTensor& traffic, const std::filesystem::path& path);

}  // namespace l2r
