#include "l2r/traffic.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "l2r/dataset_io.hpp"

namespace l2r {

TrafficTensor::TrafficTensor(std::size_t segments, std::size_t intervals, double fill,
                             double interval_seconds)
    : segments_(segments),
      intervals_(intervals),
      interval_seconds_(interval_seconds),
      speeds_(segments * intervals, fill) {
  if (intervals == 0) throw ValidationError("traffic tensor needs at least one interval");
  if (!(interval_seconds > 0.0)) throw ValidationError("interval length must be positive");
}

double TrafficTensor::at(EdgeId segment, std::size_t interval) const {
  if (segment >= segments_) throw LookupError("unknown segment " + std::to_string(segment));
  if (interval >= intervals_) {
    throw IndexError("interval " + std::to_string(interval) + " out of range [0, " +
                     std::to_string(intervals_) + ")");
  }
  return speeds_[interval * segments_ + segment];
}

void TrafficTensor::set(EdgeId segment, std::size_t interval, double speed) {
  if (segment >= segments_) throw LookupError("unknown segment " + std::to_string(segment));
  if (interval >= intervals_) {
    throw IndexError("interval " + std::to_string(interval) + " out of range [0, " +
                     std::to_string(intervals_) + ")");
  }
  speeds_[interval * segments_ + segment] = speed;
}

std::vector<double> TrafficTensor::speeds_at(std::size_t interval) const {
  if (interval >= intervals_) {
    throw IndexError("interval " + std::to_string(interval) + " out of range [0, " +
                     std::to_string(intervals_) + ")");
  }
  const auto first = speeds_.begin() + static_cast<std::ptrdiff_t>(interval * segments_);
  return {first, first + static_cast<std::ptrdiff_t>(segments_)};
}

void TrafficTensor::validate(const RoadNetwork& net) const {
  if (segments_ != net.edge_count()) {
    throw ValidationError("traffic covers " + std::to_string(segments_) +
                          " segments, network has " + std::to_string(net.edge_count()));
  }
  if (intervals_ == 0) throw ValidationError("traffic tensor has no intervals");
  for (std::size_t t = 0; t < intervals_; ++t) {
    for (EdgeId j = 0; j < segments_; ++j) {
      const double v = speeds_[t * segments_ + j];
      const double cap = net.segments()[j].speed_limit * kSpeedLimitTolerance;
      if (!(v > 0.0) || !std::isfinite(v) || v > cap) {
        throw ValidationError("speed " + std::to_string(v) + " on segment " + std::to_string(j) +
                              " at interval " + std::to_string(t) + " outside (0, " +
                              std::to_string(cap) + "]");
      }
    }
  }
}

double travel_time(const RoadSegment& segment, double speed) {
  if (!(speed > 0.0)) {
    throw DomainError("travel time needs a positive speed, got " + std::to_string(speed));
  }
  return segment.length / speed;
}

std::vector<double> travel_times(const RoadNetwork& net, const TrafficTensor& traffic,
                                 std::size_t interval) {
  if (traffic.segment_count() != net.edge_count()) {
    throw StructuralError("traffic tensor does not match the network's segment count");
  }
  const auto speeds = traffic.speeds_at(interval);
  std::vector<double> times(net.edge_count());
  for (EdgeId j = 0; j < times.size(); ++j) times[j] = travel_time(net.segments()[j], speeds[j]);
  return times;
}

namespace {

std::string_view next_field(std::string_view& line) {
  const auto comma = line.find(',');
  auto head = line.substr(0, comma);
  line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
  while (!head.empty() && (head.back() == ' ' || head.back() == '\r')) head.remove_suffix(1);
  while (!head.empty() && head.front() == ' ') head.remove_prefix(1);
  return head;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("traffic CSV line " + std::to_string(line_no) + ": bad " + what + " \"" +
                     std::string(text) + "\"");
  }
  return value;
}

}  // namespace

TrafficTensor parse_traffic_csv(const std::string& text, std::size_t segments,
                                double interval_seconds) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("traffic CSV is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "segment_id,interval,speed_mps") {
    throw ParseError("traffic CSV line 1: expected header segment_id,interval,speed_mps");
  }

  struct Cell {
    EdgeId segment;
    std::size_t interval;
    double speed;
  };
  std::vector<Cell> cells;
  std::size_t max_interval = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::string_view rest(line);
    const auto seg = parse_number<EdgeId>(next_field(rest), line_no, "segment_id");
    const auto t = parse_number<std::size_t>(next_field(rest), line_no, "interval");
    const auto v = parse_number<double>(next_field(rest), line_no, "speed_mps");
    if (!rest.empty()) throw ParseError("traffic CSV line " + std::to_string(line_no) + ": extra columns");
    if (seg >= segments) {
      throw ValidationError("traffic CSV line " + std::to_string(line_no) + ": unknown segment " +
                            std::to_string(seg));
    }
    max_interval = std::max(max_interval, t);
    cells.push_back({seg, t, v});
  }
  if (cells.empty()) throw ParseError("traffic CSV has no data rows");

  const std::size_t intervals = max_interval + 1;
  TrafficTensor tensor(segments, intervals, 0.0, interval_seconds);
  std::vector<std::uint8_t> seen(segments * intervals, 0);
  for (const auto& c : cells) {
    auto& flag = seen[c.interval * segments + c.segment];
    if (flag) {
      throw ValidationError("traffic CSV repeats segment " + std::to_string(c.segment) +
                            " interval " + std::to_string(c.interval));
    }
    flag = 1;
    tensor.set(c.segment, c.interval, c.speed);
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) {
      throw ValidationError("traffic CSV is missing segment " + std::to_string(k % segments) +
                            " interval " + std::to_string(k / segments));
    }
  }
  return tensor;
}

TrafficTensor load_traffic(const std::filesystem::path& path, const RoadNetwork& net,
                           double interval_seconds) {
  auto tensor = parse_traffic_csv(read_text_file(path), net.edge_count(), interval_seconds);
  tensor.validate(net);
  return tensor;
}

std::string serialize_traffic_csv(const TrafficTensor& traffic) {
  std::string out = "segment_id,interval,speed_mps\n";
  char buf[64];
  for (EdgeId j = 0; j < traffic.segment_count(); ++j) {
    for (std::size_t t = 0; t < traffic.interval_count(); ++t) {
      std::snprintf(buf, sizeof buf, "%u,%zu,%.17g\n", j, t, traffic.at(j, t));
      out += buf;
    }
  }
  return out;
}

void save_traffic(const TrafficTensor& traffic, const std::filesystem::path& path) {
  write_text_file(path, serialize_traffic_csv(traffic));
}

}  // namespace l2r
