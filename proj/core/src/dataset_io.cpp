#include "l2r/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "json_include.hpp"

namespace l2r {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

std::string serialize_routes_jsonl(std::span<const Route> routes) {
  std::string out;
  for (const auto& r : routes) {
    std::vector<EdgeId> ids;
    for (EdgeId j = 0; j < r.edges.size(); ++j) {
      if (r.edges[j]) ids.push_back(j);
    }
    json line{{"origin", r.query.origin},
              {"destination", r.query.destination},
              {"interval", r.query.departure_interval},
              {"edges", ids}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::vector<Route> parse_routes_jsonl(const std::string& text, const RoadNetwork& net) {
  std::vector<Route> routes;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = "routes line " + std::to_string(line_no);
    try {
      const json obj = json::parse(line);
      Route r;
      r.query.origin = obj.at("origin").get<NodeId>();
      r.query.destination = obj.at("destination").get<NodeId>();
      r.query.departure_interval = obj.at("interval").get<std::size_t>();
      const auto ids = obj.at("edges").get<std::vector<EdgeId>>();
      r.edges = mask_from_path(net, ids);
      check_query(net, r.query);
      if (!is_valid_path(net, r)) throw ValidationError(where + ": edges do not form a valid path");
      routes.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::validation) throw;
      throw ValidationError(where + ": " + e.what());
    }
  }
  return routes;
}

std::string serialize_manifest(const GenerationConfig& c) {
  json doc{
      {"seed", c.seed},
      {"route_count", c.route_count},
      {"city",
       {{"rows", c.city.rows},
        {"cols", c.city.cols},
        {"block_m", c.city.block_m},
        {"arterial_probability", c.city.arterial_probability}}},
      {"traffic",
       {{"intervals", c.traffic.intervals},
        {"interval_seconds", c.traffic.interval_seconds},
        {"base_ratio", c.traffic.base_ratio},
        {"arterial_amplitude", c.traffic.arterial_amplitude},
        {"local_amplitude", c.traffic.local_amplitude},
        {"congestion_probability", c.traffic.congestion_probability},
        {"congestion_ratio", c.traffic.congestion_ratio},
        {"congestion_window_fraction", c.traffic.congestion_window_fraction}}},
      {"driver",
       {{"alpha_time", c.driver.alpha_time},
        {"alpha_cond", c.driver.alpha_cond},
        {"noise_scale", c.driver.noise_scale}}},
  };
  return doc.dump(2) + "\n";
}

GenerationConfig parse_manifest(const std::string& text) {
  try {
    const json doc = json::parse(text);
    GenerationConfig c;
    c.seed = doc.at("seed").get<std::uint64_t>();
    c.route_count = doc.at("route_count").get<std::size_t>();
    const auto& city = doc.at("city");
    c.city.rows = city.at("rows").get<std::size_t>();
    c.city.cols = city.at("cols").get<std::size_t>();
    c.city.block_m = city.at("block_m").get<double>();
    c.city.arterial_probability = city.at("arterial_probability").get<double>();
    const auto& tr = doc.at("traffic");
    c.traffic.intervals = tr.at("intervals").get<std::size_t>();
    c.traffic.interval_seconds = tr.at("interval_seconds").get<double>();
    c.traffic.base_ratio = tr.at("base_ratio").get<double>();
    c.traffic.arterial_amplitude = tr.at("arterial_amplitude").get<double>();
    c.traffic.local_amplitude = tr.at("local_amplitude").get<double>();
    c.traffic.congestion_probability = tr.at("congestion_probability").get<double>();
    c.traffic.congestion_ratio = tr.at("congestion_ratio").get<double>();
    c.traffic.congestion_window_fraction = tr.at("congestion_window_fraction").get<double>();
    const auto& dr = doc.at("driver");
    c.driver.alpha_time = dr.at("alpha_time").get<double>();
    c.driver.alpha_cond = dr.at("alpha_cond").get<double>();
    c.driver.noise_scale = dr.at("noise_scale").get<double>();
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

void save_dataset(const SyntheticDataset& dataset, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  save_roadnet(dataset.net, dir / "roadnet.json");
  save_traffic(dataset.traffic, dir / "traffic.csv");
  write_text_file(dir / "routes.jsonl", serialize_routes_jsonl(dataset.routes));
  write_text_file(dir / "manifest.json", serialize_manifest(dataset.manifest));
}

SyntheticDataset load_dataset(const std::filesystem::path& dir) {
  SyntheticDataset ds;
  ds.manifest = parse_manifest(read_text_file(dir / "manifest.json"));
  ds.net = load_roadnet(dir / "roadnet.json");
  ds.traffic = load_traffic(dir / "traffic.csv", ds.net, ds.manifest.traffic.interval_seconds);
  ds.routes = parse_routes_jsonl(read_text_file(dir / "routes.jsonl"), ds.net);
  for (const auto& r : ds.routes) {
    if (r.query.departure_interval >= ds.traffic.interval_count()) {
      throw ValidationError("route departs in interval " +
                            std::to_string(r.query.departure_interval) +
                            " beyond the traffic tensor");
    }
  }
  return ds;
}

}  // namespace l2r
