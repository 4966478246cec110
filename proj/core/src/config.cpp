#include "l2r/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <sstream>

#include "l2r/dataset_io.hpp"

namespace l2r {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("config key " + key + ": \"" + v + "\" is not a number");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("config key " + key + ": \"" + v + "\" is not a non-negative integer");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key");
    if (out.count(key)) {
      throw ParseError("config line " + std::to_string(line_no) + ": duplicate key " + key);
    }
    out[key] = value;
  }
  return out;
}

RunConfig run_config_from(const KeyValues& values, RunConfig c) {
  auto& g = c.generation;
  auto& t = c.train;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto num = [](double& slot) -> Setter {
    return [&slot](const std::string& k, const std::string& v) { slot = to_double(k, v); };
  };
  auto count = [](std::size_t& slot) -> Setter {
    return [&slot](const std::string& k, const std::string& v) {
      slot = static_cast<std::size_t>(to_uint(k, v));
    };
  };
  auto seed = [](std::uint64_t& slot) -> Setter {
    return [&slot](const std::string& k, const std::string& v) { slot = to_uint(k, v); };
  };

  const std::map<std::string, Setter> setters{
      {"grid_rows", count(g.city.rows)},
      {"grid_cols", count(g.city.cols)},
      {"block_m", num(g.city.block_m)},
      {"arterial_probability", num(g.city.arterial_probability)},
      {"intervals", count(g.traffic.intervals)},
      {"interval_seconds", num(g.traffic.interval_seconds)},
      {"base_ratio", num(g.traffic.base_ratio)},
      {"arterial_amplitude", num(g.traffic.arterial_amplitude)},
      {"local_amplitude", num(g.traffic.local_amplitude)},
      {"congestion_probability", num(g.traffic.congestion_probability)},
      {"congestion_ratio", num(g.traffic.congestion_ratio)},
      {"congestion_window_fraction", num(g.traffic.congestion_window_fraction)},
      {"alpha_time", num(g.driver.alpha_time)},
      {"alpha_cond", num(g.driver.alpha_cond)},
      {"noise_scale", num(g.driver.noise_scale)},
      {"route_count", count(g.route_count)},
      {"data_seed", seed(g.seed)},
      {"learning_rate", num(t.learning_rate)},
      {"epochs", count(t.epochs)},
      {"batch_size", count(t.batch_size)},
      {"hidden", count(t.hidden)},
      {"momentum", num(t.momentum)},
      {"train_seed", seed(t.seed)},
      {"optimizer",
       [&t](const std::string& k, const std::string& v) {
         if (v == "sgd") t.optimizer = Optimizer::sgd;
         else if (v == "momentum") t.optimizer = Optimizer::momentum;
         else throw ConfigError("config key " + k + ": expected sgd or momentum");
       }},
      {"residual_combine",
       [&t](const std::string& k, const std::string& v) {
         if (v == "signed") t.combine = ResidualCombine::signed_correction;
         else if (v == "additive") t.combine = ResidualCombine::additive;
         else throw ConfigError("config key " + k + ": expected signed or additive");
       }},
      {"head_bias_init",
       [&t](const std::string& k, const std::string& v) {
         if (v == "none") t.head_bias_init.reset();
         else t.head_bias_init = to_double(k, v);
       }},
      {"fractions",
       [&c](const std::string& k, const std::string& v) {
         c.fractions.clear();
         for (const auto& item : split_list(v)) c.fractions.push_back(to_double(k, item));
         if (c.fractions.empty()) throw ConfigError("config key fractions is empty");
       }},
      {"methods",
       [&c](const std::string&, const std::string& v) {
         c.methods.clear();
         for (const auto& item : split_list(v)) c.methods.push_back(parse_method(item));
         if (c.methods.empty()) throw ConfigError("config key methods is empty");
       }},
  };

  // "seed" seeds data generation, training and splitting alike unless the
  // specific keys override it.
  if (const auto it = values.find("seed"); it != values.end()) {
    c.seed = to_uint("seed", it->second);
    g.seed = c.seed;
    t.seed = c.seed;
  }
  for (const auto& [key, value] : values) {
    if (key == "seed") continue;
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key \"" + key + "\"");
    it->second(key, value);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from(parse_key_values(read_text_file(path)));
}

std::string serialize_run_config(const RunConfig& c) {
  const auto& g = c.generation;
  const auto& t = c.train;
  std::ostringstream out;
  out << "seed = " << c.seed << '\n'
      << "data_seed = " << g.seed << '\n'
      << "train_seed = " << t.seed << '\n'
      << "grid_rows = " << g.city.rows << '\n'
      << "grid_cols = " << g.city.cols << '\n'
      << "block_m = " << fmt(g.city.block_m) << '\n'
      << "arterial_probability = " << fmt(g.city.arterial_probability) << '\n'
      << "intervals = " << g.traffic.intervals << '\n'
      << "interval_seconds = " << fmt(g.traffic.interval_seconds) << '\n'
      << "base_ratio = " << fmt(g.traffic.base_ratio) << '\n'
      << "arterial_amplitude = " << fmt(g.traffic.arterial_amplitude) << '\n'
      << "local_amplitude = " << fmt(g.traffic.local_amplitude) << '\n'
      << "congestion_probability = " << fmt(g.traffic.congestion_probability) << '\n'
      << "congestion_ratio = " << fmt(g.traffic.congestion_ratio) << '\n'
      << "congestion_window_fraction = " << fmt(g.traffic.congestion_window_fraction) << '\n'
      << "alpha_time = " << fmt(g.driver.alpha_time) << '\n'
      << "alpha_cond = " << fmt(g.driver.alpha_cond) << '\n'
      << "noise_scale = " << fmt(g.driver.noise_scale) << '\n'
      << "route_count = " << g.route_count << '\n'
      << "learning_rate = " << fmt(t.learning_rate) << '\n'
      << "epochs = " << t.epochs << '\n'
      << "batch_size = " << t.batch_size << '\n'
      << "hidden = " << t.hidden << '\n'
      << "optimizer = " << (t.optimizer == Optimizer::sgd ? "sgd" : "momentum") << '\n'
      << "momentum = " << fmt(t.momentum) << '\n'
      << "residual_combine = "
      << (t.combine == ResidualCombine::additive ? "additive" : "signed") << '\n'
      << "head_bias_init = " << (t.head_bias_init ? fmt(*t.head_bias_init) : "none") << '\n';
  out << "fractions = ";
  for (std::size_t i = 0; i < c.fractions.size(); ++i) out << (i ? "," : "") << fmt(c.fractions[i]);
  out << "\nmethods = ";
  for (std::size_t i = 0; i < c.methods.size(); ++i) out << (i ? "," : "") << to_string(c.methods[i]);
  out << '\n';
  return out.str();
}

}  // namespace l2r
