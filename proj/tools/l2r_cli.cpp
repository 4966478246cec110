// l2r: command-line front end for dataset generation, training, evaluation,
// single-query routing and the data-sparsity sweep.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "l2r/config.hpp"
#include "l2r/dataset_io.hpp"
#include "l2r/experiment.hpp"
#include "l2r/router.hpp"
#include "l2r/validator.hpp"

namespace {

using namespace l2r;
namespace fs = std::filesystem;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
};

RunConfig resolve_config(const GlobalOptions& g) {
  KeyValues values;
  if (!g.config_path.empty()) values = parse_key_values(read_text_file(g.config_path));
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got \"" + kv + "\"");
    values[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (g.seed) values["seed"] = std::to_string(*g.seed);
  return run_config_from(values);
}

std::string edges_json(const EdgeMask& mask, const RoadNetwork& net, const Route* ordered) {
  std::vector<EdgeId> ids;
  if (ordered) {
    ids = ordered_path(net, *ordered);
  } else {
    for (EdgeId j = 0; j < mask.size(); ++j) {
      if (mask[j]) ids.push_back(j);
    }
  }
  std::string out = "[";
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + std::to_string(ids[i]);
  return out + "]";
}

void print_route(const RoadNetwork& net, const Route& route, std::optional<double> cost) {
  std::cout << "{\"origin\":" << route.query.origin
            << ",\"destination\":" << route.query.destination
            << ",\"interval\":" << route.query.departure_interval
            << ",\"edges\":" << edges_json(route.edges, net, &route)
            << ",\"valid\":" << (is_valid_path(net, route) ? "true" : "false");
  if (cost) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", *cost);
    std::cout << ",\"cost\":" << buf;
  }
  std::cout << "}\n";
}

int cmd_datagen(const GlobalOptions& g, const std::string& out_dir) {
  const RunConfig config = resolve_config(g);
  const auto dataset = generate_dataset(config.generation);
  save_dataset(dataset, out_dir);
  std::cout << "wrote " << dataset.routes.size() << " routes on " << dataset.net.node_count()
            << " intersections / " << dataset.net.edge_count() << " segments to " << out_dir
            << "\n";
  return 0;
}

int cmd_train(const GlobalOptions& g, const std::string& data_dir, const std::string& method_name,
              const std::string& out_path) {
  const RunConfig config = resolve_config(g);
  const Method method = parse_method(method_name);
  const auto dataset = load_dataset(data_dir);
  const auto splits = split(dataset, config.seed);
  const auto result = train_method(method, dataset, splits.train, splits.val, config.train);
  save_checkpoint(result.params, out_path);
  std::printf("trained %s on %zu routes: train loss %.6f -> %.6f, best validation epoch %zu\n",
              method_name.c_str(), splits.train.size(), result.train_loss.front(),
              result.train_loss.back(), result.best_epoch);
  return 0;
}

int cmd_eval(const GlobalOptions& g, const std::string& data_dir,
             const std::vector<std::string>& method_names, const std::string& checkpoint,
             const std::string& out_path) {
  const RunConfig config = resolve_config(g);
  const auto dataset = load_dataset(data_dir);
  const auto splits = split(dataset, config.seed);
  const auto truths = gather(dataset.routes, splits.test);

  std::vector<MetricReport> reports;
  for (const auto& name : method_names) {
    const Method method = parse_method(name);
    std::optional<ModelParams> params;
    if (is_learned(method)) {
      if (checkpoint.empty()) throw ConfigError(name + " needs --checkpoint");
      params = load_checkpoint(checkpoint, dataset.net.edge_count());
    }
    const auto preds = predict_routes(method, dataset, truths, params ? &*params : nullptr);
    reports.push_back(evaluate_routes(name, preds, truths, dataset.net));
  }
  std::ostringstream csv;
  write_metric_csv(csv, reports);
  if (!out_path.empty()) write_text_file(out_path, csv.str());
  std::cout << csv.str();
  return 0;
}

struct RouteArgs {
  std::string data_dir, roadnet, traffic, method = "astar", checkpoint;
  NodeId origin = 0, destination = 0;
  std::size_t interval = 0;
};

int cmd_route(const GlobalOptions& g, const RouteArgs& a) {
  (void)resolve_config(g);
  SyntheticDataset ds;
  if (!a.data_dir.empty()) {
    ds = load_dataset(a.data_dir);
  } else {
    if (a.roadnet.empty()) throw ConfigError("route needs --data or --roadnet");
    ds.net = load_roadnet(a.roadnet);
    ds.traffic = a.traffic.empty() ? TrafficTensor(ds.net.edge_count(), 1, 0.0)
                                   : load_traffic(a.traffic, ds.net);
    if (a.traffic.empty()) {
      for (const auto& seg : ds.net.segments()) ds.traffic.set(seg.id, 0, seg.speed_limit);
    }
  }
  const RouteQuery q{a.origin, a.destination, a.interval};
  const Method method = parse_method(a.method);
  if (is_learned(method)) {
    if (a.checkpoint.empty()) throw ConfigError(a.method + " needs --checkpoint");
    const auto params = load_checkpoint(a.checkpoint, ds.net.edge_count());
    print_route(ds.net, predict(params, q, ds.traffic, ds.net), std::nullopt);
    return 0;
  }
  TheoryRoute t;
  switch (method) {
    case Method::di_dis: t = route_di_dis(ds.net, q); break;
    case Method::di_time: t = route_di_time(ds.net, ds.traffic, q); break;
    default: t = astar(ds.net, ds.traffic, q); break;
  }
  print_route(ds.net, Route{q, t.edges}, t.total_cost);
  return 0;
}

int cmd_sweep(const GlobalOptions& g, const std::string& data_dir, const std::string& out_dir) {
  const RunConfig config = resolve_config(g);
  const SyntheticDataset dataset =
      data_dir.empty() ? generate_dataset(config.generation) : load_dataset(data_dir);
  const auto splits = split(dataset, config.seed);
  const auto result = sparsity_sweep(dataset, splits, config.fractions, config.methods,
                                     config.train, config.seed);
  std::ostringstream table, long_form;
  write_sweep_table(table, result);
  write_sweep_long(long_form, result);
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    write_text_file(fs::path(out_dir) / "sweep_table.csv", table.str());
    write_text_file(fs::path(out_dir) / "sweep_long.csv", long_form.str());
    write_text_file(fs::path(out_dir) / "sweep_summary.json", sweep_summary_json(result));
    write_text_file(fs::path(out_dir) / "config.txt", serialize_run_config(config));
  }
  std::cout << table.str();
  return 0;
}

int cmd_validate_soft(const GlobalOptions& g, const std::string& roadnet, const std::string& probs,
                      const std::string& probs_file, NodeId origin, NodeId destination) {
  (void)resolve_config(g);
  const auto net = load_roadnet(roadnet);
  std::string text = probs_file.empty() ? probs : read_text_file(probs_file);
  for (char& c : text) {
    if (c == '\n' || c == '\r' || c == ' ' || c == '\t') c = ',';
  }
  SoftRoute soft;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      soft.probs.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("probability \"" + item + "\" is not a number");
    }
  }
  const RouteQuery q{origin, destination, 0};
  print_route(net, project(net, soft, q), std::nullopt);
  return 0;
}

void print_error(std::string_view kind, const std::string& message) {
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += (c == '\n') ? ' ' : c;
  }
  std::cerr << "error kind=" << kind << " message=\"" << escaped << "\"\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l2r: theory-guided residual route learning"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed (data, splits and training)");
  app.add_option("--config", g.config_path, "Flat key = value config file");
  app.add_option("--set", g.overrides, "Override one config key (key=value), repeatable");

  std::string data_dir, out, method = "l2r", checkpoint;
  std::vector<std::string> eval_methods;

  auto* datagen = app.add_subcommand("datagen", "Generate a synthetic city, traffic and routes");
  datagen->add_option("--out", out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train nn, lfd or l2r on the train split");
  train->add_option("--data", data_dir, "Dataset directory")->required();
  train->add_option("--method", method, "nn, lfd or l2r");
  train->add_option("--out", out, "Checkpoint path")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate methods on the test split");
  eval->add_option("--data", data_dir, "Dataset directory")->required();
  eval->add_option("--method", eval_methods, "Method(s) to evaluate")->required();
  eval->add_option("--checkpoint", checkpoint, "Checkpoint for a learned method");
  eval->add_option("--out", out, "Write the metric CSV here");

  RouteArgs ra;
  auto* route = app.add_subcommand("route", "Route a single query");
  route->add_option("--data", ra.data_dir, "Dataset directory");
  route->add_option("--roadnet", ra.roadnet, "Roadnet JSON (when --data is not given)");
  route->add_option("--traffic", ra.traffic, "Traffic CSV (defaults to free flow at the limit)");
  route->add_option("--method", ra.method, "di-dis, di-time, astar, nn, lfd or l2r");
  route->add_option("--checkpoint", ra.checkpoint, "Checkpoint for a learned method");
  route->add_option("--origin", ra.origin)->required();
  route->add_option("--destination", ra.destination)->required();
  route->add_option("--interval", ra.interval, "Departure interval");

  auto* sweep = app.add_subcommand("sweep", "Data-sparsity sweep over train fractions");
  sweep->add_option("--data", data_dir, "Dataset directory (generated from config if omitted)");
  sweep->add_option("--out", out, "Report directory");

  std::string roadnet, probs, probs_file;
  NodeId origin = 0, destination = 0;
  auto* vsoft = app.add_subcommand("validate-soft", "Project soft edge probabilities to a path");
  vsoft->add_option("--roadnet", roadnet, "Roadnet JSON")->required();
  vsoft->add_option("--probs", probs, "Comma-separated probabilities, one per segment");
  vsoft->add_option("--probs-file", probs_file, "File with one probability per segment");
  vsoft->add_option("--origin", origin)->required();
  vsoft->add_option("--destination", destination)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("config", e.what());
    return 2;
  }

  try {
    if (*datagen) return cmd_datagen(g, out);
    if (*train) return cmd_train(g, data_dir, method, out);
    if (*eval) return cmd_eval(g, data_dir, eval_methods, checkpoint, out);
    if (*route) return cmd_route(g, ra);
    if (*sweep) return cmd_sweep(g, data_dir, out);
    if (*vsoft) return cmd_validate_soft(g, roadnet, probs, probs_file, origin, destination);
  } catch (const Error& e) {
    print_error(to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::config ? 2 : 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
