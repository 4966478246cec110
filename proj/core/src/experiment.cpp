#include "l2r/experiment.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>
#include <random>

#include "json_include.hpp"
#include "l2r/router.hpp"
#include "seeding.hpp"

namespace l2r {

namespace {

using detail::mix_seed;

constexpr std::array<std::pair<Method, std::string_view>, 6> kMethodNames{{
    {Method::di_dis, "di-dis"},
    {Method::di_time, "di-time"},
    {Method::astar, "astar"},
    {Method::nn, "nn"},
    {Method::lfd, "lfd"},
    {Method::l2r, "l2r"},
}};

std::string percent_label(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%%", fraction * 100.0);
  return buf;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  throw ConfigError("unknown method \"" + std::string(name) +
                    "\" (expected di-dis, di-time, astar, nn, lfd or l2r)");
}

bool is_learned(Method method) noexcept {
  return method == Method::nn || method == Method::lfd || method == Method::l2r;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::di_dis, Method::di_time, Method::astar,
                                           Method::nn,     Method::lfd,     Method::l2r};
  return methods;
}

Splits split(std::size_t count, std::uint64_t seed) {
  if (count < 20) {
    throw ConfigError("splitting needs at least 20 routes, got " + std::to_string(count));
  }
  // Largest-remainder apportionment of 75/5/20 percent.
  constexpr std::array<std::size_t, 3> kPercent{75, 5, 20};
  std::array<std::size_t, 3> sizes{}, remainders{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    sizes[k] = count * kPercent[k] / 100;
    remainders[k] = count * kPercent[k] % 100;
    assigned += sizes[k];
  }
  std::array<std::size_t, 3> rank{0, 1, 2};
  std::stable_sort(rank.begin(), rank.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < count; ++k, ++assigned) ++sizes[rank[k % 3]];

  std::vector<std::size_t> perm(count);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(mix_seed(seed, 11));
  std::shuffle(perm.begin(), perm.end(), rng);

  Splits s;
  auto first = perm.begin();
  s.train.assign(first, first + static_cast<std::ptrdiff_t>(sizes[0]));
  first += static_cast<std::ptrdiff_t>(sizes[0]);
  s.val.assign(first, first + static_cast<std::ptrdiff_t>(sizes[1]));
  first += static_cast<std::ptrdiff_t>(sizes[1]);
  s.test.assign(first, perm.end());
  for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
  return s;
}

Splits split(const SyntheticDataset& dataset, std::uint64_t seed) {
  return split(dataset.routes.size(), seed);
}

std::vector<Route> gather(const std::vector<Route>& routes, std::span<const std::size_t> ids) {
  std::vector<Route> out;
  out.reserve(ids.size());
  for (auto i : ids) {
    if (i >= routes.size()) throw IndexError("route index " + std::to_string(i) + " out of range");
    out.push_back(routes[i]);
  }
  return out;
}

TrainResult train_method(Method method, const SyntheticDataset& dataset,
                         std::span<const std::size_t> train_ids,
                         std::span<const std::size_t> val_ids, const TrainConfig& config) {
  if (!is_learned(method)) {
    throw ConfigError(std::string(to_string(method)) + " is a theory method and is not trained");
  }
  const ModelContext ctx(dataset.net, dataset.traffic);
  const bool residual = method == Method::l2r;
  const auto train_routes = gather(dataset.routes, train_ids);
  const auto val_routes = gather(dataset.routes, val_ids);
  auto train_set = make_examples(train_routes, dataset.net, dataset.traffic, residual);
  const auto val_set = make_examples(val_routes, dataset.net, dataset.traffic, residual);

  if (method == Method::lfd) {
    // As many A* pseudo-routes as real ones, for queries drawn from the train set.
    std::mt19937_64 rng(mix_seed(config.seed, 21));
    std::uniform_int_distribution<std::size_t> pick(0, train_routes.size() - 1);
    const std::size_t k = train_routes.size();
    for (std::size_t i = 0; i < k; ++i) {
      const RouteQuery q = train_routes[pick(rng)].query;
      train_set.push_back({q, astar(dataset.net, dataset.traffic, q).edges, {}});
    }
  }
  return train(config, residual ? Architecture::residual : Architecture::plain, ctx, train_set,
               val_set);
}

std::vector<Route> predict_routes(Method method, const SyntheticDataset& dataset,
                                  std::span<const Route> queries, const ModelParams* params) {
  std::vector<Route> out;
  out.reserve(queries.size());
  const auto& net = dataset.net;
  const auto& traffic = dataset.traffic;
  if (is_learned(method)) {
    if (params == nullptr) {
      throw ConfigError(std::string(to_string(method)) + " needs trained parameters");
    }
    const ModelContext ctx(net, traffic);
    for (const auto& r : queries) out.push_back(predict(*params, ctx, r.query));
    return out;
  }
  for (const auto& r : queries) {
    TheoryRoute t;
    switch (method) {
      case Method::di_dis: t = route_di_dis(net, r.query); break;
      case Method::di_time: t = route_di_time(net, traffic, r.query); break;
      default: t = astar(net, traffic, r.query); break;
    }
    out.push_back({r.query, std::move(t.edges)});
  }
  return out;
}

MethodRun run_method(Method method, const SyntheticDataset& dataset,
                     std::span<const std::size_t> train_ids, const Splits& splits,
                     const TrainConfig& config) {
  MethodRun run;
  if (is_learned(method)) run.training = train_method(method, dataset, train_ids, splits.val, config);
  const auto truths = gather(dataset.routes, splits.test);
  run.predictions = predict_routes(method, dataset, truths,
                                   run.training ? &run.training->params : nullptr);
  run.report = evaluate_routes(std::string(to_string(method)), run.predictions, truths, dataset.net);
  return run;
}

MethodRun run_method(Method method, const SyntheticDataset& dataset, const Splits& splits,
                     const TrainConfig& config) {
  return run_method(method, dataset, splits.train, splits, config);
}

const MetricReport& SweepResult::at(Method method, double fraction) const {
  const auto m = std::find(methods.begin(), methods.end(), method);
  const auto f = std::find(fractions.begin(), fractions.end(), fraction);
  if (m == methods.end() || f == fractions.end()) {
    throw LookupError("sweep has no entry for " + std::string(to_string(method)) + " at " +
                      percent_label(fraction));
  }
  return reports[static_cast<std::size_t>(m - methods.begin())]
                [static_cast<std::size_t>(f - fractions.begin())];
}

SweepResult sparsity_sweep(const SyntheticDataset& dataset, const Splits& splits,
                           std::span<const double> fractions, std::span<const Method> methods,
                           const TrainConfig& config, std::uint64_t seed) {
  if (fractions.empty()) throw ConfigError("sweep needs at least one fraction");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sweep fractions must lie in (0, 1]");
  }
  SweepResult result;
  result.fractions.assign(fractions.begin(), fractions.end());
  result.methods.assign(methods.begin(), methods.end());
  result.reports.assign(methods.size(), {});

  std::vector<std::vector<std::size_t>> train_ids;
  for (double f : fractions) {
    train_ids.push_back(subsample(splits.train, f, mix_seed(seed, 31)));
    result.train_sizes.push_back(train_ids.back().size());
  }

  for (std::size_t m = 0; m < methods.size(); ++m) {
    const Method method = methods[m];
    if (!is_learned(method)) {
      // No training data involved: one evaluation stands for every column.
      const auto report = run_method(method, dataset, splits.train, splits, config).report;
      result.reports[m].assign(fractions.size(), report);
      continue;
    }
    for (std::size_t f = 0; f < fractions.size(); ++f) {
      result.reports[m].push_back(run_method(method, dataset, train_ids[f], splits, config).report);
    }
  }
  return result;
}

void write_sweep_table(std::ostream& out, const SweepResult& result) {
  out << "method";
  for (double f : result.fractions) out << ',' << percent_label(f);
  out << '\n';
  char buf[64];
  for (std::size_t m = 0; m < result.methods.size(); ++m) {
    out << to_string(result.methods[m]);
    for (const auto& r : result.reports[m]) {
      std::snprintf(buf, sizeof buf, ",%.4f", r.f1);
      out << buf;
    }
    out << '\n';
  }

  const auto l2r_it = std::find(result.methods.begin(), result.methods.end(), Method::l2r);
  if (l2r_it == result.methods.end() || result.methods.size() < 2) return;
  const auto l2r_row = static_cast<std::size_t>(l2r_it - result.methods.begin());
  out << "improvement";
  for (std::size_t f = 0; f < result.fractions.size(); ++f) {
    double best = 0.0;
    for (std::size_t m = 0; m < result.methods.size(); ++m) {
      if (m != l2r_row) best = std::max(best, result.reports[m][f].f1);
    }
    const double gain = best > 0.0 ? (result.reports[l2r_row][f].f1 - best) / best : 0.0;
    std::snprintf(buf, sizeof buf, ",%.1f%%", gain * 100.0);
    out << buf;
  }
  out << '\n';
}

void write_sweep_long(std::ostream& out, const SweepResult& result) {
  out << "method,fraction,train_size,P,R,F1,match_dist,match90\n";
  char buf[256];
  for (std::size_t m = 0; m < result.methods.size(); ++m) {
    for (std::size_t f = 0; f < result.fractions.size(); ++f) {
      const auto& r = result.reports[m][f];
      std::snprintf(buf, sizeof buf, "%s,%.4f,%zu,%.10f,%.10f,%.10f,%.10f,%.10f\n",
                    std::string(to_string(result.methods[m])).c_str(), result.fractions[f],
                    result.train_sizes[f], r.precision, r.recall, r.f1, r.match_distance,
                    r.match90);
      out << buf;
    }
  }
}

std::string sweep_summary_json(const SweepResult& result) {
  nlohmann::json doc;
  doc["fractions"] = result.fractions;
  doc["train_sizes"] = result.train_sizes;
  nlohmann::json rows = nlohmann::json::object();
  for (std::size_t m = 0; m < result.methods.size(); ++m) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t f = 0; f < result.fractions.size(); ++f) {
      const auto& r = result.reports[m][f];
      cells.push_back({{"fraction", result.fractions[f]},
                       {"P", r.precision},
                       {"R", r.recall},
                       {"F1", r.f1},
                       {"match_dist", r.match_distance},
                       {"match90", r.match90},
                       {"test_routes", r.count}});
    }
    rows[std::string(to_string(result.methods[m]))] = std::move(cells);
  }
  doc["methods"] = std::move(rows);
  return doc.dump(2) + "\n";
}

}  // namespace l2r
