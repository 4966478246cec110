#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "l2r/datagen.hpp"
#include "l2r/metrics.hpp"
#include "l2r/residual_model.hpp"

namespace l2r {

enum class Method { di_dis, di_time, astar, nn, lfd, l2r };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view name);
bool is_learned(Method method) noexcept;
const std::vector<Method>& all_methods();

struct Splits {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// Seeded 75/5/20 partition with largest-remainder rounding. Needs >= 20 items.
Splits split(std::size_t count, std::uint64_t seed);
Splits split(const SyntheticDataset& dataset, std::uint64_t seed);

std::vector<Route> gather(const std::vector<Route>& routes, std::span<const std::size_t> ids);

// Trains nn / lfd / l2r on the given train ids (validation on val ids).
// ConfigError for a theory method.
TrainResult train_method(Method method, const SyntheticDataset& dataset,
                         std::span<const std::size_t> train_ids,
                         std::span<const std::size_t> val_ids, const TrainConfig& config);

// Predicts every query with a theory method, or with trained params.
std::vector<Route> predict_routes(Method method, const SyntheticDataset& dataset,
                                  std::span<const Route> queries,
                                  const ModelParams* params = nullptr);

struct MethodRun {
  MetricReport report;
  std::vector<Route> predictions;
  std::optional<TrainResult> training;
};

// Trains where applicable and evaluates on the test ids.
MethodRun run_method(Method method, const SyntheticDataset& dataset,
                     std::span<const std::size_t> train_ids, const Splits& splits,
                     const TrainConfig& config);
MethodRun run_method(Method method, const SyntheticDataset& dataset, const Splits& splits,
                     const TrainConfig& config);

inline const std::vector<double> kDefaultFractions{1.0, 0.5, 0.2, 0.05, 0.01};

struct SweepResult {
  std::vector<double> fractions;
  std::vector<Method> methods;
  // reports[m][f] for methods[m] at fractions[f]
  std::vector<std::vector<MetricReport>> reports;
  std::vector<std::size_t> train_sizes;

  const MetricReport& at(Method method, double fraction) const;
};

SweepResult sparsity_sweep(const SyntheticDataset& dataset, const Splits& splits,
                           std::span<const double> fractions, std::span<const Method> methods,
                           const TrainConfig& config, std::uint64_t seed);

// F1 per (method, fraction) in the column layout "method,100%,50%,..." plus a
// final "improvement" row: relative F1 gain of l2r over the best other method.
void write_sweep_table(std::ostream& out, const SweepResult& result);
// Long format: method,fraction,train_size,P,R,F1,match_dist,match90
void write_sweep_long(std::ostream& out, const SweepResult& result);
std::string sweep_summary_json(const SweepResult& result);

}  // namespace l2r
