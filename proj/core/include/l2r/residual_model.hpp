#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "l2r/roadnet.hpp"
#include "l2r/router.hpp"
#include "l2r/traffic.hpp"

namespace l2r {

// residual: theory-guided network, logistic activations, head sees [R(a), Z4]
//           and its output is combined with R(a).
// plain:    the NN baseline, ReLU hidden layers, head sees Z4 only.
enum class Architecture : std::uint32_t { residual = 0, plain = 1 };

// How the residual head output s = sigma(W5 [R(a), Z4] + b5) meets R(a).
//   additive: p = clamp(s + R(a), 0, 1)
//   signed:   p = R(a) + (1 - 2 R(a)) s, i.e. s on off-theory edges and 1 - s
//             on theory edges, so the head can both add and remove edges.
// Both reduce to R(a) as s -> 0.
enum class ResidualCombine : std::uint32_t { additive = 0, signed_correction = 1 };

struct ModelShape {
  Architecture architecture = Architecture::residual;
  ResidualCombine combine = ResidualCombine::signed_correction;
  std::size_t edges = 0;        // M
  std::size_t hidden = 32;      // H
  std::size_t query_width = 4;  // 4, or 5 when the departure interval is encoded
};

// Weights of the five layers. Also used to hold gradients of the same shape.
struct ModelParams {
  ModelShape shape;
  Eigen::MatrixXd w1, w2, w3, w4, w5;
  Eigen::VectorXd b1, b2, b3, b4, b5;

  static ModelParams zeros(const ModelShape& shape);

  std::size_t head_input_width() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

  // Visits every (matrix or vector) block in declaration order:
  // w1, b1, w2, b2, ..., w5, b5.
  template <typename F>
  void for_each_block(F&& f) {
    f(w1); f(b1); f(w2); f(b2); f(w3); f(b3); f(w4); f(b4); f(w5); f(b5);
  }
  template <typename F>
  void for_each_block(F&& f) const {
    f(w1); f(b1); f(w2); f(b2); f(w3); f(b3); f(w4); f(b4); f(w5); f(b5);
  }

  friend bool operator==(const ModelParams& a, const ModelParams& b);
};

// Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) per layer from a seeded generator.
ModelParams init_params(const ModelShape& shape, std::uint64_t seed);

struct SoftRoute {
  std::vector<double> probs;
};

std::size_t query_width_for(std::size_t interval_count) noexcept;

// [S_x, S_y, E_x, E_y] scaled into [0,1] by the network bounding box, plus
// departure_interval / (T - 1) when interval_count > 1.
std::vector<double> encode_query(const RouteQuery& query, const RoadNetwork& net,
                                 std::size_t interval_count = 1);

// Inputs shared by every sample of one network + traffic pair.
class ModelContext {
 public:
  ModelContext(const RoadNetwork& net, const TrafficTensor& traffic);

  const RoadNetwork& net() const noexcept { return *net_; }
  const TrafficTensor& traffic() const noexcept { return *traffic_; }
  const Eigen::VectorXd& conditions() const noexcept { return conditions_; }
  std::size_t query_width() const noexcept { return query_width_for(traffic_->interval_count()); }

  Eigen::VectorXd query_input(const RouteQuery& query) const;
  Eigen::VectorXd traffic_input(std::size_t interval) const;

 private:
  const RoadNetwork* net_;
  const TrafficTensor* traffic_;
  Eigen::VectorXd conditions_;
};

SoftRoute forward(const ModelParams& params, const ModelContext& ctx, const RouteQuery& query,
                  const EdgeMask& theory);
SoftRoute forward(const ModelParams& params, const RouteQuery& query,
                  const TrafficTensor& traffic, const RoadNetwork& net,
                  const TheoryRoute& theory);

inline constexpr double kLossProbabilityFloor = 1e-7;

// Mean per-edge binary cross-entropy with p clamped to [1e-7, 1 - 1e-7].
double loss(const SoftRoute& probs, const EdgeMask& target);
double loss(const SoftRoute& probs, const Route& target);

// One supervised sample. theory holds the cached A* mask (unused by the plain
// architecture, where it may be empty).
struct TrainingExample {
  RouteQuery query;
  EdgeMask target;
  EdgeMask theory;
};

std::vector<TrainingExample> make_examples(std::span<const Route> routes, const RoadNetwork& net,
                                           const TrafficTensor& traffic, bool with_theory = true);

// Sum of per-sample losses.
double total_loss(const ModelParams& params, const ModelContext& ctx,
                  std::span<const TrainingExample> batch);
double mean_loss(const ModelParams& params, const ModelContext& ctx,
                 std::span<const TrainingExample> batch);

// Exact gradient of mean_loss with respect to every parameter.
ModelParams backward(const ModelParams& params, const ModelContext& ctx,
                     std::span<const TrainingExample> batch);

enum class Optimizer { sgd, momentum };

struct TrainConfig {
  double learning_rate = 0.3;
  std::size_t epochs = 150;
  std::size_t batch_size = 4;
  std::uint64_t seed = 7;
  std::size_t hidden = 32;
  Optimizer optimizer = Optimizer::momentum;
  double momentum = 0.9;
  ResidualCombine combine = ResidualCombine::signed_correction;
  // When set, b5 of the residual head starts at this constant instead of the
  // uniform draw.
  std::optional<double> head_bias_init;
};

struct TrainResult {
  ModelParams params;               // parameters with the lowest validation loss
  std::vector<double> train_loss;   // [0] before the first update, then per epoch
  std::vector<double> val_loss;     // same indexing; empty without a validation split
  std::size_t best_epoch = 0;
};

// Minibatch gradient descent with a seeded shuffle; deterministic given config.
// Throws ConfigError for an empty train split or invalid hyperparameters.
TrainResult train(const TrainConfig& config, Architecture architecture,
                  const ModelContext& ctx, std::span<const TrainingExample> train_set,
                  std::span<const TrainingExample> val_set);

// astar -> forward -> project for the residual architecture; forward -> project
// for the plain one. The result always passes is_valid_path.
Route predict(const ModelParams& params, const RouteQuery& query, const TrafficTensor& traffic,
              const RoadNetwork& net);
Route predict(const ModelParams& params, const ModelContext& ctx, const RouteQuery& query);

// Binary checkpoint; see README for the byte layout.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);
// Rejects a checkpoint whose edge count differs from expected_edges.
ModelParams load_checkpoint(const std::filesystem::path& path, std::size_t expected_edges);

}  // namespace l2r
