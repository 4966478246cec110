#include "l2r/residual_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "l2r/validator.hpp"

namespace l2r {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool uses_theory(const ModelShape& shape) { return shape.architecture == Architecture::residual; }

// Hidden-layer nonlinearity: logistic for the residual network, ReLU for the
// plain baseline.
VectorXd activate(const ModelShape& shape, const VectorXd& a) {
  if (uses_theory(shape)) return a.unaryExpr(&logistic);
  return a.cwiseMax(0.0);
}

VectorXd activation_slope(const ModelShape& shape, const VectorXd& a, const VectorXd& z) {
  if (uses_theory(shape)) return z.array() * (1.0 - z.array());
  return (a.array() > 0.0).cast<double>();
}

void check_shapes(const ModelParams& params, const ModelContext& ctx) {
  const auto& s = params.shape;
  if (s.edges != ctx.net().edge_count()) {
    throw StructuralError("model built for " + std::to_string(s.edges) + " edges, network has " +
                          std::to_string(ctx.net().edge_count()));
  }
  if (s.query_width != ctx.query_width()) {
    throw StructuralError("model query width " + std::to_string(s.query_width) +
                          " does not match the traffic tensor (" +
                          std::to_string(ctx.query_width()) + ")");
  }
  if (params.w1.rows() != static_cast<Eigen::Index>(s.hidden) ||
      params.w5.rows() != static_cast<Eigen::Index>(s.edges) ||
      params.w5.cols() != static_cast<Eigen::Index>(params.head_input_width()) ||
      params.w3.cols() != ctx.conditions().size()) {
    throw StructuralError("model parameter blocks have inconsistent shapes");
  }
}

// Everything forward computes for one sample; kept for backward.
struct Trace {
  VectorXd query, speeds;
  VectorXd a1, z1, a2, z2;
  VectorXd hidden, a4, z4;
  VectorXd head_in, s, raw, p;
  VectorXd theory;
};

// Parameter-only quantities shared by every sample: the condition embedding.
struct SharedTrace {
  VectorXd a3, z3;
};

SharedTrace shared_forward(const ModelParams& params, const ModelContext& ctx) {
  SharedTrace out;
  out.a3 = params.w3 * ctx.conditions() + params.b3;
  out.z3 = activate(params.shape, out.a3);
  return out;
}

VectorXd theory_vector(const ModelShape& shape, const EdgeMask& theory) {
  if (!uses_theory(shape)) return {};
  if (theory.size() != shape.edges) {
    throw StructuralError("theory route has " + std::to_string(theory.size()) +
                          " entries, model expects " + std::to_string(shape.edges));
  }
  VectorXd r(static_cast<Eigen::Index>(shape.edges));
  for (std::size_t j = 0; j < theory.size(); ++j) r[static_cast<Eigen::Index>(j)] = theory[j];
  return r;
}

Trace sample_forward(const ModelParams& params, const ModelContext& ctx,
                     const SharedTrace& shared, const RouteQuery& query, const EdgeMask& theory) {
  const auto& shape = params.shape;
  const auto h = static_cast<Eigen::Index>(shape.hidden);
  const auto m = static_cast<Eigen::Index>(shape.edges);

  Trace t;
  t.theory = theory_vector(shape, theory);
  t.query = ctx.query_input(query);
  t.speeds = ctx.traffic_input(query.departure_interval);

  t.a1 = params.w1 * t.query + params.b1;
  t.z1 = activate(shape, t.a1);
  t.a2 = params.w2 * t.speeds + params.b2;
  t.z2 = activate(shape, t.a2);

  t.hidden.resize(3 * h);
  t.hidden << t.z1, t.z2, shared.z3;
  t.a4 = params.w4 * t.hidden + params.b4;
  t.z4 = activate(shape, t.a4);

  if (uses_theory(shape)) {
    t.head_in.resize(m + h);
    t.head_in << t.theory, t.z4;
  } else {
    t.head_in = t.z4;
  }
  t.s = (params.w5 * t.head_in + params.b5).unaryExpr(&logistic);

  if (!uses_theory(shape)) {
    t.raw = t.s;
    t.p = t.s;
  } else if (shape.combine == ResidualCombine::additive) {
    t.raw = t.s + t.theory;
    t.p = t.raw.cwiseMax(0.0).cwiseMin(1.0);
  } else {
    t.raw = t.theory.array() + (1.0 - 2.0 * t.theory.array()) * t.s.array();
    t.p = t.raw;
  }
  return t;
}

// d p / d s elementwise.
VectorXd combine_slope(const ModelShape& shape, const Trace& t) {
  if (!uses_theory(shape)) return VectorXd::Ones(t.s.size());
  if (shape.combine == ResidualCombine::additive) {
    // The clamp passes gradient only strictly inside [0,1].
    return ((t.raw.array() > 0.0) && (t.raw.array() < 1.0)).cast<double>();
  }
  return 1.0 - 2.0 * t.theory.array();
}

double clamp_prob(double p) {
  return std::clamp(p, kLossProbabilityFloor, 1.0 - kLossProbabilityFloor);
}

double bce(const VectorXd& p, const EdgeMask& target) {
  if (static_cast<std::size_t>(p.size()) != target.size()) {
    throw StructuralError("prediction has " + std::to_string(p.size()) +
                          " entries, target has " + std::to_string(target.size()));
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double q = clamp_prob(p[j]);
    sum += target[static_cast<std::size_t>(j)] ? -std::log(q) : -std::log1p(-q);
  }
  return p.size() == 0 ? 0.0 : sum / static_cast<double>(p.size());
}

SoftRoute to_soft(const VectorXd& p) { return SoftRoute{{p.data(), p.data() + p.size()}}; }

ModelShape shape_for(Architecture architecture, const TrainConfig& config,
                     const ModelContext& ctx) {
  ModelShape shape;
  shape.architecture = architecture;
  shape.combine = config.combine;
  shape.edges = ctx.net().edge_count();
  shape.hidden = config.hidden;
  shape.query_width = ctx.query_width();
  return shape;
}

}  // namespace

ModelParams ModelParams::zeros(const ModelShape& shape) {
  if (shape.edges == 0 || shape.hidden == 0 || shape.query_width == 0) {
    throw StructuralError("model dimensions must be positive");
  }
  const auto h = static_cast<Eigen::Index>(shape.hidden);
  const auto m = static_cast<Eigen::Index>(shape.edges);
  ModelParams p;
  p.shape = shape;
  p.w1 = MatrixXd::Zero(h, static_cast<Eigen::Index>(shape.query_width));
  p.b1 = VectorXd::Zero(h);
  p.w2 = MatrixXd::Zero(h, m);
  p.b2 = VectorXd::Zero(h);
  p.w3 = MatrixXd::Zero(h, m * static_cast<Eigen::Index>(kConditionWidth));
  p.b3 = VectorXd::Zero(h);
  p.w4 = MatrixXd::Zero(h, 3 * h);
  p.b4 = VectorXd::Zero(h);
  p.w5 = MatrixXd::Zero(m, static_cast<Eigen::Index>(p.head_input_width()));
  p.b5 = VectorXd::Zero(m);
  return p;
}

std::size_t ModelParams::head_input_width() const {
  return uses_theory(shape) ? shape.edges + shape.hidden : shape.hidden;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each_block([&](const auto& block) { n += static_cast<std::size_t>(block.size()); });
  return n;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each_block([&](const auto& block) { ok = ok && block.allFinite(); });
  return ok;
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  const auto& s = a.shape;
  const auto& t = b.shape;
  if (s.architecture != t.architecture || s.combine != t.combine || s.edges != t.edges ||
      s.hidden != t.hidden || s.query_width != t.query_width) {
    return false;
  }
  return a.w1 == b.w1 && a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2 && a.w3 == b.w3 &&
         a.b3 == b.b3 && a.w4 == b.w4 && a.b4 == b.b4 && a.w5 == b.w5 && a.b5 == b.b5;
}

ModelParams init_params(const ModelShape& shape, std::uint64_t seed) {
  ModelParams p = ModelParams::zeros(shape);
  std::mt19937_64 rng(seed);
  auto fill_layer = [&](MatrixXd& w, VectorXd& b) {
    const double bound = std::sqrt(1.0 / static_cast<double>(w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = dist(rng);
  };
  fill_layer(p.w1, p.b1);
  fill_layer(p.w2, p.b2);
  fill_layer(p.w3, p.b3);
  fill_layer(p.w4, p.b4);
  fill_layer(p.w5, p.b5);
  return p;
}

std::size_t query_width_for(std::size_t interval_count) noexcept {
  return interval_count > 1 ? 5 : 4;
}

std::vector<double> encode_query(const RouteQuery& query, const RoadNetwork& net,
                                 std::size_t interval_count) {
  check_query(net, query);
  const auto& box = net.bounds();
  auto scale = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.5; };
  const Point s = net.intersection(query.origin).position;
  const Point e = net.intersection(query.destination).position;
  std::vector<double> out{scale(s.x, box.min.x, box.max.x), scale(s.y, box.min.y, box.max.y),
                          scale(e.x, box.min.x, box.max.x), scale(e.y, box.min.y, box.max.y)};
  if (interval_count > 1) {
    if (query.departure_interval >= interval_count) {
      throw IndexError("departure interval " + std::to_string(query.departure_interval) +
                       " out of range");
    }
    out.push_back(static_cast<double>(query.departure_interval) /
                  static_cast<double>(interval_count - 1));
  }
  return out;
}

ModelContext::ModelContext(const RoadNetwork& net, const TrafficTensor& traffic)
    : net_(&net), traffic_(&traffic) {
  if (traffic.segment_count() != net.edge_count()) {
    throw StructuralError("traffic tensor does not match the network's segment count");
  }
  const auto flat = net.flattened_conditions();
  conditions_ = Eigen::Map<const VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

Eigen::VectorXd ModelContext::query_input(const RouteQuery& query) const {
  const auto q = encode_query(query, *net_, traffic_->interval_count());
  return Eigen::Map<const VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
}

// Speeds enter divided by the network's top speed limit so they share the
// [0, ~1] range of the other inputs.
Eigen::VectorXd ModelContext::traffic_input(std::size_t interval) const {
  const auto v = traffic_->speeds_at(interval);
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())) /
         net_->max_speed_limit();
}

SoftRoute forward(const ModelParams& params, const ModelContext& ctx, const RouteQuery& query,
                  const EdgeMask& theory) {
  check_shapes(params, ctx);
  const auto shared = shared_forward(params, ctx);
  return to_soft(sample_forward(params, ctx, shared, query, theory).p);
}

SoftRoute forward(const ModelParams& params, const RouteQuery& query,
                  const TrafficTensor& traffic, const RoadNetwork& net,
                  const TheoryRoute& theory) {
  return forward(params, ModelContext(net, traffic), query, theory.edges);
}

double loss(const SoftRoute& probs, const EdgeMask& target) {
  const Eigen::Map<const VectorXd> p(probs.probs.data(),
                                     static_cast<Eigen::Index>(probs.probs.size()));
  return bce(p, target);
}

double loss(const SoftRoute& probs, const Route& target) { return loss(probs, target.edges); }

std::vector<TrainingExample> make_examples(std::span<const Route> routes, const RoadNetwork& net,
                                           const TrafficTensor& traffic, bool with_theory) {
  std::vector<TrainingExample> out;
  out.reserve(routes.size());
  for (const auto& route : routes) {
    TrainingExample ex{route.query, route.edges, {}};
    if (with_theory) ex.theory = astar(net, traffic, route.query).edges;
    out.push_back(std::move(ex));
  }
  return out;
}

double total_loss(const ModelParams& params, const ModelContext& ctx,
                  std::span<const TrainingExample> batch) {
  check_shapes(params, ctx);
  const auto shared = shared_forward(params, ctx);
  double sum = 0.0;
  for (const auto& ex : batch) {
    sum += bce(sample_forward(params, ctx, shared, ex.query, ex.theory).p, ex.target);
  }
  return sum;
}

double mean_loss(const ModelParams& params, const ModelContext& ctx,
                 std::span<const TrainingExample> batch) {
  if (batch.empty()) return 0.0;
  return total_loss(params, ctx, batch) / static_cast<double>(batch.size());
}

ModelParams backward(const ModelParams& params, const ModelContext& ctx,
                     std::span<const TrainingExample> batch) {
  check_shapes(params, ctx);
  const auto& shape = params.shape;
  const auto h = static_cast<Eigen::Index>(shape.hidden);
  const auto m = static_cast<Eigen::Index>(shape.edges);
  ModelParams grad = ModelParams::zeros(shape);
  if (batch.empty()) throw ConfigError("backward needs a nonempty batch");

  const auto shared = shared_forward(params, ctx);
  const VectorXd slope3 = activation_slope(shape, shared.a3, shared.z3);
  VectorXd delta3_sum = VectorXd::Zero(h);

  for (const auto& ex : batch) {
    const Trace t = sample_forward(params, ctx, shared, ex.query, ex.theory);
    if (ex.target.size() != static_cast<std::size_t>(m)) {
      throw StructuralError("target length does not match the model's edge count");
    }

    // dL/dp of the mean clamped BCE; zero where the probability clamp saturates.
    VectorXd dp(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double p = t.p[j];
      if (p <= kLossProbabilityFloor || p >= 1.0 - kLossProbabilityFloor) {
        dp[j] = 0.0;
      } else {
        const double y = ex.target[static_cast<std::size_t>(j)];
        dp[j] = (p - y) / (p * (1.0 - p)) / static_cast<double>(m);
      }
    }

    const VectorXd du =
        (dp.array() * combine_slope(shape, t).array() * t.s.array() * (1.0 - t.s.array()))
            .matrix();
    grad.w5.noalias() += du * t.head_in.transpose();
    grad.b5 += du;

    // R(a) is an input, so only the Z4 tail of the head input carries gradient.
    const VectorXd d_head = params.w5.transpose() * du;
    const VectorXd d_z4 = d_head.tail(h);
    const VectorXd d_a4 = (d_z4.array() * activation_slope(shape, t.a4, t.z4).array()).matrix();
    grad.w4.noalias() += d_a4 * t.hidden.transpose();
    grad.b4 += d_a4;

    const VectorXd d_hidden = params.w4.transpose() * d_a4;
    const VectorXd d_a1 =
        (d_hidden.segment(0, h).array() * activation_slope(shape, t.a1, t.z1).array()).matrix();
    const VectorXd d_a2 =
        (d_hidden.segment(h, h).array() * activation_slope(shape, t.a2, t.z2).array()).matrix();
    delta3_sum += (d_hidden.segment(2 * h, h).array() * slope3.array()).matrix();

    grad.w1.noalias() += d_a1 * t.query.transpose();
    grad.b1 += d_a1;
    grad.w2.noalias() += d_a2 * t.speeds.transpose();
    grad.b2 += d_a2;
  }

  // The condition input is identical for every sample, so its outer product
  // is taken once with the summed delta.
  grad.w3.noalias() = delta3_sum * ctx.conditions().transpose();
  grad.b3 = delta3_sum;

  const double inv = 1.0 / static_cast<double>(batch.size());
  grad.for_each_block([inv](auto& block) { block *= inv; });
  return grad;
}

namespace {

void validate_train_config(const TrainConfig& config) {
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    throw ConfigError("learning_rate must be finite and non-negative");
  }
  if (config.epochs == 0) throw ConfigError("epochs must be at least 1");
  if (config.batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (config.hidden == 0) throw ConfigError("hidden width must be at least 1");
  if (!(config.momentum >= 0.0 && config.momentum < 1.0)) {
    throw ConfigError("momentum must be in [0, 1)");
  }
}

// params += velocity, velocity = mu * velocity - lr * grad
template <typename Block>
void momentum_step(Block& param, Block& velocity, const Block& grad, double lr, double mu) {
  velocity = mu * velocity - lr * grad;
  param += velocity;
}

void apply_update(ModelParams& params, ModelParams& velocity, const ModelParams& grad,
                  const TrainConfig& config) {
  const double lr = config.learning_rate;
  const double mu = config.optimizer == Optimizer::momentum ? config.momentum : 0.0;
  momentum_step(params.w1, velocity.w1, grad.w1, lr, mu);
  momentum_step(params.b1, velocity.b1, grad.b1, lr, mu);
  momentum_step(params.w2, velocity.w2, grad.w2, lr, mu);
  momentum_step(params.b2, velocity.b2, grad.b2, lr, mu);
  momentum_step(params.w3, velocity.w3, grad.w3, lr, mu);
  momentum_step(params.b3, velocity.b3, grad.b3, lr, mu);
  momentum_step(params.w4, velocity.w4, grad.w4, lr, mu);
  momentum_step(params.b4, velocity.b4, grad.b4, lr, mu);
  momentum_step(params.w5, velocity.w5, grad.w5, lr, mu);
  momentum_step(params.b5, velocity.b5, grad.b5, lr, mu);
}

}  // namespace

TrainResult train(const TrainConfig& config, Architecture architecture,
                  const ModelContext& ctx, std::span<const TrainingExample> train_set,
                  std::span<const TrainingExample> val_set) {
  validate_train_config(config);
  if (train_set.empty()) throw ConfigError("training split is empty");

  const ModelShape shape = shape_for(architecture, config, ctx);
  TrainResult result;
  ModelParams params = init_params(shape, config.seed);
  if (config.head_bias_init && architecture == Architecture::residual) {
    params.b5.setConstant(*config.head_bias_init);
  }
  ModelParams velocity = ModelParams::zeros(shape);

  auto score = [&](const ModelParams& p) {
    result.train_loss.push_back(mean_loss(p, ctx, train_set));
    if (!val_set.empty()) {
      result.val_loss.push_back(mean_loss(p, ctx, val_set));
      return result.val_loss.back();
    }
    return result.train_loss.back();
  };

  double best = score(params);
  result.params = params;
  result.best_epoch = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<TrainingExample> batch;
  batch.reserve(config.batch_size);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t k = start; k < stop; ++k) batch.push_back(train_set[order[k]]);
      apply_update(params, velocity, backward(params, ctx, batch), config);
    }
    const double current = score(params);
    if (current < best) {
      best = current;
      result.params = params;
      result.best_epoch = epoch;
    }
  }
  return result;
}

Route predict(const ModelParams& params, const ModelContext& ctx, const RouteQuery& query) {
  check_query(ctx.net(), query);
  EdgeMask theory;
  if (uses_theory(params.shape)) theory = astar(ctx.net(), ctx.traffic(), query).edges;
  return project(ctx.net(), forward(params, ctx, query, theory), query);
}

Route predict(const ModelParams& params, const RouteQuery& query, const TrafficTensor& traffic,
              const RoadNetwork& net) {
  return predict(params, ModelContext(net, traffic), query);
}

}  // namespace l2r
