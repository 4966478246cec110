#include "l2r/metrics.hpp"

#include <cstdio>

namespace l2r {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw StructuralError("edge vectors differ in length (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

}  // namespace

PrecisionRecallF1 precision_recall_f1(const EdgeMask& pred, const EdgeMask& truth) {
  check_lengths(pred.size(), truth.size());
  std::size_t hit = 0, predicted = 0, actual = 0;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    predicted += pred[j] != 0;
    actual += truth[j] != 0;
    hit += pred[j] != 0 && truth[j] != 0;
  }
  PrecisionRecallF1 out;
  out.precision = predicted ? static_cast<double>(hit) / static_cast<double>(predicted) : 0.0;
  out.recall = actual ? static_cast<double>(hit) / static_cast<double>(actual) : 0.0;
  const double denom = out.precision + out.recall;
  out.f1 = denom > 0.0 ? 2.0 * out.precision * out.recall / denom : 0.0;
  return out;
}

PrecisionRecallF1 precision_recall_f1(const Route& pred, const Route& truth) {
  return precision_recall_f1(pred.edges, truth.edges);
}

double match_distance_ratio(const RoadNetwork& net, const EdgeMask& pred, const EdgeMask& truth) {
  check_lengths(pred.size(), truth.size());
  check_lengths(truth.size(), net.edge_count());
  double matched = 0.0, total = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (!truth[j]) continue;
    const double len = net.segments()[j].length;
    total += len;
    if (pred[j]) matched += len;
  }
  if (total <= 0.0) throw DomainError("match distance ratio is undefined for an empty true route");
  return matched / total;
}

double match_distance_ratio(const RoadNetwork& net, const Route& pred, const Route& truth) {
  return match_distance_ratio(net, pred.edges, truth.edges);
}

double ninety_percent_match(std::span<const Route> preds, std::span<const Route> truths,
                            const RoadNetwork& net) {
  check_lengths(preds.size(), truths.size());
  if (preds.empty()) throw DomainError("90% match needs at least one route pair");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    hits += match_distance_ratio(net, preds[i], truths[i]) >= kMatchThreshold;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

MetricReport evaluate_routes(const std::string& method, std::span<const Route> preds,
                             std::span<const Route> truths, const RoadNetwork& net) {
  check_lengths(preds.size(), truths.size());
  if (preds.empty()) throw DomainError("cannot evaluate an empty route set");
  MetricReport r;
  r.method = method;
  r.count = preds.size();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto prf = precision_recall_f1(preds[i], truths[i]);
    r.precision += prf.precision;
    r.recall += prf.recall;
    r.f1 += prf.f1;
    r.match_distance += match_distance_ratio(net, preds[i], truths[i]);
  }
  const double n = static_cast<double>(preds.size());
  r.precision /= n;
  r.recall /= n;
  r.f1 /= n;
  r.match_distance /= n;
  r.match90 = ninety_percent_match(preds, truths, net);
  return r;
}

void write_metric_csv(std::ostream& out, std::span<const MetricReport> reports) {
  out << "method,P,R,F1,match_dist,match90\n";
  char buf[256];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.method.c_str(), r.precision,
                  r.recall, r.f1, r.match_distance, r.match90);
    out << buf;
  }
}

}  // namespace l2r
