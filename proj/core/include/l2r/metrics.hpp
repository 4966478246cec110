#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "l2r/roadnet.hpp"

namespace l2r {

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PrecisionRecallF1 precision_recall_f1(const EdgeMask& pred, const EdgeMask& truth);
PrecisionRecallF1 precision_recall_f1(const Route& pred, const Route& truth);

// Length of pred ∩ truth over length of truth. DomainError for an empty truth.
double match_distance_ratio(const RoadNetwork& net, const EdgeMask& pred, const EdgeMask& truth);
double match_distance_ratio(const RoadNetwork& net, const Route& pred, const Route& truth);

inline constexpr double kMatchThreshold = 0.9;

// Fraction of pairs whose match distance ratio is at least 0.9.
double ninety_percent_match(std::span<const Route> preds, std::span<const Route> truths,
                            const RoadNetwork& net);

struct MetricReport {
  std::string method;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double match_distance = 0.0;
  double match90 = 0.0;
  std::size_t count = 0;
};

// Per-route averages of P, R, F1 and match distance, plus the 90% match fraction.
MetricReport evaluate_routes(const std::string& method, std::span<const Route> preds,
                             std::span<const Route> truths, const RoadNetwork& net);

// "method,P,R,F1,match_dist,match90"
void write_metric_csv(std::ostream& out, std::span<const MetricReport> reports);

}  // namespace l2r
