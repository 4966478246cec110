#include "l2r/validator.hpp"

#include <cmath>

namespace l2r {

Route project(const RoadNetwork& net, const SoftRoute& soft, const RouteQuery& query) {
  if (soft.probs.size() != net.edge_count()) {
    throw StructuralError("soft route has " + std::to_string(soft.probs.size()) +
                          " entries, network has " + std::to_string(net.edge_count()));
  }
  std::vector<double> weights(soft.probs.size());
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double p = soft.probs[j];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("soft route probability " + std::to_string(j) + " is outside [0,1]");
    }
    weights[j] = (1.0 - p) + kValidatorEpsilon;
  }
  return Route{query, dijkstra(net, weights, query).edges};
}

}  // namespace l2r
