#pragma once

#include "l2r/residual_model.hpp"
#include "l2r/roadnet.hpp"

namespace l2r {

// Additive floor keeping every complement weight strictly positive.
inline constexpr double kValidatorEpsilon = 1e-6;

// Maps soft edge preferences to the valid path minimising sum(1 - p_j + eps).
// Throws StructuralError on a length mismatch, DomainError for probabilities
// outside [0,1] and NoPathError when the destination is unreachable.
Route project(const RoadNetwork& net, const SoftRoute& soft, const RouteQuery& query);

}  // namespace l2r
