#pragma once

#include "tvckit/path.hpp"
#include "tvckit/problem.hpp"

namespace tvckit {

/// Samples q(0..horizon). Scaled perturbations read c*(t) from `optimal`,
/// which must then be non-null and reach `horizon`. Entries at pinned
/// initial slots are forced to zero: admissible variations never move fixed data.
Path perturbation_path(const ProblemSpec& spec, const PerturbationSpec& q, int horizon,
                       const Path* optimal = nullptr);

/// Pointwise a*q1 + b*q2 of two sampled perturbations.
Path combine(double a, const Path& q1, double b, const Path& q2);

}  // namespace tvckit
