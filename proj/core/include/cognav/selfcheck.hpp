#pragma once

#include <iosfwd>

namespace cognav {

// Runs the ten-point acceptance battery: planner-vs-oracle equivalence,
// ground-truth round-trip consistency, metric formula exactness, matching
// optimality, clustering and eigensolver accuracy, bearing codec inversion,
// parser fuzzing, perplexity filter recomputation, stratum boundaries, and
// command determinism. Prints one [PASS]/[FAIL] line per check to `out`
// and returns true iff every check passed.
bool run_selfcheck(std::ostream& out);

}  // namespace cognav
