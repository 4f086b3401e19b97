#pragma once

#include <iosfwd>

namespace ctrlgrad {

/// Runs a compact invariant suite (semigroup, Hamilton–Cayley, Kalman vs
/// Gramian, prox/resolvent, descent certificate, steering, determinism) with
/// fixed seeds. Prints one PASS/FAIL line per check; true iff all pass.
bool run_selftest(std::ostream& out);

} // namespace ctrlgrad
