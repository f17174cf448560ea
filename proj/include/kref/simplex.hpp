#pragma once

#include <vector>

#include "kref/rational.hpp"

namespace kref {

/// Dense exact-rational simplex, Bland's rule (no cycling, no tolerances).
/// Problems here are tiny: 2^k constraint systems with k <= 8.

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded } status;
    Rat objective;
    std::vector<Rat> solution;
};

/// max c.x  s.t.  A x <= b, x >= 0, with every b_i >= 0 (slack basis start).
LpResult simplex_max_nonneg_rhs(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                                const std::vector<Rat>& c);

/// Feasibility of A x = b, x >= 0 by phase-I artificial minimization.
/// On success returns a feasible point.
LpResult simplex_feasible_eq(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b);

/// max c.x  s.t.  A x = b, x >= 0 (two-phase).
LpResult simplex_max_eq(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                        const std::vector<Rat>& c);

}  // namespace kref
