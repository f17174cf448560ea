#pragma once

#include <cstdint>
#include <vector>

#include "kref/instances.hpp"
#include "kref/kikuchi.hpp"

namespace kref {

/// Adversarial lower-bound experiment for the tuple-indexed matrix: one
/// variable carries ell' = min(ceil(m/2n), ell) same-sign clauses with
/// pairwise disjoint tails; the remaining clauses are random but placed so
/// that no other clause pair touches the distinguished 2^{ell'} x 2^{ell'}
/// submatrix.
struct WamExperiment {
    XorInstance instance;
    std::vector<int> owner;
    int special_u = 1;
    int ell_prime = 0;
    std::vector<std::size_t> special_clauses;
    WamMatrix matrix;
    double estimate = 0.0;             // power-iteration lower bound on ||A||_2
    std::uint64_t submatrix_dim = 0;   // 2^{ell'}
    std::vector<std::size_t> submatrix_row_counts;
    bool submatrix_rows_ok = false;    // every row has exactly C(ell',2) ones
    long expected_row_ones = 0;        // C(ell',2)
};

WamExperiment run_wam_experiment(int n, int m, long ell, std::uint64_t seed, int power_iters = 200);

}  // namespace kref
