#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kref {

/// Symmetric sparse matrix on a compact index range [0, dim). Entries are
/// stored once per unordered pair (row <= col); matvec and norms expand the
/// symmetry.
struct SparseSym {
    std::size_t dim = 0;
    struct Entry {
        std::uint32_t row, col;
        double value;
    };
    std::vector<Entry> entries;

    void add(std::uint32_t r, std::uint32_t c, double v) {
        if (r <= c)
            entries.push_back({r, c, v});
        else
            entries.push_back({c, r, v});
    }
    void matvec(const double* x, double* y) const;
    double max_row_l1() const;
    double frobenius() const;
    bool is_zero() const;
};

struct SpecnormOptions {
    std::size_t dense_cap = 4096;   // largest dimension factorized densely
    int lanczos_steps = 360;        // Krylov budget for the estimate
    int max_retries = 48;           // doublings of the tau margin
    std::uint64_t seed = 0x6b696b72ull;  // start-vector seed (deterministic)
};

struct SpecnormResult {
    double sigma = 0.0;       // certified upper bound on ||M||_2
    double estimate = 0.0;    // Rayleigh estimate (lower bound up to fp error)
    std::string method;       // "zero" | "factorized" | "fallback"
    int retries = 0;
};

/// Certified upper bound on the spectral norm of a symmetric matrix.
/// A Lanczos run supplies the estimate lambda_hat; candidates
/// lambda_hat (1 + tau 2^a) are certified by dense LLT factorizations of
/// sigma I -/+ M with a floating-point safety margin on the diagonal. When
/// dim exceeds dense_cap or certification keeps failing, the always-sound
/// min(max row l1, Frobenius) bound is returned instead.
SpecnormResult certified_specnorm(const SparseSym& m, double tau, const SpecnormOptions& opts = {});

/// Plain power iteration; every reported value ||Mv|| / ||v|| is a lower
/// bound on the spectral norm. The best value over the run is returned.
double power_iteration_estimate(const SparseSym& m, int iters, std::uint64_t seed,
                                const std::vector<double>* warm_start = nullptr);

}  // namespace kref
