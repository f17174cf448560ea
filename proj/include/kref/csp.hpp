#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kref/instances.hpp"
#include "kref/rational.hpp"
#include "kref/refute.hpp"

namespace kref {

/// Exact Fourier expansion P_hat(S) = 2^-k sum_z P(z) z_S.
std::map<std::uint32_t, Rat> fourier_expansion(const Predicate& p);

/// Builtin predicate library.
Predicate or_predicate(int k);
Predicate parity_predicate(int k);       // P = 1 iff prod z_i = 1
Predicate nae_predicate(int k);          // not-all-equal
Predicate hadamard_q1_predicate();       // truncated Hadamard, q = 1 (3 bits)
Predicate predicate_from_truth_table(const std::string& bits, const std::string& name = "");
std::optional<Predicate> builtin_predicate(const std::string& name);

/// Is there a t-wise uniform distribution supported on P^{-1}(1)?
/// Exact-rational LP feasibility; k <= 8 guard.
bool has_t_wise_support(const Predicate& p, int t);

/// Smallest t with no t-wise uniform supported distribution (t(P) <= k for
/// any non-trivial P).
int uniformity_degree(const Predicate& p);

struct SeparatingPolynomial {
    int t = 0;
    Rat delta;
    std::map<std::uint32_t, Rat> qhat;  // 0 < |S| <= t

    Rat eval_mask(std::uint32_t w, int k) const;
};

/// Maximizes delta subject to P(z) <= 1 - delta + Q(z) pointwise with Q of
/// degree <= t and no constant term (exact LP). Errors when a t-wise
/// supported distribution exists (no separator possible).
SeparatingPolynomial separating_polynomial(const Predicate& p, int t);

/// max E_zeta[P] over t-wise uniform distributions zeta on {+-1}^k (the dual
/// LP; equals 1 - delta_t).
Rat t_wise_max_satisfied(const Predicate& p, int t);

struct CspRefuteResult {
    double alg_val = 1.0;
    int t = 0;
    Rat delta;
    std::map<std::uint32_t, Rat> qhat;
    /// per Fourier-term alg-vals: (mask, |Q_hat|, bound, kind)
    struct TermBound {
        std::uint32_t mask;
        double qhat_abs;
        double bound;
        std::string kind;  // "linear-l1" | "refute-poly"
    };
    std::vector<TermBound> terms;
    std::vector<RefutationCertificate> sub_certificates;
    std::string to_json() const;
};

/// Smoothed/semirandom CSP refutation: splits P through the separating
/// polynomial, refutes each Fourier piece phi_T two-sidedly, and combines
/// alg-val = min(1, 1 - delta_t + sum_T |Q_hat(T)| alg-val(phi_T)).
CspRefuteResult refute_csp(const CspInstance& inst, long ell, const Rat& eps, double tau,
                           const RefuteOptions& opts = {});

/// Exact l1 bound (1/m) sum_v |B_v| for a degree-1 piece; used for |T| = 1.
Rat linear_term_bound(const CspInstance& inst, std::uint32_t mask);

/// The degree-|T| XOR piece phi_T of a CSP instance.
XorInstance fourier_piece(const CspInstance& inst, std::uint32_t mask);

}  // namespace kref
