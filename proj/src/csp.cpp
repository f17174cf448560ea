#include "kref/csp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kref/simplex.hpp"
#include "json.hpp"

namespace kref {

namespace {

using nlohmann::json;

/// z_S evaluated at the point encoded by w (bit i set <=> z_{i+1} = +1).
int chi(std::uint32_t s_mask, std::uint32_t w) {
    return (__builtin_popcount(s_mask & ~w) % 2 == 0) ? 1 : -1;
}

std::vector<std::uint32_t> masks_up_to(int k, int t, bool include_empty) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = include_empty ? 0 : 1; s < (1u << k); ++s)
        if (__builtin_popcount(s) <= t) out.push_back(s);
    return out;
}

Predicate finish_predicate(Predicate p) {
    p.fourier = fourier_expansion(p);
    p.validate();
    return p;
}

}  // namespace

std::map<std::uint32_t, Rat> fourier_expansion(const Predicate& p) {
    const std::uint32_t points = 1u << p.k;
    std::map<std::uint32_t, Rat> out;
    for (std::uint32_t s = 0; s < points; ++s) {
        Int acc(0);
        for (std::uint32_t w = 0; w < points; ++w)
            if (p.truth_table[w]) acc += chi(s, w);
        if (acc != 0) out[s] = Rat(acc, Int(points));
    }
    return out;
}

Predicate or_predicate(int k) {
    Predicate p;
    p.k = k;
    p.name = "or";
    p.truth_table.assign(1u << k, 1);
    p.truth_table[0] = 0;  // all literals false
    return finish_predicate(std::move(p));
}

Predicate parity_predicate(int k) {
    Predicate p;
    p.k = k;
    p.name = "parity";
    p.truth_table.assign(1u << k, 0);
    for (std::uint32_t w = 0; w < (1u << k); ++w)
        if ((k - __builtin_popcount(w)) % 2 == 0) p.truth_table[w] = 1;  // prod z_i = +1
    return finish_predicate(std::move(p));
}

Predicate nae_predicate(int k) {
    Predicate p;
    p.k = k;
    p.name = "nae";
    p.truth_table.assign(1u << k, 1);
    p.truth_table[0] = 0;
    p.truth_table[(1u << k) - 1] = 0;
    return finish_predicate(std::move(p));
}

Predicate hadamard_q1_predicate() {
    // q = 1: 3-bit truncated Hadamard code {(a, b, a xor b)}; in the +-1
    // domain exactly the even-parity predicate z1 z2 z3 = 1.
    Predicate p = parity_predicate(3);
    p.name = "hadamard-q1";
    return p;
}

Predicate predicate_from_truth_table(const std::string& bits, const std::string& name) {
    int k = 0;
    while ((std::size_t(1) << k) < bits.size()) ++k;
    if ((std::size_t(1) << k) != bits.size())
        throw std::invalid_argument("predicate_from_truth_table: length must be a power of two");
    Predicate p;
    p.k = k;
    p.name = name;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("predicate_from_truth_table: bits only");
        p.truth_table.push_back(c == '1');
    }
    return finish_predicate(std::move(p));
}

std::optional<Predicate> builtin_predicate(const std::string& name) {
    if (name == "hadamard-q1") return hadamard_q1_predicate();
    auto split = [&](const std::string& prefix) -> std::optional<int> {
        if (name.rfind(prefix, 0) != 0) return std::nullopt;
        try {
            return std::stoi(name.substr(prefix.size()));
        } catch (...) {
            return std::nullopt;
        }
    };
    if (auto k = split("or"); k && *k >= 1 && *k <= 8) return or_predicate(*k);
    if (auto k = split("parity"); k && *k >= 1 && *k <= 8) return parity_predicate(*k);
    if (auto k = split("nae"); k && *k >= 2 && *k <= 8) return nae_predicate(*k);
    return std::nullopt;
}

bool has_t_wise_support(const Predicate& p, int t) {
    if (p.k > 8) throw std::invalid_argument("has_t_wise_support: k <= 8 guard");
    if (t < 0 || t > p.k) throw std::invalid_argument("has_t_wise_support: t out of range");
    std::vector<std::uint32_t> support;
    for (std::uint32_t w = 0; w < (1u << p.k); ++w)
        if (p.truth_table[w]) support.push_back(w);
    if (support.empty()) throw std::invalid_argument("has_t_wise_support: predicate has empty support");
    const auto smasks = masks_up_to(p.k, t, false);
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    a.emplace_back(support.size(), Rat(1));
    b.emplace_back(1);
    for (auto s : smasks) {
        std::vector<Rat> row;
        row.reserve(support.size());
        for (auto w : support) row.emplace_back(chi(s, w));
        a.push_back(std::move(row));
        b.emplace_back(0);
    }
    return simplex_feasible_eq(a, b).status == LpResult::Status::Optimal;
}

int uniformity_degree(const Predicate& p) {
    for (int t = 1; t <= p.k; ++t)
        if (!has_t_wise_support(p, t)) return t;
    throw std::invalid_argument("uniformity_degree: predicate is trivially satisfiable");
}

Rat SeparatingPolynomial::eval_mask(std::uint32_t w, int k) const {
    (void)k;
    Rat v(0);
    for (const auto& [s, coeff] : qhat) v += coeff * chi(s, w);
    return v;
}

SeparatingPolynomial separating_polynomial(const Predicate& p, int t) {
    if (has_t_wise_support(p, t))
        throw std::invalid_argument("separating_polynomial: a t-wise supported distribution exists");
    const auto smasks = masks_up_to(p.k, t, false);
    const std::size_t q = smasks.size();
    // variables: delta, qhat^+ (q), qhat^- (q)
    // constraints: for each w: delta - Q(w) <= 1 - P(w);  sum (q^+ + q^-) <= 4^k
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    for (std::uint32_t w = 0; w < (1u << p.k); ++w) {
        std::vector<Rat> row(1 + 2 * q, Rat(0));
        row[0] = 1;
        for (std::size_t i = 0; i < q; ++i) {
            row[1 + i] = Rat(-chi(smasks[i], w));
            row[1 + q + i] = Rat(chi(smasks[i], w));
        }
        a.push_back(std::move(row));
        b.emplace_back(Rat(1) - Rat(p.truth_table[w] ? 1 : 0));
    }
    {
        std::vector<Rat> row(1 + 2 * q, Rat(1));
        row[0] = 0;
        a.push_back(std::move(row));
        b.emplace_back(ipow(Int(2), 2 * p.k));
    }
    std::vector<Rat> c(1 + 2 * q, Rat(0));
    c[0] = 1;
    const auto lp = simplex_max_nonneg_rhs(a, b, c);
    if (lp.status != LpResult::Status::Optimal)
        throw std::logic_error("separating_polynomial: LP did not solve");
    SeparatingPolynomial sep;
    sep.t = t;
    sep.delta = lp.solution[0];
    for (std::size_t i = 0; i < q; ++i) {
        const Rat v = lp.solution[1 + i] - lp.solution[1 + q + i];
        if (v != 0) sep.qhat[smasks[i]] = v;
    }
    // re-verify the pointwise inequality exactly
    for (std::uint32_t w = 0; w < (1u << p.k); ++w) {
        const Rat lhs(p.truth_table[w] ? 1 : 0);
        if (lhs > Rat(1) - sep.delta + sep.eval_mask(w, p.k))
            throw std::logic_error("separating_polynomial: pointwise inequality violated");
    }
    return sep;
}

Rat t_wise_max_satisfied(const Predicate& p, int t) {
    const std::uint32_t points = 1u << p.k;
    const auto smasks = masks_up_to(p.k, t, false);
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    a.emplace_back(points, Rat(1));
    b.emplace_back(1);
    for (auto s : smasks) {
        std::vector<Rat> row;
        for (std::uint32_t w = 0; w < points; ++w) row.emplace_back(chi(s, w));
        a.push_back(std::move(row));
        b.emplace_back(0);
    }
    std::vector<Rat> c;
    for (std::uint32_t w = 0; w < points; ++w) c.emplace_back(p.truth_table[w] ? 1 : 0);
    const auto lp = simplex_max_eq(a, b, c);
    if (lp.status != LpResult::Status::Optimal)
        throw std::logic_error("t_wise_max_satisfied: LP did not solve");
    return lp.objective;
}

XorInstance fourier_piece(const CspInstance& inst, std::uint32_t mask) {
    XorInstance piece;
    piece.n = inst.n;
    piece.k = __builtin_popcount(mask);
    for (std::size_t c = 0; c < inst.m(); ++c) {
        VertexSet clause;
        int sign = 1;
        for (int i = 0; i < inst.k; ++i) {
            if (mask & (1u << i)) {
                clause.push_back(inst.scopes[c][i]);
                sign *= inst.literals[c][i];
            }
        }
        std::sort(clause.begin(), clause.end());
        piece.clauses.push_back(std::move(clause));
        piece.coeffs.emplace_back(sign);
    }
    return piece;
}

Rat linear_term_bound(const CspInstance& inst, std::uint32_t mask) {
    if (__builtin_popcount(mask) != 1)
        throw std::invalid_argument("linear_term_bound: singleton mask expected");
    if (inst.m() == 0) return Rat(0);
    const int pos = __builtin_ctz(mask);
    std::map<int, Int> acc;
    for (std::size_t c = 0; c < inst.m(); ++c)
        acc[inst.scopes[c][pos]] += inst.literals[c][pos];
    Int total(0);
    for (const auto& [v, s] : acc) total += abs(s);
    return Rat(total, Int(inst.m()));
}

CspRefuteResult refute_csp(const CspInstance& inst, long ell, const Rat& eps, double tau,
                           const RefuteOptions& opts) {
    inst.validate();
    CspRefuteResult out;
    bool all_true = true, any_true = false;
    for (auto v : inst.predicate.truth_table) {
        all_true = all_true && v;
        any_true = any_true || v;
    }
    if (all_true) throw std::invalid_argument("refute_csp: trivial predicate (P == 1)");
    if (!any_true) {
        out.alg_val = 0.0;  // no satisfying assignment at all
        return out;
    }
    out.t = uniformity_degree(inst.predicate);
    const SeparatingPolynomial sep = separating_polynomial(inst.predicate, out.t);
    out.delta = sep.delta;
    out.qhat = sep.qhat;

    double total = 1.0 - to_double(sep.delta);
    for (const auto& [mask, coeff] : sep.qhat) {
        CspRefuteResult::TermBound tb;
        tb.mask = mask;
        tb.qhat_abs = std::abs(to_double(coeff));
        if (__builtin_popcount(mask) == 1) {
            tb.bound = to_double(linear_term_bound(inst, mask));
            tb.kind = "linear-l1";
        } else {
            const XorInstance piece = fourier_piece(inst, mask);
            RefutationResult rr = refute_poly(piece, ell, eps, tau, opts);
            tb.bound = rr.alg_val;
            tb.kind = "refute-poly";
            out.sub_certificates.push_back(std::move(rr.cert));
        }
        total += tb.qhat_abs * tb.bound;
        out.terms.push_back(tb);
    }
    // upward nudge; every piece bound is two-sided, so this dominates
    // 1 - delta + max_x sum_T Qhat(T) phi_T(x)
    total = total * (1.0 + 1e-12) + 1e-15;
    out.alg_val = std::min(1.0, std::max(0.0, total));
    return out;
}

std::string CspRefuteResult::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "csp-refutation";
    j["alg_val"] = alg_val;
    j["t"] = t;
    j["delta"] = {numerator(delta).str(), denominator(delta).str()};
    json jq = json::array();
    for (const auto& [mask, coeff] : qhat)
        jq.push_back({mask, numerator(coeff).str() + "/" + denominator(coeff).str()});
    j["qhat"] = jq;
    json jt = json::array();
    for (const auto& tb : terms)
        jt.push_back({{"mask", tb.mask}, {"qhat_abs", tb.qhat_abs}, {"bound", tb.bound}, {"kind", tb.kind}});
    j["terms"] = jt;
    json jc = json::array();
    for (const auto& cert : sub_certificates) jc.push_back(json::parse(cert.to_json()));
    j["sub_certificates"] = jc;
    return j.dump(2) + "\n";
}

}  // namespace kref
