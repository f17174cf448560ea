// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run the binary with no arguments for all criteria, or with a list
// of criterion numbers.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "kref/covers.hpp"
#include "kref/csp.hpp"
#include "kref/decompose.hpp"
#include "kref/instances.hpp"
#include "kref/kikuchi.hpp"
#include "kref/refute.hpp"
#include "kref/rng.hpp"
#include "kref/specnorm.hpp"
#include "kref/wam_experiment.hpp"

using namespace kref;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct BucketLawTally {
    long runs = 0;
    long violations = 0;
    void absorb(const RefutationCertificate& cert) {
        ++runs;
        for (const auto& lc : cert.levels)
            if (!lc.bucket_law_ok) ++violations;
    }
};

BucketLawTally g_bucket_law;

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
               .count() /
           1000.0;
}

XorInstance adversarial_xor(int kind, int n, int k, int m, std::uint64_t seed) {
    Rng rng(seed);
    XorInstance inst;
    inst.n = n;
    inst.k = k;
    auto random_clause_holding = [&](VertexSet held) {
        while (static_cast<int>(held.size()) < k) {
            int v = 1 + static_cast<int>(rng.below(n));
            if (!std::count(held.begin(), held.end(), v)) held.push_back(v);
        }
        std::sort(held.begin(), held.end());
        return held;
    };
    switch (kind % 4) {
        case 0:  // sunflower: a common pair (or vertex for k=2) in every clause
            for (int c = 0; c < m; ++c) {
                inst.clauses.push_back(random_clause_holding(k >= 3 ? VertexSet{1, 2} : VertexSet{1}));
                inst.coeffs.emplace_back(rng.sign());
            }
            break;
        case 1: {  // parallel multiset: few distinct clauses, many copies
            std::vector<VertexSet> pool;
            for (int i = 0; i < std::max(2, m / 6); ++i) pool.push_back(rng.subset(n, k));
            for (int c = 0; c < m; ++c) {
                inst.clauses.push_back(pool[rng.below(pool.size())]);
                inst.coeffs.emplace_back(rng.sign());
            }
            break;
        }
        case 2:  // fully satisfiable: all +1 coefficients
            for (int c = 0; c < m; ++c) {
                inst.clauses.push_back(rng.subset(n, k));
                inst.coeffs.emplace_back(1);
            }
            break;
        default:  // star: one heavy vertex
            for (int c = 0; c < m; ++c) {
                inst.clauses.push_back(random_clause_holding({1}));
                inst.coeffs.emplace_back(rng.sign());
            }
            break;
    }
    return inst;
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    RefuteOptions opts;
    opts.dense_cap = 0;  // soundness sweep: the cheap fallback bound suffices
    // (n, ell) pairs keep the Kikuchi construction desk-sized
    const int n_for_ell[7] = {0, 0, 14, 14, 12, 10, 9};
    long checked = 0, csp_checked = 0;
    for (int k : {2, 3, 4}) {
        for (long ell = 2; ell <= 6; ++ell) {
            for (int rep = 0; rep < 24; ++rep) {
                const std::uint64_t seed = 100000 + k * 10000 + ell * 1000 + rep;
                Rng rng(seed);
                const int n = std::max<int>(k + 1, n_for_ell[ell] - static_cast<int>(rng.below(4)));
                const int m = 5 + static_cast<int>(rng.below(56));  // <= 60
                XorInstance inst;
                if (rep % 4 == 3)
                    inst = adversarial_xor(rep / 4, n, k, m, seed);
                else
                    inst = gen_random_xor(n, k, m, seed,
                                          rep % 6 == 1 ? CoeffDist::UniformDyadic
                                                       : CoeffDist::PlusMinusOne);
                const auto res = refute_poly(inst, ell, Rat(1, 2), 1e-2, opts);
                g_bucket_law.absorb(res.cert);
                const Rat val = brute_force_val(inst);
                if (Rat(res.alg_val) < val) {
                    std::ostringstream os;
                    os << "violation: alg-val " << res.alg_val << " < brute force " << val
                       << " (k=" << k << " ell=" << ell << " seed=" << seed << ")";
                    return {false, os.str()};
                }
                ++checked;
            }
        }
    }
    // smoothed and semirandom CSP instances
    for (int rep = 0; rep < 150; ++rep) {
        const std::uint64_t seed = 770000 + rep;
        Rng rng(seed);
        Predicate pred = rep % 3 == 0   ? or_predicate(2)
                         : rep % 3 == 1 ? or_predicate(3)
                                        : nae_predicate(3);
        const int n = 8 + static_cast<int>(rng.below(6));
        const int m = 10 + static_cast<int>(rng.below(50));
        CspInstance inst = gen_random_csp(n, m, pred, seed);
        if (rep % 2 == 0) {
            SmoothingPlan plan;
            plan.seed = seed ^ 0xdead;
            plan.probabilities.assign(inst.m(), std::vector<double>(inst.k, 0.3 + 0.1 * (rep % 5)));
            inst = smooth_csp(inst, plan).instance;
        }
        const auto res = refute_csp(inst, 2 + rep % 2, Rat(1, 2), 1e-2, opts);
        for (const auto& cert : res.sub_certificates) g_bucket_law.absorb(cert);
        const Rat val = brute_force_val_fraction(inst);
        if (Rat(res.alg_val) < val) {
            std::ostringstream os;
            os << "csp violation: alg-val " << res.alg_val << " < brute force " << val
               << " (seed=" << seed << ")";
            return {false, os.str()};
        }
        ++csp_checked;
    }
    const double secs = elapsed_s(t0);
    std::ostringstream os;
    os << checked << " XOR + " << csp_checked << " CSP instances, zero violations, " << secs
       << " s";
    if (checked + csp_checked < 500) return {false, "too few instances: " + os.str()};
    if (secs > 600.0) return {false, "over the 10 min budget: " + os.str()};
    return {true, os.str()};
}

Outcome criterion2() {
    Rng rng(31337);
    KikuchiBuildOptions kopts;
    kopts.exact_values = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + trial % 3;
        const int n = 4 + trial % 4;
        const long ell = std::min<long>(n, k - 1 + trial % 2);
        BipartitePolynomial psi;
        psi.n = n;
        psi.k = k;
        psi.parts.n = n;
        psi.parts.t = k;
        const int p = 1 + static_cast<int>(rng.below(3));
        for (int u = 0; u < p; ++u) {
            std::vector<VertexSet> hu;
            std::vector<Rat> bu;
            const int sz = 1 + static_cast<int>(rng.below(4));
            for (int j = 0; j < sz; ++j) {
                hu.push_back(rng.subset(n, k - 1));
                bu.emplace_back(rng.sign());
            }
            psi.parts.parts.push_back(hu);
            psi.coeffs.push_back(bu);
        }
        const auto km = build_bipartite_kikuchi(psi, ell, kopts);
        std::vector<int> x(n);
        for (auto& xi : x) xi = rng.sign();
        const auto [lhs, rhs] = quad_form_identity(km, psi, x);
        if (lhs != rhs) {
            std::ostringstream os;
            os << "identity violated at trial " << trial << ": lhs " << lhs << " rhs " << rhs;
            return {false, os.str()};
        }
    }
    return {true, "exact integer equality on 100 random (psi, x) pairs"};
}

Outcome criterion3() {
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 2 + trial % 4;  // 2..5
        Rng rng(4242 + trial);
        const int n = std::max(k + 2, 8 + trial % 7);
        const int m = 10 + static_cast<int>(rng.below(120));
        const auto inst = gen_random_xor(n, k, m, 999000 + trial);
        const Hypergraph h = inst.hypergraph();
        const Rat eps = (trial % 3 == 0) ? Rat(1, 2) : (trial % 3 == 1 ? Rat(7, 10) : Rat(1, 3));
        const long ell = 2 + trial % 4;
        const auto bc = decompose(h, eps, ell);
        const auto rep = verify_contraction(h, bc, eps, ell);
        if (!rep.all_pass()) {
            return {false, "trial " + std::to_string(trial) + ":\n" + rep.to_string()};
        }
    }
    return {true, "verify_contraction passed on 200 random hypergraphs, k in {2..5}"};
}

Outcome criterion4() {
    if (g_bucket_law.runs == 0)
        return {false, "no refutation runs recorded (criteria 1 and 5 must run first)"};
    std::ostringstream os;
    os << "|F_i| <= 2^(1-i) N held on every level of " << g_bucket_law.runs << " refutation runs";
    if (g_bucket_law.violations > 0) {
        os << " EXCEPT " << g_bucket_law.violations << " violations";
        return {false, os.str()};
    }
    return {true, os.str()};
}

Outcome criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    const int seeds = 20;
    const std::vector<int> ms{500, 1000, 2000, 4000};
    RefuteOptions opts;
    opts.dense_cap = 4096;
    std::vector<std::vector<double>> vals(ms.size(), std::vector<double>(seeds));
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
        for (int s = 0; s < seeds; ++s) {
            const auto inst = gen_random_xor(40, 3, ms[mi], 860000 + s);
            const auto res = refute_poly(inst, 2, Rat(7, 10), 1e-2, opts);
            g_bucket_law.absorb(res.cert);
            vals[mi][s] = res.alg_val;
        }
    }
    std::ostringstream os;
    os << "means";
    std::vector<double> means;
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
        double mean = 0;
        for (double v : vals[mi]) mean += v;
        mean /= seeds;
        means.push_back(mean);
        os << " m=" << ms[mi] << ":" << mean;
    }
    for (std::size_t mi = 1; mi < means.size(); ++mi)
        if (!(means[mi] < means[mi - 1]))
            return {false, "means not strictly decreasing: " + os.str()};
    // Wilcoxon signed-rank, one-sided at 5%, on consecutive m pairs
    for (std::size_t mi = 1; mi < ms.size(); ++mi) {
        std::vector<std::pair<double, int>> diffs;  // (|d|, sign)
        for (int s = 0; s < seeds; ++s) {
            const double d = vals[mi - 1][s] - vals[mi][s];  // expected positive
            if (d != 0.0) diffs.push_back({std::abs(d), d > 0 ? 1 : -1});
        }
        std::sort(diffs.begin(), diffs.end());
        double w_minus = 0;
        for (std::size_t r = 0; r < diffs.size(); ++r)
            if (diffs[r].second < 0) w_minus += static_cast<double>(r + 1);
        const double nn = static_cast<double>(diffs.size());
        if (nn >= 5) {
            const double mean_w = nn * (nn + 1) / 4.0;
            const double sd_w = std::sqrt(nn * (nn + 1) * (2 * nn + 1) / 24.0);
            const double z = (w_minus - mean_w) / sd_w;
            if (!(z < -1.645))
                return {false, "Wilcoxon not significant at 5% for the pair ending m=" +
                                   std::to_string(ms[mi]) + " (z=" + std::to_string(z) + "): " +
                                   os.str()};
        }
    }
    int strong = 0;
    for (double v : vals.back())
        if (v < 1.0 - 1e-3) ++strong;
    const double secs = elapsed_s(t0);
    os << "; alg-val < 1-1e-3 at m=4000 in " << strong << "/" << seeds << " seeds; " << secs << " s";
    if (strong * 100 < seeds * 95) return {false, os.str()};
    if (secs > 1200.0) return {false, "over the 20 min budget: " + os.str()};
    return {true, os.str()};
}

Outcome criterion6() {
    // (a) + (b): kernel minimum matches the exhaustive minimum
    Rng rng(606);
    int compared = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 5 + trial % 6;
        const int m = 4 + static_cast<int>(rng.below(17));
        const auto inst = gen_random_xor(n, 3, m, 606000 + trial);
        const Hypergraph h = inst.hypergraph();
        const auto a = find_even_cover(h, m, CoverStrategy::Exhaustive);
        const auto b = find_even_cover(h, m, CoverStrategy::Gf2Kernel);
        if (a.has_value() != b.has_value())
            return {false, "kernel/exhaustive disagree on existence at trial " + std::to_string(trial)};
        if (a && b) {
            if (!verify_even_cover(h, a->edge_ids).ok || !verify_even_cover(h, b->edge_ids).ok)
                return {false, "returned cover failed verification at trial " + std::to_string(trial)};
            if (a->length() != b->length())
                return {false, "minimum lengths differ at trial " + std::to_string(trial)};
            ++compared;
        }
    }
    // (c): dense random 3-uniform instances
    int found = 0;
    for (int s = 0; s < 20; ++s) {
        const auto inst = gen_random_xor(30, 3, 600, 616000 + s);
        CoverSearchOptions opts;
        opts.seed = s;
        const auto c = find_even_cover(inst.hypergraph(), 40, CoverStrategy::Gf2Kernel, opts);
        if (c && verify_even_cover(inst.hypergraph(), c->edge_ids).ok) ++found;
    }
    std::ostringstream os;
    os << compared << " minimum-length matches; length<=40 cover found in " << found << "/20 seeds";
    if (found * 100 < 20 * 90) return {false, os.str()};
    return {true, os.str()};
}

Outcome criterion7() {
    Rng rng(707);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 7 + trial % 7;
        const int m = 8 + static_cast<int>(rng.below(25));
        const auto inst = gen_random_xor(n, 3, m, 707000 + trial);
        const auto w = build_fko_witness(inst, 14, 8);
        const auto check = verify_fko_witness(inst, w);
        if (!check.ok) return {false, "witness invariants failed at trial " + std::to_string(trial)};
        if (check.bound_exact < xor_fraction_from_advantage(brute_force_val(inst))) {
            return {false, "witness bound below the true optimum at trial " + std::to_string(trial)};
        }
    }
    int nontrivial = 0;
    for (int s = 0; s < 20; ++s) {
        const auto inst = gen_random_xor(30, 3, 600, 717000 + s);
        CoverSearchOptions opts;
        opts.seed = s;
        const auto w = build_fko_witness(inst, 40, 24, CoverStrategy::Gf2Kernel, opts);
        const auto check = verify_fko_witness(inst, w);
        if (!check.ok) return {false, "dense witness invariants failed at seed " + std::to_string(s)};
        if (check.bound < 1.0) ++nontrivial;
    }
    std::ostringstream os;
    os << "200 tiny instances sound; bound < 1 in " << nontrivial << "/20 dense seeds";
    if (nontrivial * 100 < 20 * 80) return {false, os.str()};
    return {true, os.str()};
}

Outcome criterion8() {
    const auto ex = run_wam_experiment(10, 60, 3, 8);
    std::ostringstream os;
    os << "ell'=" << ex.ell_prime << ", estimate " << ex.estimate << " >= " << ex.expected_row_ones
       << ", submatrix rows " << (ex.submatrix_rows_ok ? "exact" : "WRONG");
    if (ex.ell_prime != 3) return {false, os.str()};
    if (!ex.submatrix_rows_ok) return {false, os.str()};
    if (ex.estimate < 3.0 - 1e-9) return {false, os.str()};
    return {true, os.str()};
}

Outcome criterion9() {
    // t(OR_k) = k and exact re-verification across the builtin library
    for (int k = 2; k <= 5; ++k) {
        if (uniformity_degree(or_predicate(k)) != k)
            return {false, "t(OR_" + std::to_string(k) + ") != " + std::to_string(k)};
    }
    const auto or2 = separating_polynomial(or_predicate(2), 2);
    if (or2.delta != Rat(1, 4)) return {false, "delta(OR_2, t=2) != 1/4"};
    for (const auto& p : {or_predicate(2), or_predicate(3), or_predicate(4), parity_predicate(3),
                          nae_predicate(3), nae_predicate(4), hadamard_q1_predicate()}) {
        const int t = uniformity_degree(p);
        // has_t_wise_support is consistent on both sides of t
        if (t > 1 && !has_t_wise_support(p, t - 1))
            return {false, p.name + ": support missing below t"};
        if (has_t_wise_support(p, t)) return {false, p.name + ": support at t"};
        const auto sep = separating_polynomial(p, t);
        for (std::uint32_t w = 0; w < (1u << p.k); ++w) {
            const Rat lhs(p.truth_table[w] ? 1 : 0);
            if (lhs > Rat(1) - sep.delta + sep.eval_mask(w, p.k))
                return {false, p.name + ": pointwise re-verification failed"};
        }
        if (Rat(1) - sep.delta != t_wise_max_satisfied(p, t))
            return {false, p.name + ": dual LP disagrees with delta"};
    }
    return {true, "library re-verified exactly; delta(OR_2)=1/4; t(OR_k)=k"};
}

Outcome criterion10() {
    Rng rng(1010);
    const double tau = 1e-6;
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = 2 + static_cast<int>(rng.below(59));  // up to 60
        SparseSym m;
        m.dim = dim;
        const double density = 0.1 + 0.8 * rng.real();
        for (int r = 0; r < dim; ++r)
            for (int c = r; c < dim; ++c)
                if (rng.real() < density) m.add(r, c, 2.0 * rng.real() - 1.0);
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(dim, dim);
        for (const auto& e : m.entries) {
            dense(e.row, e.col) += e.value;
            if (e.row != e.col) dense(e.col, e.row) += e.value;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
        const double lambda =
            std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(dim - 1)));
        const auto res = certified_specnorm(m, tau);
        if (res.sigma < lambda * (1.0 - 1e-12))
            return {false, "sigma below lambda_max at trial " + std::to_string(trial)};
        if (lambda > 0 && res.sigma > (1.0 + 2 * tau) * lambda) {
            std::ostringstream os;
            os << "sigma " << res.sigma << " > (1+2tau) lambda " << (1.0 + 2 * tau) * lambda
               << " at trial " << trial << " (method " << res.method << ")";
            return {false, os.str()};
        }
    }
    return {true, "lambda <= sigma <= (1+2e-6) lambda on 200 random symmetric matrices"};
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    auto wanted = [&](int c) { return which.empty() || std::count(which.begin(), which.end(), c); };

    struct Entry {
        int id;
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "universal soundness vs brute force", criterion1},
        {2, "quadratic-form identity, integer exact", criterion2},
        {3, "decomposition postconditions", criterion3},
        {4, "bucketing law on every refutation run", criterion4},
        {5, "refutation strength trend", criterion5},
        {6, "even covers: verification, kernel vs exhaustive, dense search", criterion6},
        {7, "FKO witness soundness and strength", criterion7},
        {8, "adversarial tuple-matrix reproduction", criterion8},
        {9, "LP exactness for the predicate library", criterion9},
        {10, "certified spectral bounds vs dense eigensolver", criterion10},
    };
    int failures = 0;
    for (const auto& e : entries) {
        if (!wanted(e.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& err) {
            out = {false, std::string("exception: ") + err.what()};
        }
        const double secs = elapsed_s(t0);
        std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << e.id << ": " << e.name
                  << " (" << out.detail << ") [" << secs << " s]" << std::endl;
        if (!out.pass) ++failures;
    }
    return failures;
}
