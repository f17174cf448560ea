#include "kref/refute.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace kref {

namespace {
using nlohmann::json;

double clip01(double v) { return std::min(1.0, std::max(0.0, v)); }
}  // namespace

SquaredPolynomial cauchy_schwarz(const BipartitePolynomial& psi) {
    psi.validate();
    SquaredPolynomial f;
    f.psi = psi.without_empty_partitions();
    f.slack = f.psi.m() ? Rat(Int(f.psi.p()), Int(f.psi.m())) : Rat(0);
    return f;
}

std::uint64_t butterfly_degree(const std::vector<VertexSet>& h_u,
                               const std::vector<std::pair<int, int>>& s, int k) {
    // gamma_u(S) = # ordered pairs (C, C'), C != C', whose clone tails meet S
    // in exactly the split pattern of the matrix construction.
    std::uint64_t count = 0;
    auto inter1 = [&](const VertexSet& c) {
        int w = 0;
        for (const auto& [v, label] : s)
            if (label == 1 && std::binary_search(c.begin(), c.end(), v)) ++w;
        return w;
    };
    auto inter2 = [&](const VertexSet& c) {
        int w = 0;
        for (const auto& [v, label] : s)
            if (label == 2 && std::binary_search(c.begin(), c.end(), v)) ++w;
        return w;
    };
    for (std::size_t i = 0; i < h_u.size(); ++i) {
        for (std::size_t j = 0; j < h_u.size(); ++j) {
            if (i == j) continue;
            const int a = inter1(h_u[i]);
            const int b = inter2(h_u[j]);
            bool match;
            if (k % 2 == 1)
                match = (a == (k - 1) / 2 && b == (k - 1) / 2);
            else
                match = (a == k / 2 && b == (k - 2) / 2) || (a == (k - 2) / 2 && b == k / 2);
            if (match) ++count;
        }
    }
    return count;
}

PruneResult prune_rows(const KikuchiMatrix& km, const Int& delta, std::uint64_t m, std::uint64_t p) {
    PruneResult res;
    res.delta = delta;
    std::unordered_set<std::uint64_t> bad;
    for (const auto& g : km.row_gammas())
        if (Int(g.max_u) > delta) bad.insert(g.row);
    res.bad_rows.assign(bad.begin(), bad.end());
    std::sort(res.bad_rows.begin(), res.bad_rows.end());
    for (std::size_t i = 0; i < km.cells.size(); ++i) {
        const auto& c = km.cells[i];
        if (bad.count(c.row) || bad.count(c.col))
            res.pruned_mass += 2.0 * std::abs(c.value);
        else
            res.good_cells.push_back(i);
    }
    if (p > 0)
        res.coarse_bound = 2.0 * static_cast<double>(res.bad_rows.size()) * 4.0 *
                           static_cast<double>(m) * static_cast<double>(m) / static_cast<double>(p);
    return res;
}

int Buckets::bucket_of_gamma(const Int& gamma) const {
    const Int num = numerator(d), den = denominator(d);
    if (gamma * den <= num) return 0;
    int i = 1;
    while (gamma * den > (Int(1) << i) * num) ++i;
    return i;
}

Buckets bucket_rows(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& gammas, const Rat& d) {
    if (d <= 0) throw std::invalid_argument("bucket_rows: d must be positive");
    Buckets b;
    b.d = d;
    for (const auto& [row, gamma] : gammas) {
        const int i = b.bucket_of_gamma(Int(gamma));
        if (static_cast<int>(b.members.size()) <= i) b.members.resize(i + 1);
        b.members[i].emplace_back(row, gamma);
    }
    if (b.members.empty()) b.members.resize(1);
    return b;
}

namespace {

/// Fixed assembly order shared by the pipeline and the replaying verifier.
double assemble_boolnorm(const LevelCertificate& lc) {
    double bound = lc.pruned_mass;
    for (const auto& pb : lc.pair_bounds) {
        const double fi = to_double(Int(pb.fi));
        const double fj = to_double(Int(pb.fj));
        bound += static_cast<double>(pb.factor) * std::sqrt(fi * fj) * pb.sigma;
    }
    // upward nudge so the double-precision assembly stays an upper bound
    return bound * (1.0 + 1e-12);
}

double alpha_from_bound(const LevelCertificate& lc, double bound) {
    const double p = static_cast<double>(lc.p);
    const double m = static_cast<double>(lc.m);
    const double dd = to_double(Int(lc.d_big));
    const double s = bound == 0.0 ? 0.0 : (p / (m * m * dd)) * bound;
    return std::sqrt(std::max(0.0, s + p / m));
}

}  // namespace

double assemble_level_alpha(const LevelCertificate& lc) {
    if (lc.trivial) return lc.alg_val;
    const double bound = assemble_boolnorm(lc);
    return clip01(alpha_from_bound(lc, bound));
}

LevelCertificate boolnorm_certificate(const KikuchiMatrix& km, const Buckets& buckets,
                                      const PruneResult& pruned, double tau,
                                      const RefuteOptions& opts) {
    LevelCertificate lc;
    const Int N = km.index.count_exact();
    lc.n_index = N.str();
    lc.bad_rows = pruned.bad_rows.size();
    lc.pruned_mass = pruned.pruned_mass;
    lc.coarse_pruned_bound = pruned.coarse_bound;
    lc.delta = pruned.delta.str();
    lc.d_num = numerator(buckets.d).str();
    lc.d_den = denominator(buckets.d).str();

    // |F_0| includes every good row with gamma = 0 that never materialized.
    std::vector<Int> sizes(std::max<std::size_t>(buckets.members.size(), 1), Int(0));
    for (std::size_t i = 1; i < buckets.members.size(); ++i) sizes[i] = Int(buckets.members[i].size());
    Int explicit_nonzero(0);
    for (std::size_t i = 1; i < buckets.members.size(); ++i) explicit_nonzero += sizes[i];
    sizes[0] = N - Int(lc.bad_rows) - explicit_nonzero;
    for (const auto& s : sizes) lc.bucket_sizes.push_back(s.str());

    // Bucketing law |F_i| <= 2^(1-i) N for i >= 1.
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] * (Int(1) << (i - 1)) > N) lc.bucket_law_ok = false;

    std::unordered_map<std::uint64_t, int> bucket_of;
    for (std::size_t i = 0; i < buckets.members.size(); ++i)
        for (const auto& [row, gamma] : buckets.members[i]) bucket_of[row] = static_cast<int>(i);

    // Bucket-pair blocks, compacted to their nonzero rows/columns. Rows with
    // gamma = 0 carry no cells, so the lookup below always succeeds.
    struct BlockBuild {
        std::unordered_map<std::uint64_t, std::uint32_t> rid, cid;
        std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> entries;
    };
    std::map<std::pair<int, int>, BlockBuild> blocks;
    auto compact = [](std::unordered_map<std::uint64_t, std::uint32_t>& ids, std::uint64_t key) {
        auto [it, fresh] = ids.try_emplace(key, static_cast<std::uint32_t>(ids.size()));
        (void)fresh;
        return it->second;
    };
    for (std::size_t idx : pruned.good_cells) {
        const auto& c = km.cells[idx];
        const int bi = bucket_of.at(c.row);
        const int bj = bucket_of.at(c.col);
        const int lo = std::min(bi, bj), hi = std::max(bi, bj);
        auto& blk = blocks[{lo, hi}];
        const std::uint64_t r = (bi == lo) ? c.row : c.col;
        const std::uint64_t cc = (bi == lo) ? c.col : c.row;
        if (lo == hi) {
            const auto a = compact(blk.rid, r), b = compact(blk.rid, cc);
            blk.entries.emplace_back(a, b, c.value);
        } else {
            blk.entries.emplace_back(compact(blk.rid, r), compact(blk.cid, cc), c.value);
        }
    }

    for (auto& [key, blk] : blocks) {
        const auto [i, j] = key;
        SparseSym sym;
        if (i == j) {
            sym.dim = blk.rid.size();
            for (const auto& [r, c, v] : blk.entries) sym.add(r, c, v);
        } else {
            const std::uint32_t nr = static_cast<std::uint32_t>(blk.rid.size());
            sym.dim = blk.rid.size() + blk.cid.size();
            for (const auto& [r, c, v] : blk.entries) sym.add(r, nr + c, v);
        }
        SpecnormOptions sopts;
        sopts.dense_cap = opts.dense_cap;
        sopts.seed = 0x9e3779b97f4a7c15ull ^ (static_cast<std::uint64_t>(i) << 32) ^
                     static_cast<std::uint64_t>(j) ^ (static_cast<std::uint64_t>(km.arity) << 48);
        const SpecnormResult sn = certified_specnorm(sym, tau, sopts);
        BucketPairBound pb;
        pb.i = i;
        pb.j = j;
        pb.fi = sizes[i].str();
        pb.fj = sizes[j].str();
        pb.nnz = blk.entries.size();
        pb.sigma = sn.sigma;
        pb.estimate = sn.estimate;
        pb.method = sn.method;
        pb.factor = (i == j) ? 1 : 2;
        lc.pair_bounds.push_back(pb);
    }
    lc.boolnorm_bound = assemble_boolnorm(lc);
    return lc;
}

RegRefuteResult refute_regular(const BipartitePolynomial& psi_in, long ell, const Rat& eps, double tau,
                               const RefuteOptions& opts) {
    if (eps <= 0 || eps > 1) throw std::invalid_argument("refute_regular: eps must be in (0,1]");
    if (!(tau > 0)) throw std::invalid_argument("refute_regular: tau must be positive");
    BipartitePolynomial psi = psi_in.without_empty_partitions();
    psi.validate();

    RegRefuteResult out;
    LevelCertificate& lc = out.cert;
    lc.t = psi.k;
    lc.p = psi.p();
    lc.m = psi.m();
    lc.label_size = psi.parts.labels.empty() || psi.parts.labels[0].empty()
                        ? 0
                        : static_cast<int>(psi.parts.labels[0].size());
    for (const auto& row : psi.coeffs)
        for (const auto& b : row)
            if (b != 1 && b != -1) lc.coeffs_pm1 = false;

    if (lc.m == 0) {
        lc.trivial = true;
        lc.trivial_reason = "empty polynomial";
        lc.alg_val = lc.alg_val_pre_clip = 0.0;
        out.alg_val = 0.0;
        return out;
    }
    if (ell < psi.k - 1 || ell > psi.n) {
        lc.trivial = true;
        lc.trivial_reason = "ell outside the construction range; trivial bound";
        lc.alg_val = lc.alg_val_pre_clip = 1.0;
        out.alg_val = 1.0;
        return out;
    }
    lc.below_guarantee_regime = ell < 2L * (psi.k - 1);

    if (SubsetIndex::cloned(psi.n, static_cast<int>(ell)).count_exact() > (Int(1) << 62))
        throw std::length_error("refute_regular: C(2n, ell) exceeds the index range");

    KikuchiBuildOptions kopts;
    kopts.max_cells = opts.max_cells;
    const KikuchiMatrix km = build_bipartite_kikuchi(psi, ell, kopts);
    const Int N = km.index.count_exact();
    lc.d_big = km.D.str();
    lc.n_index = N.str();

    const auto gammas = km.row_gammas();

    // Degree-mass identity: sum_S gamma(S) = D sum_u |H_u|(|H_u|-1).
    {
        Int total(0);
        for (const auto& g : gammas) total += g.total;
        Int pairs(0);
        for (const auto& hu : psi.parts.parts) pairs += Int(hu.size()) * Int(hu.size() - 1);
        if (total != km.D * pairs)
            throw std::logic_error("refute_regular: butterfly degree mass violated");
    }

    // Delta selection
    Int delta(0);
    const Int en = numerator(eps), ed = denominator(eps);
    if (opts.delta_mode == RefuteOptions::DeltaMode::Adaptive) {
        // smallest Delta with |B(Delta)| * 16 ed^2 <= en^2 D
        std::vector<std::uint64_t> maxs;
        maxs.reserve(gammas.size());
        for (const auto& g : gammas) maxs.push_back(g.max_u);
        std::sort(maxs.begin(), maxs.end());
        auto bad_count = [&](const Int& cand) {
            std::size_t lo = 0, hi = maxs.size();
            while (lo < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (Int(maxs[mid]) > cand)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            return maxs.size() - lo;
        };
        auto ok = [&](const Int& cand) {
            return Int(bad_count(cand)) * 16 * ed * ed <= en * en * km.D;
        };
        if (ok(Int(0))) {
            delta = 0;
        } else {
            delta = Int(maxs.back());  // |B| = 0, always ok
            for (auto it = maxs.rbegin(); it != maxs.rend(); ++it) {
                if (ok(Int(*it)))
                    delta = Int(*it);
                else
                    break;
            }
        }
    } else {
        const double pn = static_cast<double>(lc.p) * to_double(N);
        const double arg = 32.0 * pn / (to_double(eps * eps) * to_double(km.D));
        const double lg = std::log(std::max(arg, 2.0));
        const double val = std::pow(opts.closed_form_c, psi.k - 1) / to_double(eps * eps * eps * eps) *
                           std::pow(lg, 2.0 * (psi.k - 1));
        delta = Int(static_cast<long long>(std::ceil(val)));
    }
    lc.delta = delta.str();

    const PruneResult pruned = prune_rows(km, delta, lc.m, lc.p);

    // d = 4 m^2 D / (p N)
    const Rat d(Int(4) * Int(lc.m) * Int(lc.m) * km.D, Int(lc.p) * N);

    std::unordered_set<std::uint64_t> bad(pruned.bad_rows.begin(), pruned.bad_rows.end());
    std::vector<std::pair<std::uint64_t, std::uint64_t>> good_gammas;
    for (const auto& g : gammas)
        if (!bad.count(g.row)) good_gammas.emplace_back(g.row, g.total);
    const Buckets buckets = bucket_rows(good_gammas, d);

    const LevelCertificate frag = boolnorm_certificate(km, buckets, pruned, tau, opts);
    lc.bad_rows = frag.bad_rows;
    lc.pruned_mass = frag.pruned_mass;
    lc.coarse_pruned_bound = frag.coarse_pruned_bound;
    lc.d_num = frag.d_num;
    lc.d_den = frag.d_den;
    lc.bucket_sizes = frag.bucket_sizes;
    lc.bucket_law_ok = frag.bucket_law_ok;
    lc.pair_bounds = frag.pair_bounds;
    lc.boolnorm_bound = frag.boolnorm_bound;
    lc.alg_val_pre_clip = alpha_from_bound(lc, lc.boolnorm_bound);
    lc.alg_val = clip01(lc.alg_val_pre_clip);
    out.alg_val = lc.alg_val;
    return out;
}

double assemble_final_alg_val(const RefutationCertificate& cert) {
    if (cert.m == 0) return 0.0;
    double acc = static_cast<double>(cert.m_discarded);
    for (const auto& lc : cert.levels) acc += static_cast<double>(lc.m) * lc.alg_val;
    return clip01(acc / static_cast<double>(cert.m));
}

RefutationResult refute_poly(const XorInstance& inst, long ell, const Rat& eps, double tau,
                             const RefuteOptions& opts) {
    inst.validate();
    RefutationResult out;
    out.cert.digest = instance_digest(inst);
    out.cert.n = inst.n;
    out.cert.k = inst.k;
    out.cert.ell = ell;
    out.cert.eps_num = numerator(eps).str();
    out.cert.eps_den = denominator(eps).str();
    out.cert.tau = tau;
    out.cert.m = inst.m();
    if (inst.m() == 0) {
        out.alg_val = 0.0;
        return out;
    }

    const BipartiteContraction bc = decompose(inst.hypergraph(), eps, ell);
    out.cert.m_discarded = bc.discarded.m();

    for (const auto& level : bc.levels) {
        if (level.m() == 0) continue;
        BipartitePolynomial psi;
        psi.n = inst.n;
        psi.k = level.t;
        psi.parts = level.bh;
        psi.coeffs.resize(level.bh.p());
        for (std::size_t u = 0; u < level.bh.p(); ++u)
            for (std::size_t j = 0; j < level.bh.parts[u].size(); ++j)
                psi.coeffs[u].push_back(inst.coeffs[level.provenance[u][j]]);
        RegRefuteResult rr = refute_regular(psi, ell, eps, tau, opts);
        if (!rr.cert.bucket_law_ok)
            throw std::logic_error("refute_poly: bucketing law |F_i| <= 2^(1-i) N violated");
        out.cert.levels.push_back(std::move(rr.cert));
    }
    out.alg_val = assemble_final_alg_val(out.cert);
    out.cert.alg_val = out.alg_val;
    return out;
}

namespace {

json pair_bound_to_json(const BucketPairBound& pb) {
    return json{{"i", pb.i},       {"j", pb.j},           {"fi", pb.fi},
                {"fj", pb.fj},     {"nnz", pb.nnz},       {"sigma", pb.sigma},
                {"estimate", pb.estimate}, {"method", pb.method}, {"factor", pb.factor}};
}

BucketPairBound pair_bound_from_json(const json& j) {
    BucketPairBound pb;
    pb.i = j.at("i").get<int>();
    pb.j = j.at("j").get<int>();
    pb.fi = j.at("fi").get<std::string>();
    pb.fj = j.at("fj").get<std::string>();
    pb.nnz = j.at("nnz").get<std::uint64_t>();
    pb.sigma = j.at("sigma").get<double>();
    pb.estimate = j.at("estimate").get<double>();
    pb.method = j.at("method").get<std::string>();
    pb.factor = j.at("factor").get<int>();
    return pb;
}

json level_to_json(const LevelCertificate& lc) {
    json j;
    j["t"] = lc.t;
    j["p"] = lc.p;
    j["m"] = lc.m;
    j["label_size"] = lc.label_size;
    j["D"] = lc.d_big;
    j["N"] = lc.n_index;
    j["delta"] = lc.delta;
    j["bad_rows"] = lc.bad_rows;
    j["pruned_mass"] = lc.pruned_mass;
    j["coarse_pruned_bound"] = lc.coarse_pruned_bound;
    j["d"] = {lc.d_num, lc.d_den};
    j["bucket_sizes"] = lc.bucket_sizes;
    json pbs = json::array();
    for (const auto& pb : lc.pair_bounds) pbs.push_back(pair_bound_to_json(pb));
    j["pair_bounds"] = pbs;
    j["boolnorm_bound"] = lc.boolnorm_bound;
    j["alg_val_pre_clip"] = lc.alg_val_pre_clip;
    j["alg_val"] = lc.alg_val;
    j["below_guarantee_regime"] = lc.below_guarantee_regime;
    j["trivial"] = lc.trivial;
    j["trivial_reason"] = lc.trivial_reason;
    j["bucket_law_ok"] = lc.bucket_law_ok;
    j["coeffs_pm1"] = lc.coeffs_pm1;
    return j;
}

LevelCertificate level_from_json(const json& j) {
    LevelCertificate lc;
    lc.t = j.at("t").get<int>();
    lc.p = j.at("p").get<std::uint64_t>();
    lc.m = j.at("m").get<std::uint64_t>();
    lc.label_size = j.at("label_size").get<int>();
    lc.d_big = j.at("D").get<std::string>();
    lc.n_index = j.at("N").get<std::string>();
    lc.delta = j.at("delta").get<std::string>();
    lc.bad_rows = j.at("bad_rows").get<std::uint64_t>();
    lc.pruned_mass = j.at("pruned_mass").get<double>();
    lc.coarse_pruned_bound = j.at("coarse_pruned_bound").get<double>();
    lc.d_num = j.at("d").at(0).get<std::string>();
    lc.d_den = j.at("d").at(1).get<std::string>();
    lc.bucket_sizes = j.at("bucket_sizes").get<std::vector<std::string>>();
    for (const auto& pb : j.at("pair_bounds")) lc.pair_bounds.push_back(pair_bound_from_json(pb));
    lc.boolnorm_bound = j.at("boolnorm_bound").get<double>();
    lc.alg_val_pre_clip = j.at("alg_val_pre_clip").get<double>();
    lc.alg_val = j.at("alg_val").get<double>();
    lc.below_guarantee_regime = j.at("below_guarantee_regime").get<bool>();
    lc.trivial = j.at("trivial").get<bool>();
    lc.trivial_reason = j.at("trivial_reason").get<std::string>();
    lc.bucket_law_ok = j.at("bucket_law_ok").get<bool>();
    lc.coeffs_pm1 = j.at("coeffs_pm1").get<bool>();
    return lc;
}

}  // namespace

std::string RefutationCertificate::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "refutation-certificate";
    j["digest"] = digest;
    j["n"] = n;
    j["k"] = k;
    j["ell"] = ell;
    j["eps"] = {eps_num, eps_den};
    j["tau"] = tau;
    j["m"] = m;
    j["m_discarded"] = m_discarded;
    json jl = json::array();
    for (const auto& lc : levels) jl.push_back(level_to_json(lc));
    j["levels"] = jl;
    j["alg_val"] = alg_val;
    return j.dump(2) + "\n";
}

RefutationCertificate RefutationCertificate::from_json(const std::string& text) {
    json j = json::parse(text);
    RefutationCertificate cert;
    cert.digest = j.at("digest").get<std::uint64_t>();
    cert.n = j.at("n").get<int>();
    cert.k = j.at("k").get<int>();
    cert.ell = j.at("ell").get<long>();
    cert.eps_num = j.at("eps").at(0).get<std::string>();
    cert.eps_den = j.at("eps").at(1).get<std::string>();
    cert.tau = j.at("tau").get<double>();
    cert.m = j.at("m").get<std::uint64_t>();
    cert.m_discarded = j.at("m_discarded").get<std::uint64_t>();
    for (const auto& jl : j.at("levels")) cert.levels.push_back(level_from_json(jl));
    cert.alg_val = j.at("alg_val").get<double>();
    return cert;
}

ReplayResult replay_certificate(const RefutationCertificate& cert) {
    ReplayResult res;
    RefutationCertificate redo = cert;
    std::ostringstream detail;
    bool ok = true;
    for (auto& lc : redo.levels) {
        const double alpha = assemble_level_alpha(lc);
        if (alpha != lc.alg_val) {
            ok = false;
            detail << "level t=" << lc.t << ": recomputed alpha " << alpha << " != recorded "
                   << lc.alg_val << "; ";
        }
        lc.alg_val = alpha;
    }
    // accounting: discarded + level masses must cover m
    Int covered(redo.m_discarded);
    for (const auto& lc : redo.levels) covered += lc.m;
    if (covered != Int(redo.m)) {
        ok = false;
        detail << "mass accounting: discarded + levels = " << covered.str() << " != m; ";
    }
    res.recomputed = assemble_final_alg_val(redo);
    if (res.recomputed != cert.alg_val) {
        ok = false;
        detail << "final alg-val " << res.recomputed << " != recorded " << cert.alg_val << "; ";
    }
    res.ok = ok;
    res.detail = detail.str();
    return res;
}

namespace {

struct ScaledCoeffs {
    std::vector<long long> num;
    Int den;
};

ScaledCoeffs scale_coeffs(const std::vector<Rat>& coeffs) {
    Int den(1);
    for (const auto& b : coeffs) den = lcm(den, denominator(b));
    if (den > (Int(1) << 40)) throw std::invalid_argument("brute force: coefficient denominators too rich");
    ScaledCoeffs out;
    out.den = den;
    for (const auto& b : coeffs) {
        Int v = numerator(b) * (den / denominator(b));
        out.num.push_back(v.convert_to<long long>());
    }
    return out;
}

}  // namespace

Rat brute_force_val(const XorInstance& inst) {
    inst.validate();
    if (inst.n > 26) throw std::invalid_argument("brute_force_val: n > 26");
    if (inst.m() == 0) return Rat(0);
    const auto sc = scale_coeffs(inst.coeffs);
    std::vector<std::vector<std::size_t>> by_var(inst.n + 1);
    for (std::size_t c = 0; c < inst.m(); ++c)
        for (int v : inst.clauses[c]) by_var[v].push_back(c);
    std::vector<int> sign(inst.m(), 1);
    long long sum = 0;
    for (std::size_t c = 0; c < inst.m(); ++c) sum += sc.num[c];
    long long best = sum;
    const std::uint64_t total = 1ull << inst.n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const int v = __builtin_ctzll(g) + 1;  // Gray-code flip
        for (std::size_t c : by_var[v]) {
            sum -= 2ll * sc.num[c] * sign[c];
            sign[c] = -sign[c];
        }
        best = std::max(best, sum);
    }
    return Rat(Int(best), sc.den * Int(inst.m()));
}

Rat brute_force_val(const BipartitePolynomial& psi_in) {
    BipartitePolynomial psi = psi_in.without_empty_partitions();
    psi.validate();
    if (psi.n > 26) throw std::invalid_argument("brute_force_val: n > 26");
    if (psi.m() == 0) return Rat(0);
    std::vector<Rat> flat;
    for (const auto& row : psi.coeffs)
        for (const auto& b : row) flat.push_back(b);
    const auto sc = scale_coeffs(flat);

    struct Term {
        std::size_t u;
        std::size_t flat_idx;
        int sign;
    };
    std::vector<std::vector<Term>> by_var(psi.n + 1);
    std::vector<long long> inner(psi.p(), 0);
    std::size_t fi = 0;
    std::vector<int> term_sign(flat.size(), 1);
    std::vector<std::size_t> term_u(flat.size());
    for (std::size_t u = 0; u < psi.p(); ++u) {
        for (std::size_t j = 0; j < psi.parts.parts[u].size(); ++j, ++fi) {
            term_u[fi] = u;
            inner[u] += sc.num[fi];
            for (int v : psi.parts.parts[u][j]) by_var[v].push_back({u, fi, 0});
        }
    }
    auto abs_ll = [](long long v) { return v < 0 ? -v : v; };
    long long total_abs = 0;
    for (long long v : inner) total_abs += abs_ll(v);
    long long best = total_abs;
    const std::uint64_t total = 1ull << psi.n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const int v = __builtin_ctzll(g) + 1;
        for (const auto& t : by_var[v]) {
            total_abs -= abs_ll(inner[t.u]);
            inner[t.u] -= 2ll * sc.num[t.flat_idx] * term_sign[t.flat_idx];
            term_sign[t.flat_idx] = -term_sign[t.flat_idx];
            total_abs += abs_ll(inner[t.u]);
        }
        best = std::max(best, total_abs);
    }
    return Rat(Int(best), sc.den * Int(psi.m()));
}

Rat brute_force_val_fraction(const CspInstance& inst) {
    inst.validate();
    if (inst.n > 26) throw std::invalid_argument("brute_force_val_fraction: n > 26");
    if (inst.m() == 0) return Rat(0);
    // per-clause input mask: bit i set means Xi(C,i) x_{C_i} = +1
    std::vector<std::uint32_t> mask(inst.m(), 0);
    std::vector<std::vector<std::pair<std::size_t, int>>> by_var(inst.n + 1);
    for (std::size_t c = 0; c < inst.m(); ++c) {
        for (int i = 0; i < inst.k; ++i) {
            by_var[inst.scopes[c][i]].emplace_back(c, i);
            if (inst.literals[c][i] > 0) mask[c] |= (1u << i);  // x starts at all +1
        }
    }
    long long sat = 0;
    for (std::size_t c = 0; c < inst.m(); ++c) sat += inst.predicate.eval_mask(mask[c]) ? 1 : 0;
    long long best = sat;
    const std::uint64_t total = 1ull << inst.n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const int v = __builtin_ctzll(g) + 1;
        for (const auto& [c, i] : by_var[v]) {
            sat -= inst.predicate.eval_mask(mask[c]) ? 1 : 0;
            mask[c] ^= (1u << i);
            sat += inst.predicate.eval_mask(mask[c]) ? 1 : 0;
        }
        best = std::max(best, sat);
    }
    return Rat(Int(best), Int(inst.m()));
}

}  // namespace kref
