#include "kref/covers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "kref/csp.hpp"
#include "kref/kikuchi.hpp"
#include "kref/refute.hpp"
#include "kref/rng.hpp"
#include "json.hpp"

namespace kref {

namespace {

using nlohmann::json;

using Bits = std::vector<std::uint64_t>;

Bits zero_bits(std::size_t n) { return Bits((n + 63) / 64, 0); }

void set_bit(Bits& b, std::size_t i) { b[i / 64] |= (1ull << (i % 64)); }

void xor_into(Bits& a, const Bits& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

bool is_zero(const Bits& b) {
    for (auto w : b)
        if (w) return false;
    return true;
}

std::size_t popcount(const Bits& b) {
    std::size_t c = 0;
    for (auto w : b) c += __builtin_popcountll(w);
    return c;
}

int lowest_bit(const Bits& b) {
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i]) return static_cast<int>(i * 64 + __builtin_ctzll(b[i]));
    return -1;
}

std::vector<std::size_t> bits_to_ids(const Bits& b) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < b.size(); ++i) {
        std::uint64_t w = b[i];
        while (w) {
            out.push_back(i * 64 + __builtin_ctzll(w));
            w &= w - 1;
        }
    }
    return out;
}

Bits edge_mask(const Hypergraph& h, std::size_t id) {
    Bits b = zero_bits(h.n);
    for (int v : h.edges[id]) set_bit(b, v - 1);
    return b;
}

struct KernelBasis {
    std::vector<Bits> combos;  // over edge ids
};

/// Column-wise elimination over GF(2); every zeroed column yields a kernel
/// combination of edges.
KernelBasis kernel_basis(const Hypergraph& h, const std::vector<std::size_t>& order) {
    KernelBasis out;
    std::unordered_map<int, std::pair<Bits, Bits>> pivots;  // var bit -> (colmask, combo)
    for (std::size_t j : order) {
        Bits col = edge_mask(h, j);
        Bits combo = zero_bits(h.m());
        set_bit(combo, j);
        while (!is_zero(col)) {
            const int bit = lowest_bit(col);
            auto it = pivots.find(bit);
            if (it == pivots.end()) {
                pivots.emplace(bit, std::make_pair(col, combo));
                break;
            }
            xor_into(col, it->second.first);
            xor_into(combo, it->second.second);
        }
        if (is_zero(col)) out.combos.push_back(std::move(combo));
    }
    return out;
}

std::optional<EvenCover> exhaustive_cover(const Hypergraph& h, std::size_t max_len,
                                          std::size_t guard) {
    if (h.m() > guard)
        throw std::invalid_argument("find_even_cover: exhaustive guard exceeded (m > " +
                                    std::to_string(guard) + ")");
    const std::size_t m = h.m();
    std::vector<Bits> masks;
    for (std::size_t j = 0; j < m; ++j) masks.push_back(edge_mask(h, j));
    std::vector<std::size_t> idx;
    for (std::size_t r = 1; r <= std::min(max_len, m); ++r) {
        idx.assign(r, 0);
        for (std::size_t i = 0; i < r; ++i) idx[i] = i;
        while (true) {
            Bits acc = zero_bits(h.n);
            for (std::size_t i = 0; i < r; ++i) xor_into(acc, masks[idx[i]]);
            if (is_zero(acc)) {
                EvenCover c;
                c.edge_ids.assign(idx.begin(), idx.end());
                return c;
            }
            std::size_t i = r;
            while (i > 0 && idx[i - 1] == m - r + (i - 1)) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t q = i; q < r; ++q) idx[q] = idx[q - 1] + 1;
        }
    }
    return std::nullopt;
}

std::optional<EvenCover> kernel_cover(const Hypergraph& h, std::size_t max_len,
                                      const CoverSearchOptions& opts) {
    std::vector<std::size_t> order(h.m());
    for (std::size_t j = 0; j < h.m(); ++j) order[j] = j;
    KernelBasis basis = kernel_basis(h, order);
    const std::size_t dim = basis.combos.size();
    if (dim == 0) return std::nullopt;

    Bits best;
    std::size_t best_w = SIZE_MAX;
    auto consider = [&](const Bits& cand) {
        const std::size_t w = popcount(cand);
        if (w > 0 && w < best_w) {
            best = cand;
            best_w = w;
        }
    };

    if (dim <= static_cast<std::size_t>(opts.kernel_enum_dim)) {
        // exact: walk the whole kernel space in Gray-code order
        Bits cur = zero_bits(h.m());
        const std::uint64_t total = 1ull << dim;
        for (std::uint64_t g = 1; g < total; ++g) {
            xor_into(cur, basis.combos[__builtin_ctzll(g)]);
            consider(cur);
        }
    } else {
        for (const auto& b : basis.combos) consider(b);
        if (dim <= 256) {
            Bits tmp;
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = i + 1; j < dim; ++j) {
                    tmp = basis.combos[i];
                    xor_into(tmp, basis.combos[j]);
                    consider(tmp);
                }
        }
        if (dim <= 48) {
            Bits tmp;
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = i + 1; j < dim; ++j)
                    for (std::size_t q = j + 1; q < dim; ++q) {
                        tmp = basis.combos[i];
                        xor_into(tmp, basis.combos[j]);
                        xor_into(tmp, basis.combos[q]);
                        consider(tmp);
                    }
        }
        Rng rng(opts.seed);
        for (int round = 0; round < opts.kernel_isd_rounds; ++round) {
            // information-set style: re-eliminate under a random edge order
            std::vector<std::size_t> perm = order;
            for (std::size_t i = perm.size(); i > 1; --i)
                std::swap(perm[i - 1], perm[rng.below(i)]);
            for (const auto& b : kernel_basis(h, perm).combos) consider(b);
        }
    }
    if (best_w == SIZE_MAX || best_w > max_len) {
        // exact enumeration proves nonexistence below max_len; heuristic
        // rounds simply failed
        return std::nullopt;
    }
    EvenCover c;
    c.edge_ids = bits_to_ids(best);
    return c;
}

std::optional<EvenCover> kikuchi_cycle_cover(const Hypergraph& h, std::size_t max_len,
                                             const CoverSearchOptions& opts) {
    if (h.k % 2 != 0) throw std::invalid_argument("find_even_cover: kikuchi-cycle needs even k");
    const long ell = opts.kikuchi_ell > 0 ? opts.kikuchi_ell : h.k / 2;
    const KikuchiGraph g = kikuchi_graph(h, ell);
    // adjacency over the touched vertices only
    std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint64_t, std::uint32_t>>> adj;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t> seen_pair;
    for (const auto& e : g.edges) {
        auto key = std::minmax(e.a, e.b);
        auto it = seen_pair.find({key.first, key.second});
        if (it != seen_pair.end()) {
            // parallel Kikuchi edges: two clauses with equal symmetric
            // difference footprint -> length-2 cover candidate
            std::vector<std::size_t> ids{it->second, e.clause};
            std::sort(ids.begin(), ids.end());
            if (ids[0] != ids[1]) {
                Bits acc = edge_mask(h, ids[0]);
                xor_into(acc, edge_mask(h, ids[1]));
                if (is_zero(acc)) {
                    EvenCover c;
                    c.edge_ids = ids;
                    return c;
                }
            }
        } else {
            seen_pair.emplace(std::make_pair(key.first, key.second), e.clause);
        }
        adj[e.a].emplace_back(e.b, e.clause);
        adj[e.b].emplace_back(e.a, e.clause);
    }
    // BFS from every touched vertex; a non-tree edge closes a walk whose
    // clause labels form an even multicover; its odd-multiplicity support is
    // an even cover when nonempty.
    for (const auto& [root, nbrs] : adj) {
        (void)nbrs;
        std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::uint32_t>> parent;
        std::unordered_map<std::uint64_t, int> dist;
        std::queue<std::uint64_t> q;
        q.push(root);
        dist[root] = 0;
        while (!q.empty()) {
            const std::uint64_t u = q.front();
            q.pop();
            for (const auto& [v, cid] : adj[u]) {
                if (!dist.count(v)) {
                    dist[v] = dist[u] + 1;
                    parent[v] = {u, cid};
                    q.push(v);
                    continue;
                }
                if (parent.count(u) && parent[u].first == v) continue;
                // closed walk: root..u, edge (u,v), v..root
                std::map<std::size_t, int> mult;
                ++mult[cid];
                for (std::uint64_t w = u; w != root;) {
                    ++mult[parent[w].second];
                    w = parent[w].first;
                }
                for (std::uint64_t w = v; w != root;) {
                    ++mult[parent[w].second];
                    w = parent[w].first;
                }
                EvenCover c;
                for (const auto& [id, cnt] : mult)
                    if (cnt % 2 == 1) c.edge_ids.push_back(id);
                if (!c.edge_ids.empty() && c.edge_ids.size() <= max_len) {
                    Bits acc = zero_bits(h.n);
                    for (auto id : c.edge_ids) xor_into(acc, edge_mask(h, id));
                    if (is_zero(acc)) return c;
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace

CoverCheck verify_even_cover(const Hypergraph& h, const std::vector<std::size_t>& ids) {
    CoverCheck res;
    if (ids.empty()) {
        res.reason = "empty cover";
        return res;
    }
    std::set<std::size_t> distinct(ids.begin(), ids.end());
    if (distinct.size() != ids.size()) {
        res.reason = "duplicate edge id";
        return res;
    }
    for (auto id : ids) {
        if (id >= h.m()) {
            res.reason = "edge id out of range";
            return res;
        }
    }
    Bits acc = zero_bits(h.n);
    for (auto id : ids) xor_into(acc, edge_mask(h, id));
    if (!is_zero(acc)) {
        res.reason = "symmetric difference is not empty";
        return res;
    }
    res.ok = true;
    return res;
}

std::optional<EvenCover> find_even_cover(const Hypergraph& h, std::size_t max_len,
                                         CoverStrategy strategy, const CoverSearchOptions& opts) {
    h.validate();
    if (h.m() == 0) return std::nullopt;
    std::optional<EvenCover> found;
    switch (strategy) {
        case CoverStrategy::Exhaustive:
            found = exhaustive_cover(h, max_len, opts.exhaustive_max_m);
            break;
        case CoverStrategy::Gf2Kernel:
            found = kernel_cover(h, max_len, opts);
            break;
        case CoverStrategy::KikuchiCycle:
            found = kikuchi_cycle_cover(h, max_len, opts);
            break;
    }
    if (found) {
        const auto check = verify_even_cover(h, found->edge_ids);
        if (!check.ok) throw std::logic_error("find_even_cover: candidate failed verification: " + check.reason);
    }
    return found;
}

std::vector<EvenCover> extract_disjoint_covers(const Hypergraph& h, std::size_t max_len,
                                               std::size_t want, CoverStrategy strategy,
                                               const CoverSearchOptions& opts) {
    std::vector<EvenCover> out;
    std::vector<std::size_t> alive;
    for (std::size_t j = 0; j < h.m(); ++j) alive.push_back(j);
    while (out.size() < want) {
        Hypergraph sub;
        sub.n = h.n;
        sub.k = h.k;
        for (std::size_t id : alive) sub.edges.push_back(h.edges[id]);
        auto found = find_even_cover(sub, max_len, strategy, opts);
        if (!found) break;
        EvenCover mapped;
        std::set<std::size_t> used;
        for (auto local : found->edge_ids) {
            mapped.edge_ids.push_back(alive[local]);
            used.insert(local);
        }
        std::sort(mapped.edge_ids.begin(), mapped.edge_ids.end());
        out.push_back(std::move(mapped));
        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < alive.size(); ++i)
            if (!used.count(i)) next.push_back(alive[i]);
        alive = std::move(next);
    }
    return out;
}

std::size_t FkoWitness::size() const {
    std::size_t s = 0;
    for (const auto& c : covers) s += c.length();
    return s;
}

WitnessCheck verify_fko_witness(const XorInstance& inst, const FkoWitness& w) {
    WitnessCheck res;
    inst.validate();
    for (const auto& b : inst.coeffs) {
        if (b != 1 && b != -1) {
            res.reason = "coefficients must be +-1";
            return res;
        }
    }
    const Hypergraph h = inst.hypergraph();
    std::set<std::size_t> used;
    for (std::size_t i = 0; i < w.covers.size(); ++i) {
        const auto& cover = w.covers[i];
        const auto check = verify_even_cover(h, cover.edge_ids);
        if (!check.ok) {
            res.reason = "cover " + std::to_string(i) + ": " + check.reason;
            return res;
        }
        if (w.h > 0 && cover.length() > w.h) {
            res.reason = "cover " + std::to_string(i) + " exceeds the declared length bound";
            return res;
        }
        for (auto id : cover.edge_ids) {
            if (used.count(id)) {
                res.reason = "covers are not edge-disjoint (edge " + std::to_string(id) + ")";
                return res;
            }
            used.insert(id);
        }
    }
    std::size_t violated = 0;
    for (const auto& cover : w.covers) {
        int prod = 1;
        for (auto id : cover.edge_ids) prod *= (inst.coeffs[id] == 1 ? 1 : -1);
        if (prod == -1) ++violated;
    }
    res.ok = true;
    res.violated_covers = violated;
    res.bound_exact = inst.m() == 0 ? Rat(1) : Rat(Int(inst.m() - violated), Int(inst.m()));
    res.bound = to_double(res.bound_exact);
    if (Rat(res.bound) < res.bound_exact)
        res.bound = std::nextafter(res.bound, 2.0);  // keep the double an upper bound
    return res;
}

FkoWitness build_fko_witness(const XorInstance& inst, std::size_t max_len, std::size_t want,
                             CoverStrategy strategy, const CoverSearchOptions& opts) {
    FkoWitness w;
    w.h = max_len;
    w.covers = extract_disjoint_covers(inst.hypergraph(), max_len, want, strategy, opts);
    return w;
}

FkoWitness build_csp_fko_witness(const CspInstance& inst, const CspWitnessParams& params) {
    inst.validate();
    FkoWitness w;
    w.h = params.max_len;
    const auto& fourier = inst.predicate.fourier.empty() ? fourier_expansion(inst.predicate)
                                                         : inst.predicate.fourier;
    const std::uint32_t full = (1u << inst.k) - 1;
    for (const auto& [mask, coeff] : fourier) {
        if (mask == 0 || coeff == 0) continue;
        const int deg = __builtin_popcount(mask);
        if (deg == 1) {
            const Rat b = linear_term_bound(inst, mask);
            w.linear_aux.push_back({mask, numerator(b).str() + "/" + denominator(b).str()});
        } else if (mask != full) {
            const XorInstance piece = fourier_piece(inst, mask);
            RefuteOptions opts;
            w.poly_aux.push_back({mask, refute_poly(piece, params.ell, params.eps, params.tau, opts).alg_val});
        }
    }
    if (fourier.count(full) && fourier.at(full) != 0) {
        const XorInstance piece = fourier_piece(inst, full);
        w.covers = extract_disjoint_covers(piece.hypergraph(), params.max_len, params.want,
                                           CoverStrategy::Gf2Kernel, params.search);
    }
    return w;
}

WitnessCheck verify_csp_fko_witness(const CspInstance& inst, const FkoWitness& w,
                                    const CspWitnessParams& params) {
    WitnessCheck res;
    inst.validate();
    const auto& fourier = inst.predicate.fourier.empty() ? fourier_expansion(inst.predicate)
                                                         : inst.predicate.fourier;
    const std::uint32_t full = (1u << inst.k) - 1;
    // combined bound, every piece recomputed or re-certified here
    Rat bound = fourier.count(0) ? fourier.at(0) : Rat(0);
    double float_part = 0.0;
    for (const auto& [mask, coeff] : fourier) {
        if (mask == 0 || mask == full || coeff == 0) continue;
        const Rat weight = coeff < 0 ? -coeff : coeff;
        if (__builtin_popcount(mask) == 1) {
            bound += weight * linear_term_bound(inst, mask);
        } else {
            const XorInstance piece = fourier_piece(inst, mask);
            RefuteOptions opts;
            const double sub = refute_poly(piece, params.ell, params.eps, params.tau, opts).alg_val;
            float_part += to_double(weight) * sub;
        }
    }
    if (fourier.count(full) && fourier.at(full) != 0) {
        const Rat top = fourier.at(full);
        const int sign = top < 0 ? -1 : 1;
        const XorInstance piece = fourier_piece(inst, full);
        const Hypergraph h = piece.hypergraph();
        std::set<std::size_t> used;
        std::size_t violated = 0;
        for (std::size_t i = 0; i < w.covers.size(); ++i) {
            const auto check = verify_even_cover(h, w.covers[i].edge_ids);
            if (!check.ok) {
                res.reason = "cover " + std::to_string(i) + ": " + check.reason;
                return res;
            }
            if (w.h > 0 && w.covers[i].length() > w.h) {
                res.reason = "cover " + std::to_string(i) + " exceeds the declared length bound";
                return res;
            }
            int prod = 1;
            for (auto id : w.covers[i].edge_ids) {
                if (used.count(id)) {
                    res.reason = "covers are not edge-disjoint (edge " + std::to_string(id) + ")";
                    return res;
                }
                used.insert(id);
                prod *= (piece.coeffs[id] == 1 ? sign : -sign);
            }
            if (prod == -1) ++violated;
        }
        const Rat weight = top < 0 ? -top : top;
        // max_x sign * phi_top(x) <= 1 - 2v/m
        bound += weight * (Rat(1) - Rat(2 * Int(violated), Int(inst.m())));
        res.violated_covers = violated;
    }
    res.ok = true;
    if (float_part == 0.0) {
        res.bound_exact = bound > 1 ? Rat(1) : bound;
        res.bound = to_double(res.bound_exact);
        if (Rat(res.bound) < res.bound_exact) res.bound = std::nextafter(res.bound, 2.0);
    } else {
        double total = to_double(bound) + float_part;
        total = std::min(1.0, std::max(0.0, total * (1.0 + 1e-12) + 1e-15));
        res.bound = total;
        res.bound_exact = Rat(res.bound);
    }
    return res;
}

std::string FkoWitness::to_json() const {
    json j;
    j["schema_version"] = 1;
    j["kind"] = "fko-witness";
    j["h"] = h;
    json jc = json::array();
    for (const auto& c : covers) jc.push_back(c.edge_ids);
    j["covers"] = jc;
    json jl = json::array();
    for (const auto& a : linear_aux) jl.push_back({a.mask, a.bound});
    j["linear_aux"] = jl;
    json jp = json::array();
    for (const auto& a : poly_aux) jp.push_back({a.mask, a.bound});
    j["poly_aux"] = jp;
    return j.dump(2) + "\n";
}

FkoWitness FkoWitness::from_json(const std::string& text) {
    json j = json::parse(text);
    FkoWitness w;
    w.h = j.at("h").get<std::size_t>();
    for (const auto& ids : j.at("covers")) {
        EvenCover c;
        c.edge_ids = ids.get<std::vector<std::size_t>>();
        w.covers.push_back(std::move(c));
    }
    for (const auto& a : j.at("linear_aux"))
        w.linear_aux.push_back({a.at(0).get<std::uint32_t>(), a.at(1).get<std::string>()});
    for (const auto& a : j.at("poly_aux"))
        w.poly_aux.push_back({a.at(0).get<std::uint32_t>(), a.at(1).get<double>()});
    return w;
}

GirthResult graph_girth(const SimpleGraph& g) {
    GirthResult best;
    std::vector<std::vector<int>> adj(g.n + 1);
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : g.edges) {
        if (a == b) throw std::invalid_argument("graph_girth: self loop");
        auto key = std::minmax(a, b);
        if (seen.count(key)) {
            // parallel edge: a 2-cycle
            if (!best.is_finite() || best.length > 2) best = {2, {a, b}};
            continue;
        }
        seen.insert(key);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (int root = 1; root <= g.n; ++root) {
        std::vector<int> dist(g.n + 1, -1), parent(g.n + 1, 0);
        std::queue<int> q;
        q.push(root);
        dist[root] = 0;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            if (best.is_finite() && static_cast<std::size_t>(2 * dist[u]) >= best.length) continue;
            for (int v : adj[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    q.push(v);
                    continue;
                }
                if (v == parent[u] || u == parent[v]) continue;
                // close the walk root..u - (u,v) - v..root
                std::vector<int> pu{u}, pv{v};
                for (int w = u; w != root; w = parent[w]) pu.push_back(parent[w]);
                for (int w = v; w != root; w = parent[w]) pv.push_back(parent[w]);
                std::set<int> on_v(pv.begin(), pv.end());
                int lca = root;
                for (int w : pu)
                    if (on_v.count(w)) {
                        lca = w;
                        break;
                    }
                std::vector<int> cycle;
                for (int w : pu) {
                    cycle.push_back(w);
                    if (w == lca) break;
                }
                std::vector<int> tail;
                for (int w : pv) {
                    if (w == lca) break;
                    tail.push_back(w);
                }
                std::reverse(tail.begin(), tail.end());
                cycle.insert(cycle.end(), tail.begin(), tail.end());
                std::set<int> distinct(cycle.begin(), cycle.end());
                if (distinct.size() != cycle.size() || cycle.size() < 3) continue;
                if (!best.is_finite() || cycle.size() < best.length) {
                    best.length = cycle.size();
                    best.cycle = cycle;
                }
            }
        }
    }
    return best;
}

}  // namespace kref
