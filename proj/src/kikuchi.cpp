#include "kref/kikuchi.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace kref {

namespace {

struct CellEvent {
    std::uint32_t u;
    std::uint64_t row, col;
    double value;
};

// All index masks of `universe` bits with exactly `size` bits set.
std::vector<std::uint32_t> masks_of_size(int universe, int size) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t m = 0; m < (1u << universe); ++m)
        if (__builtin_popcount(m) == size) out.push_back(m);
    return out;
}

// Iterates all `pick`-subsets of `pool` (sorted); calls fn(sorted subset).
template <typename Fn>
void for_each_combination(const std::vector<int>& pool, int pick, Fn&& fn) {
    const int n = static_cast<int>(pool.size());
    if (pick < 0 || pick > n) return;
    std::vector<int> idx(pick);
    for (int i = 0; i < pick; ++i) idx[i] = i;
    std::vector<int> subset(pick);
    while (true) {
        for (int i = 0; i < pick; ++i) subset[i] = pool[idx[i]];
        fn(subset);
        int i = pick - 1;
        while (i >= 0 && idx[i] == n - pick + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < pick; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::vector<int> merge_sorted(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

struct MatrixAccum {
    std::vector<CellEvent> cell_events;                 // row < col only
    std::vector<std::pair<std::uint64_t, std::uint32_t>> gamma_events;  // (row, u)
    std::vector<std::pair<std::size_t, Rat>> exact_events;  // index into cell_events
    bool exact = false;
    std::uint64_t directed = 0;
    std::uint64_t cap = 0;

    void emit(std::uint32_t u, std::uint64_t r, std::uint64_t c, double v, const Rat& vx) {
        // one directed generation event (r -> c)
        ++directed;
        if (directed > 2 * cap)
            throw std::length_error("kikuchi: generation event cap exceeded; raise max_cells");
        gamma_events.emplace_back(r, u);
        if (r < c) {
            cell_events.push_back({u, r, c, v});
            if (exact) exact_events.emplace_back(cell_events.size() - 1, vx);
        }
    }

    void finalize(KikuchiMatrix& km) {
        // merge cells within (u, row, col)
        std::vector<std::size_t> order(cell_events.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& x = cell_events[a];
            const auto& y = cell_events[b];
            if (x.u != y.u) return x.u < y.u;
            if (x.row != y.row) return x.row < y.row;
            return x.col < y.col;
        });
        std::vector<Rat> exact_by_event;
        if (exact) {
            exact_by_event.assign(cell_events.size(), Rat(0));
            for (const auto& [i, v] : exact_events) exact_by_event[i] = v;
        }
        for (std::size_t pos = 0; pos < order.size();) {
            const auto& head = cell_events[order[pos]];
            KikuchiCell cell{head.u, head.row, head.col, 0.0};
            Rat ev(0);
            std::size_t q = pos;
            for (; q < order.size(); ++q) {
                const auto& e = cell_events[order[q]];
                if (e.u != head.u || e.row != head.row || e.col != head.col) break;
                cell.value += e.value;
                if (exact) ev += exact_by_event[order[q]];
            }
            km.cells.push_back(cell);
            if (exact) km.exact_values.push_back(ev);
            pos = q;
        }
        // butterfly counts
        std::sort(gamma_events.begin(), gamma_events.end());
        for (std::size_t pos = 0; pos < gamma_events.size();) {
            std::size_t q = pos;
            while (q < gamma_events.size() && gamma_events[q] == gamma_events[pos]) ++q;
            km.butterfly.push_back({gamma_events[pos].first, gamma_events[pos].second,
                                    static_cast<std::uint32_t>(q - pos)});
            pos = q;
        }
        std::sort(km.butterfly.begin(), km.butterfly.end(), [](const auto& a, const auto& b) {
            if (a.row != b.row) return a.row < b.row;
            return a.u < b.u;
        });
        km.generation_events = directed;
    }
};

}  // namespace

Int compute_D(int k, long n, long ell) {
    if (k < 2) throw std::invalid_argument("compute_D: k >= 2 required");
    if (ell < k - 1 || ell > n)
        throw std::invalid_argument("compute_D: need k-1 <= ell <= n");
    const Int filler = binomial(2 * n - 2 * (k - 1), ell - (k - 1));
    if (k % 2 == 1) {
        const Int w = binomial(k - 1, (k - 1) / 2);
        return w * w * filler;
    }
    return 2 * binomial(k - 1, k / 2) * binomial(k - 1, (k - 2) / 2) * filler;
}

void BipartitePolynomial::validate() const {
    if (parts.t != k) throw std::invalid_argument("BipartitePolynomial: parts.t != k");
    parts.validate();
    if (coeffs.size() != parts.p()) throw std::invalid_argument("BipartitePolynomial: coeff shape");
    for (std::size_t u = 0; u < parts.p(); ++u) {
        if (coeffs[u].size() != parts.parts[u].size())
            throw std::invalid_argument("BipartitePolynomial: coeff shape");
        for (const auto& b : coeffs[u])
            if (b < -1 || b > 1) throw std::invalid_argument("BipartitePolynomial: b outside [-1,1]");
    }
}

namespace {
Rat monomial(const std::vector<int>& x, const VertexSet& c) {
    int sign = 1;
    for (int v : c) sign *= x[v - 1];
    return Rat(sign);
}
}  // namespace

Rat BipartitePolynomial::value_for_x(const std::vector<int>& x) const {
    if (m() == 0) return Rat(0);
    Rat total(0);
    for (std::size_t u = 0; u < p(); ++u) {
        Rat inner(0);
        for (std::size_t j = 0; j < parts.parts[u].size(); ++j)
            inner += coeffs[u][j] * monomial(x, parts.parts[u][j]);
        total += inner < 0 ? -inner : inner;
    }
    return total / Int(m());
}

Rat BipartitePolynomial::eval(const std::vector<int>& y, const std::vector<int>& x) const {
    if (m() == 0) return Rat(0);
    Rat total(0);
    for (std::size_t u = 0; u < p(); ++u) {
        Rat inner(0);
        for (std::size_t j = 0; j < parts.parts[u].size(); ++j)
            inner += coeffs[u][j] * monomial(x, parts.parts[u][j]);
        total += Rat(y[u]) * inner;
    }
    return total / Int(m());
}

Rat BipartitePolynomial::f_value(const std::vector<int>& x) const {
    if (m() == 0) return Rat(0);
    Rat total(0);
    for (std::size_t u = 0; u < p(); ++u) {
        Rat inner(0), sq(0);
        for (std::size_t j = 0; j < parts.parts[u].size(); ++j) {
            Rat term = coeffs[u][j] * monomial(x, parts.parts[u][j]);
            inner += term;
            sq += term * term;
        }
        total += inner * inner - sq;
    }
    return total * Int(p()) / (Int(m()) * Int(m()));
}

BipartitePolynomial BipartitePolynomial::without_empty_partitions() const {
    BipartitePolynomial out;
    out.n = n;
    out.k = k;
    out.parts.n = n;
    out.parts.t = k;
    const bool labeled = !parts.labels.empty();
    for (std::size_t u = 0; u < p(); ++u) {
        if (parts.parts[u].empty()) continue;
        out.parts.parts.push_back(parts.parts[u]);
        if (labeled) out.parts.labels.push_back(parts.labels[u]);
        out.coeffs.push_back(coeffs[u]);
    }
    return out;
}

BipartitePolynomial bipartite_from_xor(const XorInstance& inst, PartitionRule rule) {
    if (inst.k < 2) throw std::invalid_argument("bipartite_from_xor: k >= 2 required");
    inst.validate();
    std::map<int, std::size_t> part_of_owner;
    BipartitePolynomial psi;
    psi.n = inst.n;
    psi.k = inst.k;
    psi.parts.n = inst.n;
    psi.parts.t = inst.k;
    for (std::size_t c = 0; c < inst.m(); ++c) {
        const auto& clause = inst.clauses[c];
        int owner = (rule == PartitionRule::CMin)
                        ? clause.front()
                        : clause[c % clause.size()];
        auto [it, fresh] = part_of_owner.try_emplace(owner, psi.parts.parts.size());
        if (fresh) {
            psi.parts.parts.emplace_back();
            psi.parts.labels.push_back({owner});
            psi.coeffs.emplace_back();
        }
        VertexSet rest;
        for (int v : clause)
            if (v != owner) rest.push_back(v);
        psi.parts.parts[it->second].push_back(std::move(rest));
        psi.coeffs[it->second].push_back(inst.coeffs[c]);
    }
    return psi;
}

double KikuchiMatrix::entrywise_l1() const {
    double s = 0;
    for (const auto& c : cells) s += 2 * std::abs(c.value);
    return s;
}

std::vector<KikuchiCell> KikuchiMatrix::total_cells() const {
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> acc;
    for (const auto& c : cells) acc[{c.row, c.col}] += c.value;
    std::vector<KikuchiCell> out;
    out.reserve(acc.size());
    for (const auto& [rc, v] : acc) out.push_back({0, rc.first, rc.second, v});
    return out;
}

std::vector<KikuchiMatrix::RowGamma> KikuchiMatrix::row_gammas() const {
    std::vector<RowGamma> out;
    for (std::size_t pos = 0; pos < butterfly.size();) {
        RowGamma g{butterfly[pos].row, 0, 0};
        std::size_t q = pos;
        for (; q < butterfly.size() && butterfly[q].row == g.row; ++q) {
            g.total += butterfly[q].count;
            g.max_u = std::max<std::uint64_t>(g.max_u, butterfly[q].count);
        }
        out.push_back(g);
        pos = q;
    }
    return out;
}

std::string KikuchiMatrix::export_coordinate_text() const {
    std::ostringstream os;
    for (const auto& c : total_cells()) {
        os << c.row << ' ' << c.col << ' ' << c.value << '\n';
        os << c.col << ' ' << c.row << ' ' << c.value << '\n';
    }
    return os.str();
}

KikuchiMatrix build_even_kikuchi(const XorInstance& inst, long ell, const KikuchiBuildOptions& opts) {
    if (inst.k % 2 != 0)
        throw std::invalid_argument("build_even_kikuchi: k must be even (use the bipartite variant)");
    if (ell < inst.k / 2 || ell > inst.n)
        throw std::invalid_argument("build_even_kikuchi: need k/2 <= ell <= n");
    inst.validate();
    KikuchiMatrix km;
    km.index = SubsetIndex::plain(inst.n, static_cast<int>(ell));
    km.arity = inst.k;
    km.bipartite = false;
    km.D = binomial(inst.k, inst.k / 2) * binomial(inst.n - inst.k, ell - inst.k / 2);
    km.p = inst.m();

    MatrixAccum acc;
    acc.exact = opts.exact_values;
    acc.cap = opts.max_cells;

    std::vector<int> all(inst.n);
    for (int i = 0; i < inst.n; ++i) all[i] = i;

    for (std::size_t cid = 0; cid < inst.m(); ++cid) {
        const auto& clause = inst.clauses[cid];
        std::vector<int> cz;  // 0-based clause
        for (int v : clause) cz.push_back(v - 1);
        std::vector<int> comp;
        std::set_difference(all.begin(), all.end(), cz.begin(), cz.end(), std::back_inserter(comp));
        const double bval = to_double(inst.coeffs[cid]);
        for_each_combination(cz, inst.k / 2, [&](const std::vector<int>& r) {
            std::vector<int> rest;
            std::set_difference(cz.begin(), cz.end(), r.begin(), r.end(), std::back_inserter(rest));
            for_each_combination(comp, static_cast<int>(ell) - inst.k / 2, [&](const std::vector<int>& f) {
                const std::uint64_t s = km.index.rank(merge_sorted(r, f));
                const std::uint64_t t = km.index.rank(merge_sorted(rest, f));
                acc.emit(static_cast<std::uint32_t>(cid), s, t, bval, inst.coeffs[cid]);
            });
        });
    }
    acc.finalize(km);
    return km;
}

KikuchiMatrix build_bipartite_kikuchi(const BipartitePolynomial& psi, long ell,
                                      const KikuchiBuildOptions& opts) {
    psi.validate();
    const int k = psi.k;
    if (ell < k - 1 || ell > psi.n)
        throw std::invalid_argument("build_bipartite_kikuchi: need k-1 <= ell <= n");
    KikuchiMatrix km;
    km.index = SubsetIndex::cloned(psi.n, static_cast<int>(ell));
    km.arity = k;
    km.bipartite = true;
    km.D = compute_D(k, psi.n, ell);
    km.p = psi.p();

    MatrixAccum acc;
    acc.exact = opts.exact_values;
    acc.cap = opts.max_cells;

    // split shapes: (|S cap C1|, |S cap C2'|) choices
    std::vector<std::pair<int, int>> shapes;
    if (k % 2 == 1) {
        shapes.emplace_back((k - 1) / 2, (k - 1) / 2);
    } else {
        shapes.emplace_back(k / 2, (k - 2) / 2);
        shapes.emplace_back((k - 2) / 2, k / 2);
    }
    std::vector<std::vector<std::uint32_t>> masks(k);
    for (int s = 0; s <= k - 1; ++s) masks[s] = masks_of_size(k - 1, s);

    std::vector<int> universe(2 * psi.n);
    for (int i = 0; i < 2 * psi.n; ++i) universe[i] = i;

    const int fill = static_cast<int>(ell) - (k - 1);

    for (std::size_t u = 0; u < psi.p(); ++u) {
        const auto& hu = psi.parts.parts[u];
        for (std::size_t i = 0; i < hu.size(); ++i) {
            for (std::size_t j = 0; j < hu.size(); ++j) {
                if (i == j) continue;
                // ordered pair (C, C'): C with label 1, C' with label 2
                std::vector<int> a, b;
                for (int v : hu[i]) a.push_back(km.index.clone_id(v, 1));
                for (int v : hu[j]) b.push_back(km.index.clone_id(v, 2));
                std::vector<int> tail = merge_sorted(a, b);
                std::vector<int> comp;
                std::set_difference(universe.begin(), universe.end(), tail.begin(), tail.end(),
                                    std::back_inserter(comp));
                const double bval = to_double(psi.coeffs[u][i]) * to_double(psi.coeffs[u][j]);
                const Rat bx = psi.coeffs[u][i] * psi.coeffs[u][j];
                for (const auto& [sa, sb] : shapes) {
                    for (std::uint32_t ma : masks[sa]) {
                        std::vector<int> r1, r1c;
                        for (int q = 0; q < k - 1; ++q)
                            (ma & (1u << q) ? r1 : r1c).push_back(a[q]);
                        for (std::uint32_t mb : masks[sb]) {
                            std::vector<int> r2, r2c;
                            for (int q = 0; q < k - 1; ++q)
                                (mb & (1u << q) ? r2 : r2c).push_back(b[q]);
                            const std::vector<int> base = merge_sorted(r1, r2);
                            const std::vector<int> base_t = merge_sorted(r1c, r2c);
                            for_each_combination(comp, fill, [&](const std::vector<int>& f) {
                                const std::uint64_t s = km.index.rank(merge_sorted(base, f));
                                const std::uint64_t t = km.index.rank(merge_sorted(base_t, f));
                                acc.emit(static_cast<std::uint32_t>(u), s, t, bval, bx);
                            });
                        }
                    }
                }
            }
        }
    }
    acc.finalize(km);

    // Every ordered pair contributes exactly D directed cells.
    Int pairs(0);
    for (const auto& hu : psi.parts.parts) pairs += Int(hu.size()) * Int(hu.size() - 1);
    if (Int(km.generation_events) != km.D * pairs)
        throw std::logic_error("build_bipartite_kikuchi: pair replication count violated");
    return km;
}

std::pair<Rat, Rat> quad_form_identity(const KikuchiMatrix& km, const BipartitePolynomial& psi,
                                       const std::vector<int>& x) {
    if (!km.bipartite) throw std::invalid_argument("quad_form_identity: bipartite matrix expected");
    if (km.exact_values.size() != km.cells.size())
        throw std::invalid_argument("quad_form_identity: matrix must be built with exact_values");
    if (static_cast<int>(x.size()) != psi.n) throw std::invalid_argument("quad_form_identity: |x| != n");

    auto sign_of_subset = [&](std::uint64_t rank) {
        int sgn = 1;
        for (int id : km.index.unrank(rank)) sgn *= x[km.index.clone_vertex(id) - 1];
        return sgn;
    };
    Rat lhs(0);
    for (std::size_t i = 0; i < km.cells.size(); ++i) {
        const auto& c = km.cells[i];
        lhs += Rat(2 * sign_of_subset(c.row) * sign_of_subset(c.col)) * km.exact_values[i];
    }
    // rhs = (m^2 D / p) f(x) = D * sum_u sum_{C != C'} b b' x_C x_C'
    Rat pair_sum(0);
    for (std::size_t u = 0; u < psi.p(); ++u) {
        Rat inner(0), sq(0);
        for (std::size_t j = 0; j < psi.parts.parts[u].size(); ++j) {
            Rat term = psi.coeffs[u][j] * monomial(x, psi.parts.parts[u][j]);
            inner += term;
            sq += term * term;
        }
        pair_sum += inner * inner - sq;
    }
    Rat rhs = Rat(km.D) * pair_sum;
    return {lhs, rhs};
}

std::pair<Rat, Rat> quad_form_identity_even(const KikuchiMatrix& km, const XorInstance& inst,
                                            const std::vector<int>& x) {
    if (km.bipartite) throw std::invalid_argument("quad_form_identity_even: even-direct matrix expected");
    if (km.exact_values.size() != km.cells.size())
        throw std::invalid_argument("quad_form_identity_even: matrix must be built with exact_values");
    auto sign_of_subset = [&](std::uint64_t rank) {
        int sgn = 1;
        for (int id : km.index.unrank(rank)) sgn *= x[id];
        return sgn;
    };
    Rat lhs(0);
    for (std::size_t i = 0; i < km.cells.size(); ++i) {
        const auto& c = km.cells[i];
        lhs += Rat(2 * sign_of_subset(c.row) * sign_of_subset(c.col)) * km.exact_values[i];
    }
    Rat psum(0);
    for (std::size_t c = 0; c < inst.m(); ++c) psum += inst.coeffs[c] * monomial(x, inst.clauses[c]);
    Rat rhs = Rat(km.D) * psum;
    return {lhs, rhs};
}

KikuchiGraph kikuchi_graph(const Hypergraph& h, long ell, std::uint64_t max_edges) {
    if (h.k % 2 != 0) throw std::invalid_argument("kikuchi_graph: k must be even");
    if (ell < h.k / 2 || ell > h.n) throw std::invalid_argument("kikuchi_graph: need k/2 <= ell <= n");
    h.validate();
    KikuchiGraph g;
    g.index = SubsetIndex::plain(h.n, static_cast<int>(ell));
    std::vector<int> all(h.n);
    for (int i = 0; i < h.n; ++i) all[i] = i;
    std::uint64_t count = 0;
    for (std::size_t cid = 0; cid < h.m(); ++cid) {
        std::vector<int> cz;
        for (int v : h.edges[cid]) cz.push_back(v - 1);
        std::vector<int> comp;
        std::set_difference(all.begin(), all.end(), cz.begin(), cz.end(), std::back_inserter(comp));
        for_each_combination(cz, h.k / 2, [&](const std::vector<int>& r) {
            std::vector<int> rest;
            std::set_difference(cz.begin(), cz.end(), r.begin(), r.end(), std::back_inserter(rest));
            for_each_combination(comp, static_cast<int>(ell) - h.k / 2, [&](const std::vector<int>& f) {
                const std::uint64_t s = g.index.rank(merge_sorted(r, f));
                const std::uint64_t t = g.index.rank(merge_sorted(rest, f));
                if (s < t) {
                    if (++count > max_edges) throw std::length_error("kikuchi_graph: edge cap exceeded");
                    g.edges.push_back({s, t, static_cast<std::uint32_t>(cid)});
                }
            });
        });
    }
    return g;
}

std::uint64_t wam_tuple_code(const std::vector<int>& tuple, int n) {
    std::uint64_t code = 0;
    for (int v : tuple) code = code * n + (v - 1);
    return code;
}

std::vector<int> wam_tuple_decode(std::uint64_t code, int n, int ell) {
    std::vector<int> out(ell);
    for (int i = ell - 1; i >= 0; --i) {
        out[i] = static_cast<int>(code % n) + 1;
        code /= n;
    }
    return out;
}

WamMatrix build_wam_matrix(const XorInstance& inst, const std::vector<int>& owner, long ell,
                           bool require_disjoint_pairs, std::uint64_t max_cells) {
    if (inst.k != 3) throw std::invalid_argument("build_wam_matrix: k = 3 required");
    inst.validate();
    if (owner.size() != inst.m()) throw std::invalid_argument("build_wam_matrix: owner map size");
    for (std::size_t c = 0; c < inst.m(); ++c)
        if (!std::binary_search(inst.clauses[c].begin(), inst.clauses[c].end(), owner[c]))
            throw std::invalid_argument("build_wam_matrix: owner must belong to its clause");
    Int dim_exact = ipow(Int(inst.n), ell);
    if (dim_exact > (Int(1) << 40)) throw std::invalid_argument("build_wam_matrix: n^ell too large");

    if (require_disjoint_pairs) {
        for (std::size_t i = 0; i < inst.m(); ++i)
            for (std::size_t j = i + 1; j < inst.m(); ++j) {
                VertexSet inter;
                std::set_intersection(inst.clauses[i].begin(), inst.clauses[i].end(),
                                      inst.clauses[j].begin(), inst.clauses[j].end(),
                                      std::back_inserter(inter));
                if (inter.size() > 1)
                    throw std::invalid_argument("build_wam_matrix: clauses " + std::to_string(i) + " and " +
                                                std::to_string(j) + " share more than one variable");
            }
    }

    WamMatrix wm;
    wm.n = inst.n;
    wm.ell = static_cast<int>(ell);
    wm.dim = dim_exact.convert_to<std::uint64_t>();

    std::map<int, std::vector<std::size_t>> partitions;
    for (std::size_t c = 0; c < inst.m(); ++c) partitions[owner[c]].push_back(c);

    std::map<std::tuple<std::uint32_t, std::uint64_t, std::uint64_t>, double> acc;
    std::uint64_t events = 0;

    const int L = static_cast<int>(ell);
    std::vector<int> tup(L);
    for (const auto& [u, members] : partitions) {
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const auto& c1 = inst.clauses[members[a]];
                const auto& c2 = inst.clauses[members[b]];
                std::vector<int> t1, t2;  // tails
                for (int v : c1)
                    if (v != u) t1.push_back(v);
                for (int v : c2)
                    if (v != u) t2.push_back(v);
                bool disjoint = true;
                for (int v : t1)
                    for (int w : t2)
                        if (v == w) disjoint = false;
                if (!disjoint) continue;  // such pairs contribute nothing
                const double val = to_double(inst.coeffs[members[a]]) * to_double(inst.coeffs[members[b]]);
                // positions i < j, one element of each tail in S, the other
                // two in T (in either arrangement), all other positions free
                for (int i = 0; i < L; ++i) {
                    for (int j = i + 1; j < L; ++j) {
                        for (int side = 0; side < 2; ++side) {
                            const auto& ti = side ? t2 : t1;
                            const auto& tj = side ? t1 : t2;
                            for (int ei = 0; ei < 2; ++ei) {
                                for (int ej = 0; ej < 2; ++ej) {
                                    for (int arr = 0; arr < 2; ++arr) {
                                        // free positions
                                        std::vector<int> free_pos;
                                        for (int q = 0; q < L; ++q)
                                            if (q != i && q != j) free_pos.push_back(q);
                                        const long freedom = static_cast<long>(free_pos.size());
                                        std::vector<int> counter(freedom, 1);
                                        while (true) {
                                            for (int q = 0; q < L; ++q) tup[q] = 0;
                                            tup[i] = ti[ei];
                                            tup[j] = tj[ej];
                                            for (long q = 0; q < freedom; ++q) tup[free_pos[q]] = counter[q];
                                            std::uint64_t s = wam_tuple_code(tup, inst.n);
                                            tup[i] = arr ? tj[1 - ej] : ti[1 - ei];
                                            tup[j] = arr ? ti[1 - ei] : tj[1 - ej];
                                            std::uint64_t t = wam_tuple_code(tup, inst.n);
                                            if (s < t) {
                                                acc[{static_cast<std::uint32_t>(u - 1), s, t}] += val;
                                                if (++events > max_cells)
                                                    throw std::length_error("build_wam_matrix: cell cap exceeded");
                                            }
                                            long q = freedom - 1;
                                            while (q >= 0 && counter[q] == inst.n) {
                                                counter[q] = 1;
                                                --q;
                                            }
                                            if (q < 0) break;
                                            ++counter[q];
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    for (const auto& [key, v] : acc)
        wm.cells.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
    return wm;
}

}  // namespace kref
