#include "kref/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kref {

namespace {

bool sorted_distinct_in_range(const VertexSet& s, int n) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 1 || s[i] > n) return false;
        if (i > 0 && s[i] <= s[i - 1]) return false;
    }
    return true;
}

bool contains_subset(const VertexSet& edge, const VertexSet& q) {
    return std::includes(edge.begin(), edge.end(), q.begin(), q.end());
}

}  // namespace

void Hypergraph::validate() const {
    for (const auto& e : edges) {
        if (static_cast<int>(e.size()) != k || !sorted_distinct_in_range(e, n))
            throw std::invalid_argument("Hypergraph: edge is not a sorted k-subset of [n]: " + to_string(e));
    }
}

std::size_t BipartiteHypergraph::m() const {
    std::size_t s = 0;
    for (const auto& hu : parts) s += hu.size();
    return s;
}

void BipartiteHypergraph::validate() const {
    if (!labels.empty() && labels.size() != parts.size())
        throw std::invalid_argument("BipartiteHypergraph: labels size mismatch");
    for (std::size_t u = 0; u < parts.size(); ++u) {
        for (const auto& c : parts[u]) {
            if (static_cast<int>(c.size()) != t - 1 || !sorted_distinct_in_range(c, n))
                throw std::invalid_argument("BipartiteHypergraph: bad hyperedge " + to_string(c));
            if (!labels.empty()) {
                for (int v : labels[u])
                    if (std::binary_search(c.begin(), c.end(), v))
                        throw std::invalid_argument("BipartiteHypergraph: Q_u intersects C");
            }
        }
    }
}

std::size_t degree(const Hypergraph& h, const VertexSet& q) {
    std::size_t d = 0;
    for (const auto& e : h.edges)
        if (contains_subset(e, q)) ++d;
    return d;
}

std::size_t degree_u(const BipartiteHypergraph& bh, std::size_t u, const VertexSet& q) {
    if (u >= bh.p()) throw std::out_of_range("degree_u: partition index out of range");
    std::size_t d = 0;
    for (const auto& c : bh.parts[u])
        if (contains_subset(c, q)) ++d;
    return d;
}

RegularityReport is_regular(const BipartiteHypergraph& bh, const Rat& eps, long ell) {
    if (eps <= 0 || eps > 1) throw std::invalid_argument("is_regular: eps must be in (0,1]");
    if (ell < 1 || ell > bh.n) throw std::invalid_argument("is_regular: ell out of range");
    RegularityReport rep;
    const long t = bh.t;
    for (std::size_t u = 0; u < bh.p(); ++u) {
        // deg_u(Q) for all realized Q, the empty set included.
        std::map<VertexSet, std::size_t> deg;
        for (const auto& c : bh.parts[u]) {
            const std::size_t sz = c.size();
            for (std::uint32_t mask = 0; mask < (1u << sz); ++mask) {
                VertexSet q;
                for (std::size_t i = 0; i < sz; ++i)
                    if (mask & (1u << i)) q.push_back(c[i]);
                ++deg[q];
            }
        }
        for (const auto& [q, d] : deg) {
            const long e = t - 2 - 2 * static_cast<long>(q.size());
            if (exceeds_degree_threshold(Int(d), eps, bh.n, ell, e)) {
                rep.regular = false;
                double thr = to_double(Rat(denominator(eps) * denominator(eps),
                                           numerator(eps) * numerator(eps)));
                if (e > 0) {
                    double base = static_cast<double>(bh.n) / static_cast<double>(ell);
                    thr *= std::pow(base, static_cast<double>(e) / 2.0);
                }
                rep.violations.push_back({u, q, d, thr});
            }
        }
    }
    return rep;
}

std::string to_string(const VertexSet& s) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << ',';
        os << s[i];
    }
    os << '}';
    return os.str();
}

}  // namespace kref
