#include "kref/decompose.hpp"

#include <algorithm>
#include <map>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace kref {

namespace {

using nlohmann::json;

struct SubsetState {
    std::vector<std::size_t> incident;  // edge ids, append order
    std::size_t alive = 0;
};

// Larger sets first, lexicographic within a size.
struct ViolatorOrder {
    bool operator()(const VertexSet& a, const VertexSet& b) const {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    }
};

void for_each_proper_subset(const VertexSet& edge, const std::function<void(const VertexSet&)>& fn) {
    const std::size_t k = edge.size();
    VertexSet q;
    for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
        q.clear();
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (1u << i)) q.push_back(edge[i]);
        fn(q);
    }
    // include the full edge itself as a potential Q of size k? No: |Q| <= k-1.
}

}  // namespace

BipartiteContraction decompose(const Hypergraph& h, const Rat& eps, long ell) {
    if (h.k < 2) throw std::invalid_argument("decompose: k >= 2 required");
    if (eps <= 0 || eps > 1) throw std::invalid_argument("decompose: eps must be in (0,1]");
    if (ell < 1 || ell > h.n) throw std::invalid_argument("decompose: ell out of range");
    h.validate();

    BipartiteContraction bc;
    bc.n = h.n;
    bc.k = h.k;
    bc.eps = eps;
    bc.ell = ell;
    bc.eps_above_recommended = (Rat(2) * eps * eps > 1);
    bc.levels.resize(h.k - 1);
    for (int t = 2; t <= h.k; ++t) {
        bc.levels[t - 2].t = t;
        bc.levels[t - 2].bh.n = h.n;
        bc.levels[t - 2].bh.t = t;
    }

    const int k = h.k;
    std::vector<bool> alive(h.m(), true);

    std::map<VertexSet, SubsetState> subsets;
    for (std::size_t id = 0; id < h.m(); ++id) {
        for_each_proper_subset(h.edges[id], [&](const VertexSet& q) {
            auto& st = subsets[q];
            st.incident.push_back(id);
            ++st.alive;
        });
    }

    auto violating = [&](const VertexSet& q, std::size_t deg) {
        return exceeds_degree_threshold(Int(deg), eps, h.n, ell, k - 2 * static_cast<long>(q.size()));
    };

    std::set<VertexSet, ViolatorOrder> violators;
    for (const auto& [q, st] : subsets)
        if (violating(q, st.alive)) violators.insert(q);

    // Lexicographically smallest edges by (sorted clause, insertion index).
    auto edge_less = [&](std::size_t a, std::size_t b) {
        if (h.edges[a] != h.edges[b]) return h.edges[a] < h.edges[b];
        return a < b;
    };

    while (!violators.empty()) {
        const VertexSet q = *violators.begin();
        const long qsz = static_cast<long>(q.size());
        const Int take_int = floor_degree_threshold(eps, h.n, ell, k - 2 * qsz);
        const std::size_t take = take_int.convert_to<std::size_t>();

        auto& st = subsets[q];
        std::vector<std::size_t> cands;
        cands.reserve(st.alive);
        for (std::size_t id : st.incident)
            if (alive[id]) cands.push_back(id);
        std::sort(cands.begin(), cands.end(), edge_less);
        if (cands.size() <= take)
            throw std::logic_error("decompose: violating set lost its surplus");
        cands.resize(take);

        const int t = k + 1 - static_cast<int>(qsz);
        auto& level = bc.levels[t - 2];
        level.bh.labels.push_back(q);
        std::vector<VertexSet> part;
        std::vector<std::size_t> prov;
        for (std::size_t id : cands) {
            VertexSet rest;
            std::set_difference(h.edges[id].begin(), h.edges[id].end(), q.begin(), q.end(),
                                std::back_inserter(rest));
            part.push_back(std::move(rest));
            prov.push_back(id);
        }
        level.bh.parts.push_back(std::move(part));
        level.provenance.push_back(std::move(prov));

        // Remove the contracted edges and update all touched subset degrees.
        for (std::size_t id : cands) {
            alive[id] = false;
            for_each_proper_subset(h.edges[id], [&](const VertexSet& q2) {
                auto it = subsets.find(q2);
                --it->second.alive;
                if (!violating(q2, it->second.alive)) violators.erase(q2);
            });
        }
        if (auto it = subsets.find(q); violating(q, it->second.alive)) {
            // deg(Q) dropped by exactly `take`; Q may still violate and will
            // then be processed again under a fresh label.
            violators.insert(q);
        }
    }

    bc.discarded.n = h.n;
    bc.discarded.k = h.k;
    for (std::size_t id = 0; id < h.m(); ++id) {
        if (alive[id]) {
            bc.discarded.edges.push_back(h.edges[id]);
            bc.discarded_ids.push_back(id);
        }
    }
    return bc;
}

bool ContractionReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string ContractionReport::to_string() const {
    std::ostringstream os;
    for (const auto& c : checks)
        os << (c.pass ? "[pass] " : "[FAIL] ") << c.clause
           << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
    return os.str();
}

ContractionReport verify_contraction(const Hypergraph& h, const BipartiteContraction& bc,
                                     const Rat& eps, long ell) {
    ContractionReport rep;
    const int k = h.k;
    const Int en = numerator(eps), ed = denominator(eps);

    {
        // item (1): m^(1) <= (n/(k eps^2)) (n/l)^(k/2-1)
        const Int m1(bc.discarded.m());
        const Int lhs = m1 * k * en * en;
        bool pass;
        if (k >= 2) {
            pass = lhs * lhs * ipow(Int(ell), k - 2) <= ed * ed * ed * ed * ipow(Int(h.n), k);
        } else {
            pass = lhs <= ed * ed * Int(h.n);
        }
        std::ostringstream det;
        det << "m(1)=" << bc.discarded.m();
        rep.checks.push_back({"item 1: discarded mass", pass, det.str()});
    }

    for (const auto& level : bc.levels) {
        const int t = level.t;
        if (level.bh.p() == 0) continue;
        auto reg = is_regular(level.bh, eps, ell);
        {
            std::ostringstream det;
            det << "t=" << t;
            if (!reg.regular) {
                const auto& v = reg.violations.front();
                det << " first violation u=" << v.u << " Q=" << to_string(v.q) << " deg=" << v.deg;
            }
            rep.checks.push_back({"item 2(a): regularity", reg.regular, det.str()});
        }
        {
            const Int want = floor_degree_threshold(eps, h.n, ell, 2L * t - k - 2);
            bool pass = true;
            std::ostringstream det;
            det << "t=" << t << " size=" << want;
            for (std::size_t u = 0; u < level.bh.p(); ++u) {
                if (Int(level.bh.parts[u].size()) != want) {
                    pass = false;
                    det << " violated at u=" << u << " (|H_u|=" << level.bh.parts[u].size() << ")";
                    break;
                }
            }
            rep.checks.push_back({"item 2(b): equal partition sizes", pass, det.str()});
        }
    }

    {
        // property (4): every edge contracted exactly once, with correct reassembly
        std::vector<int> seen(h.m(), 0);
        bool reassembly = true;
        std::string where;
        for (std::size_t id : bc.discarded_ids)
            if (id < h.m()) ++seen[id];
        for (const auto& level : bc.levels) {
            for (std::size_t u = 0; u < level.bh.p(); ++u) {
                for (std::size_t j = 0; j < level.bh.parts[u].size(); ++j) {
                    const std::size_t id = level.provenance[u][j];
                    if (id >= h.m()) {
                        reassembly = false;
                        where = "provenance id out of range";
                        continue;
                    }
                    ++seen[id];
                    VertexSet merged;
                    std::merge(level.bh.labels[u].begin(), level.bh.labels[u].end(),
                               level.bh.parts[u][j].begin(), level.bh.parts[u][j].end(),
                               std::back_inserter(merged));
                    if (merged != h.edges[id]) {
                        reassembly = false;
                        where = "Q_u cup C != edge " + std::to_string(id);
                    }
                }
            }
        }
        bool once = true;
        std::string dup;
        for (std::size_t id = 0; id < h.m(); ++id) {
            if (seen[id] != 1) {
                once = false;
                dup = "edge " + std::to_string(id) + " appears " + std::to_string(seen[id]) + " times";
                break;
            }
        }
        rep.checks.push_back({"property 4: contracted exactly once", once, dup});
        rep.checks.push_back({"property 4: reassembly Q_u cup C", reassembly, where});
    }
    return rep;
}

std::string BipartiteContraction::to_json() const {
    json j;
    j["n"] = n;
    j["k"] = k;
    j["eps"] = {numerator(eps).str(), denominator(eps).str()};
    j["ell"] = ell;
    j["eps_above_recommended"] = eps_above_recommended;
    j["discarded"] = discarded.edges;
    j["discarded_ids"] = discarded_ids;
    json jl = json::array();
    for (const auto& level : levels) {
        json item;
        item["t"] = level.t;
        item["labels"] = level.bh.labels;
        item["parts"] = level.bh.parts;
        item["provenance"] = level.provenance;
        jl.push_back(item);
    }
    j["levels"] = jl;
    return j.dump(2) + "\n";
}

BipartiteContraction BipartiteContraction::from_json(const std::string& text) {
    json j = json::parse(text);
    BipartiteContraction bc;
    bc.n = j.at("n").get<int>();
    bc.k = j.at("k").get<int>();
    bc.eps = Rat(Int(j.at("eps").at(0).get<std::string>()), Int(j.at("eps").at(1).get<std::string>()));
    bc.ell = j.at("ell").get<long>();
    bc.eps_above_recommended = j.at("eps_above_recommended").get<bool>();
    bc.discarded.n = bc.n;
    bc.discarded.k = bc.k;
    bc.discarded.edges = j.at("discarded").get<std::vector<VertexSet>>();
    bc.discarded_ids = j.at("discarded_ids").get<std::vector<std::size_t>>();
    for (const auto& item : j.at("levels")) {
        ContractionLevel level;
        level.t = item.at("t").get<int>();
        level.bh.n = bc.n;
        level.bh.t = level.t;
        level.bh.labels = item.at("labels").get<std::vector<VertexSet>>();
        level.bh.parts = item.at("parts").get<std::vector<std::vector<VertexSet>>>();
        level.provenance = item.at("provenance").get<std::vector<std::vector<std::size_t>>>();
        bc.levels.push_back(std::move(level));
    }
    return bc;
}

}  // namespace kref
