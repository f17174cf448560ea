#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kref/hypergraph.hpp"
#include "kref/rational.hpp"

namespace kref {

/// k-XOR instance: clauses are sorted k-subsets of [n] (multiset allowed),
/// one rational coefficient b_C in [-1,1] per clause. The objective is the
/// advantage polynomial phi(x) = (1/m) sum_C b_C prod_{i in C} x_i.
struct XorInstance {
    int n = 0;
    int k = 0;
    std::vector<VertexSet> clauses;
    std::vector<Rat> coeffs;

    std::size_t m() const { return clauses.size(); }
    Hypergraph hypergraph() const;
    void validate() const;
};

/// Boolean predicate P : {+-1}^k -> {0,1} with its exact Fourier expansion.
/// Truth table indexed by w in [0, 2^k): bit i of w set means z_{i+1} = +1.
struct Predicate {
    int k = 0;
    std::vector<std::uint8_t> truth_table;   // size 2^k
    std::map<std::uint32_t, Rat> fourier;    // subset mask -> P_hat(S)
    std::string name;

    bool eval_mask(std::uint32_t w) const { return truth_table[w] != 0; }
    void validate() const;
};

/// CSP instance: scopes are k-tuples with distinct entries; literals[c][i] is
/// Xi(C,i) in {+-1}.
struct CspInstance {
    int n = 0;
    int k = 0;
    Predicate predicate;
    std::vector<std::vector<int>> scopes;
    std::vector<std::vector<int>> literals;  // entries +-1

    std::size_t m() const { return scopes.size(); }
    void validate() const;
};

struct SmoothingPlan {
    std::vector<std::vector<double>> probabilities;  // per clause, per position
    std::uint64_t seed = 0;
};

enum class CoeffDist { PlusMinusOne, UniformDyadic };

XorInstance gen_random_xor(int n, int k, int m, std::uint64_t seed,
                           CoeffDist dist = CoeffDist::PlusMinusOne);

/// Semirandom CSP: worst-case scopes (sampled here for convenience), all
/// literal patterns uniform.
CspInstance gen_random_csp(int n, int m, const Predicate& p, std::uint64_t seed);

struct SmoothResult {
    CspInstance instance;
    double q;  // (1/m) sum_C prod_i p_{C,i}
};

/// Two-step smoothing: select S_C by independent coin flips, then reset each
/// selected literal to a uniform random sign.
SmoothResult smooth_csp(const CspInstance& inst, const SmoothingPlan& plan);

enum class InstanceFormat { Xor, DimacsCnf, Json };
using AnyInstance = std::variant<XorInstance, CspInstance>;

AnyInstance read_instance(const std::string& path, InstanceFormat format);
void write_instance(const AnyInstance& inst, const std::string& path, InstanceFormat format);

AnyInstance parse_instance(const std::string& text, InstanceFormat format);
std::string serialize_instance(const AnyInstance& inst, InstanceFormat format);

/// FNV-1a over the canonical serialization; used to tie certificates to
/// instances.
std::uint64_t instance_digest(const XorInstance& inst);
std::uint64_t instance_digest(const CspInstance& inst);

}  // namespace kref
