#pragma once

#include <cstdint>
#include <vector>

#include "kref/rational.hpp"

namespace kref {

/// Colexicographic bijection between ell-subsets of a universe {0..U-1} and
/// dense ranks 0..N-1, N = C(U, ell). rank({s_1 < ... < s_ell}) =
/// sum_i C(s_i, i). Construction fails if N would not fit the rank type.
class SubsetIndex {
  public:
    SubsetIndex() = default;
    SubsetIndex(int universe_size, int ell);

    /// Universe [n] (plain vertices, 0-based ids v-1).
    static SubsetIndex plain(int n, int ell) { return SubsetIndex(n, ell); }
    /// Universe [n] x [2] (clones): (v, b) -> (b-1)*n + (v-1).
    static SubsetIndex cloned(int n, int ell) {
        SubsetIndex s(2 * n, ell);
        s.clone_n_ = n;
        return s;
    }

    int universe() const { return universe_; }
    int ell() const { return ell_; }
    std::uint64_t count() const { return count_; }
    Int count_exact() const { return binomial(universe_, ell_); }

    std::uint64_t rank(const std::vector<int>& sorted_elems) const;
    std::vector<int> unrank(std::uint64_t r) const;

    /// Clone helpers (valid for cloned universes).
    int clone_id(int v, int label) const { return (label - 1) * clone_n_ + (v - 1); }
    int clone_vertex(int id) const { return id % clone_n_ + 1; }
    int clone_label(int id) const { return id / clone_n_ + 1; }
    int clone_n() const { return clone_n_; }

    std::uint64_t choose(int a, int b) const;

  private:
    int universe_ = 0;
    int ell_ = 0;
    int clone_n_ = 0;
    std::uint64_t count_ = 0;
    std::vector<std::uint64_t> binom_;  // (universe_+1) x (ell_+1)
};

}  // namespace kref
