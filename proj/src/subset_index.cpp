#include "kref/subset_index.hpp"

#include <stdexcept>

namespace kref {

SubsetIndex::SubsetIndex(int universe_size, int ell) : universe_(universe_size), ell_(ell), clone_n_(universe_size) {
    if (ell < 0 || universe_size < 0 || ell > universe_size)
        throw std::invalid_argument("SubsetIndex: need 0 <= ell <= universe");
    const Int limit = Int(1) << 62;
    for (int b = 0; b <= ell; ++b)
        if (binomial(universe_size, b) > limit)
            throw std::invalid_argument("SubsetIndex: C(universe, ell) exceeds the rank type");
    binom_.assign(static_cast<std::size_t>(universe_ + 1) * (ell_ + 1), 0);
    for (int a = 0; a <= universe_; ++a) {
        for (int b = 0; b <= ell_; ++b) {
            std::uint64_t v;
            if (b == 0) {
                v = 1;
            } else if (b > a) {
                v = 0;
            } else {
                v = binom_[(a - 1) * (ell_ + 1) + b] + binom_[(a - 1) * (ell_ + 1) + (b - 1)];
            }
            binom_[a * (ell_ + 1) + b] = v;
        }
    }
    count_ = choose(universe_, ell_);
}

std::uint64_t SubsetIndex::choose(int a, int b) const {
    if (b < 0 || b > ell_ || a < 0) return 0;
    if (a > universe_) throw std::out_of_range("SubsetIndex::choose");
    return binom_[static_cast<std::size_t>(a) * (ell_ + 1) + b];
}

std::uint64_t SubsetIndex::rank(const std::vector<int>& s) const {
    if (static_cast<int>(s.size()) != ell_) throw std::invalid_argument("SubsetIndex::rank: wrong size");
    std::uint64_t r = 0;
    for (int i = 0; i < ell_; ++i) r += choose(s[i], i + 1);
    return r;
}

std::vector<int> SubsetIndex::unrank(std::uint64_t r) const {
    std::vector<int> out(ell_);
    std::uint64_t rest = r;
    int a = universe_ - 1;
    for (int i = ell_; i >= 1; --i) {
        while (choose(a, i) > rest) --a;
        out[i - 1] = a;
        rest -= choose(a, i);
        --a;
    }
    return out;
}

}  // namespace kref
