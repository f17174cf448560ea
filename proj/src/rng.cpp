#include "kref/rng.hpp"

#include <algorithm>

namespace kref {

std::vector<int> Rng::subset(int n, int k) {
    std::vector<int> out = tuple_distinct(n, k);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> Rng::tuple_distinct(int n, int k) {
    // Rejection sampling; k is tiny compared to typical n, and exact
    // uniformity matters more than the worst-case k ~ n draw count.
    std::vector<int> out;
    out.reserve(k);
    while (static_cast<int>(out.size()) < k) {
        int v = static_cast<int>(below(static_cast<std::uint64_t>(n))) + 1;
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return out;
}

}  // namespace kref
