#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kref {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return Int(0);
    if (k > n - k) k = n - k;
    Int r = 1;
    for (long i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

inline Int ipow(Int base, long e) {
    Int r = 1;
    while (e-- > 0) r *= base;
    return r;
}

/// Largest s >= 0 with s*s*den <= num. Exact integer sqrt of num/den.
inline Int floor_sqrt_rational(const Int& num, const Int& den) {
    if (num < 0 || den <= 0) throw std::invalid_argument("floor_sqrt_rational: negative input");
    Int lo = 0, hi = 1;
    while (hi * hi * den <= num) hi <<= 1;
    while (lo < hi) {
        Int mid = (lo + hi + 1) >> 1;
        if (mid * mid * den <= num)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

inline double to_double(const Rat& r) { return r.convert_to<double>(); }
inline double to_double(const Int& v) { return v.convert_to<double>(); }

/// Exact test of  deg > (1/eps^2) * max((n/l)^(e/2), 1)  where e may be negative.
/// eps is a positive rational, n >= l >= 1, deg >= 0.
inline bool exceeds_degree_threshold(const Int& deg, const Rat& eps, long n, long l, long e) {
    Int en = numerator(eps), ed = denominator(eps);
    if (e <= 0) {
        // threshold is 1/eps^2
        return deg * en * en > ed * ed;
    }
    // deg > ed^2/en^2 * (n/l)^(e/2)  <=>  deg^2 en^4 l^e > ed^4 n^e
    return deg * deg * en * en * en * en * ipow(Int(l), e) > ed * ed * ed * ed * ipow(Int(n), e);
}

/// Exact floor((1/eps^2) * max((n/l)^(e/2), 1)).
inline Int floor_degree_threshold(const Rat& eps, long n, long l, long e) {
    Int en = numerator(eps), ed = denominator(eps);
    if (e <= 0) return (ed * ed) / (en * en);
    // floor( sqrt( ed^4 n^e / (en^4 l^e) ) )
    return floor_sqrt_rational(ed * ed * ed * ed * ipow(Int(n), e), en * en * en * en * ipow(Int(l), e));
}

}  // namespace kref
