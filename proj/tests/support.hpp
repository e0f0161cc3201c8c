#pragma once

#include <random>
#include <vector>

#include "pvar/scalar.hpp"

namespace testing_support {

/// Canonical rational p/q.
inline pvar::Rational q(long p, long d = 1) { return pvar::num<pvar::Rational>::from_ratio(p, d); }

inline pvar::Rational random_rational(std::mt19937_64& rng, long lo, long hi, long den) {
    std::uniform_int_distribution<long> n(lo * den, hi * den);
    return q(n(rng), den);
}

}  // namespace testing_support
