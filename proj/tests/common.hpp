#pragma once

#include <gtest/gtest.h>

#include "sobolev/sobolev.hpp"

namespace testing_support {

inline const bool precision_ready = (sob::Precision::set_bits(256), true);

inline sob::Real q(long p, long d = 1) { return sob::Real(p) / sob::Real(d); }

// relative-or-absolute closeness at 2^-e
inline ::testing::AssertionResult Near(const sob::Real& a, const sob::Real& b, int e) {
    sob::Real scale = std::max({sob::Real(1), sob::abs(a), sob::abs(b)});
    sob::Real d = sob::abs(a - b) / scale;
    if (d <= sob::pow2(-e)) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << sob::to_string(a, 20) << " vs " << sob::to_string(b, 20) << " (rel "
                                         << sob::to_string(d, 3) << " > 2^-" << e << ")";
}

inline ::testing::AssertionResult PolyNear(const sob::Polynomial& a, const sob::Polynomial& b, int e) {
    sob::Real d = sob::Polynomial::rel_distance(a, b);
    if (d <= sob::pow2(-e)) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "polynomial distance " << sob::to_string(d, 3) << " > 2^-" << e;
}

}  // namespace testing_support
