#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace sob {

// expression templates off: keeps std::max, auto and lambdas well-typed
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;

// Errors. Each maps to a distinct failure of the math, not of the plumbing.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotFactorizable : Error {
    int minor;  // 1-based index of the first vanishing leading minor
    explicit NotFactorizable(int m)
        : Error("leading minor " + std::to_string(m) + " vanishes"), minor(m) {}
};
struct SingularBlock : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct ParameterOutOfRange : Error { using Error::Error; };
struct NotClassical : Error { using Error::Error; };
struct NotClosedUnderMove : Error { using Error::Error; };
struct CoherenceViolation : Error { using Error::Error; };
struct SeriesDivergence : Error { using Error::Error; };
struct GermSingular : Error { using Error::Error; };
struct NotCoprime : Error { using Error::Error; };
struct TruncationInsufficient : Error { using Error::Error; };
struct TildeOmegaViolation : Error { using Error::Error; };
struct NotInvertible : Error { using Error::Error; };
struct NonPolynomialFactor : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct CheckFailed : Error { using Error::Error; };

// Global working precision. Set once before building any Real.
class Precision {
public:
    static void set_bits(unsigned bits) {
        if (bits < 64) throw ParameterOutOfRange("precision must be at least 64 bits");
        bits_() = bits;
        Real::default_precision(digits10_for(bits));
    }
    static unsigned bits() { return bits_(); }
    static unsigned guard() { return 40; }

    static unsigned digits10_for(unsigned bits) {
        return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
    }

private:
    static unsigned& bits_() {
        static unsigned b = init();
        return b;
    }
    static unsigned init() {
        Real::default_precision(digits10_for(256));
        return 256;
    }
};

inline Real pow2(int e) { return boost::multiprecision::ldexp(Real(1), e); }

// 2^(-p+guard): the default comparison tolerance
inline Real tol() { return pow2(-static_cast<int>(Precision::bits()) + static_cast<int>(Precision::guard())); }

// Loose tolerance used by internal self-checks that must catch bugs, not rounding.
inline Real check_tol() { return pow2(-static_cast<int>(Precision::bits()) / 3); }

inline Real abs(const Real& x) { return boost::multiprecision::abs(x); }

inline Real parse_real(const std::string& s) {
    if (s.empty()) throw ParseError("empty number");
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') ++i;
    bool digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') { digit = true; continue; }
        if (c == '.' || c == 'e' || c == 'E' || c == '+' || c == '-') continue;
        throw ParseError("not a decimal number: '" + s + "'");
    }
    if (!digit) throw ParseError("not a decimal number: '" + s + "'");
    try {
        return Real(s);
    } catch (const std::exception&) {
        throw ParseError("not a decimal number: '" + s + "'");
    }
}

// Decimal string with enough digits to round-trip at the working precision.
inline std::string to_string(const Real& x) {
    unsigned d = Precision::digits10_for(Precision::bits());
    if (x == 0) return "0";
    return x.str(d, std::ios::scientific);
}

// short form for messages
inline std::string to_string(const Real& x, unsigned digits) {
    if (x == 0) return "0";
    return x.str(digits, std::ios::scientific);
}

inline bool close(const Real& a, const Real& b, const Real& rel, const Real& floor = Real(1)) {
    Real scale = std::max(std::max(abs(a), abs(b)), floor);
    return abs(a - b) <= rel * scale;
}

}  // namespace sob
