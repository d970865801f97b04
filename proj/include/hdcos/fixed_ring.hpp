#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hdcos {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// Fixed-point layout on the 64-bit ring. k is pinned to the machine word so
// ring arithmetic is native wrapping arithmetic; f fractional bits must stay
// in [8, 40] so one untruncated product of in-range values cannot wrap.
struct FixedCfg {
    static constexpr unsigned k = 64;
    unsigned f = 20;

    bool operator==(const FixedCfg&) const = default;
};

inline void validate(const FixedCfg& cfg) {
    if (cfg.f < 8 || cfg.f > 40)
        throw std::invalid_argument("FixedCfg: fractional bits must be in [8, 40]");
}

// Element of Z_2^64. Signed reads are two's complement.
struct RingVal {
    u64 v = 0;

    bool operator==(const RingVal&) const = default;
    RingVal operator+(RingVal o) const { return {v + o.v}; }
    RingVal operator-(RingVal o) const { return {v - o.v}; }
    RingVal operator*(RingVal o) const { return {v * o.v}; }
};

inline RingVal ring_add(RingVal a, RingVal b) { return {a.v + b.v}; }
inline RingVal ring_sub(RingVal a, RingVal b) { return {a.v - b.v}; }
inline RingVal ring_neg(RingVal a) { return {0u - a.v}; }
// Full mod-2^64 product; a fixed-point product carries 2f fractional bits
// until truncated.
inline RingVal ring_mul(RingVal a, RingVal b) { return {a.v * b.v}; }

inline i64 to_signed(RingVal a) { return static_cast<i64>(a.v); }
inline RingVal from_signed(i64 x) { return {static_cast<u64>(x)}; }

// Largest encodable magnitude: 2^(k-f-1) - 1 in real units.
inline double max_abs_real(const FixedCfg& cfg) {
    return std::ldexp(1.0, int(FixedCfg::k - cfg.f - 1)) - 1.0;
}

inline RingVal encode(double x, const FixedCfg& cfg) {
    if (!std::isfinite(x) || std::fabs(x) > max_abs_real(cfg))
        throw std::overflow_error("encode: value outside fixed-point range");
    return from_signed(std::llround(std::ldexp(x, int(cfg.f))));
}

inline double decode(RingVal r, const FixedCfg& cfg) {
    return std::ldexp(double(to_signed(r)), -int(cfg.f));
}

// round(signed(a) * c) mod 2^64 with a single rounding step. The double is
// split into its 53-bit mantissa and exponent so the product can be formed
// exactly in 128 bits; plain double arithmetic would lose the low bits of
// large ring values.
inline u64 mul_signed_by_real(u64 a, double c) {
    if (a == 0 || c == 0.0) return 0;
    int e = 0;
    const double frac = std::frexp(c, &e);           // c = frac * 2^e, |frac| in [0.5, 1)
    const i64 mant = std::llround(std::ldexp(frac, 53));  // c = mant * 2^(e-53)
    e -= 53;
    const __int128 prod = static_cast<__int128>(static_cast<i64>(a)) * mant;
    if (e >= 0) {
        if (e >= 64) return 0;  // multiple of 2^64
        return static_cast<u64>(static_cast<unsigned __int128>(prod) << e);
    }
    const unsigned s = unsigned(-e);
    if (s >= 127) return 0;  // |prod| < 2^117, shifts to below 1/2
    const __int128 bias = static_cast<__int128>(1) << (s - 1);
    return static_cast<u64>((prod + bias) >> s);
}

inline RingVal ring_mul_pub_real(RingVal a, double c) {
    return {mul_signed_by_real(a.v, c)};
}

}  // namespace hdcos
