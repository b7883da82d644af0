#pragma once

// Exact arithmetic in the real quadratic field Q(sqrt(D)).
//
// A Quad holds a + b*sqrt(D) with rational a, b and a fixed square-free D > 1.
// Every comparison is decided exactly: the sign of a + b*sqrt(D) reduces to
// rational sign tests on a, b and a^2 - b^2*D. Numeric output goes through a
// 50-digit float so that catastrophic cancellation between huge a and b*sqrt(D)
// still leaves full double precision.

#include "smalelab/common.hpp"

#include <cassert>
#include <compare>
#include <optional>

namespace smalelab {

struct Quad {
    Rat a;       // rational part
    Rat b;       // coefficient of sqrt(D)
    long D = 0;  // 0 is the "pure rational" wildcard

    Quad() = default;
    Quad(Rat a_, Rat b_, long D_) : a(std::move(a_)), b(std::move(b_)), D(D_) {
        if (b == 0) D = D ? D : 0;
    }
    /* implicit */ Quad(const Rat& r) : a(r), b(0), D(0) {}
    /* implicit */ Quad(long v) : a(v), b(0), D(0) {}

    static Quad rational(Rat r, long D_) { return Quad(std::move(r), Rat(0), D_); }
    static Quad root(long D_) { return Quad(Rat(0), Rat(1), D_); }

    bool is_rational() const { return b == 0; }

    Quad conj() const { return Quad(a, -b, D); }
};

namespace detail {
inline long join_d(const Quad& x, const Quad& y) {
    if (x.b != 0 && y.b != 0) {
        assert(x.D == y.D && "mixed quadratic fields");
        return x.D;
    }
    if (x.b != 0) return x.D;
    if (y.b != 0) return y.D;
    return x.D ? x.D : y.D;
}
} // namespace detail

inline Quad operator+(const Quad& x, const Quad& y) {
    return Quad(x.a + y.a, x.b + y.b, detail::join_d(x, y));
}
inline Quad operator-(const Quad& x, const Quad& y) {
    return Quad(x.a - y.a, x.b - y.b, detail::join_d(x, y));
}
inline Quad operator-(const Quad& x) { return Quad(-x.a, -x.b, x.D); }

inline Quad operator*(const Quad& x, const Quad& y) {
    long d = detail::join_d(x, y);
    // (a1 + b1 r)(a2 + b2 r) = a1 a2 + b1 b2 D + (a1 b2 + a2 b1) r
    return Quad(x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d);
}

inline int sign(const Quad& x) {
    int sa = sign(x.a), sb = sign(x.b);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: compare a^2 against b^2 D
    Rat lhs = x.a * x.a, rhs = x.b * x.b * x.D;
    if (lhs == rhs) return 0;
    return (lhs > rhs) ? sa : sb;
}

inline bool operator==(const Quad& x, const Quad& y) { return x.a == y.a && x.b == y.b; }
inline bool operator!=(const Quad& x, const Quad& y) { return !(x == y); }
inline bool operator<(const Quad& x, const Quad& y) { return sign(x - y) < 0; }
inline bool operator<=(const Quad& x, const Quad& y) { return sign(x - y) <= 0; }
inline bool operator>(const Quad& x, const Quad& y) { return sign(x - y) > 0; }
inline bool operator>=(const Quad& x, const Quad& y) { return sign(x - y) >= 0; }

inline Quad abs(const Quad& x) { return sign(x) >= 0 ? x : -x; }

inline Quad inverse(const Quad& x) {
    // 1/(a + b r) = (a - b r)/(a^2 - b^2 D)
    Rat n = x.a * x.a - x.b * x.b * x.D;
    if (n == 0) throw std::domain_error("Quad: division by zero");
    return Quad(x.a / n, -x.b / n, x.D);
}
inline Quad operator/(const Quad& x, const Quad& y) { return x * inverse(y); }

inline Quad& operator+=(Quad& x, const Quad& y) { x = x + y; return x; }
inline Quad& operator-=(Quad& x, const Quad& y) { x = x - y; return x; }
inline Quad& operator*=(Quad& x, const Quad& y) { x = x * y; return x; }

inline double to_double(const Quad& x) {
    if (x.b == 0) return to_double(x.a);
    Float50 v = Float50(x.a) + Float50(x.b) * sqrt(Float50(x.D));
    return v.convert_to<double>();
}

// Exact floor. Uses a double estimate, then verifies with exact comparisons.
inline BigInt floor_quad(const Quad& x) {
    double est = to_double(x);
    BigInt n(static_cast<long long>(std::floor(est)));
    while (sign(x - Quad(Rat(n), Rat(0), x.D)) < 0) --n;
    while (sign(x - Quad(Rat(n + 1), Rat(0), x.D)) >= 0) ++n;
    return n;
}

// Fractional part in [0, 1).
inline Quad frac_quad(const Quad& x) {
    return x - Quad(Rat(floor_quad(x)), Rat(0), x.D);
}

inline Quad min(const Quad& x, const Quad& y) { return (x <= y) ? x : y; }
inline Quad max(const Quad& x, const Quad& y) { return (x >= y) ? x : y; }

// 2-vector over Q(sqrt(D))
struct Vec2Q {
    Quad x, y;
};

inline Vec2Q operator+(const Vec2Q& p, const Vec2Q& q) { return {p.x + q.x, p.y + q.y}; }
inline Vec2Q operator-(const Vec2Q& p, const Vec2Q& q) { return {p.x - q.x, p.y - q.y}; }
inline Vec2Q operator*(const Quad& c, const Vec2Q& p) { return {c * p.x, c * p.y}; }
inline bool operator==(const Vec2Q& p, const Vec2Q& q) { return p.x == q.x && p.y == q.y; }

struct QuadHash {
    std::size_t operator()(const Quad& q) const {
        std::hash<std::string> hs;
        std::size_t h = hs(q.a.str());
        hash_mix(h, hs(q.b.str()));
        return h;
    }
};

// Closed interval [lo, hi] with exact endpoints; empty when hi < lo.
struct QInterval {
    Quad lo, hi;
    bool empty() const { return sign(hi - lo) < 0; }
    Quad width() const { return hi - lo; }
    bool contains_open(const Quad& v) const { return v > lo && v < hi; }
    bool contains_closed(const Quad& v) const { return v >= lo && v <= hi; }
};

inline QInterval intersect(const QInterval& a, const QInterval& b) {
    return {max(a.lo, b.lo), min(a.hi, b.hi)};
}

// Image of [lo, hi] under multiplication by c (which may be negative).
inline QInterval scale(const QInterval& iv, const Quad& c) {
    Quad p = c * iv.lo, q = c * iv.hi;
    return (sign(c) >= 0) ? QInterval{p, q} : QInterval{q, p};
}

inline QInterval shift(const QInterval& iv, const Quad& t) { return {iv.lo + t, iv.hi + t}; }

} // namespace smalelab
