#pragma once

// Hyperbolic toral automorphism backend with exact coordinates in Q(sqrt(D)).
//
// Geometry lives in eigen-coordinates: a point x is written u*vu + s*vs with
// vu, vs the expanding/contracting eigenvectors of the integer matrix M. The
// metric is d(x,y) = min over lattice translates m of max(|u(x-y-m)|,
// |s(x-y-m)|), which makes the system self-similar with constant |lambda_u|
// and turns every rectangle into an axis-aligned box in the chart.
//
// The Markov partition is a two-box Adler-Weiss partition whose widths and
// heights come from lattice projections. The boxes are found by a small exact
// search at construction time and every Markov property (tiling, full
// crossings, boundary invariance) is verified in exact arithmetic before the
// model is accepted.

#include "smalelab/quad.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

namespace smalelab::torus {

struct Mat2i {
    std::int64_t a, b, c, d; // [[a,b],[c,d]]
    std::int64_t trace() const { return a + d; }
    std::int64_t det() const { return a * d - b * c; }
    Mat2i inverse_unimodular() const {
        std::int64_t dt = det();
        assert(dt == 1 || dt == -1);
        return Mat2i{d * dt, -b * dt, -c * dt, a * dt};
    }
};

inline Vec2Q apply_mat(const Mat2i& M, const Vec2Q& v) {
    return {Quad(Rat(M.a)) * v.x + Quad(Rat(M.b)) * v.y,
            Quad(Rat(M.c)) * v.x + Quad(Rat(M.d)) * v.y};
}

struct TorusPoint {
    Quad x, y; // canonical representative in [0,1)^2
    friend bool operator==(const TorusPoint& p, const TorusPoint& q) {
        return p.x == q.x && p.y == q.y;
    }
    friend bool operator!=(const TorusPoint& p, const TorusPoint& q) { return !(p == q); }
    friend bool operator<(const TorusPoint& p, const TorusPoint& q) {
        int c = sign(p.x - q.x);
        if (c != 0) return c < 0;
        return sign(p.y - q.y) < 0;
    }
};

namespace detail {
inline std::size_t hash_rat(const Rat& r) {
    static const BigInt p((std::uint64_t(1) << 61) - 1);
    BigInt n = numerator(r) % p, d = denominator(r) % p;
    if (n < 0) n += p;
    std::size_t h = static_cast<std::size_t>(n.convert_to<std::uint64_t>());
    hash_mix(h, static_cast<std::size_t>(d.convert_to<std::uint64_t>()));
    return h;
}
} // namespace detail

struct TorusPointHash {
    std::size_t operator()(const TorusPoint& p) const {
        std::size_t h = detail::hash_rat(p.x.a);
        hash_mix(h, detail::hash_rat(p.x.b));
        hash_mix(h, detail::hash_rat(p.y.a));
        hash_mix(h, detail::hash_rat(p.y.b));
        return h;
    }
};

// One Adler-Weiss box: an axis-aligned chart rectangle.
struct AwBox {
    QInterval u, s;
    bool contains_open(const Quad& cu, const Quad& cs) const {
        return u.contains_open(cu) && s.contains_open(cs);
    }
    bool contains_closed(const Quad& cu, const Quad& cs) const {
        return u.contains_closed(cu) && s.contains_closed(cs);
    }
};

// Full u-crossing of box `to + lattice offset` by the image of box `from`.
struct AwEdge {
    int from, to;
    std::int64_t m1, m2;   // lattice offset in (x,y) coordinates
    Quad off_u, off_s;     // chart offset of the target translate
};

struct TorusSystem {
    using Point = TorusPoint;
    using PointHash = TorusPointHash;
    using Threshold = Quad;

    Mat2i M;
    long D = 0;
    Quad lambda_u, lambda_s;       // signed eigenvalues, |lambda_u| > 1
    Quad lambda_abs;               // |lambda_u|
    Vec2Q vu, vs;                  // eigenvectors
    Quad ue1, ue2, se1, se2;       // chart projections of the lattice basis
    Quad epsx, epsxp;              // bracket radii
    std::vector<TorusPoint> Ppts, Qpts; // periodic orbits, in iteration order

    std::vector<AwBox> boxes;      // Adler-Weiss partition in chart coordinates
    std::vector<AwEdge> edges;     // full-crossing transitions under M

    // ---- construction ------------------------------------------------------

    TorusSystem(const Mat2i& mat, const Rat& q_seed_x, const Rat& q_seed_y) : M(mat) {
        if (std::llabs(M.det()) != 1) throw std::invalid_argument("make_torus: determinant must be +-1");
        if (std::llabs(M.trace()) <= 2) throw std::invalid_argument("make_torus: not hyperbolic (|trace| <= 2)");
        std::int64_t disc = M.trace() * M.trace() - 4 * M.det();
        // disc = f^2 * D with D square-free
        std::int64_t f = 1, rest = disc;
        for (std::int64_t p = 2; p * p <= rest; ++p) {
            while (rest % (p * p) == 0) { rest /= p * p; f *= p; }
        }
        D = rest;
        if (D <= 1) throw std::invalid_argument("make_torus: rational eigenvalues");
        Quad sq = Quad(Rat(f), Rat(0), D) * Quad::root(D); // f*sqrt(D) = sqrt(disc)
        Quad t = Quad::rational(Rat(M.trace()), D);
        Quad half = Quad::rational(Rat(1, 2), D);
        Quad l1 = (t + sq) * half, l2 = (t - sq) * half;
        if (abs(l1) > abs(l2)) { lambda_u = l1; lambda_s = l2; }
        else { lambda_u = l2; lambda_s = l1; }
        lambda_abs = abs(lambda_u);
        if (!(lambda_abs > Quad::rational(Rat(1), D)))
            throw std::invalid_argument("make_torus: not hyperbolic");
        // |trace| > 2 forces b != 0, so (b, lambda - a) is a valid eigenvector
        assert(M.b != 0);
        vu = {Quad::rational(Rat(M.b), D), lambda_u - Quad::rational(Rat(M.a), D)};
        vs = {Quad::rational(Rat(M.b), D), lambda_s - Quad::rational(Rat(M.a), D)};
        // verify exactly
        check_eigen(vu, lambda_u);
        check_eigen(vs, lambda_s);

        auto c1 = eigen_of(Vec2Q{Quad::rational(Rat(1), D), Quad::rational(Rat(0), D)});
        auto c2 = eigen_of(Vec2Q{Quad::rational(Rat(0), D), Quad::rational(Rat(1), D)});
        ue1 = c1.first; se1 = c1.second;
        ue2 = c2.first; se2 = c2.second;

        Quad nmin = lattice_min();
        epsx = nmin * Quad::rational(Rat(1, 4), D);
        epsxp = epsx * Quad::rational(Rat(1, 4), D);

        Ppts = orbit_of(make_rational_point(Rat(0), Rat(0)));
        Qpts = orbit_of(make_rational_point(q_seed_x, q_seed_y));
        for (const auto& p : Ppts)
            for (const auto& q : Qpts)
                if (p == q) throw std::invalid_argument("TorusSystem: P and Q orbits intersect");

        build_adler_weiss();
    }

    double lambda() const { return to_double(lambda_abs); }
    double entropy() const {
        return std::log(to_double(lambda_abs));
    }
    Threshold eps_x() const { return epsx; }
    Threshold eps_x_prime() const { return epsxp; }
    double eps_x_value() const { return to_double(epsx); }
    double eps_x_prime_value() const { return to_double(epsxp); }
    Threshold scale_threshold(const Threshold& t, std::int64_t pow) const {
        Quad r = t;
        Quad linv = inverse(lambda_abs);
        for (std::int64_t i = 0; i < pow; ++i) r = r * linv;
        for (std::int64_t i = 0; i > pow; --i) r = r * lambda_abs;
        return r;
    }
    double threshold_value(const Threshold& t) const { return to_double(t); }

    // ---- basic chart algebra ----------------------------------------------

    // coordinates of w in the (vu, vs) basis
    std::pair<Quad, Quad> eigen_of(const Vec2Q& w) const {
        Quad det = vu.x * vs.y - vu.y * vs.x;
        Quad u = (w.x * vs.y - w.y * vs.x) / det;
        Quad s = (vu.x * w.y - vu.y * w.x) / det;
        return {u, s};
    }

    Quad u_of_lattice(std::int64_t m1, std::int64_t m2) const {
        return Quad::rational(Rat(m1), D) * ue1 + Quad::rational(Rat(m2), D) * ue2;
    }
    Quad s_of_lattice(std::int64_t m1, std::int64_t m2) const {
        return Quad::rational(Rat(m1), D) * se1 + Quad::rational(Rat(m2), D) * se2;
    }

    Quad eigen_norm(const Vec2Q& w) const {
        auto [u, s] = eigen_of(w);
        return max(abs(u), abs(s));
    }

    TorusPoint make_rational_point(const Rat& x, const Rat& y) const {
        TorusPoint p{Quad::rational(x, D), Quad::rational(y, D)};
        return reduce(p);
    }

    TorusPoint reduce(const TorusPoint& p) const {
        return {frac_quad(p.x), frac_quad(p.y)};
    }

    // ---- dynamics ----------------------------------------------------------

    TorusPoint apply(const TorusPoint& p, std::int64_t power) const {
        TorusPoint r = p;
        Mat2i step = (power >= 0) ? M : M.inverse_unimodular();
        std::int64_t n = std::llabs(power);
        for (std::int64_t i = 0; i < n; ++i) {
            Vec2Q v = apply_mat(step, Vec2Q{r.x, r.y});
            r = reduce(TorusPoint{v.x, v.y});
        }
        return r;
    }

    std::vector<TorusPoint> orbit_of(const TorusPoint& seed) const {
        std::vector<TorusPoint> orbit{seed};
        TorusPoint p = apply(seed, 1);
        while (!(p == seed)) {
            orbit.push_back(p);
            p = apply(p, 1);
            if (orbit.size() > 4096) throw std::invalid_argument("orbit_of: seed not periodic in bound");
        }
        return orbit;
    }

    // ---- metric ------------------------------------------------------------

    struct MinRep {
        Quad value;            // the distance
        Quad u, s;             // eigen coordinates of the minimal representative
        std::int64_t m1, m2;   // chosen lattice translate
        bool unique;
    };

    // All integer vectors whose chart projections satisfy u(m) in uiv and
    // s(m) in siv. The projection map is inverted exactly and the preimage
    // parallelogram is scanned on its integer bounding box.
    std::vector<std::pair<std::int64_t, std::int64_t>> lattice_in_box(const QInterval& uiv,
                                                                      const QInterval& siv) const {
        std::vector<std::pair<std::int64_t, std::int64_t>> out;
        if (uiv.empty() || siv.empty()) return out;
        Quad dd = ue1 * se2 - ue2 * se1;
        auto m1_of = [&](const Quad& u, const Quad& s) { return (u * se2 - s * ue2) / dd; };
        auto m2_of = [&](const Quad& u, const Quad& s) { return (ue1 * s - se1 * u) / dd; };
        const Quad us[2] = {uiv.lo, uiv.hi};
        const Quad ss[2] = {siv.lo, siv.hi};
        BigInt m1lo, m1hi, m2lo, m2hi;
        bool first = true;
        for (const Quad& u : us) {
            for (const Quad& s : ss) {
                BigInt f1 = floor_quad(m1_of(u, s)), f2 = floor_quad(m2_of(u, s));
                if (first) { m1lo = f1; m1hi = f1 + 1; m2lo = f2; m2hi = f2 + 1; first = false; }
                else {
                    m1lo = (std::min)(m1lo, f1); m1hi = (std::max)(m1hi, f1 + 1);
                    m2lo = (std::min)(m2lo, f2); m2hi = (std::max)(m2hi, f2 + 1);
                }
            }
        }
        for (BigInt i = m1lo; i <= m1hi; ++i) {
            for (BigInt j = m2lo; j <= m2hi; ++j) {
                std::int64_t m1 = i.convert_to<std::int64_t>(), m2 = j.convert_to<std::int64_t>();
                Quad u = u_of_lattice(m1, m2), s = s_of_lattice(m1, m2);
                if (uiv.contains_closed(u) && siv.contains_closed(s)) out.emplace_back(m1, m2);
            }
        }
        return out;
    }

    // minimize max(|u(delta - m)|, |s(delta - m)|) over integer m
    MinRep minimal_representative(const Vec2Q& delta) const {
        auto [du, ds] = eigen_of(delta);
        // initial candidate: nearest lattice point of the rounded xy coordinates
        Quad best;
        std::int64_t bm1 = 0, bm2 = 0;
        bool have = false;
        for (std::int64_t m1 = -1; m1 <= 1; ++m1) {
            for (std::int64_t m2 = -1; m2 <= 1; ++m2) {
                Quad v = max(abs(du - u_of_lattice(m1, m2)), abs(ds - s_of_lattice(m1, m2)));
                if (!have || v < best) { best = v; bm1 = m1; bm2 = m2; have = true; }
            }
        }
        // every candidate that could tie or beat `best` lies in the box
        // [du-best, du+best] x [ds-best, ds+best]
        bool unique = true;
        for (auto [m1, m2] : lattice_in_box(QInterval{du - best, du + best},
                                            QInterval{ds - best, ds + best})) {
            Quad v = max(abs(du - u_of_lattice(m1, m2)), abs(ds - s_of_lattice(m1, m2)));
            int c = sign(v - best);
            if (c < 0) { best = v; bm1 = m1; bm2 = m2; unique = true; }
            else if (c == 0 && (m1 != bm1 || m2 != bm2)) unique = false;
        }
        return MinRep{best, du - u_of_lattice(bm1, bm2), ds - s_of_lattice(bm1, bm2), bm1, bm2, unique};
    }

    Quad dist_exact(const TorusPoint& p, const TorusPoint& q) const {
        if (p == q) return Quad::rational(Rat(0), D);
        return minimal_representative(Vec2Q{p.x - q.x, p.y - q.y}).value;
    }

    double dist(const TorusPoint& p, const TorusPoint& q) const { return to_double(dist_exact(p, q)); }

    bool dist_lt(const TorusPoint& p, const TorusPoint& q, const Threshold& t) const {
        return dist_exact(p, q) < t;
    }
    bool dist_leq(const TorusPoint& p, const TorusPoint& q, const Threshold& t) const {
        return dist_exact(p, q) <= t;
    }
    bool dist_lt(const TorusPoint& p, const TorusPoint& q, double t) const {
        return dist_exact(p, q) < Quad::rational(rat_from_double(t), D);
    }

    // ---- bracket ------------------------------------------------------------

    // eigen coordinates of p relative to `near`, using the unique minimal
    // lattice representative of p - near
    std::optional<std::pair<Quad, Quad>> eigen_coords(const TorusPoint& p, const TorusPoint& near) const {
        MinRep r = minimal_representative(Vec2Q{p.x - near.x, p.y - near.y});
        if (r.value > epsx) return std::nullopt;
        if (!r.unique) throw std::domain_error("eigen_coords: ambiguous lattice representative");
        return std::make_pair(r.u, r.s);
    }

    // [p, q]: u-coordinate of p, s-coordinate of q; undefined when d > eps_x
    std::optional<TorusPoint> bracket(const TorusPoint& p, const TorusPoint& q) const {
        if (p == q) return p;
        MinRep r = minimal_representative(Vec2Q{p.x - q.x, p.y - q.y});
        if (r.value > epsx) return std::nullopt;
        if (!r.unique) throw std::domain_error("bracket: ambiguous lattice representative");
        Vec2Q z{q.x + r.u * vu.x, q.y + r.u * vu.y};
        return reduce(TorusPoint{z.x, z.y});
    }

    // ---- stable / unstable structure ---------------------------------------

    // solve m1*ue1 + m2*ue2 = value over the integers (u and s projections are
    // Q-linearly independent coordinates of the lattice)
    std::optional<std::pair<std::int64_t, std::int64_t>> lattice_from_u(const Quad& value) const {
        // write in the basis (1, sqrt(D)): 2x2 rational solve
        Rat a1 = ue1.a, b1 = ue1.b, a2 = ue2.a, b2 = ue2.b;
        Rat det = a1 * b2 - b1 * a2;
        if (det == 0) return std::nullopt;
        Rat m1 = (value.a * b2 - value.b * a2) / det;
        Rat m2 = (a1 * value.b - b1 * value.a) / det;
        if (denominator(m1) != 1 || denominator(m2) != 1) return std::nullopt;
        return std::make_pair(numerator(m1).convert_to<std::int64_t>(),
                              numerator(m2).convert_to<std::int64_t>());
    }
    std::optional<std::pair<std::int64_t, std::int64_t>> lattice_from_s(const Quad& value) const {
        Rat a1 = se1.a, b1 = se1.b, a2 = se2.a, b2 = se2.b;
        Rat det = a1 * b2 - b1 * a2;
        if (det == 0) return std::nullopt;
        Rat m1 = (value.a * b2 - value.b * a2) / det;
        Rat m2 = (a1 * value.b - b1 * value.a) / det;
        if (denominator(m1) != 1 || denominator(m2) != 1) return std::nullopt;
        return std::make_pair(numerator(m1).convert_to<std::int64_t>(),
                              numerator(m2).convert_to<std::int64_t>());
    }

    struct StableData { int orbit_index; Quad t; };   // x = P[i] + t*vs (mod 1)
    struct UnstableData { int orbit_index; Quad s; }; // x = Q[i] + s*vu (mod 1)

    std::optional<StableData> stable_data(const TorusPoint& x) const {
        for (int i = 0; i < static_cast<int>(Ppts.size()); ++i) {
            auto [du, ds] = eigen_of(Vec2Q{x.x - Ppts[i].x, x.y - Ppts[i].y});
            if (auto m = lattice_from_u(du)) {
                Quad t = ds - s_of_lattice(m->first, m->second);
                return StableData{i, t};
            }
        }
        return std::nullopt;
    }
    std::optional<UnstableData> unstable_data(const TorusPoint& x) const {
        for (int i = 0; i < static_cast<int>(Qpts.size()); ++i) {
            auto [du, ds] = eigen_of(Vec2Q{x.x - Qpts[i].x, x.y - Qpts[i].y});
            if (auto m = lattice_from_s(ds)) {
                Quad s = du - u_of_lattice(m->first, m->second);
                return UnstableData{i, s};
            }
        }
        return std::nullopt;
    }

    bool stably_equivalent(const TorusPoint& x, const TorusPoint& y) const {
        // same stable leaf through the same point of P; with P a single orbit,
        // forward-asymptotic phase agreement means the same orbit point
        auto dx = stable_data(x), dy = stable_data(y);
        return dx && dy && dx->orbit_index == dy->orbit_index;
    }
    bool unstably_equivalent(const TorusPoint& x, const TorusPoint& y) const {
        auto dx = unstable_data(x), dy = unstable_data(y);
        return dx && dy && dx->orbit_index == dy->orbit_index;
    }

    bool is_homoclinic(const TorusPoint& x) const {
        auto sd = stable_data(x);
        auto ud = unstable_data(x);
        return sd && ud && sign(sd->t) != 0 && sign(ud->s) != 0;
    }

    // Canonical orbit representative: the unique iterate with |t| <= |s| and
    // |t * lambda| > |s / lambda| one step earlier; |t|/|s| is strictly
    // decreasing along the orbit, so the crossing is unique.
    TorusPoint orbit_representative(const TorusPoint& x) const {
        auto sd = stable_data(x);
        auto ud = unstable_data(x);
        if (!sd || !ud) throw std::domain_error("orbit_representative: not homoclinic");
        Quad t = abs(sd->t), s = abs(ud->s);
        TorusPoint p = x;
        while (t > s) { p = apply(p, 1); t = t * inverse(lambda_abs); s = s * lambda_abs; }
        // undo until the condition first holds
        while (true) {
            Quad tp = t * lambda_abs, sp = s * inverse(lambda_abs);
            if (tp > sp) break;
            p = apply(p, -1);
            t = tp; s = sp;
        }
        return p;
    }
    bool same_orbit(const TorusPoint& x, const TorusPoint& y) const {
        return orbit_representative(x) == orbit_representative(y);
    }

    // ---- homoclinic enumeration ---------------------------------------------

    // all x = p + t*vs = q + s*vu + m over lattice offsets with |entries| <= cap
    std::vector<TorusPoint> enumerate_homoclinic(std::int64_t cap) const {
        std::vector<TorusPoint> out;
        for (std::int64_t radius = 0; radius <= cap; ++radius) {
            for (std::size_t pi = 0; pi < Ppts.size(); ++pi) {
                for (std::size_t qi = 0; qi < Qpts.size(); ++qi) {
                    for (std::int64_t m1 = -radius; m1 <= radius; ++m1) {
                        for (std::int64_t m2 = -radius; m2 <= radius; ++m2) {
                            if (std::max(std::llabs(m1), std::llabs(m2)) != radius) continue;
                            auto pt = solve_homoclinic(Ppts[pi], Qpts[qi], m1, m2);
                            if (pt) out.push_back(*pt);
                        }
                    }
                }
            }
        }
        return out;
    }

    // ---- Adler-Weiss data ---------------------------------------------------

    // a lattice translate of a box containing a given chart point
    struct PieceHit {
        int box;
        std::int64_t m1, m2;
        Quad off_u, off_s; // chart offset of the translate
    };

    // All (box, lattice offset) pairs whose margin-inflated translate contains
    // the chart point (cu, cs). With margin 0 and closed = true this is the
    // membership in the closed partition.
    std::vector<PieceHit> pieces_at(const Quad& cu, const Quad& cs, const Quad& margin,
                                    bool closed) const {
        std::vector<PieceHit> hits;
        for (int b = 0; b < static_cast<int>(boxes.size()); ++b) {
            // the translate offset must satisfy cu - hi - margin <= u(m) <= cu - lo + margin
            QInterval uiv{cu - boxes[b].u.hi - margin, cu - boxes[b].u.lo + margin};
            QInterval siv{cs - boxes[b].s.hi - margin, cs - boxes[b].s.lo + margin};
            for (auto [m1, m2] : lattice_in_box(uiv, siv)) {
                Quad ou = u_of_lattice(m1, m2), os = s_of_lattice(m1, m2);
                if (!closed) {
                    bool in = cu > boxes[b].u.lo + ou - margin && cu < boxes[b].u.hi + ou + margin &&
                              cs > boxes[b].s.lo + os - margin && cs < boxes[b].s.hi + os + margin;
                    if (!in) continue;
                }
                hits.push_back(PieceHit{b, m1, m2, ou, os});
            }
        }
        std::sort(hits.begin(), hits.end(), [](const PieceHit& a, const PieceHit& b) {
            return std::tie(a.box, a.m1, a.m2) < std::tie(b.box, b.m1, b.m2);
        });
        return hits;
    }

    std::pair<Quad, Quad> chart_of(const TorusPoint& p) const {
        auto [u, s] = eigen_of(Vec2Q{p.x, p.y});
        return {u, s};
    }

private:
    void check_eigen(const Vec2Q& v, const Quad& lam) const {
        Vec2Q w = apply_mat(M, v);
        if (!(w.x == lam * v.x && w.y == lam * v.y))
            throw std::logic_error("TorusSystem: eigenvector check failed");
    }

    // min over nonzero lattice vectors of the eigen max-norm, exact
    Quad lattice_min() const {
        Quad best = max(abs(ue2), abs(se2)); // candidate m = e2
        for (auto [m1, m2] : lattice_in_box(QInterval{-best, best}, QInterval{-best, best})) {
            if (m1 == 0 && m2 == 0) continue;
            Quad v = max(abs(u_of_lattice(m1, m2)), abs(s_of_lattice(m1, m2)));
            if (v < best) best = v;
        }
        return best;
    }

    std::optional<TorusPoint> solve_homoclinic(const TorusPoint& p, const TorusPoint& q,
                                               std::int64_t m1, std::int64_t m2) const {
        // t*vs - s*vu = q - p + m; in eigen coordinates: t = s-part, -s = u-part
        Vec2Q rhs{q.x - p.x + Quad::rational(Rat(m1), D), q.y - p.y + Quad::rational(Rat(m2), D)};
        auto [ru, rs] = eigen_of(rhs);
        Quad t = rs, s = -ru;
        if (sign(t) == 0 || sign(s) == 0) return std::nullopt; // degenerate: on P or Q
        TorusPoint x{p.x + t * vs.x, p.y + t * vs.y};
        return reduce(x);
    }

    // Search for a two-box Markov partition with widths/heights taken from
    // lattice projections, then verify tiling and full-crossing exactly.
    void build_adler_weiss() {
        Quad chart_det = abs(vu.x * vs.y - vu.y * vs.x);
        Quad target_area = inverse(chart_det); // chart area of a fundamental domain

        std::vector<Quad> uc, sc; // candidate widths and heights
        for (std::int64_t m1 = -1; m1 <= 1; ++m1) {
            for (std::int64_t m2 = -1; m2 <= 1; ++m2) {
                if (m1 == 0 && m2 == 0) continue;
                Quad u = abs(u_of_lattice(m1, m2)), s = abs(s_of_lattice(m1, m2));
                uc.push_back(u);
                sc.push_back(s);
            }
        }
        auto dedup = [this](std::vector<Quad>& v) {
            std::sort(v.begin(), v.end(), [](const Quad& a, const Quad& b) { return a < b; });
            v.erase(std::unique(v.begin(), v.end(),
                                [](const Quad& a, const Quad& b) { return a == b; }),
                    v.end());
            std::erase_if(v, [this](const Quad& q) { return sign(q) == 0; });
        };
        dedup(uc);
        dedup(sc);

        for (const Quad& w1 : uc) {
            for (const Quad& w2 : uc) {
                if (!(w1 > w2)) continue;
                for (const Quad& h1 : sc) {
                    for (const Quad& h2 : sc) {
                        if (!(h1 > h2)) continue;
                        if (w1 * h1 + w2 * h2 != target_area) continue;
                        if (try_anchors(w1, h1, w2, h2)) return;
                    }
                }
            }
        }
        throw std::invalid_argument(
            "TorusSystem: no two-box Markov partition found for this matrix");
    }

    bool try_anchors(const Quad& w1, const Quad& h1, const Quad& w2, const Quad& h2) {
        std::vector<Quad> uanch, sanch;
        for (int c1 = -1; c1 <= 1; ++c1)
            for (int c2 = -1; c2 <= 1; ++c2) {
                uanch.push_back(Quad::rational(Rat(c1), D) * w1 + Quad::rational(Rat(c2), D) * w2);
                sanch.push_back(Quad::rational(Rat(c1), D) * h1 + Quad::rational(Rat(c2), D) * h2);
            }
        for (const Quad& a1 : uanch)
            for (const Quad& b1 : sanch)
                for (const Quad& a2 : uanch)
                    for (const Quad& b2 : sanch) {
                        std::vector<AwBox> cand{
                            AwBox{QInterval{a1, a1 + w1}, QInterval{b1, b1 + h1}},
                            AwBox{QInterval{a2, a2 + w2}, QInterval{b2, b2 + h2}}};
                        if (!tiles(cand)) continue;
                        auto e = markov_edges(cand);
                        if (e) {
                            boxes = cand;
                            edges = *e;
                            return true;
                        }
                    }
        return false;
    }

    // interior-disjointness of all overlapping lattice translates; with the
    // area identity already enforced this certifies a tiling by closed boxes
    bool tiles(const std::vector<AwBox>& cand) const {
        for (std::size_t i = 0; i < cand.size(); ++i) {
            for (std::size_t j = 0; j < cand.size(); ++j) {
                QInterval uiv{cand[i].u.lo - cand[j].u.hi, cand[i].u.hi - cand[j].u.lo};
                QInterval siv{cand[i].s.lo - cand[j].s.hi, cand[i].s.hi - cand[j].s.lo};
                for (auto [m1, m2] : lattice_in_box(uiv, siv)) {
                    if (i == j && m1 == 0 && m2 == 0) continue;
                    Quad ou = u_of_lattice(m1, m2), os = s_of_lattice(m1, m2);
                    QInterval ui = intersect(cand[i].u, shift(cand[j].u, ou));
                    QInterval si = intersect(cand[i].s, shift(cand[j].s, os));
                    if (sign(ui.width()) > 0 && sign(si.width()) > 0) return false;
                }
            }
        }
        return true;
    }

    // extract full-crossing edges of M(B_i) over lattice translates of B_j and
    // check u-length and s-stacking conservation exactly
    std::optional<std::vector<AwEdge>> markov_edges(const std::vector<AwBox>& cand) const {
        std::vector<AwEdge> out;
        std::vector<Quad> ulen(cand.size(), Quad::rational(Rat(0), D));
        std::vector<Quad> sfill(cand.size(), Quad::rational(Rat(0), D));
        for (int i = 0; i < static_cast<int>(cand.size()); ++i) {
            QInterval iu = scale(cand[i].u, lambda_u);
            QInterval is = scale(cand[i].s, lambda_s);
            for (int j = 0; j < static_cast<int>(cand.size()); ++j) {
                QInterval uiv{iu.lo - cand[j].u.hi, iu.hi - cand[j].u.lo};
                QInterval siv{is.lo - cand[j].s.hi, is.hi - cand[j].s.lo};
                for (auto [m1, m2] : lattice_in_box(uiv, siv)) {
                    Quad ou = u_of_lattice(m1, m2), os = s_of_lattice(m1, m2);
                    QInterval ju = shift(cand[j].u, ou), js = shift(cand[j].s, os);
                    QInterval xu = intersect(iu, ju), xs = intersect(is, js);
                    if (!(sign(xu.width()) > 0 && sign(xs.width()) > 0)) continue;
                    // full u-crossing: image spans the target's u-interval
                    if (!(iu.lo <= ju.lo && ju.hi <= iu.hi)) return std::nullopt;
                    // image is an s-slab of the target
                    if (!(js.lo <= is.lo && is.hi <= js.hi)) return std::nullopt;
                    out.push_back(AwEdge{i, j, m1, m2, ou, os});
                    ulen[i] += cand[j].u.width();
                    sfill[j] += is.width();
                }
            }
        }
        if (out.empty()) return std::nullopt;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (ulen[i] != lambda_abs * cand[i].u.width()) return std::nullopt;
            if (sfill[i] != cand[i].s.width()) return std::nullopt;
        }
        return out;
    }
};

inline TorusSystem make_torus(const Mat2i& m, const Rat& qx = Rat(1, 3), const Rat& qy = Rat(1, 3)) {
    return TorusSystem(m, qx, qy);
}

// Default instances: golden automorphism and the cat map (its square), both
// with P = {(0,0)} and Q = orbit((1/3,1/3)).
inline TorusSystem golden_torus_system() { return make_torus(Mat2i{1, 1, 1, 0}); }
inline TorusSystem cat_map_system() { return make_torus(Mat2i{2, 1, 1, 1}); }

} // namespace smalelab::torus
