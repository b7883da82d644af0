#pragma once

// Subshift-of-finite-type backend.
//
// Points are bi-infinite admissible sequences that are backward-asymptotic to
// the periodic orbit Q and forward-asymptotic to P, stored in canonical form:
//
//   x_i = wQ[(i - left_cut + left_phase) mod |wQ|]    for i <  left_cut
//   x_i = center[i - left_cut]                        for left_cut <= i < right_cut
//   x_i = wP[(i - right_cut + right_phase) mod |wP|]  for i >= right_cut
//
// Canonical means maximal tail absorption, so representations are unique and
// equality of points is equality of the five fields. The shift acts by moving
// both cuts; the phases are invariant, which makes the orbit invariant of a
// point simply (center, left_phase, right_phase).
//
// Metric: d(x,y) = base^(-m) with m the largest n such that x and y agree on
// [-n, n] (m = -1 when they differ at 0). All threshold comparisons are done
// on the agreement radius, hence exact for any base.

#include "smalelab/common.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace smalelab::sft {

using Word = std::string; // one symbol per byte

inline bool word_admissible(const std::vector<std::vector<int>>& adj, const Word& w, bool cyclic) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!adj[static_cast<unsigned char>(w[i])][static_cast<unsigned char>(w[i + 1])]) return false;
    if (cyclic && !w.empty() &&
        !adj[static_cast<unsigned char>(w.back())][static_cast<unsigned char>(w.front())])
        return false;
    return true;
}

inline bool word_primitive(const Word& w) {
    std::size_t n = w.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p) continue;
        bool rep = true;
        for (std::size_t i = p; i < n && rep; ++i) rep = (w[i] == w[i - p]);
        if (rep) return false;
    }
    return true;
}

struct PeriodicOrbit {
    Word word; // one period, primitive, cyclically admissible
    int length() const { return static_cast<int>(word.size()); }
    int sym_at(std::int64_t phase) const { return word[mod_pos(phase, length())]; }
};

struct SftModel {
    int alphabet = 0;
    std::vector<std::vector<int>> adj;
    double lambda_metric = 2.0;
    double perron = 0.0;
    double entropy = 0.0;
};

namespace detail {

inline bool strongly_connected(const std::vector<std::vector<int>>& adj) {
    int n = static_cast<int>(adj.size());
    auto reach = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w = 0; w < n; ++w) {
                int e = transpose ? adj[w][v] : adj[v][w];
                if (e && !seen[w]) { seen[w] = 1; stack.push_back(w); }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach(false) && reach(true);
}

inline double perron_value(const std::vector<std::vector<int>>& adj) {
    int n = static_cast<int>(adj.size());
    std::vector<double> v(n, 1.0), w(n);
    double lam = 0.0;
    for (int it = 0; it < 20000; ++it) {
        double norm = 0;
        for (int i = 0; i < n; ++i) {
            w[i] = 0;
            for (int j = 0; j < n; ++j) w[i] += adj[i][j] * v[j];
            norm += w[i] * w[i];
        }
        norm = std::sqrt(norm);
        double next = 0;
        for (int i = 0; i < n; ++i) { v[i] = w[i] / norm; next += v[i]; }
        double est = 0, dot = 0;
        for (int i = 0; i < n; ++i) {
            double av = 0;
            for (int j = 0; j < n; ++j) av += adj[i][j] * v[j];
            est += av * v[i];
            dot += v[i] * v[i];
        }
        double cur = est / dot;
        if (std::abs(cur - lam) < 1e-15 && it > 8) return cur;
        lam = cur;
    }
    return lam;
}

} // namespace detail

inline SftModel make_sft(const std::vector<std::vector<int>>& adjacency, double lambda_metric = 2.0) {
    SftModel m;
    m.alphabet = static_cast<int>(adjacency.size());
    if (m.alphabet == 0) throw std::invalid_argument("make_sft: empty adjacency");
    for (const auto& row : adjacency) {
        if (row.size() != adjacency.size()) throw std::invalid_argument("make_sft: non-square adjacency");
        for (int v : row)
            if (v != 0 && v != 1) throw std::invalid_argument("make_sft: adjacency entries must be 0/1");
    }
    if (!detail::strongly_connected(adjacency))
        throw std::invalid_argument("make_sft: adjacency is reducible (not strongly connected)");
    if (!(lambda_metric > 1.0)) throw std::invalid_argument("make_sft: metric base must exceed 1");
    m.adj = adjacency;
    m.lambda_metric = lambda_metric;
    m.perron = detail::perron_value(adjacency);
    m.entropy = std::log(m.perron);
    return m;
}

struct BiSequence {
    std::int32_t left_phase = 0;   // phase into Q's word
    std::int32_t right_phase = 0;  // phase into P's word
    std::int64_t left_cut = 0;
    std::int64_t right_cut = 0;
    Word center;

    friend bool operator==(const BiSequence& x, const BiSequence& y) {
        return x.left_cut == y.left_cut && x.right_cut == y.right_cut &&
               x.left_phase == y.left_phase && x.right_phase == y.right_phase &&
               x.center == y.center;
    }
    friend bool operator!=(const BiSequence& x, const BiSequence& y) { return !(x == y); }

    std::int64_t complexity() const {
        return std::max<std::int64_t>({std::llabs(left_cut), std::llabs(right_cut),
                                       static_cast<std::int64_t>(center.size())});
    }

    friend bool operator<(const BiSequence& x, const BiSequence& y) {
        auto kx = std::make_tuple(x.complexity(), x.left_cut, x.right_cut, x.left_phase, x.right_phase);
        auto ky = std::make_tuple(y.complexity(), y.left_cut, y.right_cut, y.left_phase, y.right_phase);
        if (kx != ky) return kx < ky;
        return x.center < y.center;
    }
};

struct BiSequenceHash {
    std::size_t operator()(const BiSequence& x) const {
        std::size_t h = std::hash<std::int64_t>{}(x.left_cut);
        hash_mix(h, std::hash<std::int64_t>{}(x.right_cut));
        hash_mix(h, std::hash<std::int32_t>{}(x.left_phase));
        hash_mix(h, std::hash<std::int32_t>{}(x.right_phase));
        hash_mix(h, std::hash<Word>{}(x.center));
        return h;
    }
};

// The full backend: model plus the two disjoint periodic orbits that anchor
// the homoclinic point representation.
struct SftSystem {
    using Point = BiSequence;
    using PointHash = BiSequenceHash;
    // Threshold e stands for the metric value base^(-e); comparisons use the
    // agreement radius and are exact.
    using Threshold = std::int64_t;

    SftModel model;
    PeriodicOrbit P; // forward tail
    PeriodicOrbit Q; // backward tail

    SftSystem(SftModel m, PeriodicOrbit p, PeriodicOrbit q)
        : model(std::move(m)), P(std::move(p)), Q(std::move(q)) {
        validate_orbit(P, "P");
        validate_orbit(Q, "Q");
        if (orbits_intersect(P, Q))
            throw std::invalid_argument("SftSystem: P and Q must be disjoint orbits");
    }

    // ---- constants -------------------------------------------------------

    double lambda() const { return model.lambda_metric; }
    double entropy() const { return model.entropy; }
    Threshold eps_x() const { return 1; }        // base^-1
    Threshold eps_x_prime() const { return 3; }  // base^-3 = eps_x / base^2
    double eps_x_value() const { return std::pow(model.lambda_metric, -1.0); }
    double eps_x_prime_value() const { return std::pow(model.lambda_metric, -3.0); }
    Threshold scale_threshold(Threshold t, std::int64_t pow) const { return t + pow; }
    double threshold_value(Threshold t) const { return std::pow(model.lambda_metric, -double(t)); }

    // ---- point access ----------------------------------------------------

    int sym(const BiSequence& x, std::int64_t i) const {
        if (i < x.left_cut) return Q.sym_at(i - x.left_cut + x.left_phase);
        if (i >= x.right_cut) return P.sym_at(i - x.right_cut + x.right_phase);
        return static_cast<unsigned char>(x.center[static_cast<std::size_t>(i - x.left_cut)]);
    }

    bool admissible_step(int a, int b) const { return model.adj[a][b] != 0; }

    bool point_admissible(const BiSequence& x) const {
        std::int64_t lo = x.left_cut - Q.length() - 1;
        std::int64_t hi = x.right_cut + P.length() + 1;
        for (std::int64_t i = lo; i < hi; ++i)
            if (!admissible_step(sym(x, i), sym(x, i + 1))) return false;
        return true;
    }

    std::int64_t period_lcm() const {
        std::int64_t a = P.length(), b = Q.length();
        return a / std::gcd(a, b) * b;
    }

    // Canonical form: absorb symbols into both periodic tails as far as the
    // sequence allows. Cuts land on the first genuine disagreement.
    BiSequence canonicalize(const BiSequence& x) const {
        // Distinct periodic sequences disagree within any lcm-length window,
        // which bounds both scans below/above the represented data.
        std::int64_t slack = period_lcm() + 2;
        // R = 1 + last index where x disagrees with the P-tail extension
        std::int64_t R = x.right_cut;
        {
            std::int64_t i = x.right_cut - 1;
            std::int64_t lim = x.left_cut - slack;
            for (; i >= lim; --i) {
                int pred = P.sym_at(i - x.right_cut + x.right_phase);
                if (sym(x, i) != pred) break;
            }
            if (i < lim) throw std::logic_error("canonicalize: point matches its forward tail everywhere");
            R = i + 1;
        }
        // L = first index where x disagrees with the Q-tail extension
        std::int64_t L = x.left_cut;
        {
            std::int64_t i = x.left_cut;
            std::int64_t lim = x.right_cut + slack;
            for (; i <= lim; ++i) {
                int pred = Q.sym_at(i - x.left_cut + x.left_phase);
                if (sym(x, i) != pred) break;
            }
            if (i > lim) throw std::logic_error("canonicalize: point matches its backward tail everywhere");
            L = i;
        }
        BiSequence out;
        std::int64_t cl = (R >= L) ? L : R;
        std::int64_t cr = R;
        out.left_cut = cl;
        out.right_cut = cr;
        out.left_phase = mod_pos(cl - x.left_cut + x.left_phase, Q.length());
        out.right_phase = mod_pos(cr - x.right_cut + x.right_phase, P.length());
        out.center.reserve(static_cast<std::size_t>(cr - cl));
        for (std::int64_t i = cl; i < cr; ++i)
            out.center.push_back(static_cast<char>(sym(x, i)));
        return out;
    }

    // Build a point from raw description data and canonicalize.
    BiSequence make_point(std::int32_t lphase, std::int64_t lcut, Word center, std::int64_t rcut,
                          std::int32_t rphase) const {
        BiSequence x;
        x.left_phase = mod_pos(lphase, Q.length());
        x.right_phase = mod_pos(rphase, P.length());
        x.left_cut = lcut;
        x.right_cut = rcut;
        x.center = std::move(center);
        assert(rcut - lcut == static_cast<std::int64_t>(x.center.size()));
        return canonicalize(x);
    }

    // ---- dynamics --------------------------------------------------------

    BiSequence apply(const BiSequence& x, std::int64_t power) const {
        BiSequence y = x;
        y.left_cut -= power;
        y.right_cut -= power;
        return y;
    }

    // Largest n >= 0 with agreement on [-n, n]; -1 when the points differ at
    // index 0; nullopt when the points are equal.
    std::optional<std::int64_t> agreement_radius(const BiSequence& x, const BiSequence& y) const {
        if (x == y) return std::nullopt;
        std::int64_t bound = std::max(x.complexity(), y.complexity()) +
                             std::max(P.length(), Q.length()) + 2;
        for (std::int64_t m = 0; m <= bound; ++m) {
            if (sym(x, m) != sym(y, m) || sym(x, -m) != sym(y, -m)) return m - 1;
        }
        assert(false && "agreement_radius: distinct canonical points agree beyond bound");
        return std::nullopt;
    }

    double dist(const BiSequence& x, const BiSequence& y) const {
        auto m = agreement_radius(x, y);
        if (!m) return 0.0;
        double e = static_cast<double>(*m);
        return std::pow(model.lambda_metric, -e);
    }

    // d(x,y) < base^-e, exact.
    bool dist_lt(const BiSequence& x, const BiSequence& y, Threshold e) const {
        auto m = agreement_radius(x, y);
        return !m || *m > e;
    }
    // d(x,y) <= base^-e, exact.
    bool dist_leq(const BiSequence& x, const BiSequence& y, Threshold e) const {
        auto m = agreement_radius(x, y);
        return !m || *m >= e;
    }
    // Exact against a double threshold (metric values are exact doubles for base 2).
    bool dist_lt(const BiSequence& x, const BiSequence& y, double t) const {
        return dist(x, y) < t;
    }

    // ---- bracket ---------------------------------------------------------

    // [x, y]: future of x, past of y. Defined when d(x,y) <= eps_x, which for
    // the default eps_x = base^-1 forces agreement on [-1,1], so the splice is
    // admissible.
    std::optional<BiSequence> bracket(const BiSequence& x, const BiSequence& y) const {
        auto m = agreement_radius(x, y);
        if (m && *m < eps_x()) return std::nullopt;
        if (!m) return x; // equal points: [x,x] = x
        BiSequence z;
        std::int64_t cl = std::min<std::int64_t>(y.left_cut, 0);
        std::int64_t cr = std::max<std::int64_t>(x.right_cut, 0);
        z.left_cut = cl;
        z.right_cut = cr;
        z.left_phase = mod_pos(cl - y.left_cut + y.left_phase, Q.length());
        z.right_phase = mod_pos(cr - x.right_cut + x.right_phase, P.length());
        z.center.reserve(static_cast<std::size_t>(cr - cl));
        for (std::int64_t i = cl; i < cr; ++i)
            z.center.push_back(static_cast<char>(i >= 0 ? sym(x, i) : sym(y, i)));
        return canonicalize(z);
    }

    // ---- equivalence classes ----------------------------------------------

    bool stably_equivalent(const BiSequence& x, const BiSequence& y) const {
        return mod_pos(x.right_phase - x.right_cut, P.length()) ==
               mod_pos(y.right_phase - y.right_cut, P.length());
    }
    bool unstably_equivalent(const BiSequence& x, const BiSequence& y) const {
        return mod_pos(x.left_phase - x.left_cut, Q.length()) ==
               mod_pos(y.left_phase - y.left_cut, Q.length());
    }

    // Orbit invariant: phases and center are shift-invariant in this
    // parameterization, so they identify the orbit of a point.
    struct OrbitSignature {
        std::int32_t left_phase, right_phase;
        Word center;
        friend bool operator==(const OrbitSignature& a, const OrbitSignature& b) {
            return a.left_phase == b.left_phase && a.right_phase == b.right_phase &&
                   a.center == b.center;
        }
        friend bool operator<(const OrbitSignature& a, const OrbitSignature& b) {
            return std::tie(a.left_phase, a.right_phase, a.center) <
                   std::tie(b.left_phase, b.right_phase, b.center);
        }
    };
    OrbitSignature orbit_signature(const BiSequence& x) const {
        return {x.left_phase, x.right_phase, x.center};
    }
    bool same_orbit(const BiSequence& x, const BiSequence& y) const {
        return orbit_signature(x) == orbit_signature(y);
    }

    // ---- enumeration -------------------------------------------------------

    // All canonical homoclinic points with |cuts| and center length bounded by
    // the cap, in (complexity, lexicographic) order. The cap-k list is a
    // prefix of the cap-(k+1) list.
    std::vector<BiSequence> enumerate_homoclinic(std::int64_t cap) const {
        std::set<BiSequence> found;
        for (std::int64_t lc = -cap; lc <= cap; ++lc) {
            for (std::int64_t rc = lc; rc <= cap && rc - lc <= cap; ++rc) {
                std::int64_t len = rc - lc;
                for (int lp = 0; lp < Q.length(); ++lp) {
                    for (int rp = 0; rp < P.length(); ++rp) {
                        Word center(static_cast<std::size_t>(len), 0);
                        enumerate_centers(lc, rc, lp, rp, center, 0, found);
                    }
                }
            }
        }
        std::vector<BiSequence> out(found.begin(), found.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    void enumerate_centers(std::int64_t lc, std::int64_t rc, int lp, int rp, Word& center,
                           std::int64_t pos, std::set<BiSequence>& found) const {
        std::int64_t len = rc - lc;
        if (pos == len) {
            int last = (len == 0) ? Q.sym_at(lp - 1) : static_cast<unsigned char>(center[len - 1]);
            if (!admissible_step(last, P.sym_at(rp))) return;
            BiSequence x;
            x.left_phase = lp;
            x.right_phase = rp;
            x.left_cut = lc;
            x.right_cut = rc;
            x.center = center;
            BiSequence canon = canonicalize(x);
            if (canon == x) found.insert(std::move(canon));
            return;
        }
        int prev = (pos == 0) ? Q.sym_at(lp - 1) : static_cast<unsigned char>(center[pos - 1]);
        for (int s = 0; s < model.alphabet; ++s) {
            if (!admissible_step(prev, s)) continue;
            center[static_cast<std::size_t>(pos)] = static_cast<char>(s);
            enumerate_centers(lc, rc, lp, rp, center, pos + 1, found);
        }
    }

    void validate_orbit(const PeriodicOrbit& o, const char* name) const {
        if (o.word.empty()) throw std::invalid_argument(std::string("orbit word empty: ") + name);
        for (char c : o.word)
            if (static_cast<unsigned char>(c) >= model.alphabet)
                throw std::invalid_argument(std::string("orbit symbol out of range: ") + name);
        if (!word_admissible(model.adj, o.word, /*cyclic=*/true))
            throw std::invalid_argument(std::string("orbit word not cyclically admissible: ") + name);
        if (!word_primitive(o.word))
            throw std::invalid_argument(std::string("orbit word not primitive: ") + name);
    }

    static bool orbits_intersect(const PeriodicOrbit& a, const PeriodicOrbit& b) {
        // Same orbit iff the bi-infinite periodic sequences coincide, i.e. the
        // words are rotations of each other.
        if (a.word.size() != b.word.size()) return false;
        Word doubled = a.word + a.word;
        return doubled.find(b.word) != Word::npos;
    }
};

// Generic local-set predicates (Def of local stable/unstable sets).
template <class System>
bool in_local_stable(const System& sys, const typename System::Point& base,
                     const typename System::Point& p, double eps) {
    auto br = sys.bracket(p, base);
    return sys.dist_lt(base, p, eps) && br && *br == base;
}

template <class System>
bool in_local_unstable(const System& sys, const typename System::Point& base,
                       const typename System::Point& p, double eps) {
    auto br = sys.bracket(base, p);
    return sys.dist_lt(base, p, eps) && br && *br == base;
}

// Default instance used across tests and the CLI: golden-mean shift,
// P = orbit(0^inf), Q = orbit((01)^inf).
inline SftSystem golden_mean_system() {
    SftModel m = make_sft({{1, 1}, {1, 0}});
    PeriodicOrbit P{Word(1, 0)};
    PeriodicOrbit Q{[] { Word w; w.push_back(0); w.push_back(1); return w; }()};
    return SftSystem(std::move(m), std::move(P), std::move(Q));
}

} // namespace smalelab::sft
