#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "smalelab/sft.hpp"

#include <set>
#include <unordered_set>

using namespace smalelab;
using namespace smalelab::sft;

namespace {

// Oracle distance: direct symbol comparison, ignoring the canonical-form
// machinery entirely.
double oracle_dist(const SftSystem& sys, const BiSequence& x, const BiSequence& y, int span = 256) {
    if (x == y) return 0.0;
    for (int m = 0; m <= span; ++m)
        if (sys.sym(x, m) != sys.sym(y, m) || sys.sym(x, -m) != sys.sym(y, -m))
            return std::pow(sys.model.lambda_metric, -(m - 1));
    return -1.0; // agree on the whole span
}

// Distance from a point to a phase of the periodic orbit P, computed on symbols.
double dist_to_periodic(const SftSystem& sys, const BiSequence& x, const PeriodicOrbit& orb,
                        std::int64_t phase, int span = 512) {
    for (int m = 0; m <= span; ++m) {
        if (sys.sym(x, m) != orb.sym_at(m + phase) || sys.sym(x, -m) != orb.sym_at(-m + phase))
            return std::pow(sys.model.lambda_metric, -(m - 1));
    }
    return 0.0;
}

} // namespace

TEST_CASE("make_sft validates and computes entropy") {
    auto full = make_sft({{1, 1}, {1, 1}});
    CHECK(full.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    auto golden = make_sft({{1, 1}, {1, 0}});
    CHECK(golden.perron == doctest::Approx((1.0 + std::sqrt(5.0)) / 2).epsilon(1e-12));
    CHECK(golden.entropy == doctest::Approx(0.481211825059603).epsilon(1e-10));
    CHECK_THROWS(make_sft({{1, 0}, {0, 1}}));
    CHECK_THROWS(make_sft({{1, 1}, {1, 0}, {1, 1}}));
}

TEST_CASE("system rejects intersecting orbits") {
    auto m = make_sft({{1, 1}, {1, 1}});
    PeriodicOrbit p0{Word(1, 0)};
    PeriodicOrbit p0b{Word(1, 0)};
    CHECK_THROWS(SftSystem(m, p0, p0b));
    // rotations of the same word are the same orbit
    Word w01;
    w01.push_back(0);
    w01.push_back(1);
    Word w10;
    w10.push_back(1);
    w10.push_back(0);
    CHECK_THROWS(SftSystem(m, PeriodicOrbit{w01}, PeriodicOrbit{w10}));
}

TEST_CASE("apply is the shift and a group action") {
    auto sys = golden_mean_system();
    auto pts = sys.enumerate_homoclinic(4);
    REQUIRE(pts.size() > 10);
    for (const auto& x : pts) {
        CHECK(sys.apply(x, 0) == x);
        CHECK(sys.apply(sys.apply(x, 3), -5) == sys.apply(x, -2));
        // shifted left by one: symbol j of the image is symbol j+1 of x
        auto y = sys.apply(x, 1);
        for (int j = -8; j <= 8; ++j) CHECK(sys.sym(y, j) == sys.sym(x, j + 1));
    }
}

TEST_CASE("metric matches the direct-comparison oracle") {
    auto sys = golden_mean_system();
    auto pts = sys.enumerate_homoclinic(6);
    SplitMix64 rng(12345);
    for (int trial = 0; trial < 500; ++trial) {
        const auto& x = pts[rng.below(pts.size())];
        const auto& y = pts[rng.below(pts.size())];
        double d = sys.dist(x, y);
        double o = oracle_dist(sys, x, y);
        CHECK(d == o);
        CHECK(sys.dist(x, x) == 0.0);
    }
}

TEST_CASE("spec metric example: agreement exactly on [-3,3] gives 1/8") {
    auto sys = golden_mean_system();
    // same tails and zero center on [-4,5), except y carries 1s at -4 and +4
    auto x = sys.make_point(1, -4, Word(9, 0), 5, 0);
    auto y = sys.make_point(1, -4, Word("\1\0\0\0\0\0\0\0\1", 9), 5, 0);
    REQUIRE(sys.point_admissible(x));
    REQUIRE(sys.point_admissible(y));
    for (int i = -3; i <= 3; ++i) CHECK(sys.sym(x, i) == sys.sym(y, i));
    CHECK(sys.sym(x, -4) != sys.sym(y, -4));
    CHECK(sys.sym(x, 4) != sys.sym(y, 4));
    CHECK(sys.dist(x, y) == 0.125);
}

TEST_CASE("bracket is the splice, undefined beyond eps_x") {
    auto full = make_sft({{1, 1}, {1, 1}});
    PeriodicOrbit P{Word(1, 0)};
    PeriodicOrbit Q{Word(1, 1)};
    SftSystem sys(full, P, Q);
    // x: 1-tail then all 0 from index -10 onward. y agrees with x on [-1,1]
    // and carries 1s on 2 <= |i| <= 10, so d(x,y) = 1/2 = eps_x.
    auto x = sys.make_point(0, -10, Word(10, 0), 0, 0);
    Word wy(21, 1); // positions -10..10
    wy[8] = wy[9] = wy[10] = wy[11] = wy[12] = 0;
    auto y = sys.make_point(0, -10, wy, 11, 0);
    REQUIRE(sys.dist(x, y) <= 0.5);
    auto z = sys.bracket(x, y);
    REQUIRE(z.has_value());
    for (int i = 0; i <= 32; ++i) CHECK(sys.sym(*z, i) == sys.sym(x, i));
    for (int i = -32; i <= 0; ++i) CHECK(sys.sym(*z, i) == sys.sym(y, i));
    // distant pair: x disagrees with phi^5(x) at 0
    auto far = sys.apply(x, -6);
    if (sys.dist(x, far) > 0.5) CHECK(!sys.bracket(x, far).has_value());
}

TEST_CASE("bracket axioms B1-B4 on 1000 definable triples") {
    auto sys = golden_mean_system();
    auto pts = sys.enumerate_homoclinic(6);
    SplitMix64 rng(777);

    // Build a point sharing x's symbols on [-1,1] with the future of a and
    // the past of b. All brackets among such triples are defined.
    auto weave = [&](const BiSequence& x, const BiSequence& a,
                     const BiSequence& b) -> std::optional<BiSequence> {
        std::int64_t L = std::min<std::int64_t>(b.left_cut, -2);
        std::int64_t R = std::max<std::int64_t>(a.right_cut, 3);
        Word mid;
        for (std::int64_t i = L; i < R; ++i) {
            int s = (i >= 2) ? sys.sym(a, i) : (i >= -1 ? sys.sym(x, i) : sys.sym(b, i));
            mid.push_back(static_cast<char>(s));
        }
        BiSequence cand;
        cand.left_phase = mod_pos(L - b.left_cut + b.left_phase, sys.Q.length());
        cand.right_phase = mod_pos(R - a.right_cut + a.right_phase, sys.P.length());
        cand.left_cut = L;
        cand.right_cut = R;
        cand.center = mid;
        if (!sys.point_admissible(cand)) return std::nullopt;
        return sys.canonicalize(cand);
    };

    int checked = 0;
    while (checked < 1000) {
        const auto& x = pts[rng.below(pts.size())];
        auto y = weave(x, pts[rng.below(pts.size())], pts[rng.below(pts.size())]);
        auto z = weave(x, pts[rng.below(pts.size())], pts[rng.below(pts.size())]);
        if (!y || !z) continue;

        // B1
        REQUIRE(*sys.bracket(x, x) == x);
        // B2: [x,[y,z]] = [x,z]
        auto yz = sys.bracket(*y, *z);
        REQUIRE(yz.has_value());
        auto lhs2 = sys.bracket(x, *yz);
        auto rhs2 = sys.bracket(x, *z);
        REQUIRE((lhs2 && rhs2));
        CHECK(*lhs2 == *rhs2);
        // B3: [[x,y],z] = [x,z]
        auto xy = sys.bracket(x, *y);
        REQUIRE(xy.has_value());
        auto lhs3 = sys.bracket(*xy, *z);
        REQUIRE(lhs3.has_value());
        CHECK(*lhs3 == *rhs2);
        // B4: phi[x,y] = [phi x, phi y] when both sides defined
        auto fx = sys.apply(x, 1);
        auto fy = sys.apply(*y, 1);
        auto rhs4 = sys.bracket(fx, fy);
        if (rhs4) CHECK(sys.apply(*xy, 1) == *rhs4);
        ++checked;
    }
}

TEST_CASE("C1/C2 contraction is exact on local stable/unstable sets") {
    auto sys = golden_mean_system();
    auto pts = sys.enumerate_homoclinic(6);
    SplitMix64 rng(4242);
    int stable_checked = 0, unstable_checked = 0;
    for (int trial = 0; trial < 20000 && (stable_checked < 300 || unstable_checked < 300); ++trial) {
        const auto& y = pts[rng.below(pts.size())];
        const auto& z = pts[rng.below(pts.size())];
        if (y == z) continue;
        double d = sys.dist(y, z);
        if (d > sys.eps_x_value()) continue;
        auto bzy = sys.bracket(z, y);
        auto byz = sys.bracket(y, z);
        if (bzy && *bzy == y) { // z in local stable set of y
            double d1 = sys.dist(sys.apply(y, 1), sys.apply(z, 1));
            CHECK(d1 <= d / sys.lambda() + 1e-18);
            CHECK(d1 == d / sys.lambda()); // exact halving for base 2
            ++stable_checked;
        }
        if (byz && *byz == y) { // z in local unstable set of y
            double d1 = sys.dist(sys.apply(y, -1), sys.apply(z, -1));
            CHECK(d1 == d / sys.lambda());
            ++unstable_checked;
        }
    }
    CHECK(stable_checked >= 300);
    CHECK(unstable_checked >= 300);
}

TEST_CASE("local stable/unstable predicates") {
    auto sys = golden_mean_system();
    auto pts = sys.enumerate_homoclinic(5);
    for (const auto& x : pts) {
        CHECK(in_local_stable(sys, x, x, sys.eps_x_value()));
        CHECK(in_local_unstable(sys, x, x, sys.eps_x_value()));
    }
    // base all-0-future point; p agrees with base on i >= -5 only
    auto base = sys.make_point(0, -2, Word(2, 0), 0, 0);
    BiSequence p = base;
    p.left_cut = -6;
    p.right_cut = -4;
    p.center = Word(2, 0);
    p.center[1] = 0;
    p = sys.make_point(1, -6, Word("\0\0\0\0\0\0", 6), 0, 0);
    // p and base share all symbols from -5 upward by construction
    bool shares = true;
    for (int i = -5; i <= 16; ++i) shares = shares && (sys.sym(p, i) == sys.sym(base, i));
    if (shares && !(p == base)) {
        CHECK(in_local_stable(sys, base, p, sys.eps_x_value()));
        CHECK(!in_local_unstable(sys, base, p, sys.eps_x_value()));
    }
}

TEST_CASE("enumeration: determinism, prefix monotonicity, no duplicates") {
    auto sys = golden_mean_system();
    auto a = sys.enumerate_homoclinic(5);
    auto b = sys.enumerate_homoclinic(5);
    CHECK(a == b);
    auto c = sys.enumerate_homoclinic(6);
    REQUIRE(c.size() > a.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == c[i]);
    std::set<BiSequence> uniq(a.begin(), a.end());
    CHECK(uniq.size() == a.size());
    for (const auto& x : a) {
        CHECK(sys.point_admissible(x));
        CHECK(sys.canonicalize(x) == x);
    }
}

TEST_CASE("bracket closure of the homoclinic set, exhaustive at cap 4") {
    auto sys = golden_mean_system();
    auto pts = sys.enumerate_homoclinic(4);
    auto big = sys.enumerate_homoclinic(10);
    std::set<BiSequence> all(big.begin(), big.end());
    int defined = 0;
    for (const auto& x : pts) {
        for (const auto& y : pts) {
            auto z = sys.bracket(x, y);
            if (!z) continue;
            ++defined;
            CHECK(sys.point_admissible(*z));
            CHECK(all.count(*z) == 1);
        }
    }
    CHECK(defined > 100);
}

TEST_CASE("apply maps the homoclinic set bijectively into the next cap") {
    auto sys = golden_mean_system();
    auto pts = sys.enumerate_homoclinic(4);
    auto next = sys.enumerate_homoclinic(5);
    std::set<BiSequence> nextset(next.begin(), next.end());
    std::set<BiSequence> images;
    for (const auto& x : pts) {
        auto y = sys.apply(x, 1);
        CHECK(nextset.count(y) == 1);
        CHECK(images.insert(y).second); // injective
    }
}

TEST_CASE("forward tails approach P, backward tails approach Q, monotone once local") {
    // Contraction only applies after the orbit enters the local stable set of
    // the matching phase, so monotone decay is asserted from that point on.
    auto sys = golden_mean_system();
    auto pts = sys.enumerate_homoclinic(5);
    SplitMix64 rng(99);
    for (int t = 0; t < 50; ++t) {
        const auto& x = pts[rng.below(pts.size())];
        double prev = 1e300;
        bool local = false;
        for (int n = 0; n <= 24; ++n) {
            auto xn = sys.apply(x, n);
            std::int64_t phase = xn.right_phase - xn.right_cut;
            double d = dist_to_periodic(sys, xn, sys.P, phase);
            if (local) {
                CHECK(d <= prev);
                CHECK(d <= 0.5 * prev);
            }
            if (d < sys.eps_x_prime_value()) local = true;
            prev = d;
        }
        CHECK(local);
        CHECK(prev <= std::pow(2.0, -12));
        bool localq = false;
        double prevq = 1e300;
        for (int n = 0; n <= 24; ++n) {
            auto xn = sys.apply(x, -n);
            std::int64_t phase = xn.left_phase - xn.left_cut;
            double d = dist_to_periodic(sys, xn, sys.Q, phase);
            if (localq) CHECK(d <= 0.5 * prevq);
            if (d < sys.eps_x_prime_value()) localq = true;
            prevq = d;
        }
        CHECK(localq);
        CHECK(prevq <= std::pow(2.0, -12));
    }
}

TEST_CASE("orbit signature identifies orbits") {
    auto sys = golden_mean_system();
    auto pts = sys.enumerate_homoclinic(5);
    SplitMix64 rng(31);
    for (int t = 0; t < 200; ++t) {
        const auto& x = pts[rng.below(pts.size())];
        const auto& y = pts[rng.below(pts.size())];
        auto xs = sys.apply(x, static_cast<std::int64_t>(rng.below(9)) - 4);
        CHECK(sys.same_orbit(x, xs));
        bool same = sys.same_orbit(x, y);
        bool truth = false;
        for (int j = -24; j <= 24; ++j) truth = truth || (sys.apply(x, j) == y);
        CHECK(same == truth);
    }
}
