#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "smalelab/quad.hpp"

using namespace smalelab;

namespace {
Quad q5(long a_num, long a_den, long b_num, long b_den) {
    return Quad(Rat(a_num, a_den), Rat(b_num, b_den), 5);
}
} // namespace

TEST_CASE("field arithmetic in Q(sqrt(5))") {
    Quad phi = q5(1, 2, 1, 2); // golden ratio
    Quad one = Quad::rational(Rat(1), 5);

    // phi^2 = phi + 1
    CHECK(phi * phi == phi + one);
    // phi * (phi - 1) = 1
    CHECK(phi * (phi - one) == one);
    CHECK(inverse(phi) == phi - one);
}

TEST_CASE("exact sign for mixed-sign combinations") {
    // 9/4 - sqrt(5) > 0 since 81/16 > 5
    CHECK(sign(q5(9, 4, -1, 1)) == 1);
    // 2 - sqrt(5) < 0
    CHECK(sign(q5(2, 1, -1, 1)) == -1);
    // sqrt(5) - 9/4 < 0
    CHECK(sign(q5(-9, 4, 1, 1)) == -1);
    CHECK(sign(q5(0, 1, 0, 1)) == 0);
    // tiny positive: phi^-20 = a + b sqrt5 with enormous cancellation
    Quad phi = q5(1, 2, 1, 2);
    Quad x = Quad::rational(Rat(1), 5);
    for (int i = 0; i < 20; ++i) x = x * inverse(phi);
    CHECK(sign(x) == 1);
    CHECK(to_double(x) == doctest::Approx(std::pow((1.0 + std::sqrt(5.0)) / 2, -20)).epsilon(1e-12));
}

TEST_CASE("floor and frac") {
    Quad phi = q5(1, 2, 1, 2);
    CHECK(floor_quad(phi) == 1);
    CHECK(floor_quad(-phi) == -2);
    Quad f = frac_quad(-phi);
    CHECK(sign(f) >= 0);
    CHECK(f < Quad::rational(Rat(1), 5));
    // frac(-phi) = 2 - phi
    CHECK(f == Quad::rational(Rat(2), 5) - phi);
}

TEST_CASE("rat_from_double is lossless on dyadics") {
    CHECK(rat_from_double(0.375) == Rat(3, 8));
    CHECK(rat_from_double(-1.0 / 1024) == Rat(-1, 1024));
    CHECK(to_double(rat_from_double(0.1)) == 0.1);
}

TEST_CASE("interval helpers") {
    QInterval a{q5(0, 1, 0, 1), q5(1, 1, 0, 1)};
    QInterval b{q5(1, 2, 0, 1), q5(3, 1, 0, 1)};
    auto c = intersect(a, b);
    CHECK(c.lo == q5(1, 2, 0, 1));
    CHECK(c.hi == q5(1, 1, 0, 1));
    // negative scaling swaps endpoints
    auto s = scale(a, q5(-2, 1, 0, 1));
    CHECK(s.lo == q5(-2, 1, 0, 1));
    CHECK(s.hi == q5(0, 1, 0, 1));
    CHECK(!c.empty());
    CHECK(intersect(QInterval{q5(2, 1, 0, 1), q5(3, 1, 0, 1)}, a).empty());
}
