#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "condreg/bitvec.hpp"

using condreg::BitVec;

TEST_CASE("set/test/count across word boundaries") {
    BitVec v(130);
    CHECK(v.none());
    v.set(0);
    v.set(63);
    v.set(64);
    v.set(129);
    CHECK(v.count() == 4);
    CHECK(v.test(63));
    CHECK(v.test(64));
    CHECK_FALSE(v.test(1));
    v.set(63, false);
    CHECK(v.count() == 3);
}

TEST_CASE("ones keeps tail bits clear") {
    for (std::size_t n : {1u, 63u, 64u, 65u, 100u}) {
        BitVec v = BitVec::ones(n);
        CHECK(v.count() == n);
    }
}

TEST_CASE("push_back grows like repeated set") {
    std::mt19937_64 rng(7);
    BitVec a;
    BitVec b(200);
    for (std::size_t i = 0; i < 200; ++i) {
        bool bit = rng() & 1;
        a.push_back(bit);
        b.set(i, bit);
    }
    CHECK(a == b);
}

TEST_CASE("boolean ops agree with per-bit evaluation") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 1 + rng() % 150;
        BitVec a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rng() & 1) a.set(i);
            if (rng() & 1) b.set(i);
        }
        BitVec both = a & b;
        BitVec either = a | b;
        BitVec diff = a;
        diff.and_not(b);
        bool inter = false, subset = true;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(both.test(i) == (a.test(i) && b.test(i)));
            CHECK(either.test(i) == (a.test(i) || b.test(i)));
            CHECK(diff.test(i) == (a.test(i) && !b.test(i)));
            inter |= a.test(i) && b.test(i);
            subset &= !a.test(i) || b.test(i);
        }
        CHECK(a.intersects(b) == inter);
        CHECK(a.subset_of(b) == subset);
    }
}

TEST_CASE("compare orders by integer value") {
    BitVec a(70), b(70);
    a.set(0);
    b.set(69);
    CHECK(a.compare(b) < 0);
    CHECK(b.compare(a) > 0);
    CHECK(a.compare(a) == 0);
    BitVec c(70), d(70);
    c.set(64);
    d.set(63);
    CHECK(d < c);
}

TEST_CASE("intersects_words restricts the range") {
    BitVec a(200), b(200);
    a.set(10);
    b.set(10);
    a.set(150);
    b.set(150);
    CHECK(a.intersects_words(b, 0, 1));
    CHECK_FALSE(a.intersects_words(b, 1, 2));
    CHECK(a.intersects_words(b, 2, 4));
}
