#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <charconv>
#include <cstdio>
#include <random>

#include "condreg/csv.hpp"

using namespace condreg;

namespace {

BitVec bits_of(std::uint64_t v, std::size_t n) {
    BitVec x(n);
    for (std::size_t i = 0; i < n; ++i)
        if ((v >> i) & 1ULL) x.set(i);
    return x;
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d,
                       std::size_t m) {
    Dataset ds(n, d);
    for (std::size_t j = 0; j < m; ++j) {
        Example e;
        e.x = bits_of(rng(), n);
        e.y.resize(d);
        for (auto& v : e.y) v = ((rng() >> 11) * 0x1.0p-53 - 0.5) * 1e6;
        e.z = ((rng() >> 11) * 0x1.0p-53 - 0.5) * 1e-3;
        ds.add(e);
    }
    return ds;
}

} // namespace

TEST_CASE("header layout") {
    Dataset ds(2, 1);
    Example e;
    e.x = bits_of(0b01, 2);
    e.y = {0.5};
    e.z = -1.25;
    ds.add(e);
    CHECK(dataset_to_csv(ds) == "x0,x1,y0,z\n1,0,0.5,-1.25\n");
}

TEST_CASE("round-trip reproduces the dataset exactly") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 1 + rng() % 6, d = 1 + rng() % 4, m = 1 + rng() % 60;
        Dataset ds = random_dataset(rng, n, d, m);
        Dataset back = dataset_from_csv(dataset_to_csv(ds));
        REQUIRE(back.attr_count() == n);
        REQUIRE(back.feature_count() == d);
        REQUIRE(back.size() == m);
        for (std::size_t j = 0; j < m; ++j) {
            CHECK(back.example(j).x == ds.example(j).x);
            CHECK(back.example(j).y == ds.example(j).y);
            CHECK(back.example(j).z == ds.example(j).z);
        }
        // and re-serialization is byte-identical
        CHECK(dataset_to_csv(back) == dataset_to_csv(ds));
    }
}

TEST_CASE("file round-trip") {
    std::mt19937_64 rng(7);
    Dataset ds = random_dataset(rng, 3, 2, 25);
    const char* path = "csv_test_tmp.csv";
    write_dataset_csv(ds, path);
    Dataset back = read_dataset_csv(path);
    CHECK(dataset_to_csv(back) == dataset_to_csv(ds));
    std::remove(path);
}

TEST_CASE("malformed rows report line and column") {
    try {
        dataset_from_csv("x0,y0,z\n2,0.5,1\n");
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.line == 2);
        CHECK(e.column == 1);
    }
    try {
        dataset_from_csv("x0,y0,z\n1,0.5,1\n0,nope,1\n");
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.line == 3);
        CHECK(e.column == 2);
    }
    // wrong field count
    CHECK_THROWS_AS(dataset_from_csv("x0,y0,z\n1,0.5\n"), CsvError);
    // bad header
    CHECK_THROWS_AS(dataset_from_csv("x0,q0,z\n"), CsvError);
    // x column must be exactly 0/1
    CHECK_THROWS_AS(dataset_from_csv("x0,y0,z\n1.0,0.5,1\n"), CsvError);
}

TEST_CASE("labeled csv round-trip") {
    std::mt19937_64 rng(88);
    std::vector<LabeledExample> rows;
    for (int j = 0; j < 40; ++j)
        rows.push_back({bits_of(rng(), 5), static_cast<bool>(rng() & 1)});
    const char* path = "labeled_test_tmp.csv";
    write_labeled_csv(rows, 5, path);
    std::size_t n = 0;
    auto back = read_labeled_csv(path, n);
    REQUIRE(n == 5);
    REQUIRE(back.size() == rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        CHECK(back[j].x == rows[j].x);
        CHECK(back[j].b == rows[j].b);
    }
    std::remove(path);
}

TEST_CASE("format_double survives parse round-trips") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 1000; ++i) {
        double v = std::bit_cast<double>(rng());
        if (!std::isfinite(v)) continue;
        std::string s = format_double(v);
        double back = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(ec == std::errc());
        REQUIRE(p == s.data() + s.size());
        CHECK(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
    }
}
