#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "condreg/csv.hpp"
#include "condreg/synthetic.hpp"

using namespace condreg;

namespace {

PlantedSpec sup_spec() {
    PlantedSpec spec;
    spec.n = 6;
    spec.d = 4;
    spec.k = 1;
    spec.s = 2;
    spec.condition = KDnf::parse("x2", 6);
    spec.rule = {{0, 3}, {1.2, -0.8}};
    spec.epsilon = 0.05;
    spec.mu_target = 0.3;
    spec.off_condition_noise = 0.6;
    spec.seed = 42;
    return spec;
}

} // namespace

TEST_CASE("split rng streams are deterministic and independent") {
    SplitRng a(9);
    SplitRng b(9);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    SplitRng c = SplitRng(9).split(1);
    SplitRng d = SplitRng(9).split(2);
    bool differ = false;
    for (int i = 0; i < 10; ++i) differ |= c.next_u64() != d.next_u64();
    CHECK(differ);
}

TEST_CASE("condition mass is exact for single literals") {
    KDnf c = KDnf::parse("x0", 4);
    CHECK(condition_mass(c, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    KDnf notc = KDnf::parse("!x0", 4);
    CHECK(condition_mass(notc, 0.3) == doctest::Approx(0.7).epsilon(1e-12));
    // x0 | x1 under independence: 1 - (1-p)^2
    KDnf either = KDnf::parse("x0 | x1", 4);
    CHECK(condition_mass(either, 0.25) == doctest::Approx(1 - 0.75 * 0.75).epsilon(1e-12));
}

TEST_CASE("bias tuning hits the requested mass") {
    for (const char* cond : {"x0", "!x1", "x0&x1", "x0 | !x2&x3"}) {
        KDnf c = KDnf::parse(cond, 5);
        for (double mu : {0.2, 0.35, 0.5}) {
            double p = tune_attribute_bias(c, mu);
            CHECK(std::abs(condition_mass(c, p) - mu) < 1e-6);
        }
    }
}

TEST_CASE("unreachable mass is rejected") {
    // a mixed-polarity term has mass p(1-p) <= 1/4 for every bias
    KDnf c = KDnf::parse("x0&!x1", 3);
    CHECK_THROWS_AS(tune_attribute_bias(c, 0.5), std::invalid_argument);
}

TEST_CASE("gen_planted_sup: zero noise means exact in-condition fits") {
    PlantedSpec spec = sup_spec();
    spec.epsilon = 0.0;
    Dataset ds = gen_planted_sup(spec, 300);
    std::size_t in_count = 0;
    for (std::size_t j = 0; j < ds.size(); ++j) {
        Example e = ds.example(j);
        if (!eval_kdnf(spec.condition, e.x)) continue;
        ++in_count;
        CHECK(e.z == spec.rule.predict(e.y));
    }
    CHECK(in_count > 0);
}

TEST_CASE("gen_planted_sup: noise bounds hold exactly and coverage is near target") {
    PlantedSpec spec = sup_spec();
    Dataset ds = gen_planted_sup(spec, 500);
    std::size_t in_count = 0;
    for (std::size_t j = 0; j < ds.size(); ++j) {
        Example e = ds.example(j);
        double r = std::abs(spec.rule.predict(e.y) - e.z);
        if (eval_kdnf(spec.condition, e.x)) {
            ++in_count;
            CHECK(r <= spec.epsilon);
        } else {
            CHECK(r <= spec.off_condition_noise);
        }
        for (double v : e.y) CHECK(std::abs(v) <= 1.0);
    }
    double emp = double(in_count) / ds.size();
    CHECK(std::abs(emp - spec.mu_target) <= 0.05);
}

TEST_CASE("gen_planted_sup is deterministic in the seed") {
    PlantedSpec spec = sup_spec();
    Dataset a = gen_planted_sup(spec, 200);
    Dataset b = gen_planted_sup(spec, 200);
    CHECK(dataset_to_csv(a) == dataset_to_csv(b));
    spec.seed = 43;
    Dataset c = gen_planted_sup(spec, 200);
    CHECK(dataset_to_csv(a) != dataset_to_csv(c));
}

TEST_CASE("gen_planted_l2: norm bounds hold and conditional MSE is near epsilon") {
    PlantedSpec spec;
    spec.n = 6;
    spec.d = 4;
    spec.k = 1;
    spec.s = 4;
    spec.condition = KDnf::parse("x0", 6);
    spec.rule = {{0, 1, 2, 3}, {0.4, -0.3, 0.2, 0.1}};
    spec.epsilon = 0.01;
    spec.mu_target = 0.3;
    spec.off_condition_noise = 0.8;
    spec.norm_bound = 1.0;
    spec.seed = 7;
    Dataset ds = gen_planted_l2(spec, 20000);

    double mse = 0.0;
    std::size_t in_count = 0;
    for (std::size_t j = 0; j < ds.size(); ++j) {
        Example e = ds.example(j);
        double ynorm = 0.0;
        for (double v : e.y) ynorm += v * v;
        CHECK(std::sqrt(ynorm) <= spec.norm_bound + 1e-12);
        CHECK(std::abs(e.z) <= spec.norm_bound + 1e-12);
        if (eval_kdnf(spec.condition, e.x)) {
            double r = spec.rule.predict(e.y) - e.z;
            mse += r * r;
            ++in_count;
        }
    }
    REQUIRE(in_count > 0);
    mse /= double(in_count);
    CHECK(mse <= 2.0 * spec.epsilon); // truncation keeps the variance at or below epsilon
}

TEST_CASE("gen_planted_l2 rejects rules that break the norm bound") {
    PlantedSpec spec;
    spec.n = 3;
    spec.d = 2;
    spec.k = 1;
    spec.s = 2;
    spec.condition = KDnf::parse("x0", 3);
    spec.rule = {{0, 1}, {3.0, 3.0}}; // ||a|| > B
    spec.mu_target = 0.5;
    spec.norm_bound = 1.0;
    CHECK_THROWS_AS(gen_planted_l2(spec, 10), std::invalid_argument);
}

TEST_CASE("gen_planted_l2 seed determinism") {
    PlantedSpec spec;
    spec.n = 4;
    spec.d = 2;
    spec.k = 1;
    spec.s = 1;
    spec.condition = KDnf::parse("x1", 4);
    spec.rule = {{0}, {0.5}};
    spec.epsilon = 0.02;
    spec.mu_target = 0.4;
    spec.off_condition_noise = 0.5;
    spec.norm_bound = 2.0;
    spec.seed = 99;
    CHECK(dataset_to_csv(gen_planted_l2(spec, 150)) ==
          dataset_to_csv(gen_planted_l2(spec, 150)));
}

TEST_CASE("reduction sampler: labels map to the fixed (y, z) encoding") {
    std::vector<LabeledExample> all_ones, all_zeros;
    SplitRng rng(4);
    for (int j = 0; j < 200; ++j) {
        BitVec x(5);
        for (int i = 0; i < 5; ++i)
            if (rng.coin()) x.set(i);
        all_ones.push_back({x, true});
        all_zeros.push_back({x, false});
    }
    Dataset pos = reduction_sampler(all_ones, 1);
    REQUIRE(pos.feature_count() == 1);
    for (std::size_t j = 0; j < pos.size(); ++j) {
        CHECK(pos.y_at(j, 0) == 1.0);
        CHECK(pos.z()[j] == 0.0);
    }
    Dataset neg = reduction_sampler(all_zeros, 1);
    double mean = 0.0;
    for (std::size_t j = 0; j < neg.size(); ++j) {
        CHECK((neg.z()[j] == 0.0 || neg.z()[j] == 1.0));
        mean += neg.z()[j];
    }
    CHECK(neg.size() == all_zeros.size());
}

TEST_CASE("reduction sampler: fair coin for negative labels") {
    std::vector<LabeledExample> zeros(20000, LabeledExample{BitVec(3), false});
    Dataset ds = reduction_sampler(zeros, 12345);
    double mean = 0.0;
    for (double z : ds.z()) mean += z;
    mean /= double(ds.size());
    CHECK(std::abs(mean - 0.5) <= 0.02);
}

TEST_CASE("planted labeled stream honors the promise") {
    KDnf c = KDnf::parse("x0&x2", 6);
    auto rows = gen_planted_labeled(c, 0.3, 0.25, 4000, 6);
    std::size_t in_count = 0;
    for (const auto& r : rows) {
        if (eval_kdnf(c, r.x)) {
            ++in_count;
            CHECK(r.b); // Pr[b=1 | c] = 1
        }
    }
    double emp = double(in_count) / rows.size();
    CHECK(std::abs(emp - 0.3) <= 0.05);
}
