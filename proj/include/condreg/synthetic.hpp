#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "condreg/kdnf.hpp"
#include "condreg/types.hpp"

namespace condreg {

// Seedable, splittable random source. All distributions are derived from the
// raw engine output by hand so streams are bit-identical across platforms
// and standard libraries.
class SplitRng {
public:
    static constexpr const char* algorithm_id = "splitmix64+mt19937_64";

    explicit SplitRng(std::uint64_t seed);

    // Independent child stream; does not disturb this stream's state.
    SplitRng split(std::uint64_t stream) const;

    std::uint64_t next_u64() { return eng_(); }
    double uniform01() { return (eng_() >> 11) * 0x1.0p-53; } // [0,1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    bool bernoulli(double p) { return uniform01() < p; }
    bool coin() { return eng_() >> 63; }
    double normal(double mean, double stddev);

private:
    std::uint64_t base_seed_;
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Ground-truth description of a synthetic instance.
struct PlantedSpec {
    std::size_t n = 0, d = 0, k = 1, s = 0;
    KDnf condition{0};        // planted c*
    SparseLinearRule rule;    // planted a*
    double epsilon = 0.0;     // in-condition sup noise (sup) / noise variance (l2)
    double mu_target = 0.5;
    double off_condition_noise = 0.0;
    double norm_bound = 1.0;  // B, l2 instances only
    std::uint64_t seed = 0;

    void validate() const;
};

// Pr[c(x)=1] when every attribute is i.i.d. Bernoulli(p); exact truth-table
// sum for n <= 20, seeded Monte Carlo beyond that.
double condition_mass(const KDnf& c, double p);

// Bernoulli parameter p with condition_mass(c, p) ~= mu_target.
double tune_attribute_bias(const KDnf& c, double mu_target);

// x ~ Bernoulli(p)^n tuned to hit mu_target (rejection on the empirical
// coverage, +-0.05); y uniform in [-1,1]^d; z = <a*,y> plus uniform noise of
// half-width epsilon in-condition, off_condition_noise outside.
Dataset gen_planted_sup(const PlantedSpec& spec, std::size_t m);

// As gen_planted_sup, but y is scaled so ||y||_2 <= B, in-condition noise is
// Gaussian with variance epsilon, and z is truncated into [-B,B].
Dataset gen_planted_l2(const PlantedSpec& spec, std::size_t m);

// Labeled (x, b) stream with Pr[b=1 | c(x)=1] = 1 and base rate elsewhere.
std::vector<LabeledExample> gen_planted_labeled(const KDnf& condition,
                                                double mu_target, double base_rate,
                                                std::size_t m, std::uint64_t seed);

// Maps (x,1) -> (x, y=(1), z=0) and (x,0) -> (x, y=(1), z=coin) so that a
// sup-norm fit with epsilon = 1/3 recovers the condition.
Dataset reduction_sampler(const std::vector<LabeledExample>& labeled,
                          std::uint64_t seed);

} // namespace condreg
