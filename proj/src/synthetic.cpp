#include "condreg/synthetic.hpp"

#include <cmath>
#include <stdexcept>

namespace condreg {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t st = a;
    std::uint64_t h = splitmix64(st);
    st = h ^ b;
    return splitmix64(st);
}

constexpr int kMaxDatasetAttempts = 100;
constexpr int kMaxTruncationTries = 10000;

} // namespace

SplitRng::SplitRng(std::uint64_t seed) : base_seed_(seed) {
    std::uint64_t st = seed;
    eng_.seed(splitmix64(st));
}

SplitRng SplitRng::split(std::uint64_t stream) const {
    return SplitRng(mix_seed(base_seed_, stream));
}

double SplitRng::normal(double mean, double stddev) {
    if (have_spare_) {
        have_spare_ = false;
        return mean + stddev * spare_;
    }
    // Box-Muller on our own uniforms; u1 in (0,1].
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mean + stddev * r * std::cos(theta);
}

void PlantedSpec::validate() const {
    if (condition.width() != n)
        throw std::invalid_argument("planted condition width != n");
    if (condition.empty())
        throw std::invalid_argument("planted condition has no terms");
    for (const auto& t : condition.terms())
        if (t.literal_count() != k)
            throw std::invalid_argument("planted condition term is not exactly-k");
    rule.validate(d);
    if (rule.support.size() > s)
        throw std::invalid_argument("planted rule exceeds sparsity s");
    if (!(mu_target > 0.0 && mu_target <= 1.0))
        throw std::invalid_argument("mu_target must be in (0,1]");
    if (epsilon < 0.0 || off_condition_noise < 0.0)
        throw std::invalid_argument("noise scales must be >= 0");
    if (!(norm_bound > 0.0)) throw std::invalid_argument("norm bound must be > 0");
}

double condition_mass(const KDnf& c, double p) {
    const std::size_t n = c.width();
    if (n <= 20) {
        double mass = 0.0;
        for (std::uint64_t bits = 0; bits < (1ULL << n); ++bits) {
            BitVec x(n);
            for (std::size_t i = 0; i < n; ++i)
                if ((bits >> i) & 1ULL) x.set(i);
            if (!eval_kdnf(c, x)) continue;
            int ones = std::popcount(bits);
            mass += std::pow(p, ones) * std::pow(1.0 - p, static_cast<int>(n) - ones);
        }
        return mass;
    }
    // Monte Carlo fallback for wide attribute spaces; fixed internal seed.
    SplitRng rng(0x6d61737345737469ULL);
    const std::size_t trials = 200000;
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        BitVec x(n);
        for (std::size_t i = 0; i < n; ++i)
            if (rng.bernoulli(p)) x.set(i);
        if (eval_kdnf(c, x)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

double tune_attribute_bias(const KDnf& c, double mu_target) {
    // Coarse scan, then bisection inside the best bracketing cell. The mass
    // is continuous in p but not monotone for mixed-polarity DNFs.
    const int grid = 512;
    double best_p = 0.5, best_err = 2.0;
    double prev_f = condition_mass(c, 0.0) - mu_target;
    double lo = -1.0, hi = -1.0;
    if (std::abs(prev_f) < best_err) {
        best_err = std::abs(prev_f);
        best_p = 0.0;
    }
    for (int i = 1; i <= grid; ++i) {
        double p = static_cast<double>(i) / grid;
        double f = condition_mass(c, p) - mu_target;
        if (std::abs(f) < best_err) {
            best_err = std::abs(f);
            best_p = p;
        }
        if (lo < 0.0 && ((prev_f <= 0.0 && f >= 0.0) || (prev_f >= 0.0 && f <= 0.0))) {
            lo = static_cast<double>(i - 1) / grid;
            hi = p;
        }
        prev_f = f;
    }
    if (lo >= 0.0) {
        double flo = condition_mass(c, lo) - mu_target;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = condition_mass(c, mid) - mu_target;
            if ((flo <= 0.0) == (fm <= 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        double p = 0.5 * (lo + hi);
        if (std::abs(condition_mass(c, p) - mu_target) < best_err) return p;
    }
    if (best_err > 0.04)
        throw std::invalid_argument("mu_target unreachable for this condition");
    return best_p;
}

namespace {

BitVec draw_x(SplitRng& rng, std::size_t n, double p) {
    BitVec x(n);
    for (std::size_t i = 0; i < n; ++i)
        if (rng.bernoulli(p)) x.set(i);
    return x;
}

} // namespace

Dataset gen_planted_sup(const PlantedSpec& spec, std::size_t m) {
    spec.validate();
    const double p = tune_attribute_bias(spec.condition, spec.mu_target);
    SplitRng rng(spec.seed);

    for (int attempt = 0; attempt < kMaxDatasetAttempts; ++attempt) {
        Dataset ds(spec.n, spec.d);
        std::size_t in_count = 0;
        for (std::size_t j = 0; j < m; ++j) {
            Example e;
            e.x = draw_x(rng, spec.n, p);
            e.y.resize(spec.d);
            for (auto& v : e.y) v = rng.uniform(-1.0, 1.0);
            const bool in_cond = eval_kdnf(spec.condition, e.x);
            in_count += in_cond;
            const double half_width = in_cond ? spec.epsilon : spec.off_condition_noise;
            e.z = spec.rule.predict(e.y) + rng.uniform(-half_width, half_width);
            ds.add(e);
        }
        double empirical = static_cast<double>(in_count) / static_cast<double>(m);
        if (std::abs(empirical - spec.mu_target) <= 0.05) {
            ds.meta = {SplitRng::algorithm_id, spec.seed};
            return ds;
        }
    }
    throw std::runtime_error("could not hit mu_target empirically; condition mass unreachable");
}

Dataset gen_planted_l2(const PlantedSpec& spec, std::size_t m) {
    spec.validate();
    const double B = spec.norm_bound;
    double rule_norm = 0.0;
    for (double c : spec.rule.coeffs) rule_norm += c * c;
    if (std::sqrt(rule_norm) > B)
        throw std::invalid_argument("planted rule violates the norm bound B");

    const double p = tune_attribute_bias(spec.condition, spec.mu_target);
    const double y_scale = B / std::sqrt(static_cast<double>(spec.d));
    const double noise_sd = std::sqrt(spec.epsilon);
    SplitRng rng(spec.seed);

    for (int attempt = 0; attempt < kMaxDatasetAttempts; ++attempt) {
        Dataset ds(spec.n, spec.d);
        std::size_t in_count = 0;
        for (std::size_t j = 0; j < m; ++j) {
            Example e;
            e.x = draw_x(rng, spec.n, p);
            e.y.resize(spec.d);
            for (auto& v : e.y) v = y_scale * rng.uniform(-1.0, 1.0);
            const bool in_cond = eval_kdnf(spec.condition, e.x);
            in_count += in_cond;
            const double base = spec.rule.predict(e.y);
            double z;
            int tries = 0;
            do {
                z = in_cond ? base + rng.normal(0.0, noise_sd)
                            : base + rng.uniform(-spec.off_condition_noise,
                                                 spec.off_condition_noise);
                if (++tries > kMaxTruncationTries)
                    throw std::runtime_error("z truncation failed; targets incompatible with B");
            } while (std::abs(z) > B);
            e.z = z;
            ds.add(e);
        }
        double empirical = static_cast<double>(in_count) / static_cast<double>(m);
        if (std::abs(empirical - spec.mu_target) <= 0.05) {
            ds.meta = {SplitRng::algorithm_id, spec.seed};
            // Self-check the promise invariants that hold deterministically.
            for (std::size_t f = 0; f < spec.d; ++f)
                for (double v : ds.y_col(f))
                    if (std::abs(v) > y_scale + 1e-12)
                        throw std::logic_error("generated y exceeds scaling bound");
            return ds;
        }
    }
    throw std::runtime_error("could not hit mu_target empirically; condition mass unreachable");
}

std::vector<LabeledExample> gen_planted_labeled(const KDnf& condition,
                                                double mu_target, double base_rate,
                                                std::size_t m, std::uint64_t seed) {
    const double p = tune_attribute_bias(condition, mu_target);
    SplitRng rng(seed);
    for (int attempt = 0; attempt < kMaxDatasetAttempts; ++attempt) {
        std::vector<LabeledExample> out;
        out.reserve(m);
        std::size_t in_count = 0;
        for (std::size_t j = 0; j < m; ++j) {
            LabeledExample le;
            le.x = draw_x(rng, condition.width(), p);
            bool in_cond = eval_kdnf(condition, le.x);
            in_count += in_cond;
            le.b = in_cond ? true : rng.bernoulli(base_rate);
            out.push_back(std::move(le));
        }
        double empirical = static_cast<double>(in_count) / static_cast<double>(m);
        if (std::abs(empirical - mu_target) <= 0.05) return out;
    }
    throw std::runtime_error("could not hit mu_target empirically; condition mass unreachable");
}

Dataset reduction_sampler(const std::vector<LabeledExample>& labeled,
                          std::uint64_t seed) {
    SplitRng rng(seed);
    std::size_t n = labeled.empty() ? 0 : labeled[0].x.size();
    Dataset ds(n, 1);
    for (const auto& le : labeled) {
        Example e;
        e.x = le.x;
        e.y = {1.0};
        e.z = le.b ? 0.0 : static_cast<double>(rng.coin());
        ds.add(e);
    }
    ds.meta = {SplitRng::algorithm_id, seed};
    return ds;
}

} // namespace condreg
