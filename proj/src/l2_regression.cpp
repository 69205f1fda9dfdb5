#include "condreg/l2_regression.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace condreg {

void DerpParams::validate() const {
    if (epsilon < 0.0 || !std::isfinite(epsilon))
        throw std::invalid_argument("epsilon must be >= 0");
    if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must be in (0,1]");
    if (!(B > 0.0) || !std::isfinite(B)) throw std::invalid_argument("B must be > 0");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
}

namespace {

// Gram/linear accumulation over one term's matched set, ascending example
// order so results do not depend on the thread schedule.
QuadraticLsProblem masked_ls_problem(const Dataset& ds, const BitVec& mask) {
    const std::size_t d = ds.feature_count();
    QuadraticLsProblem prob;
    prob.d = d;
    prob.gram.assign(d * d, 0.0);
    prob.lin.assign(d, 0.0);

    std::vector<const double*> cols(d);
    for (std::size_t f = 0; f < d; ++f) cols[f] = ds.y_col(f).data();
    const double* z = ds.z().data();

    std::vector<double> y(d);
    for (std::size_t w = 0; w < mask.words(); ++w) {
        std::uint64_t bits = mask.word(w);
        while (bits) {
            const std::size_t j = w * 64 + std::countr_zero(bits);
            bits &= bits - 1;
            for (std::size_t f = 0; f < d; ++f) y[f] = cols[f][j];
            prob.const_term += z[j] * z[j];
            for (std::size_t p = 0; p < d; ++p) {
                prob.lin[p] += z[j] * y[p];
                for (std::size_t q = p; q < d; ++q) prob.gram[p * d + q] += y[p] * y[q];
            }
        }
    }
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < p; ++q) prob.gram[p * d + q] = prob.gram[q * d + p];
    return prob;
}

double masked_scaled_sq_error(const Dataset& ds, const BitVec& mask,
                              const std::vector<double>& a) {
    const std::size_t d = ds.feature_count();
    std::vector<const double*> cols(d);
    for (std::size_t f = 0; f < d; ++f) cols[f] = ds.y_col(f).data();
    const double* z = ds.z().data();

    double acc = 0.0;
    for (std::size_t w = 0; w < mask.words(); ++w) {
        std::uint64_t bits = mask.word(w);
        while (bits) {
            const std::size_t j = w * 64 + std::countr_zero(bits);
            bits &= bits - 1;
            double pred = 0.0;
            for (std::size_t f = 0; f < d; ++f) pred += a[f] * cols[f][j];
            const double r = pred - z[j];
            acc += r * r;
        }
    }
    return acc / static_cast<double>(ds.size());
}

} // namespace

std::optional<DerpCandidate> derp(const Dataset& dataset, const DerpParams& params,
                                  const DerpOptions& options) {
    params.validate();
    dataset.validate();
    if (dataset.size() == 0) throw std::invalid_argument("dataset is empty");
    if (params.k > dataset.attr_count())
        throw std::invalid_argument("k exceeds attribute count");

    const KDnf trivial = trivial_kdnf(dataset.attr_count(), params.k);
    const TermMatcher matcher(trivial, dataset);
    const double pass_bound = 4.0 * params.mu * params.epsilon;
    const std::size_t n_terms = matcher.term_count();

    struct Local {
        bool found = false;
        std::size_t term_idx = 0;
        DerpCandidate cand;
    };

    std::atomic<std::size_t> next{0};
    std::mutex best_mu;
    Local best;

    auto better = [](std::size_t matched_a, std::size_t idx_a, std::size_t matched_b,
                     std::size_t idx_b) {
        // more matches wins; ties go to the canonically first term
        return matched_a > matched_b || (matched_a == matched_b && idx_a < idx_b);
    };

    auto worker = [&]() {
        Local local;
        while (true) {
            const std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
            if (t >= n_terms) break;
            const BitVec& mask = matcher.mask(t);
            const std::size_t matched = matcher.match_count(t);
            if (matched == 0) continue; // nothing to fit a rule on
            if (local.found &&
                !better(matched, t, local.cand.matched, local.term_idx))
                continue; // cannot improve even if it passes

            QuadraticLsProblem prob = masked_ls_problem(dataset, mask);
            std::vector<double> a = constrained_least_squares(prob, params.B, params.pgd);
            const double err = masked_scaled_sq_error(dataset, mask, a);
            if (err <= pass_bound) {
                local.found = true;
                local.term_idx = t;
                local.cand = DerpCandidate{trivial.terms()[t], std::move(a), matched, err};
            }
        }
        if (local.found) {
            std::lock_guard<std::mutex> g(best_mu);
            if (!best.found || better(local.cand.matched, local.term_idx,
                                      best.cand.matched, best.term_idx)) {
                best.found = true;
                best.term_idx = local.term_idx;
                best.cand = std::move(local.cand);
            }
        }
    };

    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }

    if (!best.found) return std::nullopt;
    return best.cand;
}

std::optional<MuSearchResult> derp_mu_search(const Dataset& dataset,
                                             const DerpParams& base_params,
                                             double mu_floor,
                                             const DerpOptions& options) {
    if (!(mu_floor > 0.0 && mu_floor <= 1.0))
        throw std::invalid_argument("mu_floor must be in (0,1]");

    const double m = static_cast<double>(dataset.size());
    for (double mu = 1.0; mu >= mu_floor * (1.0 - 1e-12); mu *= 0.5) {
        DerpParams p = base_params;
        p.mu = mu;
        auto r = derp(dataset, p, options);
        if (r && static_cast<double>(r->matched) >= mu * m)
            return MuSearchResult{std::move(*r), mu};
    }
    return std::nullopt;
}

std::size_t derp_sample_size(const DerpParams& params, std::size_t n, double delta) {
    params.validate();
    if (!(params.epsilon > 0.0))
        throw std::invalid_argument("epsilon must be > 0 for the sample bound");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("delta must be in (0,1]");
    if (n < 1) throw std::invalid_argument("n must be >= 1");

    const double nk = std::pow(static_cast<double>(n), static_cast<double>(params.k));
    if (nk > 1099511627776.0) // 2^40
        throw std::domain_error("n^k beyond 2^40; parameters out of desk-scale range");

    const double b8 = std::pow(params.B, 8.0);
    const double body = static_cast<double>(params.k) * std::log(static_cast<double>(n)) +
                        std::log(1.0 / delta);
    const double c = 8.0;
    double v = std::ceil(c * (b8 * nk / (params.mu * params.epsilon)) * body);
    if (v > 9e18) throw std::domain_error("sample size overflows; out of desk-scale range");
    return static_cast<std::size_t>(std::max(v, 1.0));
}

} // namespace condreg
