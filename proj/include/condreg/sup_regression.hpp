#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "condreg/kdnf.hpp"
#include "condreg/model.hpp"
#include "condreg/smallsolve.hpp"
#include "condreg/types.hpp"

namespace condreg {

// One vertex candidate of the sup-norm fit: s projected dimensions, s+1
// residual signs, s+1 example indices.
struct CandidateBasis {
    std::vector<std::size_t> dims;         // sorted ascending
    std::vector<int> signs;                // each +-1
    std::vector<std::size_t> example_ids;  // sorted ascending

    void validate(std::size_t d, std::size_t m, std::size_t s) const;
};

struct FitReport {
    ConditionalModel model;
    CandidateBasis basis;
    std::size_t train_coverage = 0;
    std::uint64_t bases_examined = 0; // canonical index of the hit, plus one
};

struct FitOptions {
    unsigned threads = 1;
    // When > 0 and the example-tuple space is larger, scan only this many
    // uniformly sampled tuples. Trades the exhaustive-search guarantee for
    // time; callers should surface a warning.
    std::uint64_t max_bases = 0;
    std::uint64_t subsample_seed = 0;
};

struct InnerCandidate {
    KDnf condition;
    SparseLinearRule rule;
    std::size_t coverage = 0;
};

// Sample count sufficient for the probabilistic guarantees at the given
// parameters: ceil((6/(mu*gamma)) * (s ln max(s,2) + s ln d + n^k + ln 1/delta)).
std::size_t sample_size(const TaskParams& params, std::size_t n, std::size_t d);

// The per-basis pipeline: solve the extremal system, reject on singular /
// negative / oversized eps', then eliminate terms hit by badly-fit examples.
std::optional<InnerCandidate> inner_candidate_eval(const Dataset& dataset,
                                                   const TaskParams& params,
                                                   const CandidateBasis& basis);

// Exhaustive first-hit search over candidate bases in canonical order
// (dims, then signs, then example ids, each lexicographic). Returns the
// first candidate whose post-elimination coverage exceeds (1-gamma/2)*mu*m,
// or nullopt (infeasible). Deterministic for any thread count.
std::optional<FitReport> find_and_eliminate(const Dataset& dataset,
                                            const TaskParams& params,
                                            const FitOptions& options = {});

// Elimination under a fixed rule on fixed dimensions: the k-DNF left after
// removing every term satisfied by an example with residual > epsilon + 1e-9,
// and its coverage. Diagnostic/test surface for the elimination stage.
std::pair<KDnf, std::size_t> condition_from_rule(const Dataset& dataset,
                                                 std::span<const std::size_t> dims,
                                                 std::span<const double> coeffs,
                                                 double epsilon, std::size_t k);

// Lexicographic combination helpers shared by the scanner and its tests.
std::uint64_t combination_count(std::size_t m, std::size_t t); // throws past 2^62
std::vector<std::size_t> unrank_combination(std::size_t m, std::size_t t,
                                            std::uint64_t rank);
bool next_combination(std::vector<std::size_t>& combo, std::size_t m);

} // namespace condreg
