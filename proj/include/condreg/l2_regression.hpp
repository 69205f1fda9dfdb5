#pragma once

#include <optional>
#include <vector>

#include "condreg/kdnf.hpp"
#include "condreg/smallsolve.hpp"
#include "condreg/types.hpp"

namespace condreg {

struct DerpParams {
    double epsilon = 0.0; // >= 0; the acceptance threshold is 4*mu*epsilon
    double mu = 0.0;      // lower end of the assumed mass bracket [mu, 2*mu]
    double B = 1.0;       // norm bound on the fitted rule
    std::size_t k = 1;
    PgdConfig pgd;

    void validate() const;
};

// One scanned term: its dense fitted rule, match count, and the 1/m-scaled
// squared error the acceptance test uses.
struct DerpCandidate {
    Term term;
    std::vector<double> rule;       // length d
    std::size_t matched = 0;        // |S(T)|
    double scaled_sq_error = 0.0;   // (1/m) * sum_{j in S(T)} (<a,y_j> - z_j)^2
};

struct DerpOptions {
    unsigned threads = 1;
};

// Scans every exactly-k term in canonical order, fits a norm-constrained
// least-squares rule on each term's matched set, and returns the passing
// candidate with the most matches (ties: first in canonical order).
// Terms matching nothing are not candidates. Returns nullopt when no term
// passes scaled_sq_error <= 4*mu*epsilon.
std::optional<DerpCandidate> derp(const Dataset& dataset, const DerpParams& params,
                                  const DerpOptions& options = {});

struct MuSearchResult {
    DerpCandidate candidate;
    double mu = 0.0;
};

// Geometric grid descent over mu = 1, 1/2, 1/4, ... down to mu_floor; a grid
// point succeeds when derp returns a candidate whose match count reaches
// mu*m, mirroring the assumed bracket empirically. Returns the result from
// the largest succeeding mu.
std::optional<MuSearchResult> derp_mu_search(const Dataset& dataset,
                                             const DerpParams& base_params,
                                             double mu_floor,
                                             const DerpOptions& options = {});

// ceil(8 * (B^8 n^k / (mu * epsilon)) * (k ln n + ln 1/delta))
std::size_t derp_sample_size(const DerpParams& params, std::size_t n, double delta);

} // namespace condreg
