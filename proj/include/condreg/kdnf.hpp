#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "condreg/bitvec.hpp"
#include "condreg/types.hpp"

namespace condreg {

// Conjunction of literals over n boolean attributes: positive literals in
// `pos`, negated literals in `neg`. pos and neg are disjoint.
struct Term {
    BitVec pos;
    BitVec neg;

    Term() = default;
    Term(BitVec p, BitVec ng);

    std::size_t width() const { return pos.size(); }  // n
    std::size_t literal_count() const { return pos.count() + neg.count(); }

    bool operator==(const Term& o) const { return pos == o.pos && neg == o.neg; }
    // Canonical order: lexicographic by (pos, neg) bitmask values.
    bool operator<(const Term& o) const {
        int c = pos.compare(o.pos);
        return c != 0 ? c < 0 : neg.compare(o.neg) < 0;
    }

    std::string to_string() const;                      // e.g. "x3&!x7"
    static Term parse(const std::string& text, std::size_t n);
};

// Disjunction of terms with set semantics; terms kept sorted canonically.
class KDnf {
public:
    explicit KDnf(std::size_t n) : n_(n) {}
    KDnf(std::size_t n, std::vector<Term> terms);

    std::size_t width() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    bool operator==(const KDnf& o) const = default;

    std::string to_string() const;                      // terms joined by " | "
    static KDnf parse(const std::string& text, std::size_t n);

private:
    std::size_t n_;
    std::vector<Term> terms_;
};

// The DNF over every non-contradictory term of exactly k literals;
// C(n,k) * 2^k terms, a tautology for 1 <= k <= n.
KDnf trivial_kdnf(std::size_t n, std::size_t k);

// 1 iff all positive literals hold and no negated literal does.
bool eval_term(const Term& t, const BitVec& x);

// 1 iff some term is satisfied; the empty DNF is false everywhere.
bool eval_kdnf(const KDnf& c, const BitVec& x);

// Drops every term satisfied by at least one violator.
KDnf eliminate_terms(const KDnf& c, std::span<const BitVec> violators);

// #{j : c(x_j) = 1}
std::size_t coverage_count(const KDnf& c, const Dataset& dataset);

// Per-term match masks over a dataset, built once with bit-parallel column
// ops. Backs the elimination loop in the sup-norm search and S(T) in DERP.
class TermMatcher {
public:
    TermMatcher(const KDnf& c, const Dataset& dataset);

    std::size_t term_count() const { return masks_.size(); }
    const BitVec& mask(std::size_t t) const { return masks_[t]; }
    std::size_t match_count(std::size_t t) const { return counts_[t]; }

    // Union coverage of an arbitrary subset of terms.
    std::size_t union_count(const std::vector<std::uint32_t>& term_ids) const;

private:
    std::size_t m_;
    std::vector<BitVec> masks_;
    std::vector<std::size_t> counts_;
};

} // namespace condreg
