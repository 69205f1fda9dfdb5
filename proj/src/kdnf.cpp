#include "condreg/kdnf.hpp"

#include <algorithm>
#include <stdexcept>

namespace condreg {

Term::Term(BitVec p, BitVec ng) : pos(std::move(p)), neg(std::move(ng)) {
    if (pos.size() != neg.size())
        throw std::invalid_argument("term pos/neg width mismatch");
    if (pos.intersects(neg))
        throw std::invalid_argument("contradictory term: pos and neg overlap");
}

std::string Term::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < width(); ++i) {
        if (!pos.test(i) && !neg.test(i)) continue;
        if (!out.empty()) out += '&';
        if (neg.test(i)) out += '!';
        out += 'x';
        out += std::to_string(i);
    }
    return out.empty() ? "true" : out;
}

Term Term::parse(const std::string& text, std::size_t n) {
    BitVec pos(n), neg(n);
    if (text == "true") return Term(pos, neg);
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('&', start);
        if (end == std::string::npos) end = text.size();
        std::string lit = text.substr(start, end - start);
        bool negated = !lit.empty() && lit[0] == '!';
        if (negated) lit = lit.substr(1);
        if (lit.size() < 2 || lit[0] != 'x')
            throw std::invalid_argument("bad literal: '" + lit + "'");
        std::size_t idx = std::stoul(lit.substr(1));
        if (idx >= n) throw std::invalid_argument("literal index out of range: " + lit);
        if (pos.test(idx) || neg.test(idx))
            throw std::invalid_argument("repeated attribute in term: " + lit);
        (negated ? neg : pos).set(idx);
        if (end == text.size()) break;
        start = end + 1;
    }
    return Term(pos, neg);
}

KDnf::KDnf(std::size_t n, std::vector<Term> terms) : n_(n), terms_(std::move(terms)) {
    for (const auto& t : terms_)
        if (t.width() != n_)
            throw std::invalid_argument("term width does not match DNF width");
    std::sort(terms_.begin(), terms_.end());
    terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
}

std::string KDnf::to_string() const {
    if (terms_.empty()) return "false";
    std::string out;
    for (const auto& t : terms_) {
        if (!out.empty()) out += " | ";
        out += t.to_string();
    }
    return out;
}

KDnf KDnf::parse(const std::string& text, std::size_t n) {
    if (text == "false") return KDnf(n);
    std::vector<Term> terms;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(" | ", start);
        std::size_t len = (end == std::string::npos ? text.size() : end) - start;
        terms.push_back(Term::parse(text.substr(start, len), n));
        if (end == std::string::npos) break;
        start = end + 3;
    }
    return KDnf(n, std::move(terms));
}

KDnf trivial_kdnf(std::size_t n, std::size_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (k > n) throw std::invalid_argument("k must be <= n");

    std::vector<Term> terms;
    // Choose k attributes, then each chosen attribute appears positively or
    // negatively; contradictory terms never arise (one literal per attribute).
    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) combo[i] = i;
    while (true) {
        for (std::uint64_t signs = 0; signs < (1ULL << k); ++signs) {
            BitVec pos(n), neg(n);
            for (std::size_t i = 0; i < k; ++i) {
                if ((signs >> i) & 1ULL)
                    neg.set(combo[i]);
                else
                    pos.set(combo[i]);
            }
            terms.emplace_back(std::move(pos), std::move(neg));
        }
        // next k-combination of [n] in lex order
        std::size_t i = k;
        while (i-- > 0) {
            if (combo[i] + 1 <= n - k + i) {
                ++combo[i];
                for (std::size_t j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
                break;
            }
            if (i == 0) return KDnf(n, std::move(terms));
        }
    }
}

bool eval_term(const Term& t, const BitVec& x) {
    return t.pos.subset_of(x) && !t.neg.intersects(x);
}

bool eval_kdnf(const KDnf& c, const BitVec& x) {
    for (const auto& t : c.terms())
        if (eval_term(t, x)) return true;
    return false;
}

KDnf eliminate_terms(const KDnf& c, std::span<const BitVec> violators) {
    std::vector<Term> kept;
    for (const auto& t : c.terms()) {
        bool hit = false;
        for (const auto& v : violators) {
            if (eval_term(t, v)) {
                hit = true;
                break;
            }
        }
        if (!hit) kept.push_back(t);
    }
    return KDnf(c.width(), std::move(kept));
}

std::size_t coverage_count(const KDnf& c, const Dataset& dataset) {
    if (c.empty() || dataset.size() == 0) return 0;
    TermMatcher matcher(c, dataset);
    BitVec covered(dataset.size());
    for (std::size_t t = 0; t < matcher.term_count(); ++t)
        covered |= matcher.mask(t);
    return covered.count();
}

TermMatcher::TermMatcher(const KDnf& c, const Dataset& dataset)
    : m_(dataset.size()) {
    if (c.width() != dataset.attr_count())
        throw std::invalid_argument("DNF width does not match dataset");
    masks_.reserve(c.term_count());
    counts_.reserve(c.term_count());
    for (const auto& t : c.terms()) {
        BitVec mask = BitVec::ones(m_);
        for (std::size_t i = 0; i < t.width(); ++i) {
            if (t.pos.test(i)) mask &= dataset.x_col(i);
            if (t.neg.test(i)) mask.and_not(dataset.x_col(i));
        }
        counts_.push_back(mask.count());
        masks_.push_back(std::move(mask));
    }
}

std::size_t TermMatcher::union_count(const std::vector<std::uint32_t>& term_ids) const {
    if (term_ids.empty()) return 0;
    BitVec acc(m_);
    for (auto t : term_ids) acc |= masks_[t];
    return acc.count();
}

} // namespace condreg
