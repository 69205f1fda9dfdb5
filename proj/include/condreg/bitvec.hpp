#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace condreg {

// Fixed-width bit vector packed into 64-bit words. Used both for boolean
// attribute vectors (n bits) and for per-example masks over a dataset
// (m bits). Bits past `size()` in the last word are always zero.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t nbits)
        : nbits_(nbits), w_((nbits + 63) / 64, 0ULL) {}

    static BitVec ones(std::size_t nbits) {
        BitVec v(nbits);
        for (auto& word : v.w_) word = ~0ULL;
        v.mask_tail();
        return v;
    }

    std::size_t size() const { return nbits_; }
    std::size_t words() const { return w_.size(); }
    const std::uint64_t* data() const { return w_.data(); }

    bool test(std::size_t i) const {
        return (w_[i >> 6] >> (i & 63)) & 1ULL;
    }
    void set(std::size_t i, bool value = true) {
        if (value)
            w_[i >> 6] |= 1ULL << (i & 63);
        else
            w_[i >> 6] &= ~(1ULL << (i & 63));
    }

    void push_back(bool value) {
        if ((nbits_ & 63) == 0) w_.push_back(0ULL);
        if (value) w_.back() |= 1ULL << (nbits_ & 63);
        ++nbits_;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t word : w_) c += std::popcount(word);
        return c;
    }

    bool none() const {
        for (std::uint64_t word : w_)
            if (word) return false;
        return true;
    }
    bool any() const { return !none(); }

    void clear_all() {
        for (auto& word : w_) word = 0ULL;
    }

    BitVec& operator&=(const BitVec& o) {
        check_same(o);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    BitVec& operator|=(const BitVec& o) {
        check_same(o);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    // this &= ~o
    BitVec& and_not(const BitVec& o) {
        check_same(o);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
        return *this;
    }

    friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
    friend BitVec operator|(BitVec a, const BitVec& b) { return a |= b; }

    bool intersects(const BitVec& o) const {
        check_same(o);
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }
    // Intersection test restricted to words [w0, w1).
    bool intersects_words(const BitVec& o, std::size_t w0, std::size_t w1) const {
        for (std::size_t i = w0; i < w1 && i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }
    // subset: every set bit of *this is set in o.
    bool subset_of(const BitVec& o) const {
        check_same(o);
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    std::uint64_t word(std::size_t i) const { return w_[i]; }
    void or_word(std::size_t i, std::uint64_t bits) { w_[i] |= bits; }

    bool operator==(const BitVec& o) const {
        return nbits_ == o.nbits_ && w_ == o.w_;
    }
    bool operator!=(const BitVec& o) const { return !(*this == o); }

    // Integer-value ordering (most significant word first). Gives the
    // canonical lexicographic-by-bitmask-value order used for terms.
    int compare(const BitVec& o) const {
        check_same(o);
        for (std::size_t i = w_.size(); i-- > 0;) {
            if (w_[i] != o.w_[i]) return w_[i] < o.w_[i] ? -1 : 1;
        }
        return 0;
    }
    bool operator<(const BitVec& o) const { return compare(o) < 0; }

    std::string to_string() const {
        std::string s(nbits_, '0');
        for (std::size_t i = 0; i < nbits_; ++i)
            if (test(i)) s[i] = '1';
        return s;
    }

private:
    void check_same(const BitVec& o) const {
        if (nbits_ != o.nbits_)
            throw std::invalid_argument("BitVec size mismatch");
    }
    void mask_tail() {
        if (nbits_ & 63) w_.back() &= (~0ULL) >> (64 - (nbits_ & 63));
    }

    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> w_;
};

} // namespace condreg
