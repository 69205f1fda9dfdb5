#include "condreg/types.hpp"

#include <cmath>
#include <stdexcept>

namespace condreg {

Dataset::Dataset(std::size_t n_attrs, std::size_t d_feats)
    : n_(n_attrs), d_(d_feats), x_cols_(n_attrs), y_cols_(d_feats) {}

void Dataset::add(const Example& e) {
    if (e.x.size() != n_)
        throw std::invalid_argument("example x has wrong attribute count");
    if (e.y.size() != d_)
        throw std::invalid_argument("example y has wrong feature count");
    for (std::size_t i = 0; i < n_; ++i) x_cols_[i].push_back(e.x.test(i));
    for (std::size_t i = 0; i < d_; ++i) y_cols_[i].push_back(e.y[i]);
    z_.push_back(e.z);
    ++m_;
}

Dataset Dataset::from_examples(std::size_t n, std::size_t d,
                               const std::vector<Example>& examples) {
    Dataset ds(n, d);
    for (const auto& e : examples) ds.add(e);
    return ds;
}

Example Dataset::example(std::size_t j) const {
    Example e;
    e.x = BitVec(n_);
    for (std::size_t i = 0; i < n_; ++i)
        if (x_cols_[i].test(j)) e.x.set(i);
    e.y.resize(d_);
    for (std::size_t i = 0; i < d_; ++i) e.y[i] = y_cols_[i][j];
    e.z = z_[j];
    return e;
}

void Dataset::validate() const {
    for (const auto& col : x_cols_)
        if (col.size() != m_) throw std::logic_error("ragged x column");
    for (const auto& col : y_cols_) {
        if (col.size() != m_) throw std::logic_error("ragged y column");
        for (double v : col)
            if (!std::isfinite(v))
                throw std::invalid_argument("non-finite y value");
    }
    if (z_.size() != m_) throw std::logic_error("ragged z column");
    for (double v : z_)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite z value");
}

double SparseLinearRule::predict(const std::vector<double>& y) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) acc += coeffs[i] * y[support[i]];
    return acc;
}

void SparseLinearRule::validate(std::size_t d) const {
    if (support.size() != coeffs.size())
        throw std::invalid_argument("rule support/coeffs length mismatch");
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] >= d) throw std::invalid_argument("rule support index out of range");
        if (i > 0 && support[i] <= support[i - 1])
            throw std::invalid_argument("rule support not sorted/distinct");
        if (!std::isfinite(coeffs[i]))
            throw std::invalid_argument("rule coefficient not finite");
    }
}

std::string to_string(AlgorithmKind a) {
    return a == AlgorithmKind::sup_norm ? "sup-norm" : "l2";
}

AlgorithmKind algorithm_from_string(const std::string& s) {
    if (s == "sup-norm") return AlgorithmKind::sup_norm;
    if (s == "l2") return AlgorithmKind::l2;
    throw std::invalid_argument("unknown algorithm tag: " + s);
}

void TaskParams::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("epsilon must be > 0");
    if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must be in (0,1]");
    if (!(gamma > 0.0 && gamma <= 0.5))
        throw std::invalid_argument("gamma must be in (0,1/2]");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must be in (0,1)");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(norm_bound > 0.0)) throw std::invalid_argument("norm bound must be > 0");
}

} // namespace condreg
