#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "condreg/bitvec.hpp"

namespace condreg {

// One observation: boolean attributes x, real features y, real target z.
struct Example {
    BitVec x;
    std::vector<double> y;
    double z = 0.0;
};

// A boolean-labeled attribute vector, the input of the conditional
// distribution search reduction.
struct LabeledExample {
    BitVec x;
    bool b = false;
};

struct DatasetMeta {
    std::string rng;      // generator algorithm identifier, if synthetic
    std::uint64_t seed = 0;
};

// Columnar sample store: x bit-packed per attribute, y per feature column.
// Term evaluation and dimension projection are the hot loops, so both are
// laid out for sequential scans. Immutable once filled.
class Dataset {
public:
    Dataset(std::size_t n_attrs, std::size_t d_feats);

    void add(const Example& e);
    static Dataset from_examples(std::size_t n, std::size_t d,
                                 const std::vector<Example>& examples);

    std::size_t attr_count() const { return n_; }     // n
    std::size_t feature_count() const { return d_; }  // d
    std::size_t size() const { return m_; }           // m

    const BitVec& x_col(std::size_t attr) const { return x_cols_[attr]; }
    const std::vector<double>& y_col(std::size_t feat) const { return y_cols_[feat]; }
    const std::vector<double>& z() const { return z_; }

    bool x_at(std::size_t example, std::size_t attr) const {
        return x_cols_[attr].test(example);
    }
    double y_at(std::size_t example, std::size_t feat) const {
        return y_cols_[feat][example];
    }

    Example example(std::size_t j) const;

    // Throws if any stored value is non-finite or sizes are inconsistent.
    void validate() const;

    DatasetMeta meta;

private:
    std::size_t n_, d_, m_ = 0;
    std::vector<BitVec> x_cols_;
    std::vector<std::vector<double>> y_cols_;
    std::vector<double> z_;
};

// Sparse linear predictor <a, y> with support indices into [d].
struct SparseLinearRule {
    std::vector<std::size_t> support;  // sorted, distinct
    std::vector<double> coeffs;        // aligned with support

    double predict(const std::vector<double>& y) const;
    void validate(std::size_t d) const;

    bool operator==(const SparseLinearRule& o) const = default;
};

enum class AlgorithmKind { sup_norm, l2 };

std::string to_string(AlgorithmKind a);
AlgorithmKind algorithm_from_string(const std::string& s);

// Shared task parameters for the fitting algorithms.
struct TaskParams {
    double epsilon = 0.0;     // target fit
    double mu = 0.0;          // condition mass lower bound
    double gamma = 0.0;       // slack, in (0, 1/2]
    double delta = 0.0;       // failure probability
    std::size_t sparsity = 0; // s
    std::size_t k = 1;        // term size
    double norm_bound = 1.0;  // B, l2 tasks only

    void validate() const;
};

} // namespace condreg
