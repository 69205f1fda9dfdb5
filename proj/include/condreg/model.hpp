#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "condreg/kdnf.hpp"
#include "condreg/types.hpp"

namespace condreg {

// A fitted (condition, rule) pair. The rule only applies where the condition
// holds; outside of it the model abstains.
struct ConditionalModel {
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t k = 1;
    double epsilon = 0.0;
    AlgorithmKind algorithm = AlgorithmKind::sup_norm;
    KDnf condition{0};
    SparseLinearRule rule;

    bool operator==(const ConditionalModel& o) const = default;

    // <rule, y> when condition(x) = 1, abstain otherwise.
    std::optional<double> predict(const Example& example) const;

    void validate() const;
};

std::string model_to_json(const ConditionalModel& model);
ConditionalModel model_from_json(const std::string& text);

void save_model(const ConditionalModel& model, const std::string& path);
ConditionalModel load_model(const std::string& path);

} // namespace condreg
