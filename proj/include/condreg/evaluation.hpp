#pragma once

#include <stdexcept>
#include <string>

#include "condreg/model.hpp"
#include "condreg/types.hpp"

namespace condreg {

// No example satisfies the condition, so conditional quantities are undefined.
class EmptyConditionedError : public std::runtime_error {
public:
    EmptyConditionedError()
        : std::runtime_error("no example satisfies the condition (coverage 0)") {}
};

// Empirical versions of the quantities the fitted models promise: coverage,
// conditional sup hit rate, conditional mean squared error.
struct EvalReport {
    double coverage = 0.0;
    double sup_hit_rate = 0.0;
    double cond_mse = 0.0;
    std::size_t n_conditioned = 0;
};

// One ascending-index pass, plain summation; reports are bit-reproducible.
EvalReport evaluate(const ConditionalModel& model, const Dataset& dataset,
                    double epsilon);

std::string format_report(const EvalReport& report);
EvalReport parse_report(const std::string& text);

} // namespace condreg
