#include "condreg/evaluation.hpp"

#include <charconv>
#include <cmath>

#include "condreg/csv.hpp"

namespace condreg {

EvalReport evaluate(const ConditionalModel& model, const Dataset& dataset,
                    double epsilon) {
    if (model.n != dataset.attr_count() || model.d != dataset.feature_count())
        throw std::invalid_argument("model does not match dataset dimensions");

    // Bit-parallel coverage mask, then a single ascending pass over the
    // conditioned examples.
    TermMatcher matcher(model.condition, dataset);
    BitVec covered(dataset.size());
    for (std::size_t t = 0; t < matcher.term_count(); ++t) covered |= matcher.mask(t);

    const std::size_t m = dataset.size();
    std::size_t n_conditioned = 0, hits = 0;
    double sq_sum = 0.0;
    std::vector<double> y(dataset.feature_count());
    for (std::size_t j = 0; j < m; ++j) {
        if (!covered.test(j)) continue;
        ++n_conditioned;
        for (std::size_t f = 0; f < y.size(); ++f) y[f] = dataset.y_at(j, f);
        double r = model.rule.predict(y) - dataset.z()[j];
        if (std::abs(r) <= epsilon) ++hits;
        sq_sum += r * r;
    }
    if (n_conditioned == 0) throw EmptyConditionedError();

    EvalReport rep;
    rep.n_conditioned = n_conditioned;
    rep.coverage = static_cast<double>(n_conditioned) / static_cast<double>(m);
    rep.sup_hit_rate = static_cast<double>(hits) / static_cast<double>(n_conditioned);
    rep.cond_mse = sq_sum / static_cast<double>(n_conditioned);
    return rep;
}

std::string format_report(const EvalReport& report) {
    std::string out;
    out += "coverage " + format_double(report.coverage) + "\n";
    out += "sup_hit_rate " + format_double(report.sup_hit_rate) + "\n";
    out += "cond_mse " + format_double(report.cond_mse) + "\n";
    out += "n_conditioned " + std::to_string(report.n_conditioned) + "\n";
    return out;
}

EvalReport parse_report(const std::string& text) {
    EvalReport rep;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        std::size_t sp = line.find(' ');
        if (sp == std::string::npos) throw std::runtime_error("bad report line: " + line);
        std::string key = line.substr(0, sp), val = line.substr(sp + 1);
        double v;
        auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
        if (ec != std::errc() || p != val.data() + val.size())
            throw std::runtime_error("bad report value: " + line);
        if (key == "coverage")
            rep.coverage = v;
        else if (key == "sup_hit_rate")
            rep.sup_hit_rate = v;
        else if (key == "cond_mse")
            rep.cond_mse = v;
        else if (key == "n_conditioned")
            rep.n_conditioned = static_cast<std::size_t>(v);
        else
            throw std::runtime_error("unknown report key: " + key);
    }
    return rep;
}

} // namespace condreg
