#include "condreg/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace condreg {

std::optional<double> ConditionalModel::predict(const Example& example) const {
    if (example.x.size() != n || example.y.size() != d)
        throw std::invalid_argument("example does not match model dimensions");
    if (!eval_kdnf(condition, example.x)) return std::nullopt;
    return rule.predict(example.y);
}

void ConditionalModel::validate() const {
    if (condition.width() != n)
        throw std::invalid_argument("condition width does not match model n");
    for (const auto& t : condition.terms())
        if (t.literal_count() != k)
            throw std::invalid_argument("condition term is not an exactly-k term");
    rule.validate(d);
    if (!std::isfinite(epsilon)) throw std::invalid_argument("model epsilon not finite");
}

std::string model_to_json(const ConditionalModel& model) {
    nlohmann::json j;
    j["n"] = model.n;
    j["d"] = model.d;
    j["k"] = model.k;
    j["epsilon"] = model.epsilon;
    j["algorithm"] = to_string(model.algorithm);
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : model.condition.terms()) {
        nlohmann::json jt;
        std::vector<std::size_t> pos, neg;
        for (std::size_t i = 0; i < t.width(); ++i) {
            if (t.pos.test(i)) pos.push_back(i);
            if (t.neg.test(i)) neg.push_back(i);
        }
        jt["pos"] = pos;
        jt["neg"] = neg;
        terms.push_back(std::move(jt));
    }
    j["terms"] = std::move(terms);
    j["support"] = model.rule.support;
    j["coeffs"] = model.rule.coeffs;
    return j.dump(2) + "\n";
}

ConditionalModel model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ConditionalModel m;
    m.n = j.at("n").get<std::size_t>();
    m.d = j.at("d").get<std::size_t>();
    m.k = j.at("k").get<std::size_t>();
    m.epsilon = j.at("epsilon").get<double>();
    m.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    std::vector<Term> terms;
    for (const auto& jt : j.at("terms")) {
        BitVec pos(m.n), neg(m.n);
        for (auto i : jt.at("pos").get<std::vector<std::size_t>>()) {
            if (i >= m.n) throw std::invalid_argument("term index out of range");
            pos.set(i);
        }
        for (auto i : jt.at("neg").get<std::vector<std::size_t>>()) {
            if (i >= m.n) throw std::invalid_argument("term index out of range");
            neg.set(i);
        }
        terms.emplace_back(std::move(pos), std::move(neg));
    }
    m.condition = KDnf(m.n, std::move(terms));
    m.rule.support = j.at("support").get<std::vector<std::size_t>>();
    m.rule.coeffs = j.at("coeffs").get<std::vector<double>>();
    m.validate();
    return m;
}

void save_model(const ConditionalModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << model_to_json(model);
    if (!out) throw std::runtime_error("write failed: " + path);
}

ConditionalModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

} // namespace condreg
