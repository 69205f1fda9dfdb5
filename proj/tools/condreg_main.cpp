#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "condreg/csv.hpp"
#include "condreg/evaluation.hpp"
#include "condreg/kdnf.hpp"
#include "condreg/l2_regression.hpp"
#include "condreg/model.hpp"
#include "condreg/sup_regression.hpp"
#include "condreg/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

std::vector<std::size_t> parse_index_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= text.size() && !text.empty()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        out.push_back(std::stoul(text.substr(start, end - start)));
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size() && !text.empty()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        out.push_back(std::stod(text.substr(start, end - start)));
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

struct GenerateArgs {
    std::string out;
    std::string kind = "sup";
    std::size_t n = 0, d = 0, k = 1, s = 0, m = 0;
    std::string condition;
    std::string support, coeffs;
    double epsilon = 0.0, mu = 0.5, off_noise = 0.0, norm_bound = 1.0;
    std::uint64_t seed = 0;
};

int run_generate(const GenerateArgs& a) {
    condreg::PlantedSpec spec;
    spec.n = a.n;
    spec.d = a.d;
    spec.k = a.k;
    spec.s = a.s;
    spec.condition = condreg::KDnf::parse(a.condition, a.n);
    spec.rule.support = parse_index_list(a.support);
    spec.rule.coeffs = parse_double_list(a.coeffs);
    spec.epsilon = a.epsilon;
    spec.mu_target = a.mu;
    spec.off_condition_noise = a.off_noise;
    spec.norm_bound = a.norm_bound;
    spec.seed = a.seed;

    condreg::Dataset ds = a.kind == "l2" ? condreg::gen_planted_l2(spec, a.m)
                                         : condreg::gen_planted_sup(spec, a.m);
    condreg::write_dataset_csv(ds, a.out);
    std::cout << "wrote " << ds.size() << " examples to " << a.out
              << " (rng " << ds.meta.rng << ")\n";
    return kExitOk;
}

struct FitSupArgs {
    std::string in, out;
    condreg::TaskParams params;
    std::uint64_t max_bases = 0;
    unsigned threads = 1;
    std::uint64_t seed = 0;
};

int run_fit_sup(const FitSupArgs& a) {
    condreg::Dataset ds = condreg::read_dataset_csv(a.in);
    condreg::FitOptions opts;
    opts.threads = a.threads;
    opts.max_bases = a.max_bases;
    opts.subsample_seed = a.seed;
    if (a.max_bases > 0)
        std::cerr << "warning: --max-bases subsamples the candidate space; the "
                     "exhaustive-search guarantee no longer applies\n";

    auto report = condreg::find_and_eliminate(ds, a.params, opts);
    if (!report) {
        std::cout << "INFEASIBLE: no candidate basis met the coverage test\n";
        return kExitInfeasible;
    }
    condreg::save_model(report->model, a.out);
    std::cout << "model written to " << a.out << "\n"
              << "condition: " << report->model.condition.to_string() << "\n"
              << "train_coverage: " << report->train_coverage << "/" << ds.size() << "\n"
              << "bases_examined: " << report->bases_examined << "\n";
    return kExitOk;
}

struct FitL2Args {
    std::string in, out;
    condreg::DerpParams params;
    bool mu_search = false;
    double mu_floor = 1.0 / 64.0;
    unsigned threads = 1;
};

int run_fit_l2(const FitL2Args& a) {
    condreg::Dataset ds = condreg::read_dataset_csv(a.in);
    condreg::DerpOptions opts;
    opts.threads = a.threads;

    std::optional<condreg::DerpCandidate> cand;
    double mu_used = a.params.mu;
    if (a.mu_search) {
        auto r = condreg::derp_mu_search(ds, a.params, a.mu_floor, opts);
        if (r) {
            cand = std::move(r->candidate);
            mu_used = r->mu;
        }
    } else {
        cand = condreg::derp(ds, a.params, opts);
    }
    if (!cand) {
        std::cout << "INFEASIBLE: no term passed the error test\n";
        return kExitInfeasible;
    }

    condreg::ConditionalModel model;
    model.n = ds.attr_count();
    model.d = ds.feature_count();
    model.k = a.params.k;
    model.epsilon = a.params.epsilon;
    model.algorithm = condreg::AlgorithmKind::l2;
    model.condition = condreg::KDnf(ds.attr_count(), {cand->term});
    model.rule.support.resize(ds.feature_count());
    for (std::size_t i = 0; i < model.rule.support.size(); ++i) model.rule.support[i] = i;
    model.rule.coeffs = cand->rule;
    condreg::save_model(model, a.out);

    std::cout << "model written to " << a.out << "\n"
              << "term: " << cand->term.to_string() << "\n"
              << "matched: " << cand->matched << "/" << ds.size() << "\n"
              << "scaled_sq_error: " << condreg::format_double(cand->scaled_sq_error) << "\n"
              << "mu: " << condreg::format_double(mu_used) << "\n";
    return kExitOk;
}

struct EvaluateArgs {
    std::string in, model, out;
    double epsilon = -1.0; // <0: use the model's epsilon
};

int run_evaluate(const EvaluateArgs& a) {
    condreg::Dataset ds = condreg::read_dataset_csv(a.in);
    condreg::ConditionalModel model = condreg::load_model(a.model);
    double eps = a.epsilon >= 0.0 ? a.epsilon : model.epsilon;
    condreg::EvalReport rep = condreg::evaluate(model, ds, eps);
    std::string text = condreg::format_report(rep);
    if (!a.out.empty()) {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + a.out);
        f << text;
    }
    std::cout << text;
    return kExitOk;
}

struct ReduceArgs {
    std::string in, out;
    std::uint64_t seed = 0;
};

int run_reduce(const ReduceArgs& a) {
    std::size_t n = 0;
    auto labeled = condreg::read_labeled_csv(a.in, n);
    condreg::Dataset ds = condreg::reduction_sampler(labeled, a.seed);
    condreg::write_dataset_csv(ds, a.out);
    std::cout << "wrote " << ds.size() << " transformed examples to " << a.out << "\n";
    return kExitOk;
}

void print_config(const CLI::App& app) {
    for (const CLI::App* sub : app.get_subcommands()) {
        std::cout << "command: " << sub->get_name() << "\n";
        for (const CLI::Option* opt : sub->get_options()) {
            if (opt->get_name() == "--help") continue;
            std::string val;
            if (opt->count() > 0) {
                const auto& rs = opt->results();
                val = rs.empty() ? "true" : rs[0];
            } else {
                val = opt->get_default_str();
            }
            if (opt->count() > 0 || !val.empty())
                std::cout << "  " << opt->get_name() << " = " << val << "\n";
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditional sparse linear regression toolkit"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cgen = app.add_subcommand("generate", "write a planted-model dataset CSV");
    cgen->add_option("--out", gen.out)->required();
    cgen->add_option("--kind", gen.kind)->check(CLI::IsMember({"sup", "l2"}));
    cgen->add_option("--n", gen.n)->required();
    cgen->add_option("--d", gen.d)->required();
    cgen->add_option("--k", gen.k);
    cgen->add_option("--s", gen.s);
    cgen->add_option("--m", gen.m)->required();
    cgen->add_option("--condition", gen.condition, "planted condition, e.g. 'x0 | !x1&x2'")
        ->required();
    cgen->add_option("--support", gen.support, "rule support indices, e.g. '0,2'");
    cgen->add_option("--coeffs", gen.coeffs, "rule coefficients, e.g. '1.5,-0.7'");
    cgen->add_option("--epsilon", gen.epsilon);
    cgen->add_option("--mu", gen.mu);
    cgen->add_option("--off-noise", gen.off_noise);
    cgen->add_option("--norm-bound", gen.norm_bound);
    cgen->add_option("--seed", gen.seed)->envname("CONDREG_SEED");

    FitSupArgs fsup;
    auto* cfsup = app.add_subcommand("fit-sup", "sup-norm conditional regression fit");
    cfsup->add_option("--in", fsup.in)->required();
    cfsup->add_option("--out", fsup.out)->required();
    cfsup->add_option("--epsilon", fsup.params.epsilon)->required();
    cfsup->add_option("--mu", fsup.params.mu)->required();
    cfsup->add_option("--gamma", fsup.params.gamma)->required();
    cfsup->add_option("--delta", fsup.params.delta)->required();
    cfsup->add_option("--sparsity", fsup.params.sparsity)->required();
    cfsup->add_option("--k", fsup.params.k)->required();
    cfsup->add_option("--max-bases", fsup.max_bases);
    cfsup->add_option("--threads", fsup.threads);
    cfsup->add_option("--seed", fsup.seed)->envname("CONDREG_SEED");

    FitL2Args fl2;
    auto* cfl2 = app.add_subcommand("fit-l2", "expected-error conditional regression fit");
    cfl2->add_option("--in", fl2.in)->required();
    cfl2->add_option("--out", fl2.out)->required();
    cfl2->add_option("--epsilon", fl2.params.epsilon)->required();
    cfl2->add_option("--mu", fl2.params.mu)->required();
    cfl2->add_option("--B", fl2.params.B)->required();
    cfl2->add_option("--k", fl2.params.k)->required();
    cfl2->add_flag("--mu-search", fl2.mu_search, "search mu on a halving grid");
    cfl2->add_option("--mu-floor", fl2.mu_floor);
    cfl2->add_option("--pgd-max-iters", fl2.params.pgd.max_iters);
    cfl2->add_option("--pgd-rel-tol", fl2.params.pgd.rel_tol);
    cfl2->add_option("--threads", fl2.threads);

    EvaluateArgs ev;
    auto* cev = app.add_subcommand("evaluate", "held-out model measurement");
    cev->add_option("--in", ev.in)->required();
    cev->add_option("--model", ev.model)->required();
    cev->add_option("--out", ev.out);
    cev->add_option("--epsilon", ev.epsilon, "override the model's epsilon");

    ReduceArgs red;
    auto* cred = app.add_subcommand("reduce", "labeled (x,b) stream to regression form");
    cred->add_option("--in", red.in)->required();
    cred->add_option("--out", red.out)->required();
    cred->add_option("--seed", red.seed)->envname("CONDREG_SEED");

    CLI11_PARSE(app, argc, argv);

    try {
        print_config(app);
        if (cgen->parsed()) return run_generate(gen);
        if (cfsup->parsed()) return run_fit_sup(fsup);
        if (cfl2->parsed()) return run_fit_l2(fl2);
        if (cev->parsed()) return run_evaluate(ev);
        if (cred->parsed()) return run_reduce(red);
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
