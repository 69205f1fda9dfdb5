#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "condreg/csv.hpp"
#include "condreg/model.hpp"
#include "condreg/synthetic.hpp"

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(CONDREG_CLI_PATH) + " " + args + " >cli_out.txt 2>cli_err.txt";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("generate -> fit-sup -> evaluate pipeline") {
    int rc = run_cli(
        "generate --out cli_data.csv --kind sup --n 4 --d 3 --k 1 --s 1 --m 400 "
        "--condition x1 --support 2 --coeffs 1.5 --epsilon 0.05 --mu 0.4 "
        "--off-noise 0.7 --seed 5");
    REQUIRE(rc == 0);

    rc = run_cli(
        "fit-sup --in cli_data.csv --out cli_model.json --epsilon 0.05 --mu 0.4 "
        "--gamma 0.4 --delta 0.2 --sparsity 1 --k 1");
    REQUIRE(rc == 0);
    auto model = condreg::load_model("cli_model.json");
    CHECK(model.n == 4);
    CHECK(model.d == 3);

    rc = run_cli("evaluate --in cli_data.csv --model cli_model.json --out cli_report.txt");
    REQUIRE(rc == 0);
    std::string report = slurp("cli_report.txt");
    CHECK(report.find("coverage ") != std::string::npos);
    CHECK(report.find("sup_hit_rate ") != std::string::npos);

    // resolved configuration and seed are echoed
    std::string out = slurp("cli_out.txt");
    CHECK(out.find("command: evaluate") != std::string::npos);
}

TEST_CASE("fit-sup is byte-deterministic across runs and thread counts") {
    REQUIRE(run_cli("generate --out cli_det.csv --n 4 --d 2 --k 1 --s 1 --m 300 "
                    "--condition x0 --support 1 --coeffs 1.2 --epsilon 0.05 "
                    "--mu 0.4 --off-noise 0.6 --seed 9") == 0);
    const std::string fit =
        "fit-sup --in cli_det.csv --epsilon 0.05 --mu 0.4 --gamma 0.4 --delta 0.2 "
        "--sparsity 1 --k 1 --out ";
    REQUIRE(run_cli(fit + "cli_m1.json") == 0);
    REQUIRE(run_cli(fit + "cli_m2.json --threads 4") == 0);
    CHECK(slurp("cli_m1.json") == slurp("cli_m2.json"));
}

TEST_CASE("evaluate with an empty-condition model exits 1") {
    condreg::ConditionalModel m;
    m.n = 4;
    m.d = 3;
    m.k = 1;
    m.epsilon = 0.05;
    m.condition = condreg::KDnf(4); // empty disjunction: always abstains
    m.rule = {{0}, {1.0}};
    condreg::save_model(m, "cli_empty_model.json");
    int rc = run_cli("evaluate --in cli_data.csv --model cli_empty_model.json");
    CHECK(rc == 1);
    CHECK(slurp("cli_err.txt").find("no example satisfies") != std::string::npos);
}

TEST_CASE("fit-l2 with epsilon 0 on noisy data exits 2") {
    REQUIRE(run_cli("generate --out cli_noise.csv --n 3 --d 2 --k 1 --s 1 --m 200 "
                    "--condition x0 --support 0 --coeffs 0.4 --epsilon 0.3 "
                    "--mu 0.5 --off-noise 0.5 --kind l2 --norm-bound 1 --seed 3") == 0);
    int rc = run_cli(
        "fit-l2 --in cli_noise.csv --out cli_l2.json --epsilon 0 --mu 0.5 --B 1 --k 1");
    CHECK(rc == 2);
}

TEST_CASE("fit-l2 writes a dense-rule model on planted data") {
    condreg::PlantedSpec spec;
    spec.n = 5;
    spec.d = 3;
    spec.k = 1;
    spec.s = 3;
    spec.condition = condreg::KDnf::parse("x2", 5);
    spec.rule = {{0, 1, 2}, {0.5, -0.3, 0.2}};
    spec.epsilon = 0.005;
    spec.mu_target = 0.3;
    spec.off_condition_noise = 0.7;
    spec.norm_bound = 1.5;
    spec.seed = 44;
    condreg::write_dataset_csv(condreg::gen_planted_l2(spec, 8000), "cli_l2_data.csv");

    int rc = run_cli(
        "fit-l2 --in cli_l2_data.csv --out cli_l2_model.json --epsilon 0.005 "
        "--mu 0.25 --B 1.5 --k 1");
    REQUIRE(rc == 0);
    auto model = condreg::load_model("cli_l2_model.json");
    CHECK(model.algorithm == condreg::AlgorithmKind::l2);
    CHECK(model.condition.term_count() == 1);
    CHECK(model.rule.support.size() == 3);
}

TEST_CASE("reduce transforms labeled data into the d=1 regression form") {
    auto rows = condreg::gen_planted_labeled(condreg::KDnf::parse("x0&x1", 5), 0.3,
                                             0.25, 500, 12);
    condreg::write_labeled_csv(rows, 5, "cli_labeled.csv");
    int rc = run_cli("reduce --in cli_labeled.csv --out cli_reduced.csv --seed 2");
    REQUIRE(rc == 0);
    condreg::Dataset ds = condreg::read_dataset_csv("cli_reduced.csv");
    REQUIRE(ds.size() == rows.size());
    REQUIRE(ds.feature_count() == 1);
    for (std::size_t j = 0; j < ds.size(); ++j) {
        CHECK(ds.y_at(j, 0) == 1.0);
        CHECK((ds.z()[j] == 0.0 || ds.z()[j] == 1.0));
        if (rows[j].b) CHECK(ds.z()[j] == 0.0);
    }
}

TEST_CASE("malformed csv reports the location and exits 1") {
    std::ofstream bad("cli_bad.csv", std::ios::binary);
    bad << "x0,y0,z\n1,oops,3\n";
    bad.close();
    int rc = run_cli(
        "fit-sup --in cli_bad.csv --out cli_x.json --epsilon 0.1 --mu 0.5 "
        "--gamma 0.4 --delta 0.2 --sparsity 1 --k 1");
    CHECK(rc == 1);
    CHECK(slurp("cli_err.txt").find("line 2") != std::string::npos);
}

TEST_CASE("unknown flags are rejected") {
    int rc = run_cli("fit-sup --in x.csv --out y.json --epsilon 0.1 --mu 0.5 "
                     "--gamma 0.4 --delta 0.2 --sparsity 1 --k 1 --bogus 3");
    CHECK(rc != 0);
}
