#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "support.hpp"

using namespace smudge;

namespace {

std::string write_small_dataset(const std::string& dir, std::size_t rows = 700) {
    const Dataset ds = make_credit_dataset({.rows = rows, .seed = 77});
    const std::string path = dir + "/credit.csv";
    write_csv(ds, path);
    return path;
}

std::string spec_json(const std::string& dataset, const std::string& out_dir,
                      const std::string& grid, int jobs = 1) {
    return std::string(R"({
      "dataset": ")") + dataset + R"(",
      "target": "loan_status",
      "split": {"ratio": 0.8, "seed": 5},
      "seed": 99,
      "jobs": )" + std::to_string(jobs) + R"(,
      "out_dir": ")" + out_dir + R"(",
      "classifiers": ["lda", "gaussian_nb", "decision_tree"],
      "grid": [)" + grid + R"(]
    })";
}

} // namespace

TEST_CASE("experiment spec parsing") {
    SECTION("grid entry defaults: first step new, later steps extended") {
        const ExperimentSpec spec = parse_experiment_spec(
            R"({"dataset":"d.csv","target":"y","grid":[{"kind":"mislabel","p":[0.3,0.5]}]})");
        REQUIRE(spec.grid.size() == 1);
        CHECK(spec.grid[0].modes ==
              std::vector<Mode>{Mode::fresh, Mode::extended});
        CHECK(spec.classifiers.size() == 6);
    }
    SECTION("extended chains must be ascending in p") {
        CHECK_THROWS_WITH(
            parse_experiment_spec(
                R"({"dataset":"d.csv","target":"y","grid":[{"kind":"mislabel","p":[0.5,0.3],"modes":["new","extended"]}]})"),
            Catch::Matchers::ContainsSubstring("ascending"));
    }
    SECTION("a chain cannot start extended") {
        CHECK_THROWS_AS(
            parse_experiment_spec(
                R"({"dataset":"d.csv","target":"y","grid":[{"kind":"missing","per_feature":true,"p":[0.3],"modes":["extended"]}]})"),
            ConfigError);
    }
    SECTION("unknown classifier") {
        CHECK_THROWS_AS(
            parse_experiment_spec(R"({"dataset":"d.csv","target":"y","classifiers":["svm"]})"),
            ConfigError);
    }
}

TEST_CASE("an empty classifier list yields empty results") {
    const std::string dir = testsupport::temp_dir("exp_noclf");
    const std::string csv_path = write_small_dataset(dir, 300);
    ExperimentSpec spec = parse_experiment_spec(spec_json(csv_path, dir + "/out", ""));
    spec.classifiers.clear();
    const ExperimentOutput out = run_experiment(spec);
    CHECK(out.baseline.empty());
    CHECK(out.results.empty());
}

TEST_CASE("baseline-only experiment with an empty grid") {
    const std::string dir = testsupport::temp_dir("exp_baseline");
    const std::string csv_path = write_small_dataset(dir);
    ExperimentSpec spec = parse_experiment_spec(spec_json(csv_path, dir + "/out", ""));
    const ExperimentOutput out = run_experiment(spec);
    CHECK(out.results.empty());
    CHECK(out.baseline.size() == 3);
    CHECK(out.corrupted_training_sets == 0);
    CHECK(std::filesystem::exists(dir + "/out/results.csv"));
    CHECK(std::filesystem::exists(dir + "/out/summary.md"));
    for (const auto& r : out.baseline) {
        CHECK(r.error == "none");
        CHECK(r.metrics.f1 >= 0.0);
        CHECK(r.metrics.f1 <= 1.0);
        CHECK(r.train_dim == 11);
    }
}

TEST_CASE("a p=0 grid cell reproduces the baseline exactly") {
    const std::string dir = testsupport::temp_dir("exp_p0");
    const std::string csv_path = write_small_dataset(dir);
    ExperimentSpec spec = parse_experiment_spec(spec_json(
        csv_path, dir + "/out",
        R"({"kind":"mislabel","p":[0],"modes":["new"]},
           {"kind":"noise","per_feature":true,"features":["person_income"],"p":[0],"modes":["new"]})"));
    const ExperimentOutput out = run_experiment(spec);
    REQUIRE(out.failures.empty());
    REQUIRE(out.results.size() == 6); // 2 cells x 3 classifiers
    std::map<ClassifierKind, Metrics> base;
    for (const auto& b : out.baseline) base[b.classifier] = b.metrics;
    for (const auto& r : out.results) {
        CHECK(r.metrics.f1 == base[r.classifier].f1);
        CHECK(r.metrics.accuracy == base[r.classifier].accuracy);
        CHECK(r.metrics.precision == base[r.classifier].precision);
        CHECK(r.metrics.recall == base[r.classifier].recall);
    }
}

TEST_CASE("grid runs are deterministic and order-independent") {
    const std::string dir = testsupport::temp_dir("exp_det");
    const std::string csv_path = write_small_dataset(dir, 500);
    const std::string grid =
        R"({"kind":"mislabel","p":[0.2,0.4],"modes":["new","extended"],"eta":{"name":"normal"}},
           {"kind":"missing","per_feature":true,"features":["person_income","loan_grade"],"p":[0.3]},
           {"kind":"duplicate","sigma":"all","p":[0.2]})";

    ExperimentSpec spec1 = parse_experiment_spec(spec_json(csv_path, dir + "/out1", grid, 1));
    ExperimentSpec spec2 = parse_experiment_spec(spec_json(csv_path, dir + "/out2", grid, 1));
    ExperimentSpec spec4 = parse_experiment_spec(spec_json(csv_path, dir + "/out4", grid, 4));

    const ExperimentOutput a = run_experiment(spec1);
    const ExperimentOutput b = run_experiment(spec2);
    const ExperimentOutput c = run_experiment(spec4);
    CHECK(a.failures.empty());

    const std::string csv_a = csv::read_file(dir + "/out1/results.csv");
    const std::string csv_b = csv::read_file(dir + "/out2/results.csv");
    const std::string csv_c = csv::read_file(dir + "/out4/results.csv");
    CHECK(csv_a == csv_b);
    CHECK(csv_a == csv_c); // worker count cannot change results
    CHECK(csv::read_file(dir + "/out1/summary.md") == csv::read_file(dir + "/out2/summary.md"));
}

TEST_CASE("extended chains keep the lower-p manifest as a prefix") {
    const std::string dir = testsupport::temp_dir("exp_chain");
    const std::string csv_path = write_small_dataset(dir, 400);
    ExperimentSpec spec = parse_experiment_spec(spec_json(
        csv_path, dir + "/out",
        R"({"kind":"mislabel","p":[0.2,0.5],"modes":["new","extended"]})"));
    const ExperimentOutput out = run_experiment(spec);
    REQUIRE(out.failures.empty());

    // locate the two manifests and compare record prefixes
    const std::string mdir = dir + "/out/manifests";
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(mdir))
        files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    REQUIRE(files.size() == 2);
    const auto low_text = csv::read_file(files[0].find("p0_2") != std::string::npos ? files[0] : files[1]);
    const auto high_text = csv::read_file(files[0].find("p0_2") != std::string::npos ? files[1] : files[0]);

    // strip headers, compare line prefixes
    const auto strip_header = [](const std::string& text) {
        return text.substr(text.find('\n') + 1);
    };
    const std::string low_body = strip_header(low_text);
    const std::string high_body = strip_header(high_text);
    CHECK(high_body.substr(0, low_body.size()) == low_body);
    CHECK(std::count(high_body.begin(), high_body.end(), '\n') >
          std::count(low_body.begin(), low_body.end(), '\n'));
}

TEST_CASE("the clean test split is identical across grid cells") {
    // corrupting the training side must not perturb shared state: run two
    // experiments whose grids differ and check the baselines agree bit-wise
    const std::string dir = testsupport::temp_dir("exp_purity");
    const std::string csv_path = write_small_dataset(dir, 400);
    ExperimentSpec a = parse_experiment_spec(
        spec_json(csv_path, dir + "/outA", R"({"kind":"mislabel","p":[0.4]})"));
    ExperimentSpec b = parse_experiment_spec(
        spec_json(csv_path, dir + "/outB", R"({"kind":"duplicate","sigma":"all","p":[0.4]})"));
    const ExperimentOutput oa = run_experiment(a);
    const ExperimentOutput ob = run_experiment(b);
    REQUIRE(oa.baseline.size() == ob.baseline.size());
    for (std::size_t i = 0; i < oa.baseline.size(); ++i)
        CHECK(oa.baseline[i].metrics.f1 == ob.baseline[i].metrics.f1);
}

TEST_CASE("compare assigns gain directions against the baseline") {
    std::vector<RunResult> baseline(1);
    baseline[0].classifier = ClassifierKind::lda;
    baseline[0].metrics.f1 = 0.8256;

    std::vector<RunResult> results(3);
    for (auto& r : results) r.classifier = ClassifierKind::lda;
    results[0].metrics.f1 = 0.6237;
    results[1].metrics.f1 = 0.8256;
    results[2].metrics.f1 = 0.9626;

    const std::vector<GainEntry> gains = compare(results, baseline);
    CHECK(gains[0].direction == GainDirection::down);
    CHECK(gains[1].direction == GainDirection::flat);
    CHECK(gains[2].direction == GainDirection::up);

    SECTION("a result without a baseline entry names the classifier") {
        results[0].classifier = ClassifierKind::knn;
        CHECK_THROWS_WITH(compare(results, baseline), Catch::Matchers::ContainsSubstring("knn"));
    }
}

TEST_CASE("top_k orders by f1 with a lexicographic tie-break") {
    auto row = [](ClassifierKind c, const char* err, const char* feat, double p, double f1) {
        RunResult r;
        r.classifier = c;
        r.error = err;
        r.feature = feat;
        r.p = p;
        r.metrics.f1 = f1;
        return r;
    };
    // Table-8-like inputs
    std::vector<RunResult> rows{
        row(ClassifierKind::lda, "duplicate", "all", 0.5, 0.9675),
        row(ClassifierKind::lda, "duplicate", "all", 0.3, 0.9626),
        row(ClassifierKind::logreg, "outlier", "person_age", 0.3, 0.9378),
        row(ClassifierKind::lda, "noise", "person_emp_length", 0.5, 0.9366),
    };

    SECTION("k=1 returns the duplicated@50 lda row") {
        const auto top = top_k(rows, 1);
        REQUIRE(top.size() == 1);
        CHECK(top[0].error == "duplicate");
        CHECK(top[0].p == 0.5);
        CHECK(top[0].classifier == ClassifierKind::lda);
    }
    SECTION("k beyond the result count returns everything") {
        CHECK(top_k(rows, 100).size() == rows.size());
    }
    SECTION("equal f1 resolves lexicographically") {
        rows.push_back(row(ClassifierKind::knn, "noise", "a", 0.3, 0.9675));
        const auto top = top_k(rows, 2);
        // "knn" sorts before "lda" at equal f1
        CHECK(top[0].classifier == ClassifierKind::knn);
        CHECK(top[1].classifier == ClassifierKind::lda);
    }
}

TEST_CASE("per-feature grids expand over every applicable feature") {
    const std::string dir = testsupport::temp_dir("exp_expand");
    const std::string csv_path = write_small_dataset(dir, 300);
    ExperimentSpec spec = parse_experiment_spec(spec_json(
        csv_path, dir + "/out",
        R"({"kind":"missing","per_feature":true,"p":[0.3]},
           {"kind":"outlier","per_feature":true,"p":[0.3]})"));
    spec.classifiers = {ClassifierKind::gaussian_nb};
    const ExperimentOutput out = run_experiment(spec);
    // 11 features for missing; outliers skip none here (no boolean columns)
    CHECK(out.corrupted_training_sets == 22);
    CHECK(out.failures.empty());
}
