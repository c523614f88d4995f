#include <catch2/catch_amalgamated.hpp>

#include <unordered_set>

#include "support.hpp"

using namespace smudge;

TEST_CASE("parse_error_model applies defaults and validates") {
    SECTION("mislabel with defaults") {
        const auto models =
            parse_error_model(R"({"models":[{"kind":"mislabel","features":["loan_status"],"p":0.3}]})");
        REQUIRE(models.size() == 1);
        const ErrorModel& m = models[0];
        CHECK(m.kind == ErrorKind::mislabel);
        CHECK(m.features == std::vector<std::string>{"loan_status"});
        CHECK(m.predicate.empty());
        CHECK(m.eta.kind == SelectionDistribution::Kind::uniform);
        CHECK(m.mode == Mode::fresh);
        CHECK(m.p == 0.3);
    }

    SECTION("p = 0 is a valid no-op model") {
        const auto models =
            parse_error_model(R"({"models":[{"kind":"outlier","features":["person_income"],"p":0}]})");
        CHECK(models[0].p == 0.0);
    }

    SECTION("out-of-range p carries the JSON path") {
        CHECK_THROWS_WITH(
            parse_error_model(R"({"models":[{"kind":"noise","features":["a"],"p":1.5}]})"),
            Catch::Matchers::ContainsSubstring("$.models[0].p"));
    }

    SECTION("unknown kind carries the JSON path") {
        CHECK_THROWS_WITH(parse_error_model(R"({"models":[{"kind":"smear","features":["a"],"p":0.1}]})"),
                          Catch::Matchers::ContainsSubstring("$.models[0].kind"));
    }

    SECTION("malformed predicate") {
        CHECK_THROWS_WITH(
            parse_error_model(
                R"({"models":[{"kind":"noise","features":["a"],"p":0.1,"predicate":[{"column":"a","op":"~","value":1}]}]})"),
            Catch::Matchers::ContainsSubstring("$.models[0].predicate[0].op"));
    }

    SECTION("features required except for duplicates") {
        CHECK_THROWS_AS(parse_error_model(R"({"models":[{"kind":"noise","p":0.1}]})"), ConfigError);
        CHECK_NOTHROW(parse_error_model(R"({"models":[{"kind":"duplicate","p":0.1}]})"));
    }

    SECTION("eta parameter ranges") {
        CHECK_THROWS_AS(
            parse_error_model(
                R"({"models":[{"kind":"noise","features":["a"],"p":0.1,"eta":{"name":"normal","spread_fraction":0}}]})"),
            ConfigError);
        CHECK_THROWS_AS(
            parse_error_model(
                R"({"models":[{"kind":"noise","features":["a"],"p":0.1,"eta":{"name":"poisson","lambda_fraction":-1}}]})"),
            ConfigError);
    }
}

namespace {

Dataset person_rows() {
    Dataset ds;
    ds.schema.columns = {{"person_age", ColumnType{TypeKind::integer, {}}},
                         {"loan_grade", ColumnType{TypeKind::categorical, {"A", "B", "C"}}}};
    auto row = [&](std::int64_t age, const char* grade) {
        std::vector<CellValue> r{CellValue{age},
                                 grade ? CellValue{std::string(grade)} : kMissing};
        ds.rows.push_back(std::move(r));
        ds.row_ids.push_back(static_cast<std::int64_t>(ds.rows.size() - 1));
    };
    row(25, "A");
    row(40, "B");
    row(31, nullptr);
    row(60, "C");
    return ds;
}

} // namespace

TEST_CASE("eval_predicate semantics") {
    const Dataset ds = person_rows();

    auto holds = [&](const Predicate& p, std::size_t row) {
        return eval_predicate(ds.rows[row], bind_predicate(p, ds.schema));
    };

    SECTION("empty conjunction is true for every row") {
        for (std::size_t r = 0; r < ds.n_rows(); ++r) CHECK(holds({}, r));
    }

    SECTION("numeric comparison") {
        const Predicate p{{"person_age", PredicateAtom::Op::gt, {"30"}}};
        CHECK_FALSE(holds(p, 0)); // 25 > 30 is false
        CHECK(holds(p, 1));
    }

    SECTION("in-set on a Missing cell is false") {
        const Predicate p{{"loan_grade", PredicateAtom::Op::in_set, {"A", "B"}}};
        CHECK(holds(p, 0));
        CHECK_FALSE(holds(p, 2));
    }

    SECTION("!= on a Missing cell is true") {
        const Predicate p{{"loan_grade", PredicateAtom::Op::ne, {"A"}}};
        CHECK(holds(p, 2));
        CHECK_FALSE(holds(p, 0));
    }

    SECTION("literals must be type-compatible") {
        const Predicate p{{"person_age", PredicateAtom::Op::gt, {"abc"}}};
        CHECK_THROWS_AS(bind_predicate(p, ds.schema), ConfigError);
    }

    SECTION("unknown column") {
        const Predicate p{{"nope", PredicateAtom::Op::eq, {"1"}}};
        CHECK_THROWS_AS(bind_predicate(p, ds.schema), ConfigError);
    }
}

namespace {

ErrorModel basic_model(double p, std::uint64_t seed = 1,
                       SelectionDistribution eta = {}) {
    ErrorModel m;
    m.kind = ErrorKind::missing;
    m.features = {"x"};
    m.p = p;
    m.eta = eta;
    m.seed = seed;
    return m;
}

} // namespace

TEST_CASE("select_rows draws the exact contamination count") {
    SECTION("full-dataset arithmetic: 28,637 rows at p=0.3 and the 0.5 extension") {
        const Dataset ds = testsupport::indexed_rows(28637);
        ErrorModel m = basic_model(0.3);
        const RowSelection first = select_rows(ds, m);
        CHECK(first.ids.size() == 8591);

        std::unordered_set<std::int64_t> exclusions(first.ids.begin(), first.ids.end());
        m.p = 0.5;
        const RowSelection second = select_rows(ds, m, exclusions);
        CHECK(second.ids.size() == 5728);
        for (auto id : second.ids) CHECK_FALSE(exclusions.count(id));
    }

    SECTION("p = 0 selects nothing") {
        const Dataset ds = testsupport::indexed_rows(100);
        CHECK(select_rows(ds, basic_model(0.0)).ids.empty());
    }

    SECTION("round-half-up grid") {
        const Dataset ds = testsupport::indexed_rows(101);
        CHECK(select_rows(ds, basic_model(0.1)).ids.size() == 10);  // 10.1
        CHECK(select_rows(ds, basic_model(0.3)).ids.size() == 30);  // 30.3
        CHECK(select_rows(ds, basic_model(0.5)).ids.size() == 51);  // 50.5 rounds up
        CHECK(select_rows(ds, basic_model(1.0)).ids.size() == 101);
    }

    SECTION("ids are distinct and satisfy the predicate") {
        Dataset ds = testsupport::indexed_rows(200);
        ErrorModel m = basic_model(0.4, 9);
        m.predicate = {{"x", PredicateAtom::Op::lt, {"100"}}};
        const RowSelection sel = select_rows(ds, m);
        CHECK(sel.ids.size() == 40); // p * 100 predicate rows
        std::unordered_set<std::int64_t> seen;
        for (auto id : sel.ids) {
            CHECK(id < 100);
            CHECK(seen.insert(id).second);
        }
    }
}

TEST_CASE("select_rows is deterministic and seed-sensitive") {
    const Dataset ds = testsupport::indexed_rows(500);
    const ErrorModel m = basic_model(0.25, 77);
    CHECK(select_rows(ds, m).ids == select_rows(ds, m).ids);
    ErrorModel other = m;
    other.seed = 78;
    CHECK(select_rows(ds, other).ids != select_rows(ds, m).ids);
}

TEST_CASE("monotone extension yields a superset with the fresh-run count") {
    const Dataset ds = testsupport::indexed_rows(333);
    for (auto eta_kind : {SelectionDistribution::Kind::uniform, SelectionDistribution::Kind::normal,
                          SelectionDistribution::Kind::poisson}) {
        SelectionDistribution eta;
        eta.kind = eta_kind;
        ErrorModel m = basic_model(0.2, 5, eta);
        const RowSelection low = select_rows(ds, m);
        std::unordered_set<std::int64_t> exclusions(low.ids.begin(), low.ids.end());
        m.p = 0.6;
        const RowSelection extension = select_rows(ds, m, exclusions);
        const RowSelection fresh = select_rows(ds, m);
        CHECK(low.ids.size() + extension.ids.size() == fresh.ids.size());
        for (auto id : extension.ids) CHECK_FALSE(exclusions.count(id));
    }
}

TEST_CASE("every eta selects all predicate rows at p = 1") {
    const Dataset ds = testsupport::indexed_rows(257);
    for (auto eta_kind : {SelectionDistribution::Kind::uniform, SelectionDistribution::Kind::normal,
                          SelectionDistribution::Kind::poisson}) {
        SelectionDistribution eta;
        eta.kind = eta_kind;
        const RowSelection sel = select_rows(ds, basic_model(1.0, 3, eta));
        CHECK(sel.ids.size() == 257);
        std::unordered_set<std::int64_t> seen(sel.ids.begin(), sel.ids.end());
        CHECK(seen.size() == 257);
    }
}

TEST_CASE("normal eta concentrates selection around the configured center") {
    const Dataset ds = testsupport::indexed_rows(10000);
    SelectionDistribution eta;
    eta.kind = SelectionDistribution::Kind::normal;
    eta.center_fraction = 0.5;
    eta.spread_fraction = 0.05;
    const RowSelection sel = select_rows(ds, basic_model(0.1, 11, eta));
    REQUIRE(sel.ids.size() == 1000);
    std::size_t in_middle = 0;
    for (auto id : sel.ids)
        if (id >= 3500 && id < 6500) ++in_middle;
    // a 0.05-spread gaussian at the middle rank puts nearly all mass there
    CHECK(in_middle > 950);
}

TEST_CASE("model fingerprints are stable and distinguish models") {
    const ErrorModel a = basic_model(0.3, 42);
    ErrorModel b = a;
    CHECK(a.fingerprint() == b.fingerprint());
    b.p = 0.5;
    CHECK(a.fingerprint() != b.fingerprint());
    b = a;
    b.seed = 43;
    CHECK(a.fingerprint() != b.fingerprint());
}
