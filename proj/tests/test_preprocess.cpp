#include <catch2/catch_amalgamated.hpp>

#include <unordered_set>

#include "support.hpp"

using namespace smudge;

TEST_CASE("drop_missing_rows removes exactly the rows with a Missing cell") {
    Dataset ds = testsupport::indexed_rows(6);
    SECTION("identity when fully observed") {
        const Dataset out = drop_missing_rows(ds);
        CHECK(cell_equal(out, ds));
        CHECK(out.row_ids == ds.row_ids);
    }
    SECTION("rows drop, order and ids are preserved") {
        ds.rows[1][0] = kMissing;
        ds.rows[4][1] = kMissing;
        const Dataset out = drop_missing_rows(ds);
        CHECK(out.n_rows() == 4);
        CHECK(out.row_ids == std::vector<std::int64_t>{0, 2, 3, 5});
    }
    SECTION("everything missing somewhere leaves an empty dataset") {
        for (auto& row : ds.rows) row[0] = kMissing;
        CHECK(drop_missing_rows(ds).n_rows() == 0);
    }
}

TEST_CASE("bin_feature maps values into left-closed intervals") {
    Dataset ds;
    ds.schema.columns = {{"age", ColumnType{TypeKind::integer, {}}},
                         {"other", ColumnType{TypeKind::integer, {}}}};
    for (std::int64_t age : {22, 25, 90, 34, 35, 50, 49}) {
        ds.rows.push_back({CellValue{age}, CellValue{age * 2}});
        ds.row_ids.push_back(ds.next_row_id());
    }
    ds.rows.push_back({kMissing, CellValue{std::int64_t{0}}});
    ds.row_ids.push_back(ds.next_row_id());

    BinningSpec spec;
    spec.feature = "age";
    spec.cuts = {25, 35, 50};
    spec.labels = {"18-24", "25-34", "35-49", "50+"};

    const Dataset out = bin_feature(ds, spec);
    auto label_at = [&](std::size_t r) { return std::get<std::string>(out.rows[r][0]); };
    CHECK(label_at(0) == "18-24"); // 22
    CHECK(label_at(1) == "25-34"); // boundary is left-closed
    CHECK(label_at(2) == "50+");   // unbounded top bin
    CHECK(label_at(3) == "25-34"); // 34
    CHECK(label_at(4) == "35-49"); // 35
    CHECK(label_at(5) == "50+");   // 50
    CHECK(label_at(6) == "35-49"); // 49
    CHECK(is_missing(out.rows[7][0]));
    CHECK(out.schema.columns[0].type.kind == TypeKind::categorical);

    SECTION("row count and other columns are untouched") {
        CHECK(out.n_rows() == ds.n_rows());
        for (std::size_t r = 0; r < ds.n_rows(); ++r) CHECK(out.rows[r][1] == ds.rows[r][1]);
    }

    SECTION("append mode keeps the source column") {
        spec.as = "age_group";
        const Dataset appended = bin_feature(ds, spec);
        CHECK(appended.n_cols() == 3);
        CHECK(appended.rows[0][0] == ds.rows[0][0]);
        CHECK(std::get<std::string>(appended.rows[0][2]) == "18-24");
    }

    SECTION("binned splits share a schema even when a bin is empty on one side") {
        Dataset young = ds;
        young.rows.resize(1); // only the 22-year-old
        young.row_ids.resize(1);
        const Dataset binned_all = bin_feature(ds, spec);
        const Dataset binned_young = bin_feature(young, spec);
        CHECK(binned_all.schema == binned_young.schema);
    }

    SECTION("validation") {
        BinningSpec bad = spec;
        bad.cuts = {25, 25, 50};
        CHECK_THROWS_AS(bin_feature(ds, bad), ConfigError);
        bad = spec;
        bad.labels = {"a", "b", "c", "a"};
        CHECK_THROWS_AS(bin_feature(ds, bad), ConfigError);
        bad = spec;
        bad.feature = "other";
        bad.as = "age"; // collides with an existing column
        CHECK_THROWS_AS(bin_feature(ds, bad), ConfigError);
    }
}

TEST_CASE("quartile cuts split an arithmetic ramp at the quarter points") {
    Dataset ds;
    ds.schema.columns = {{"v", ColumnType{TypeKind::integer, {}}}};
    for (std::int64_t i = 0; i <= 100; ++i) {
        ds.rows.push_back({CellValue{i}});
        ds.row_ids.push_back(i);
    }
    const auto cuts = quartile_cuts(ds, "v");
    REQUIRE(cuts.size() == 3);
    CHECK(cuts[0] == Catch::Approx(25.0));
    CHECK(cuts[1] == Catch::Approx(50.0));
    CHECK(cuts[2] == Catch::Approx(75.0));
}

TEST_CASE("encode produces deterministic ordinal codes and scaled numerics") {
    Dataset ds;
    ds.schema.columns = {{"grade", ColumnType{TypeKind::categorical, {"A", "B", "C"}}},
                         {"flag", ColumnType{TypeKind::boolean, {}}},
                         {"amount", ColumnType{TypeKind::integer, {}}},
                         {"constant", ColumnType{TypeKind::floating, {}}},
                         {"y", ColumnType{TypeKind::integer, {}}}};
    ds.schema.target = "y";
    auto add = [&](const char* g, bool f, std::int64_t a, std::int64_t y) {
        ds.rows.push_back({CellValue{std::string(g)}, CellValue{f}, CellValue{a}, CellValue{3.25},
                           CellValue{y}});
        ds.row_ids.push_back(ds.next_row_id());
    };
    add("B", true, 0, 0);
    add("A", false, 50, 1);
    add("C", false, 100, 0);
    add("A", true, 25, 1);

    const EncodedMatrix m = encode(ds);
    REQUIRE(m.n_cols == 4);
    REQUIRE(m.n_rows == 4);
    CHECK(m.feature_names == std::vector<std::string>{"grade", "flag", "amount", "constant"});

    // codes by sorted category name: A=0, B=1, C=2
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(1, 0) == 0.0);
    CHECK(m.at(2, 0) == 2.0);
    // booleans to 0/1
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(1, 1) == 0.0);
    // min-max scaling to [0,1]
    CHECK(m.at(0, 2) == 0.0);
    CHECK(m.at(2, 2) == 1.0);
    CHECK(m.at(3, 2) == Catch::Approx(0.25));
    // a constant column scales to zero
    CHECK(m.at(0, 3) == 0.0);
    CHECK(m.y == std::vector<int>{0, 1, 0, 1});

    SECTION("category codes invert to the observed categories") {
        const Encoder enc = Encoder::fit(ds);
        CHECK(enc.class_names() == std::vector<std::string>{"0", "1"});
    }

    SECTION("unseen categories at transform time map to -1 and are reported") {
        const Encoder enc = Encoder::fit(ds);
        Dataset other = ds;
        other.rows[0][0] = CellValue{std::string("Z")};
        EncodeReport report;
        const EncodedMatrix t = enc.transform(other, &report);
        CHECK(t.at(0, 0) == -1.0);
        CHECK(report.unseen_categories == 1);
    }

    SECTION("scaling bounds come from the fit side") {
        const Encoder enc = Encoder::fit(ds);
        Dataset other = ds;
        other.rows[0][2] = CellValue{std::int64_t{200}}; // outside the fitted range
        const EncodedMatrix t = enc.transform(other);
        CHECK(t.at(0, 2) == Catch::Approx(2.0));
    }

    SECTION("missing cells are rejected") {
        Dataset other = ds;
        other.rows[2][1] = kMissing;
        CHECK_THROWS_WITH(encode(other), Catch::Matchers::ContainsSubstring("flag"));
    }
}

TEST_CASE("stratified_split keeps per-class shares") {
    // 100 rows at the credit dataset's 78/22 balance
    Dataset ds;
    ds.schema.columns = {{"x", ColumnType{TypeKind::integer, {}}},
                         {"y", ColumnType{TypeKind::integer, {}}}};
    ds.schema.target = "y";
    for (std::int64_t i = 0; i < 100; ++i) {
        ds.rows.push_back({CellValue{i}, CellValue{std::int64_t{i < 78 ? 0 : 1}}});
        ds.row_ids.push_back(i);
    }

    SECTION("78/22 at ratio 0.8 puts 62+18 rows in train") {
        const SplitPair split = stratified_split(ds, 0.8, 5);
        CHECK(split.train.n_rows() == 80);
        CHECK(split.test.n_rows() == 20);
        std::size_t train_pos = 0;
        for (const auto& row : split.train.rows) train_pos += std::get<std::int64_t>(row[1]);
        CHECK(train_pos == 18);
    }

    SECTION("train and test partition the input rows") {
        const SplitPair split = stratified_split(ds, 0.8, 5);
        std::unordered_set<std::int64_t> ids(split.train.row_ids.begin(), split.train.row_ids.end());
        for (auto id : split.test.row_ids) CHECK(ids.insert(id).second);
        CHECK(ids.size() == 100);
    }

    SECTION("same seed, same split; different seed, different split") {
        const SplitPair a = stratified_split(ds, 0.8, 5);
        const SplitPair b = stratified_split(ds, 0.8, 5);
        CHECK(a.train.row_ids == b.train.row_ids);
        const SplitPair c = stratified_split(ds, 0.8, 6);
        CHECK(a.train.row_ids != c.train.row_ids);
    }

    SECTION("ratio must lie strictly below 1") {
        CHECK_THROWS_AS(stratified_split(ds, 1.0, 5), ConfigError);
    }

    SECTION("a single-row class is an error naming the class") {
        ds.rows.push_back({CellValue{std::int64_t{200}}, CellValue{std::int64_t{7}}});
        ds.row_ids.push_back(200);
        CHECK_THROWS_WITH(stratified_split(ds, 0.8, 5), Catch::Matchers::ContainsSubstring("7"));
    }

    SECTION("per-class share deviates by at most 1/|train|") {
        Rng rng(31);
        for (int iter = 0; iter < 10; ++iter) {
            Dataset d2;
            d2.schema.columns = ds.schema.columns;
            d2.schema.target = "y";
            const std::size_t n = 40 + rng.uniform_u64(400);
            for (std::size_t i = 0; i < n; ++i) {
                d2.rows.push_back({CellValue{static_cast<std::int64_t>(i)},
                                   CellValue{static_cast<std::int64_t>(rng.next_double() < 0.3 ? 1 : 0)}});
                d2.row_ids.push_back(static_cast<std::int64_t>(i));
            }
            std::size_t full_pos = 0;
            for (const auto& row : d2.rows) full_pos += std::get<std::int64_t>(row[1]);
            if (full_pos < 2 || full_pos > n - 2) continue;
            const SplitPair split = stratified_split(d2, 0.8, rng.next_u64());
            std::size_t train_pos = 0;
            for (const auto& row : split.train.rows) train_pos += std::get<std::int64_t>(row[1]);
            const double full_share = static_cast<double>(full_pos) / static_cast<double>(n);
            const double train_share =
                static_cast<double>(train_pos) / static_cast<double>(split.train.n_rows());
            CHECK(std::abs(train_share - full_share) <=
                  1.0 / static_cast<double>(split.train.n_rows()) + 1e-12);
        }
    }
}
