#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace smudge;

TEST_CASE("confusion counts the four cells") {
    SECTION("hand count") {
        const ConfusionMatrix cm = confusion({1, 1, 0, 0}, {1, 0, 0, 1});
        CHECK(cm.tp == 1);
        CHECK(cm.fn == 1);
        CHECK(cm.tn == 1);
        CHECK(cm.fp == 1);
    }
    SECTION("identical vectors have no errors") {
        const ConfusionMatrix cm = confusion({1, 0, 1}, {1, 0, 1});
        CHECK(cm.fp == 0);
        CHECK(cm.fn == 0);
    }
    SECTION("all-negative prediction against all-positive truth") {
        const ConfusionMatrix cm = confusion({1, 1, 1, 1}, {0, 0, 0, 0});
        CHECK(cm.fn == 4);
        CHECK(cm.tp + cm.tn + cm.fp == 0);
    }
    SECTION("length mismatch") {
        CHECK_THROWS_AS(confusion({1, 0}, {1}), ConfigError);
    }
    SECTION("labels outside 0/1") {
        CHECK_THROWS_AS(confusion({2, 0}, {1, 0}), ConfigError);
    }
}

TEST_CASE("metrics formulas") {
    SECTION("balanced quarters give 0.5 everywhere") {
        const Metrics m = metrics(ConfusionMatrix{25, 25, 25, 25});
        CHECK(m.accuracy == 0.5);
        CHECK(m.precision == 0.5);
        CHECK(m.recall == 0.5);
        CHECK(m.f1 == 0.5);
    }
    SECTION("0/0 precision resolves to 0, hence f1 = 0") {
        const Metrics m = metrics(ConfusionMatrix{0, 3, 0, 2});
        CHECK(m.precision == 0.0);
        CHECK(m.f1 == 0.0);
    }
    SECTION("the harmonic-mean identity from the baseline table") {
        const double precision = 0.9690, recall = 0.7192;
        const double f1 = 2.0 * precision * recall / (precision + recall);
        CHECK(std::abs(f1 - 0.8256) <= 0.0005);
    }
    SECTION("empty matrix is rejected") {
        CHECK_THROWS_AS(metrics(ConfusionMatrix{}), ConfigError);
    }
}

namespace {

// independent oracle: direct scan of the label pair, formulas from scratch
struct OracleMetrics {
    double accuracy, precision, recall, f1;
};

OracleMetrics oracle(const std::vector<int>& t, const std::vector<int>& p) {
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == 1 && p[i] == 1) tp += 1;
        if (t[i] == 0 && p[i] == 0) tn += 1;
        if (t[i] == 0 && p[i] == 1) fp += 1;
        if (t[i] == 1 && p[i] == 0) fn += 1;
    }
    OracleMetrics o{};
    const double total = tp + tn + fp + fn;
    o.accuracy = (tp + tn) / total;
    o.precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
    o.recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
    o.f1 = (o.precision + o.recall) > 0 ? 2 * o.precision * o.recall / (o.precision + o.recall) : 0.0;
    return o;
}

} // namespace

TEST_CASE("metrics of confusion matches the brute-force oracle exhaustively up to length 8") {
    for (std::size_t n = 1; n <= 8; ++n) {
        for (std::uint32_t a = 0; a < (1u << n); ++a) {
            for (std::uint32_t b = 0; b < (1u << n); ++b) {
                std::vector<int> t(n), p(n);
                for (std::size_t i = 0; i < n; ++i) {
                    t[i] = (a >> i) & 1;
                    p[i] = (b >> i) & 1;
                }
                const Metrics m = evaluate(t, p);
                const OracleMetrics o = oracle(t, p);
                REQUIRE(m.accuracy == o.accuracy);
                REQUIRE(m.precision == o.precision);
                REQUIRE(m.recall == o.recall);
                REQUIRE(m.f1 == o.f1);
            }
        }
    }
}
