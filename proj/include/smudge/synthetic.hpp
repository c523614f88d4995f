#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "smudge/rng.hpp"
#include "smudge/table.hpp"

namespace smudge {

/// Deterministic generator of a credit-scoring-style table: 11 predictors
/// plus a binary loan_status target at roughly 78/22 class balance, with a
/// small fraction of missing interest-rate and employment-length cells.
/// Used by the demo tooling and the test suites, which need a dataset with
/// realistic types, correlated features and a learnable but imperfect
/// signal.
struct SyntheticCreditOptions {
    std::size_t rows = 8000;
    std::uint64_t seed = 7;
    double noise_scale = 0.15;    // latent label noise; higher = harder task
    double positive_rate = 0.218; // target class share of label 1
    double shock_rate = 0.025;    // defaults that no feature explains
    bool with_missing = true;     // blank some emp_length / int_rate cells
};

namespace detail {

class NormalDraw {
public:
    explicit NormalDraw(Rng& rng) : rng_(rng) {}
    double operator()() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = rng_.next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = rng_.next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586 * u2;
        spare_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

private:
    Rng& rng_;
    bool have_ = false;
    double spare_ = 0.0;
};

// round to 1/inv units via division so e.g. 0.83 stays the double 83/100
inline double round_scaled(double v, double inv) { return std::round(v * inv) / inv; }

} // namespace detail

inline Dataset make_credit_dataset(const SyntheticCreditOptions& opts = {}) {
    const std::size_t n = opts.rows;
    Rng rng(opts.seed);
    detail::NormalDraw normal(rng);

    static const std::vector<std::string> kHome{"MORTGAGE", "OTHER", "OWN", "RENT"};
    static const std::vector<std::string> kIntent{"DEBTCONSOLIDATION", "EDUCATION",
                                                  "HOMEIMPROVEMENT",   "MEDICAL",
                                                  "PERSONAL",          "VENTURE"};
    static const std::vector<std::string> kGrade{"A", "B", "C", "D", "E", "F", "G"};
    // cumulative grade shares, best to worst
    static constexpr double kGradeCdf[] = {0.20, 0.45, 0.70, 0.85, 0.93, 0.98, 1.0};

    std::vector<std::int64_t> age(n), income(n), amount(n), hist(n);
    std::vector<double> emp(n), rate(n), pct(n);
    std::vector<int> home(n), intent(n), grade(n), default_flag(n);
    std::vector<double> score(n);

    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.next_double();
        if (u <= 0.0) u = 0x1.0p-53;
        age[i] = 20 + std::min<std::int64_t>(static_cast<std::int64_t>(-std::log(u) * 9.0), 50);

        const double wealth = normal();
        income[i] = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(std::exp(10.95 + 0.55 * wealth))), 4000, 6000000);

        const double home_u = rng.next_double() + 0.25 * wealth;
        home[i] = home_u < 0.45 ? 3 /*RENT*/ : (home_u < 0.55 ? 1 /*OTHER*/
                                                              : (home_u < 0.80 ? 0 /*MORTGAGE*/ : 2 /*OWN*/));

        emp[i] = detail::round_scaled(
            std::clamp(static_cast<double>(age[i] - 18) * rng.next_double(), 0.0, 40.0), 2.0);

        intent[i] = static_cast<int>(rng.uniform_u64(kIntent.size()));

        const double credit_quality = 0.75 * normal() - 0.35 * wealth; // higher = worse
        const double gu =
            0.5 * (1.0 + std::erf((credit_quality) / (1.2 * 1.4142135623730951))); // rough cdf
        grade[i] = 0;
        while (grade[i] < 6 && gu > kGradeCdf[grade[i]]) ++grade[i];

        amount[i] = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(std::exp(8.6 + 0.5 * normal() + 0.15 * wealth))),
            500, 35000);

        // interest rate tracks the grade closely; together with the
        // default-history flag this gives several near-copies of one latent
        // risk factor, the way bureau features echo each other in practice
        rate[i] = detail::round_scaled(
            std::clamp(5.0 + 2.2 * static_cast<double>(grade[i]) + 0.3 * normal(), 5.42, 23.22),
            100.0);

        pct[i] = detail::round_scaled(
            std::clamp(static_cast<double>(amount[i]) / static_cast<double>(income[i]), 0.01, 0.83),
            100.0);

        default_flag[i] = rng.next_double() < 1.0 / (1.0 + std::exp(1.8 - 0.9 * (grade[i] - 2))) ? 1 : 0;

        hist[i] = std::clamp<std::int64_t>(
            static_cast<std::int64_t>(std::llround(static_cast<double>(age[i] - 18) * 0.4 + 0.8 * normal())),
            2, 30);

        static constexpr double kIntentRisk[] = {0.00, 0.00, -0.05, 0.15, 0.05, 0.10};
        double s = 1.3 * (static_cast<double>(grade[i]) / 6.0);
        s += 2.2 * pct[i];
        // loans eating a large income share default almost surely
        s += 3.0 * std::max(0.0, pct[i] - 0.35);
        s += 0.12 * (rate[i] - 11.0);
        s += home[i] == 3 ? 0.5 : (home[i] == 1 ? 0.25 : 0.0);
        s += default_flag[i] ? 0.5 : 0.0;
        s -= 0.35 * std::log(static_cast<double>(income[i]) / 60000.0);
        s -= 0.012 * static_cast<double>(age[i] - 30);
        s += kIntentRisk[intent[i]];
        s += opts.noise_scale * normal();
        score[i] = s;
    }

    // some defaults are shocks no feature explains (job loss, illness);
    // they spread the default class across the whole feature space
    std::vector<bool> shock(n, false);
    {
        Rng shock_rng(derive_seed(opts.seed, "shock"));
        for (std::size_t i = 0; i < n; ++i) shock[i] = shock_rng.next_double() < opts.shock_rate;
    }

    // threshold the structural score so that score-driven defaults plus
    // shocks together hit the requested positive share
    const double score_share =
        std::clamp((opts.positive_rate - opts.shock_rate) / std::max(1.0 - opts.shock_rate, 1e-9),
                   0.0, 1.0);
    std::vector<double> sorted_scores = score;
    std::sort(sorted_scores.begin(), sorted_scores.end());
    const std::size_t idx = std::min(
        n - 1, static_cast<std::size_t>(std::floor((1.0 - score_share) * static_cast<double>(n))));
    const double threshold = sorted_scores[idx];

    // missingness comes last so labels never depend on it
    std::vector<bool> miss_emp(n, false), miss_rate(n, false);
    if (opts.with_missing) {
        for (std::size_t i = 0; i < n; ++i) {
            miss_emp[i] = rng.next_double() < 0.04;
            miss_rate[i] = rng.next_double() < 0.06;
        }
    }

    Dataset ds;
    auto categorical = [](const std::vector<std::string>& domain) {
        return ColumnType{TypeKind::categorical, domain};
    };
    ds.schema.columns = {
        {"person_age", ColumnType{TypeKind::integer, {}}},
        {"person_income", ColumnType{TypeKind::integer, {}}},
        {"person_home_ownership", categorical(kHome)},
        {"person_emp_length", ColumnType{TypeKind::floating, {}}},
        {"loan_intent", categorical(kIntent)},
        {"loan_grade", categorical(kGrade)},
        {"loan_amnt", ColumnType{TypeKind::integer, {}}},
        {"loan_int_rate", ColumnType{TypeKind::floating, {}}},
        {"loan_percent_income", ColumnType{TypeKind::floating, {}}},
        {"cb_person_default_on_file", categorical({"N", "Y"})},
        {"cb_person_cred_hist_length", ColumnType{TypeKind::integer, {}}},
        {"loan_status", ColumnType{TypeKind::integer, {}}},
    };
    ds.schema.target = "loan_status";

    ds.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<CellValue> row;
        row.reserve(12);
        row.emplace_back(age[i]);
        row.emplace_back(income[i]);
        row.emplace_back(kHome[static_cast<std::size_t>(home[i])]);
        row.emplace_back(miss_emp[i] ? kMissing : CellValue{emp[i]});
        row.emplace_back(kIntent[static_cast<std::size_t>(intent[i])]);
        row.emplace_back(kGrade[static_cast<std::size_t>(grade[i])]);
        row.emplace_back(amount[i]);
        row.emplace_back(miss_rate[i] ? kMissing : CellValue{rate[i]});
        row.emplace_back(pct[i]);
        row.emplace_back(std::string(default_flag[i] ? "Y" : "N"));
        row.emplace_back(hist[i]);
        row.emplace_back(static_cast<std::int64_t>((score[i] > threshold || shock[i]) ? 1 : 0));
        ds.rows.push_back(std::move(row));
        ds.row_ids.push_back(static_cast<std::int64_t>(i));
    }

    // shrink declared domains to the values actually observed
    for (std::size_t c = 0; c < ds.n_cols(); ++c) {
        if (ds.schema.columns[c].type.kind != TypeKind::categorical) continue;
        std::set<std::string> seen;
        for (const auto& row : ds.rows)
            if (!is_missing(row[c])) seen.insert(std::get<std::string>(row[c]));
        ds.schema.columns[c].type.domain.assign(seen.begin(), seen.end());
    }
    return ds;
}

} // namespace smudge
