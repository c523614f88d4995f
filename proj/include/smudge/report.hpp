#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "smudge/csv.hpp"
#include "smudge/exceptions.hpp"
#include "smudge/experiment.hpp"

namespace smudge {

/// One parsed line of results.csv.
struct ReportRow {
    std::string kind;    // classifier
    std::string error;   // error kind or "none"
    std::string feature;
    double p = 0.0;
    std::string mode;
    double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
    std::string gain;
};

inline std::vector<ReportRow> read_results_csv(const std::string& path) {
    const auto raw = csv::parse(csv::read_file(path));
    if (raw.empty()) throw ConfigError("results: empty file");
    static const std::vector<std::string> required{"kind",     "error",  "feature", "p",
                                                   "mode",     "accuracy", "precision", "recall",
                                                   "f1",       "gain"};
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < raw.front().size(); ++i) col[raw.front()[i]] = i;
    for (const auto& name : required)
        if (!col.count(name)) throw ConfigError("results: missing column '" + name + "'");

    std::vector<ReportRow> rows;
    for (std::size_t r = 1; r < raw.size(); ++r) {
        const auto& line = raw[r];
        if (line.size() < required.size())
            throw ConfigError("results: row " + std::to_string(r) + " has too few fields");
        ReportRow row;
        row.kind = line[col["kind"]];
        row.error = line[col["error"]];
        row.feature = line[col["feature"]];
        row.mode = line[col["mode"]];
        row.gain = line[col["gain"]];
        auto num = [&](const char* name) {
            double v;
            if (!parse_double(line[col[name]], v))
                throw ConfigError("results: row " + std::to_string(r) + ": bad number in '" +
                                  std::string(name) + "'");
            return v;
        };
        row.p = num("p");
        row.accuracy = num("accuracy");
        row.precision = num("precision");
        row.recall = num("recall");
        row.f1 = num("f1");
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Per-error-kind gain tables: mean f1 over features for each classifier at
/// each contamination level, with a direction marker against the clean
/// baseline rows in the same file.
inline std::string render_gains(const std::vector<ReportRow>& rows) {
    std::map<std::string, double> baseline;
    for (const auto& r : rows)
        if (r.error == "none") baseline[r.kind] = r.f1;
    if (baseline.empty()) throw ConfigError("results: no baseline rows (error == 'none')");

    std::string md = "# Gains vs clean baseline\n\n";
    static const char* kinds[] = {"mislabel", "duplicate", "missing", "noise", "outlier"};
    for (const char* kind : kinds) {
        // p -> classifier -> (sum f1, count)
        std::map<double, std::map<std::string, std::pair<double, std::size_t>>> agg;
        for (const auto& r : rows) {
            if (r.error != kind) continue;
            auto& [sum, count] = agg[r.p][r.kind];
            sum += r.f1;
            ++count;
        }
        if (agg.empty()) continue;
        md += std::string("## ") + kind + "\n\n";
        md += "| model |";
        for (const auto& [p, _] : agg) md += " mean f1 @" + format_double(p * 100.0) + "% | gain |";
        md += "\n|---|";
        for (std::size_t i = 0; i < agg.size(); ++i) md += "---|---|";
        md += "\n";
        for (const auto& [model, base_f1] : baseline) {
            md += "| " + model + " |";
            for (const auto& [p, per_model] : agg) {
                auto it = per_model.find(model);
                if (it == per_model.end() || it->second.second == 0) {
                    md += " - | - |";
                    continue;
                }
                const double mean = it->second.first / static_cast<double>(it->second.second);
                md += " " + format_fixed(mean, 4) + " | " +
                      detail::arrow(gain_direction(mean, base_f1)) + " |";
            }
            md += "\n";
        }
        md += "\n";
    }
    return md;
}

/// Table of the k best corrupted runs by f1 (ties by model, error, feature).
inline std::string render_topk(const std::vector<ReportRow>& rows, std::size_t k) {
    if (k < 1) throw ConfigError("report: k must be >= 1");
    std::vector<ReportRow> grid;
    for (const auto& r : rows)
        if (r.error != "none") grid.push_back(r);
    std::sort(grid.begin(), grid.end(), [](const ReportRow& a, const ReportRow& b) {
        if (a.f1 != b.f1) return a.f1 > b.f1;
        return std::tie(a.kind, a.error, a.feature) < std::tie(b.kind, b.error, b.feature);
    });
    if (grid.size() > k) grid.resize(k);

    std::string md = "# Top runs\n\n";
    md += "| model | feature | error | percentage | f1 |\n|---|---|---|---|---|\n";
    for (const auto& r : grid)
        md += "| " + r.kind + " | " + r.feature + " | " + r.error + " | " +
              format_double(r.p * 100.0) + " | " + format_fixed(r.f1, 4) + " |\n";
    return md;
}

} // namespace smudge
