#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smudge/exceptions.hpp"
#include "smudge/rng.hpp"
#include "smudge/table.hpp"

namespace smudge {

// ---------------------------------------------------------------------------
// Row filtering
// ---------------------------------------------------------------------------

/// Removes every row containing at least one Missing cell; order and the
/// surviving row_ids are preserved.
inline Dataset drop_missing_rows(const Dataset& ds) {
    Dataset out;
    out.schema = ds.schema;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        bool any_missing = false;
        for (const auto& cell : ds.rows[r])
            if (is_missing(cell)) {
                any_missing = true;
                break;
            }
        if (any_missing) continue;
        out.rows.push_back(ds.rows[r]);
        out.row_ids.push_back(ds.row_ids[r]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Binning
// ---------------------------------------------------------------------------

/// Maps a numeric column into ordered intervals. Cut points are strictly
/// increasing; bins are left-closed, with unbounded outer bins. When `as`
/// is set the binned column is appended under that name and the source
/// column is kept; otherwise the source column is replaced in place.
struct BinningSpec {
    std::string feature;
    std::vector<double> cuts;
    std::vector<std::string> labels; // count = cuts + 1
    std::optional<std::string> as;

    void validate() const {
        if (cuts.empty()) throw ConfigError("binning '" + feature + "': cuts must be non-empty");
        for (std::size_t i = 1; i < cuts.size(); ++i)
            if (!(cuts[i - 1] < cuts[i]))
                throw ConfigError("binning '" + feature + "': cuts must be strictly increasing");
        if (labels.size() != cuts.size() + 1)
            throw ConfigError("binning '" + feature + "': need " + std::to_string(cuts.size() + 1) +
                              " labels, got " + std::to_string(labels.size()));
        std::set<std::string> seen(labels.begin(), labels.end());
        if (seen.size() != labels.size())
            throw ConfigError("binning '" + feature + "': labels must be unique");
    }

    const std::string& label_for(double v) const {
        std::size_t i = 0;
        while (i < cuts.size() && v >= cuts[i]) ++i;
        return labels[i];
    }
};

inline Dataset bin_feature(const Dataset& ds, const BinningSpec& spec) {
    spec.validate();
    const std::size_t col = ds.schema.require_index(spec.feature);
    const ColumnType& type = ds.schema.columns[col].type;
    if (!type.is_numeric())
        throw ConfigError("binning '" + spec.feature + "': feature must be numeric");
    if (spec.as && ds.schema.index_of(*spec.as))
        throw ConfigError("binning '" + spec.feature + "': output column '" + *spec.as +
                          "' already exists");

    Dataset out = ds;
    const std::size_t dest = spec.as ? out.n_cols() : col;
    if (spec.as) {
        out.schema.columns.push_back(SchemaColumn{*spec.as, ColumnType{TypeKind::categorical, {}}});
        for (auto& row : out.rows) row.push_back(kMissing);
    }
    for (auto& row : out.rows) {
        const CellValue& src = row[col];
        if (is_missing(src)) {
            row[dest] = kMissing;
            continue;
        }
        row[dest] = CellValue{spec.label_for(numeric_cell_value(src))};
    }
    // the domain is the declared label vocabulary, not the observed subset:
    // binning two splits of one dataset must yield the same schema even when
    // a bin is unpopulated on one side
    std::set<std::string> vocabulary(spec.labels.begin(), spec.labels.end());
    ColumnType binned{TypeKind::categorical, {vocabulary.begin(), vocabulary.end()}};
    out.schema.columns[dest].type = std::move(binned);
    return out;
}

/// Quartile cut points (linear interpolation between closest ranks) of a
/// numeric column; duplicates collapse, so degenerate distributions yield
/// fewer bins.
inline std::vector<double> quartile_cuts(const Dataset& ds, const std::string& feature) {
    const std::size_t col = ds.schema.require_index(feature);
    std::vector<double> values;
    for (const auto& row : ds.rows)
        if (!is_missing(row[col])) values.push_back(numeric_cell_value(row[col]));
    if (values.size() < 4)
        throw ConfigError("quartile binning '" + feature + "': not enough values");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double h = q * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const double frac = h - static_cast<double>(lo);
        if (lo + 1 >= values.size()) return values.back();
        return values[lo] + frac * (values[lo + 1] - values[lo]);
    };
    std::vector<double> cuts{quantile(0.25), quantile(0.5), quantile(0.75)};
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

inline std::vector<std::string> default_bin_labels(std::size_t n_bins) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n_bins; ++i) labels.push_back("q" + std::to_string(i + 1));
    return labels;
}

// ---------------------------------------------------------------------------
// Numeric encoding
// ---------------------------------------------------------------------------

/// Fully numeric view of a dataset: features scaled/coded to doubles, labels
/// as small integer codes.
struct EncodedMatrix {
    std::vector<double> x; // row-major, rows * cols
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<int> y;
    std::vector<std::string> feature_names;
    std::vector<std::int64_t> row_ids;

    double at(std::size_t r, std::size_t c) const { return x[r * n_cols + c]; }
    const double* row(std::size_t r) const { return x.data() + r * n_cols; }
};

struct EncodeReport {
    std::size_t unseen_categories = 0; // cells mapped to code -1
};

/// Column coders are fitted on one (training) dataset and then applied to
/// any dataset with the same schema: numeric and date columns min-max scale
/// with the fitted bounds, booleans map to 0/1, categorical and string
/// columns take ordinal codes assigned by sorted category name. Categories
/// unseen at fit time map to -1.
class Encoder {
public:
    static Encoder fit(const Dataset& ds) {
        if (!ds.schema.target) throw ConfigError("encode requires a designated target column");
        Encoder enc;
        enc.schema_ = ds.schema;
        const std::size_t target_col = ds.schema.require_index(*ds.schema.target);
        for (std::size_t c = 0; c < ds.n_cols(); ++c) {
            if (c == target_col) continue;
            ColumnCoder coder;
            coder.column = c;
            const ColumnType& type = ds.schema.columns[c].type;
            if (type.kind == TypeKind::categorical || type.kind == TypeKind::text) {
                std::set<std::string> seen;
                for (const auto& row : ds.rows) {
                    require_observed(row[c], ds.schema.columns[c].name);
                    seen.insert(std::get<std::string>(row[c]));
                }
                int code = 0;
                for (const auto& v : seen) coder.codes[v] = code++;
            } else if (type.kind != TypeKind::boolean) {
                double mn = 0.0, mx = 0.0;
                bool first = true;
                for (const auto& row : ds.rows) {
                    require_observed(row[c], ds.schema.columns[c].name);
                    const double v = numeric_cell_value(row[c]);
                    mn = first ? v : std::min(mn, v);
                    mx = first ? v : std::max(mx, v);
                    first = false;
                }
                coder.min = mn;
                coder.max = mx;
            }
            enc.coders_.push_back(std::move(coder));
        }
        // target class codes by sorted rendered value
        std::set<std::string> classes;
        for (const auto& row : ds.rows) {
            require_observed(row[target_col], *ds.schema.target);
            classes.insert(render_cell(row[target_col]));
        }
        if (classes.size() < 2) throw ConfigError("encode: target has fewer than 2 classes");
        int code = 0;
        for (const auto& v : classes) enc.target_codes_[v] = code++;
        enc.target_col_ = target_col;
        return enc;
    }

    EncodedMatrix transform(const Dataset& ds, EncodeReport* report = nullptr) const {
        if (!(ds.schema == schema_))
            throw ConfigError("encode: dataset schema differs from the fitted schema");
        EncodedMatrix m;
        m.n_rows = ds.n_rows();
        m.n_cols = coders_.size();
        m.x.resize(m.n_rows * m.n_cols);
        m.row_ids = ds.row_ids;
        for (const auto& coder : coders_) m.feature_names.push_back(schema_.columns[coder.column].name);
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            for (std::size_t j = 0; j < coders_.size(); ++j) {
                const auto& coder = coders_[j];
                const CellValue& cell = ds.rows[r][coder.column];
                require_observed(cell, schema_.columns[coder.column].name);
                const ColumnType& type = schema_.columns[coder.column].type;
                double v;
                if (type.kind == TypeKind::categorical || type.kind == TypeKind::text) {
                    auto it = coder.codes.find(std::get<std::string>(cell));
                    if (it == coder.codes.end()) {
                        v = -1.0;
                        if (report) ++report->unseen_categories;
                    } else {
                        v = static_cast<double>(it->second);
                    }
                } else if (type.kind == TypeKind::boolean) {
                    v = std::get<bool>(cell) ? 1.0 : 0.0;
                } else {
                    const double raw = numeric_cell_value(cell);
                    v = coder.max > coder.min ? (raw - coder.min) / (coder.max - coder.min) : 0.0;
                }
                m.x[r * m.n_cols + j] = v;
            }
            auto it = target_codes_.find(render_cell(ds.rows[r][target_col_]));
            if (it == target_codes_.end())
                throw ConfigError("encode: target class '" +
                                  render_cell(ds.rows[r][target_col_]) +
                                  "' was not observed at fit time");
            m.y.push_back(it->second);
        }
        return m;
    }

    std::size_t n_classes() const { return target_codes_.size(); }

    /// code -> rendered class value (identity over observed categories)
    std::vector<std::string> class_names() const {
        std::vector<std::string> names(target_codes_.size());
        for (const auto& [name, code] : target_codes_) names[static_cast<std::size_t>(code)] = name;
        return names;
    }

private:
    struct ColumnCoder {
        std::size_t column = 0;
        double min = 0.0, max = 0.0;        // numeric/date
        std::map<std::string, int> codes;   // categorical/text
    };

    static void require_observed(const CellValue& cell, const std::string& column) {
        if (is_missing(cell))
            throw ConfigError("encode requires fully observed rows; column '" + column +
                              "' has a Missing cell");
    }

    Schema schema_;
    std::vector<ColumnCoder> coders_;
    std::map<std::string, int> target_codes_;
    std::size_t target_col_ = 0;
};

inline EncodedMatrix encode(const Dataset& ds, EncodeReport* report = nullptr) {
    return Encoder::fit(ds).transform(ds, report);
}

// ---------------------------------------------------------------------------
// Stratified split
// ---------------------------------------------------------------------------

struct SplitPair {
    Dataset train;
    Dataset test;
    double ratio = 0.8;
    std::uint64_t seed = 0;
};

/// Per class, round_half_up(ratio * class_count) rows go to train (clamped
/// so both sides keep at least one row); membership is decided by a seeded
/// shuffle, and both sides keep the input row order.
inline SplitPair stratified_split(const Dataset& ds, double ratio, std::uint64_t seed) {
    if (!ds.schema.target) throw ConfigError("split requires a designated target column");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie strictly in (0,1)");
    const std::size_t target = ds.schema.require_index(*ds.schema.target);

    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        if (is_missing(ds.rows[r][target]))
            throw ConfigError("split: target column has Missing cells");
        by_class[render_cell(ds.rows[r][target])].push_back(r);
    }
    for (const auto& [cls, members] : by_class)
        if (members.size() < 2)
            throw ConfigError("split: class '" + cls + "' has fewer than 2 rows");

    std::vector<bool> in_train(ds.n_rows(), false);
    Rng rng(seed);
    for (auto& [cls, members] : by_class) {
        // Fisher-Yates on the class member list
        for (std::size_t i = members.size() - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform_u64(i + 1));
            std::swap(members[i], members[j]);
        }
        const std::size_t m = members.size();
        std::size_t n_train = round_half_up(ratio * static_cast<double>(m));
        n_train = std::clamp<std::size_t>(n_train, 1, m - 1);
        for (std::size_t i = 0; i < n_train; ++i) in_train[members[i]] = true;
    }

    SplitPair pair;
    pair.ratio = ratio;
    pair.seed = seed;
    pair.train.schema = ds.schema;
    pair.test.schema = ds.schema;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        Dataset& side = in_train[r] ? pair.train : pair.test;
        side.rows.push_back(ds.rows[r]);
        side.row_ids.push_back(ds.row_ids[r]);
    }
    return pair;
}

} // namespace smudge
