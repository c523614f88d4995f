#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "smudge/csv.hpp"
#include "smudge/exceptions.hpp"
#include "smudge/util.hpp"

namespace smudge {

// ---------------------------------------------------------------------------
// Calendar dates (ISO-8601 days, proleptic Gregorian)
// ---------------------------------------------------------------------------

struct Date {
    std::int64_t days = 0; // days since 1970-01-01

    auto operator<=>(const Date&) const = default;
};

namespace detail {
// Howard Hinnant's civil <-> serial day algorithms.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

inline unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return lengths[m - 1];
}
} // namespace detail

/// Strict `YYYY-MM-DD` parse; anything else is rejected.
inline std::optional<Date> parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto digits = [](std::string_view t) {
        for (char c : t)
            if (c < '0' || c > '9') return false;
        return true;
    };
    if (!digits(s.substr(0, 4)) || !digits(s.substr(5, 2)) || !digits(s.substr(8, 2)))
        return std::nullopt;
    std::int64_t y = 0, m = 0, d = 0;
    parse_int64(s.substr(0, 4), y);
    parse_int64(s.substr(5, 2), m);
    parse_int64(s.substr(8, 2), d);
    if (m < 1 || m > 12) return std::nullopt;
    if (d < 1 || d > detail::days_in_month(y, static_cast<unsigned>(m))) return std::nullopt;
    return Date{detail::days_from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d))};
}

inline std::string format_date(Date date) {
    std::int64_t y;
    unsigned m, d;
    detail::civil_from_days(date.days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Column types and cells
// ---------------------------------------------------------------------------

enum class TypeKind { integer, floating, boolean, categorical, text, date };

inline const char* type_kind_name(TypeKind k) {
    switch (k) {
    case TypeKind::integer: return "integer";
    case TypeKind::floating: return "float";
    case TypeKind::boolean: return "boolean";
    case TypeKind::categorical: return "categorical";
    case TypeKind::text: return "string";
    case TypeKind::date: return "date";
    }
    return "?";
}

inline std::optional<TypeKind> type_kind_from_name(std::string_view s) {
    if (s == "integer") return TypeKind::integer;
    if (s == "float") return TypeKind::floating;
    if (s == "boolean") return TypeKind::boolean;
    if (s == "categorical") return TypeKind::categorical;
    if (s == "string") return TypeKind::text;
    if (s == "date") return TypeKind::date;
    return std::nullopt;
}

/// A column's type. Categorical columns carry their observed value domain
/// (distinct non-missing strings, sorted).
struct ColumnType {
    TypeKind kind = TypeKind::text;
    std::vector<std::string> domain;

    bool is_numeric() const { return kind == TypeKind::integer || kind == TypeKind::floating; }
    bool operator==(const ColumnType&) const = default;
};

/// A cell holds a typed scalar or is Missing (monostate).
/// Missing serializes to an empty CSV field.
using CellValue = std::variant<std::monostate, std::int64_t, double, bool, std::string, Date>;

inline bool is_missing(const CellValue& v) { return std::holds_alternative<std::monostate>(v); }

inline const CellValue kMissing{};

/// Canonical text form of a cell, used for CSV emission and fingerprints.
/// Doubles use the shortest round-trip representation.
inline std::string render_cell(const CellValue& v) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(double x) const { return format_double(x); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(Date d) const { return format_date(d); }
    };
    return std::visit(Visitor{}, v);
}

/// Parse a non-empty CSV field under a known column type.
inline std::optional<CellValue> parse_cell(std::string_view text, const ColumnType& type) {
    switch (type.kind) {
    case TypeKind::integer: {
        std::int64_t v;
        if (parse_int64(text, v)) return CellValue{v};
        return std::nullopt;
    }
    case TypeKind::floating: {
        double v;
        if (parse_double(text, v)) return CellValue{v};
        return std::nullopt;
    }
    case TypeKind::boolean: {
        const std::string low = lower_copy(text);
        if (low == "true") return CellValue{true};
        if (low == "false") return CellValue{false};
        return std::nullopt;
    }
    case TypeKind::date: {
        if (auto d = parse_date(text)) return CellValue{*d};
        return std::nullopt;
    }
    case TypeKind::categorical:
    case TypeKind::text:
        return CellValue{std::string(text)};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Schema and dataset
// ---------------------------------------------------------------------------

struct SchemaColumn {
    std::string name;
    ColumnType type;

    bool operator==(const SchemaColumn&) const = default;
};

struct Schema {
    std::vector<SchemaColumn> columns;
    std::optional<std::string> target;

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == name) return i;
        return std::nullopt;
    }

    std::size_t require_index(std::string_view name) const {
        if (auto i = index_of(name)) return *i;
        throw ConfigError("unknown column: " + std::string(name));
    }

    void validate() const {
        std::set<std::string> seen;
        for (const auto& c : columns)
            if (!seen.insert(c.name).second)
                throw ConfigError("duplicate column name: " + c.name);
        if (target && !index_of(*target))
            throw ConfigError("target column not found: " + *target);
    }

    bool operator==(const Schema&) const = default;
};

/// An immutable-by-convention table: schema, rows of cells, and stable
/// per-row identifiers assigned at load and preserved through corruption.
struct Dataset {
    Schema schema;
    std::vector<std::vector<CellValue>> rows;
    std::vector<std::int64_t> row_ids;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return schema.columns.size(); }

    const CellValue& cell(std::size_t r, std::size_t c) const { return rows[r][c]; }
    CellValue& cell(std::size_t r, std::size_t c) { return rows[r][c]; }

    std::int64_t next_row_id() const {
        std::int64_t m = -1;
        for (auto id : row_ids) m = std::max(m, id);
        return m + 1;
    }

    std::optional<std::size_t> row_index_of(std::int64_t row_id) const {
        for (std::size_t i = 0; i < row_ids.size(); ++i)
            if (row_ids[i] == row_id) return i;
        return std::nullopt;
    }
};

/// Cell-for-cell equality; row_ids are not compared.
inline bool cell_equal(const Dataset& a, const Dataset& b) {
    if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) return false;
    for (std::size_t r = 0; r < a.n_rows(); ++r)
        for (std::size_t c = 0; c < a.n_cols(); ++c)
            if (a.rows[r][c] != b.rows[r][c]) return false;
    return true;
}

/// Hash of schema plus all cell values in row order. Stable across CSV
/// round-trips because cells render canonically.
inline std::string dataset_fingerprint(const Dataset& ds) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& col : ds.schema.columns) {
        h = fnv1a64(col.name, h);
        h = fnv1a64("\x1f", h);
        h = fnv1a64(type_kind_name(col.type.kind), h);
        h = fnv1a64("\x1e", h);
    }
    for (const auto& row : ds.rows) {
        for (const auto& cell : row) {
            h = fnv1a64(render_cell(cell), h);
            h = fnv1a64("\x1f", h);
        }
        h = fnv1a64("\x1e", h);
    }
    return to_hex(h);
}

// ---------------------------------------------------------------------------
// Schema inference
// ---------------------------------------------------------------------------

struct InferOptions {
    std::size_t categorical_distinct_cap = 50;
};

/// Assigns each column the narrowest type that parses every non-empty value,
/// in priority order boolean -> integer -> float -> date -> categorical
/// (at most distinct-cap values) -> string. Deterministic and invariant to
/// row order.
inline Schema infer_schema(const std::vector<std::vector<std::string>>& raw_rows,
                           const std::vector<std::string>& header,
                           const InferOptions& opts = {}) {
    const std::size_t width = header.size();
    for (std::size_t r = 0; r < raw_rows.size(); ++r)
        if (raw_rows[r].size() != width)
            throw ConfigError("csv: row " + std::to_string(r + 1) + " has " +
                              std::to_string(raw_rows[r].size()) + " fields, expected " +
                              std::to_string(width));

    Schema schema;
    schema.columns.resize(width);
    for (std::size_t c = 0; c < width; ++c) {
        bool all_bool = true, all_int = true, all_float = true, all_date = true;
        std::set<std::string> distinct;
        std::size_t non_empty = 0;
        for (const auto& row : raw_rows) {
            const std::string& v = row[c];
            if (v.empty()) continue;
            ++non_empty;
            if (all_bool) {
                const std::string low = lower_copy(v);
                all_bool = (low == "true" || low == "false");
            }
            if (all_int) {
                std::int64_t dummy;
                all_int = parse_int64(v, dummy);
            }
            if (all_float) {
                double dummy;
                all_float = parse_double(v, dummy);
            }
            if (all_date) all_date = parse_date(v).has_value();
            if (distinct.size() <= opts.categorical_distinct_cap) distinct.insert(v);
        }
        ColumnType type;
        if (non_empty == 0) {
            type.kind = TypeKind::text; // nothing to infer from
        } else if (all_bool) {
            type.kind = TypeKind::boolean;
        } else if (all_int) {
            type.kind = TypeKind::integer;
        } else if (all_float) {
            type.kind = TypeKind::floating;
        } else if (all_date) {
            type.kind = TypeKind::date;
        } else if (distinct.size() <= opts.categorical_distinct_cap) {
            type.kind = TypeKind::categorical;
            type.domain.assign(distinct.begin(), distinct.end());
        } else {
            type.kind = TypeKind::text;
        }
        schema.columns[c] = SchemaColumn{header[c], std::move(type)};
    }
    schema.validate();
    return schema;
}

// ---------------------------------------------------------------------------
// CSV ingestion / emission
// ---------------------------------------------------------------------------

struct ReadOptions {
    std::optional<Schema> schema;          // inferred when absent
    std::optional<std::string> target;     // designated target column
    InferOptions infer;
};

inline Dataset dataset_from_raw(const std::vector<std::vector<std::string>>& raw,
                                const ReadOptions& opts = {}) {
    if (raw.empty()) throw ConfigError("csv: missing header row");
    const auto& header = raw.front();
    std::vector<std::vector<std::string>> body(raw.begin() + 1, raw.end());

    Dataset ds;
    if (opts.schema) {
        ds.schema = *opts.schema;
        if (ds.schema.columns.size() != header.size())
            throw ConfigError("csv: header has " + std::to_string(header.size()) +
                              " columns, schema expects " + std::to_string(ds.schema.columns.size()));
    } else {
        ds.schema = infer_schema(body, header, opts.infer);
    }
    if (opts.target) {
        ds.schema.require_index(*opts.target);
        ds.schema.target = opts.target;
    }
    ds.schema.validate();

    const std::size_t width = ds.schema.columns.size();
    ds.rows.reserve(body.size());
    ds.row_ids.reserve(body.size());
    for (std::size_t r = 0; r < body.size(); ++r) {
        if (body[r].size() != width)
            throw ConfigError("csv: row " + std::to_string(r + 1) + " has " +
                              std::to_string(body[r].size()) + " fields, expected " +
                              std::to_string(width));
        std::vector<CellValue> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            const std::string& text = body[r][c];
            if (text.empty()) {
                row[c] = kMissing;
                continue;
            }
            auto parsed = parse_cell(text, ds.schema.columns[c].type);
            if (!parsed)
                throw ConfigError("csv: type mismatch at row " + std::to_string(r + 1) +
                                  ", column '" + ds.schema.columns[c].name + "': '" + text +
                                  "' is not a valid " +
                                  type_kind_name(ds.schema.columns[c].type.kind));
            row[c] = std::move(*parsed);
        }
        ds.rows.push_back(std::move(row));
        ds.row_ids.push_back(static_cast<std::int64_t>(r));
    }
    return ds;
}

inline Dataset read_csv(const std::string& path, const ReadOptions& opts = {}) {
    return dataset_from_raw(csv::parse(csv::read_file(path)), opts);
}

inline std::string to_csv_string(const Dataset& ds) {
    std::string out;
    std::vector<std::string> fields;
    fields.reserve(ds.n_cols());
    for (const auto& col : ds.schema.columns) fields.push_back(col.name);
    out += csv::write_row(fields);
    for (const auto& row : ds.rows) {
        fields.clear();
        for (const auto& cell : row) fields.push_back(render_cell(cell));
        out += csv::write_row(fields);
    }
    return out;
}

/// Round-trip safe: read_csv(write_csv(ds)) is cell-equal to ds
/// (row_ids are re-assigned on load).
inline void write_csv(const Dataset& ds, const std::string& path) {
    csv::write_file(path, to_csv_string(ds));
}

// ---------------------------------------------------------------------------
// Per-column statistics
// ---------------------------------------------------------------------------

/// Descriptive statistics over the non-missing cells of one column.
/// std is the population standard deviation (divide by count).
struct FeatureStats {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<std::string> distinct;       // categorical/string columns
    std::optional<Date> date_min, date_max;   // date columns

    bool empty() const { return count == 0; }
};

inline double numeric_cell_value(const CellValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    if (const auto* dt = std::get_if<Date>(&v)) return static_cast<double>(dt->days);
    throw ConfigError("cell has no numeric value");
}

inline FeatureStats column_stats(const Dataset& ds, std::string_view feature) {
    const std::size_t c = ds.schema.require_index(feature);
    const ColumnType& type = ds.schema.columns[c].type;
    FeatureStats st;

    if (type.kind == TypeKind::categorical || type.kind == TypeKind::text) {
        std::set<std::string> distinct;
        for (const auto& row : ds.rows) {
            if (is_missing(row[c])) continue;
            ++st.count;
            distinct.insert(std::get<std::string>(row[c]));
        }
        st.distinct.assign(distinct.begin(), distinct.end());
        return st;
    }

    double sum = 0.0, sumsq = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& row : ds.rows) {
        if (is_missing(row[c])) continue;
        const double v = numeric_cell_value(row[c]);
        ++st.count;
        sum += v;
        sumsq += v * v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    if (st.count == 0) return st;
    const double n = static_cast<double>(st.count);
    st.mean = sum / n;
    st.min = mn;
    st.max = mx;
    const double var = std::max(0.0, sumsq / n - st.mean * st.mean);
    st.stddev = std::sqrt(var);
    if (type.kind == TypeKind::date) {
        st.date_min = Date{static_cast<std::int64_t>(mn)};
        st.date_max = Date{static_cast<std::int64_t>(mx)};
    }
    return st;
}

} // namespace smudge
