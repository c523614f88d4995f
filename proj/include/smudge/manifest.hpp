#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "smudge/exceptions.hpp"
#include "smudge/model.hpp"
#include "smudge/table.hpp"

namespace smudge {

/// One injected change. Cell events carry the column name; whole-row events
/// (duplicates) use column "*" and reference the parent row.
struct CorruptionRecord {
    std::int64_t row_id = 0;
    std::string column;     // "*" for row events
    ErrorKind kind = ErrorKind::missing;
    CellValue original;     // parent row id boxed as integer for "*" records
    CellValue corrupted;    // new row id boxed as integer for "*" records
    std::optional<std::int64_t> parent;
    std::string model_fingerprint;

    bool is_row_event() const { return column == "*"; }
};

/// Replayable provenance log of a corruption run. Applying the records to
/// the fingerprinted clean dataset reproduces the corrupted dataset exactly;
/// extended mode reads its exclusion sets from here.
struct CorruptionManifest {
    std::string dataset_fingerprint;
    std::vector<std::string> model_fingerprints;
    std::map<std::string, double> cumulative_p; // "kind/feature" -> achieved rate
    std::vector<CorruptionRecord> records;

    static std::string rate_key(ErrorKind kind, const std::string& feature) {
        return std::string(error_kind_name(kind)) + "/" + feature;
    }

    std::size_t count_records(ErrorKind kind, const std::string& column) const {
        std::size_t n = 0;
        for (const auto& r : records)
            if (r.kind == kind && r.column == column) ++n;
        return n;
    }

    /// Row ids already corrupted by `kind` on `column` (cell events), or
    /// parent ids already duplicated (row events).
    std::unordered_set<std::int64_t> touched_rows(ErrorKind kind, const std::string& column) const {
        std::unordered_set<std::int64_t> ids;
        for (const auto& r : records)
            if (r.kind == kind && r.column == column)
                ids.insert(r.is_row_event() && r.parent ? *r.parent : r.row_id);
        return ids;
    }
};

// ---------------------------------------------------------------------------
// JSON-lines serialization
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json cell_to_json(const CellValue& v) {
    struct Visitor {
        nlohmann::json operator()(std::monostate) const { return nullptr; }
        nlohmann::json operator()(std::int64_t x) const { return x; }
        nlohmann::json operator()(double x) const { return x; }
        nlohmann::json operator()(bool b) const { return b; }
        nlohmann::json operator()(const std::string& s) const { return s; }
        nlohmann::json operator()(Date d) const { return format_date(d); }
    };
    return std::visit(Visitor{}, v);
}

inline CellValue cell_from_json(const nlohmann::json& j, const ColumnType& type,
                                const std::string& where) {
    if (j.is_null()) return kMissing;
    switch (type.kind) {
    case TypeKind::integer:
        if (j.is_number_integer() || j.is_number_unsigned()) return CellValue{j.get<std::int64_t>()};
        break;
    case TypeKind::floating:
        if (j.is_number()) return CellValue{j.get<double>()};
        break;
    case TypeKind::boolean:
        if (j.is_boolean()) return CellValue{j.get<bool>()};
        break;
    case TypeKind::categorical:
    case TypeKind::text:
        if (j.is_string()) return CellValue{j.get<std::string>()};
        break;
    case TypeKind::date:
        if (j.is_string()) {
            if (auto d = parse_date(j.get<std::string>())) return CellValue{*d};
        }
        break;
    }
    throw ConfigError(where + ": value does not match column type " +
                      type_kind_name(type.kind));
}

} // namespace detail

inline std::string manifest_to_jsonl(const CorruptionManifest& m) {
    nlohmann::json header;
    header["dataset_fingerprint"] = m.dataset_fingerprint;
    header["models"] = m.model_fingerprints;
    header["cumulative_p"] = m.cumulative_p;
    std::string out = header.dump();
    out.push_back('\n');
    for (const auto& r : m.records) {
        nlohmann::json j;
        j["row_id"] = r.row_id;
        j["column"] = r.column;
        j["kind"] = error_kind_name(r.kind);
        j["original"] = detail::cell_to_json(r.original);
        j["corrupted"] = detail::cell_to_json(r.corrupted);
        j["parent"] = r.parent ? nlohmann::json(*r.parent) : nlohmann::json(nullptr);
        j["model"] = r.model_fingerprint;
        out += j.dump();
        out.push_back('\n');
    }
    return out;
}

inline void write_manifest(const CorruptionManifest& m, const std::string& path) {
    csv::write_file(path, manifest_to_jsonl(m));
}

/// Parse a manifest against the schema of the dataset it belongs to; the
/// schema supplies the cell types the JSON scalars are bound to.
inline CorruptionManifest manifest_from_jsonl(const std::string& text, const Schema& schema) {
    CorruptionManifest m;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        const std::string where = "manifest line " + std::to_string(lineno);
        if (j.is_discarded()) throw ConfigError(where + ": invalid JSON");
        if (lineno == 1) {
            if (!j.contains("dataset_fingerprint"))
                throw ConfigError(where + ": header missing dataset_fingerprint");
            m.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
            if (j.contains("models"))
                m.model_fingerprints = j.at("models").get<std::vector<std::string>>();
            if (j.contains("cumulative_p"))
                m.cumulative_p = j.at("cumulative_p").get<std::map<std::string, double>>();
            continue;
        }
        CorruptionRecord r;
        r.row_id = j.at("row_id").get<std::int64_t>();
        r.column = j.at("column").get<std::string>();
        auto kind = error_kind_from_name(j.at("kind").get<std::string>());
        if (!kind) throw ConfigError(where + ": unknown kind");
        r.kind = *kind;
        if (j.contains("parent") && !j.at("parent").is_null())
            r.parent = j.at("parent").get<std::int64_t>();
        if (j.contains("model")) r.model_fingerprint = j.value("model", "");
        if (r.is_row_event()) {
            // row ids boxed as integers
            r.original = CellValue{j.at("original").get<std::int64_t>()};
            r.corrupted = CellValue{j.at("corrupted").get<std::int64_t>()};
        } else {
            const auto col = schema.index_of(r.column);
            if (!col) throw ConfigError(where + ": unknown column '" + r.column + "'");
            const ColumnType& type = schema.columns[*col].type;
            r.original = detail::cell_from_json(j.at("original"), type, where + ".original");
            r.corrupted = detail::cell_from_json(j.at("corrupted"), type, where + ".corrupted");
        }
        m.records.push_back(std::move(r));
    }
    if (lineno == 0) throw ConfigError("manifest: empty file");
    return m;
}

inline CorruptionManifest read_manifest(const std::string& path, const Schema& schema) {
    return manifest_from_jsonl(csv::read_file(path), schema);
}

} // namespace smudge
