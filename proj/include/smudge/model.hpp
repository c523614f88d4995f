#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "smudge/exceptions.hpp"
#include "smudge/rng.hpp"
#include "smudge/table.hpp"

namespace smudge {

// ---------------------------------------------------------------------------
// Error model: which error, where, how much, selected how
// ---------------------------------------------------------------------------

enum class ErrorKind { missing, noise, outlier, duplicate, mislabel };

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::missing: return "missing";
    case ErrorKind::noise: return "noise";
    case ErrorKind::outlier: return "outlier";
    case ErrorKind::duplicate: return "duplicate";
    case ErrorKind::mislabel: return "mislabel";
    }
    return "?";
}

inline std::optional<ErrorKind> error_kind_from_name(std::string_view s) {
    if (s == "missing") return ErrorKind::missing;
    if (s == "noise") return ErrorKind::noise;
    if (s == "outlier") return ErrorKind::outlier;
    if (s == "duplicate") return ErrorKind::duplicate;
    if (s == "mislabel") return ErrorKind::mislabel;
    return std::nullopt;
}

/// Corruption mode: a fresh injection from the clean baseline, or an
/// incremental top-up of a previously corrupted dataset.
enum class Mode { fresh, extended };

inline const char* mode_name(Mode m) { return m == Mode::fresh ? "new" : "extended"; }

inline std::optional<Mode> mode_from_name(std::string_view s) {
    if (s == "new") return Mode::fresh;
    if (s == "extended") return Mode::extended;
    return std::nullopt;
}

/// How selected rows are drawn from the candidate set: equal weight, or
/// weighted by a named distribution over candidate rank positions.
struct SelectionDistribution {
    enum class Kind { uniform, normal, poisson };
    Kind kind = Kind::uniform;
    double center_fraction = 0.5;  // normal: mean as fraction of candidate count
    double spread_fraction = 0.25; // normal: stddev as fraction of candidate count
    double lambda_fraction = 0.5;  // poisson: lambda as fraction of candidate count

    const char* name() const {
        switch (kind) {
        case Kind::uniform: return "uniform";
        case Kind::normal: return "normal";
        case Kind::poisson: return "poisson";
        }
        return "?";
    }

    void validate(const std::string& where) const {
        if (kind == Kind::normal) {
            if (center_fraction < 0.0 || center_fraction > 1.0)
                throw ConfigError(where + ".center_fraction must lie in [0,1]");
            if (!(spread_fraction > 0.0))
                throw ConfigError(where + ".spread_fraction must be > 0");
        }
        if (kind == Kind::poisson && !(lambda_fraction > 0.0))
            throw ConfigError(where + ".lambda_fraction must be > 0");
    }
};

/// One atomic comparison of a predicate conjunction. Literals are kept in
/// textual form and bound to a column type during validation.
struct PredicateAtom {
    enum class Op { eq, ne, lt, le, gt, ge, in_set };
    std::string column;
    Op op = Op::eq;
    std::vector<std::string> values; // single literal, or the set for in_set

    static std::optional<Op> op_from_name(std::string_view s) {
        if (s == "=") return Op::eq;
        if (s == "!=") return Op::ne;
        if (s == "<") return Op::lt;
        if (s == "<=") return Op::le;
        if (s == ">") return Op::gt;
        if (s == ">=") return Op::ge;
        if (s == "in") return Op::in_set;
        return std::nullopt;
    }

    static const char* op_name(Op op) {
        switch (op) {
        case Op::eq: return "=";
        case Op::ne: return "!=";
        case Op::lt: return "<";
        case Op::le: return "<=";
        case Op::gt: return ">";
        case Op::ge: return ">=";
        case Op::in_set: return "in";
        }
        return "?";
    }
};

/// The empty conjunction means "all rows".
using Predicate = std::vector<PredicateAtom>;

/// The parameter block of one corruption run. The dataset is the operand
/// of apply(), not a field.
struct ErrorModel {
    ErrorKind kind = ErrorKind::missing;
    std::vector<std::string> features; // may be empty only for duplicates (exact copies)
    Predicate predicate;               // empty = all rows
    double p = 0.0;                    // fraction of predicate rows to corrupt
    SelectionDistribution eta;
    Mode mode = Mode::fresh;
    std::uint64_t seed = 0;

    void validate_basic(const std::string& where = "model") const {
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError(where + ".p must lie in [0,1]");
        if (features.empty() && kind != ErrorKind::duplicate)
            throw ConfigError(where + ".features must be non-empty for kind '" +
                              std::string(error_kind_name(kind)) + "'");
        eta.validate(where + ".eta");
    }

    /// Canonical serialization hash; identifies the model in manifests.
    std::string fingerprint() const {
        std::string s = error_kind_name(kind);
        s += '|';
        for (const auto& f : features) {
            s += f;
            s += ',';
        }
        s += '|';
        for (const auto& a : predicate) {
            s += a.column;
            s += PredicateAtom::op_name(a.op);
            for (const auto& v : a.values) {
                s += v;
                s += ';';
            }
            s += ',';
        }
        s += '|';
        s += format_double(p);
        s += '|';
        s += eta.name();
        s += ':';
        s += format_double(eta.center_fraction);
        s += ':';
        s += format_double(eta.spread_fraction);
        s += ':';
        s += format_double(eta.lambda_fraction);
        s += '|';
        s += mode_name(mode);
        s += '|';
        s += std::to_string(seed);
        return to_hex(fnv1a64(s));
    }
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string json_scalar_to_literal(const nlohmann::json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
    if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
    if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
    if (j.is_number_float()) return format_double(j.get<double>());
    throw ConfigError(path + ": literal must be a scalar");
}

inline SelectionDistribution parse_eta(const nlohmann::json& j, const std::string& path) {
    SelectionDistribution eta;
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    const std::string name = j.value("name", "uniform");
    if (name == "uniform") {
        eta.kind = SelectionDistribution::Kind::uniform;
    } else if (name == "normal") {
        eta.kind = SelectionDistribution::Kind::normal;
    } else if (name == "poisson") {
        eta.kind = SelectionDistribution::Kind::poisson;
    } else {
        throw ConfigError(path + ".name: unknown distribution '" + name + "'");
    }
    if (j.contains("center_fraction")) eta.center_fraction = j.at("center_fraction").get<double>();
    if (j.contains("spread_fraction")) eta.spread_fraction = j.at("spread_fraction").get<double>();
    if (j.contains("lambda_fraction")) eta.lambda_fraction = j.at("lambda_fraction").get<double>();
    eta.validate(path);
    return eta;
}

inline Predicate parse_predicate(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path + ": expected an array of atoms");
    Predicate pred;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string apath = path + "[" + std::to_string(i) + "]";
        const auto& a = j[i];
        if (!a.is_object()) throw ConfigError(apath + ": expected an object");
        PredicateAtom atom;
        if (!a.contains("column") || !a.at("column").is_string())
            throw ConfigError(apath + ".column: required string");
        atom.column = a.at("column").get<std::string>();
        if (!a.contains("op") || !a.at("op").is_string())
            throw ConfigError(apath + ".op: required string");
        const std::string opname = a.at("op").get<std::string>();
        auto op = PredicateAtom::op_from_name(opname);
        if (!op) throw ConfigError(apath + ".op: unknown operator '" + opname + "'");
        atom.op = *op;
        if (!a.contains("value")) throw ConfigError(apath + ".value: required");
        const auto& v = a.at("value");
        if (atom.op == PredicateAtom::Op::in_set) {
            if (!v.is_array()) throw ConfigError(apath + ".value: 'in' expects an array");
            for (std::size_t k = 0; k < v.size(); ++k)
                atom.values.push_back(json_scalar_to_literal(v[k], apath + ".value[" + std::to_string(k) + "]"));
            if (atom.values.empty()) throw ConfigError(apath + ".value: 'in' set must be non-empty");
        } else {
            atom.values.push_back(json_scalar_to_literal(v, apath + ".value"));
        }
        pred.push_back(std::move(atom));
    }
    return pred;
}

inline ErrorModel parse_model_object(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    ErrorModel m;
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError(path + ".kind: required string");
    const std::string kind = j.at("kind").get<std::string>();
    auto ek = error_kind_from_name(kind);
    if (!ek) throw ConfigError(path + ".kind: unknown kind '" + kind + "'");
    m.kind = *ek;

    if (j.contains("features")) {
        if (!j.at("features").is_array()) throw ConfigError(path + ".features: expected an array");
        for (const auto& f : j.at("features")) {
            if (!f.is_string()) throw ConfigError(path + ".features: entries must be strings");
            m.features.push_back(f.get<std::string>());
        }
    }
    if (j.contains("predicate")) m.predicate = parse_predicate(j.at("predicate"), path + ".predicate");
    if (!j.contains("p") || !j.at("p").is_number())
        throw ConfigError(path + ".p: required number");
    m.p = j.at("p").get<double>();
    if (j.contains("eta")) m.eta = parse_eta(j.at("eta"), path + ".eta");
    if (j.contains("mode")) {
        if (!j.at("mode").is_string()) throw ConfigError(path + ".mode: expected a string");
        auto mode = mode_from_name(j.at("mode").get<std::string>());
        if (!mode) throw ConfigError(path + ".mode: must be 'new' or 'extended'");
        m.mode = *mode;
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer() && !j.at("seed").is_number_unsigned())
            throw ConfigError(path + ".seed: expected an integer");
        m.seed = j.at("seed").get<std::uint64_t>();
    }
    m.validate_basic(path);
    return m;
}

} // namespace detail

/// Parse `{ "models": [ ... ] }`. Omitted fields take their documented
/// defaults (eta uniform, predicate all rows, mode new, seed 0). Errors
/// carry a JSON-path location.
inline std::vector<ErrorModel> parse_error_model(const std::string& config_text) {
    nlohmann::json j = nlohmann::json::parse(config_text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("$: config is not valid JSON");
    if (!j.is_object() || !j.contains("models") || !j.at("models").is_array())
        throw ConfigError("$.models: required array");
    std::vector<ErrorModel> models;
    const auto& arr = j.at("models");
    for (std::size_t i = 0; i < arr.size(); ++i)
        models.push_back(detail::parse_model_object(arr[i], "$.models[" + std::to_string(i) + "]"));
    return models;
}

// ---------------------------------------------------------------------------
// Predicate binding and evaluation
// ---------------------------------------------------------------------------

/// A predicate atom resolved against a schema: column index and typed literals.
struct BoundAtom {
    std::size_t column = 0;
    PredicateAtom::Op op = PredicateAtom::Op::eq;
    std::vector<CellValue> values;
};

using BoundPredicate = std::vector<BoundAtom>;

inline BoundPredicate bind_predicate(const Predicate& pred, const Schema& schema) {
    BoundPredicate bound;
    for (const auto& atom : pred) {
        BoundAtom b;
        b.column = schema.require_index(atom.column);
        b.op = atom.op;
        const ColumnType& type = schema.columns[b.column].type;
        for (const auto& text : atom.values) {
            auto parsed = parse_cell(text, type);
            if (!parsed)
                throw ConfigError("predicate literal '" + text + "' is not compatible with " +
                                  type_kind_name(type.kind) + " column '" + atom.column + "'");
            b.values.push_back(std::move(*parsed));
        }
        bound.push_back(std::move(b));
    }
    return bound;
}

namespace detail {
// Three-way compare of two cells of the same column type; nullopt if either
// is Missing.
inline std::optional<int> cell_compare(const CellValue& a, const CellValue& b) {
    if (is_missing(a) || is_missing(b)) return std::nullopt;
    if (std::holds_alternative<std::string>(a)) {
        const auto& x = std::get<std::string>(a);
        const auto& y = std::get<std::string>(b);
        return x < y ? -1 : (x == y ? 0 : 1);
    }
    if (std::holds_alternative<bool>(a)) {
        const int x = std::get<bool>(a) ? 1 : 0;
        const int y = std::get<bool>(b) ? 1 : 0;
        return x < y ? -1 : (x == y ? 0 : 1);
    }
    const double x = numeric_cell_value(a);
    const double y = numeric_cell_value(b);
    return x < y ? -1 : (x == y ? 0 : 1);
}
} // namespace detail

/// True iff every atom holds. Comparisons on Missing cells are false,
/// except != which is true.
inline bool eval_predicate(const std::vector<CellValue>& row, const BoundPredicate& pred) {
    using Op = PredicateAtom::Op;
    for (const auto& atom : pred) {
        const CellValue& cell = row[atom.column];
        if (is_missing(cell)) {
            if (atom.op != Op::ne) return false;
            continue; // Missing != literal is true
        }
        bool ok = false;
        switch (atom.op) {
        case Op::in_set:
            for (const auto& v : atom.values)
                if (detail::cell_compare(cell, v) == 0) {
                    ok = true;
                    break;
                }
            break;
        default: {
            const auto cmp = detail::cell_compare(cell, atom.values.front());
            if (!cmp) break;
            switch (atom.op) {
            case Op::eq: ok = *cmp == 0; break;
            case Op::ne: ok = *cmp != 0; break;
            case Op::lt: ok = *cmp < 0; break;
            case Op::le: ok = *cmp <= 0; break;
            case Op::gt: ok = *cmp > 0; break;
            case Op::ge: ok = *cmp >= 0; break;
            case Op::in_set: break;
            }
            break;
        }
        }
        if (!ok) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Row selection
// ---------------------------------------------------------------------------

/// The rows one corruption run will touch, in draw order, plus the size of
/// the candidate set they were drawn from.
struct RowSelection {
    std::vector<std::int64_t> ids;
    std::size_t candidate_count = 0;
};

namespace detail {

inline double log_rank_weight(const SelectionDistribution& eta, std::size_t rank, std::size_t count) {
    switch (eta.kind) {
    case SelectionDistribution::Kind::uniform:
        return 0.0;
    case SelectionDistribution::Kind::normal: {
        const double c = eta.center_fraction * static_cast<double>(count);
        const double s = std::max(eta.spread_fraction * static_cast<double>(count), 1e-9);
        const double z = (static_cast<double>(rank) - c) / s;
        return -0.5 * z * z;
    }
    case SelectionDistribution::Kind::poisson: {
        const double lambda = std::max(eta.lambda_fraction * static_cast<double>(count), 1e-9);
        const double k = static_cast<double>(rank);
        return k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
    }
    }
    return 0.0;
}

/// Weighted sampling without replacement (Efraimidis-Spirakis, log domain):
/// each candidate gets score log(E_i) - log w_i with E_i ~ Exp(1); the n
/// smallest scores win. Degenerately small weights stay finite in log form,
/// so eta never starves the draw -- at p=1 every candidate is selected.
inline std::vector<std::size_t> weighted_sample_indices(std::size_t count, std::size_t n,
                                                        const SelectionDistribution& eta,
                                                        Rng& rng) {
    std::vector<std::pair<double, std::size_t>> scored(count);
    for (std::size_t i = 0; i < count; ++i) {
        double u = rng.next_double();
        if (u <= 0.0) u = 0x1.0p-53;
        const double e = -std::log1p(-u); // Exp(1)
        scored[i] = {std::log(e) - log_rank_weight(eta, i, count), i};
    }
    n = std::min(n, count);
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end());
    std::vector<std::size_t> picked(n);
    for (std::size_t i = 0; i < n; ++i) picked[i] = scored[i].second;
    return picked;
}

} // namespace detail

/// Rows satisfying the model predicate, in dataset order.
inline std::vector<std::int64_t> predicate_rows(const Dataset& ds, const ErrorModel& model) {
    const BoundPredicate bound = bind_predicate(model.predicate, ds.schema);
    std::vector<std::int64_t> ids;
    for (std::size_t r = 0; r < ds.n_rows(); ++r)
        if (eval_predicate(ds.rows[r], bound)) ids.push_back(ds.row_ids[r]);
    return ids;
}

/// Core draw: exactly n distinct ids from `candidates`, weighted by eta over
/// rank order, fully determined by `seed`. Returned in draw order.
inline std::vector<std::int64_t> draw_rows(const std::vector<std::int64_t>& candidates,
                                           std::size_t n, const SelectionDistribution& eta,
                                           std::uint64_t seed) {
    Rng rng(seed);
    auto picked = detail::weighted_sample_indices(candidates.size(), n, eta, rng);
    std::vector<std::int64_t> ids;
    ids.reserve(picked.size());
    for (std::size_t idx : picked) ids.push_back(candidates[idx]);
    return ids;
}

/// Selects the rows a corruption run touches. With R = rows satisfying the
/// predicate and X = exclusions, the target count is
/// round_half_up(p * |R|) - |X intersect R|, clamped to the available
/// candidates R \ X. Exclusions are how extended mode tops up a prior run.
inline RowSelection select_rows(const Dataset& ds, const ErrorModel& model,
                                const std::unordered_set<std::int64_t>& exclusions = {}) {
    model.validate_basic();
    const std::vector<std::int64_t> rho = predicate_rows(ds, model);

    std::vector<std::int64_t> candidates;
    std::size_t excluded_in_rho = 0;
    candidates.reserve(rho.size());
    for (auto id : rho) {
        if (exclusions.count(id)) {
            ++excluded_in_rho;
            continue;
        }
        candidates.push_back(id);
    }

    const std::size_t want = round_half_up(model.p * static_cast<double>(rho.size()));
    const std::size_t n_target =
        std::min(want > excluded_in_rho ? want - excluded_in_rho : 0, candidates.size());

    RowSelection sel;
    sel.candidate_count = candidates.size();
    sel.ids = draw_rows(candidates, n_target, model.eta, model.seed);
    return sel;
}

} // namespace smudge
