#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "smudge/exceptions.hpp"
#include "smudge/manifest.hpp"
#include "smudge/model.hpp"
#include "smudge/rng.hpp"
#include "smudge/table.hpp"

namespace smudge {

/// Side information about a run that does not belong in the manifest,
/// e.g. cells skipped because a categorical domain had a single value.
struct InjectLog {
    std::size_t skipped_degenerate_cells = 0;
};

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

/// Applies a manifest to the clean dataset it was recorded against.
/// No RNG is involved; the result is byte-identical to the dataset the
/// original run produced.
inline Dataset replay(const Dataset& clean, const CorruptionManifest& manifest) {
    if (manifest.dataset_fingerprint != dataset_fingerprint(clean))
        throw StateError("manifest fingerprint does not match the supplied dataset");
    Dataset ds = clean;
    std::unordered_map<std::int64_t, std::size_t> index;
    index.reserve(ds.n_rows());
    for (std::size_t r = 0; r < ds.n_rows(); ++r) index[ds.row_ids[r]] = r;

    for (const auto& rec : manifest.records) {
        if (rec.is_row_event()) {
            if (!rec.parent) throw StateError("duplicate record without parent row id");
            auto it = index.find(*rec.parent);
            if (it == index.end())
                throw StateError("duplicate record references unknown parent row " +
                                 std::to_string(*rec.parent));
            ds.rows.push_back(ds.rows[it->second]);
            ds.row_ids.push_back(rec.row_id);
            index[rec.row_id] = ds.n_rows() - 1;
        } else {
            auto it = index.find(rec.row_id);
            if (it == index.end())
                throw StateError("record references unknown row " + std::to_string(rec.row_id));
            ds.rows[it->second][ds.schema.require_index(rec.column)] = rec.corrupted;
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Value drawing
// ---------------------------------------------------------------------------

namespace detail {

inline char alnum_char(Rng& rng) {
    static constexpr char kAlnum[] =
        "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    return kAlnum[rng.uniform_u64(62)];
}

inline std::string random_alnum(Rng& rng, std::size_t length) {
    std::string s(std::max<std::size_t>(length, 1), '0');
    for (char& c : s) c = alnum_char(rng);
    return s;
}

/// Noise replacement per the column's type: numeric/date uniform within the
/// clean range, categorical uniform over the domain excluding the original,
/// strings randomized at the original's length, booleans flipped. Returns
/// nullopt when the column is too degenerate to change the value.
inline std::optional<CellValue> draw_noise_value(const ColumnType& type, const FeatureStats& stats,
                                                 const CellValue& original, Rng& rng) {
    constexpr int kMaxAttempts = 16;
    switch (type.kind) {
    case TypeKind::integer: {
        CellValue v;
        for (int a = 0; a < kMaxAttempts; ++a) {
            v = CellValue{static_cast<std::int64_t>(std::llround(rng.uniform_real(stats.min, stats.max)))};
            if (v != original) return v;
        }
        return std::nullopt; // range degenerate around the original
    }
    case TypeKind::floating: {
        CellValue v;
        for (int a = 0; a < kMaxAttempts; ++a) {
            v = CellValue{rng.uniform_real(stats.min, stats.max)};
            if (v != original) return v;
        }
        return std::nullopt;
    }
    case TypeKind::date: {
        const std::int64_t lo = stats.date_min ? stats.date_min->days : 0;
        const std::int64_t hi = stats.date_max ? stats.date_max->days : 0;
        CellValue v;
        for (int a = 0; a < kMaxAttempts; ++a) {
            v = CellValue{Date{rng.uniform_int(lo, hi)}};
            if (v != original) return v;
        }
        return std::nullopt;
    }
    case TypeKind::boolean: {
        if (const auto* b = std::get_if<bool>(&original)) return CellValue{!*b};
        return CellValue{rng.next_bool()};
    }
    case TypeKind::categorical: {
        std::vector<const std::string*> pool;
        const std::string* orig =
            std::holds_alternative<std::string>(original) ? &std::get<std::string>(original) : nullptr;
        for (const auto& v : stats.distinct)
            if (!orig || v != *orig) pool.push_back(&v);
        if (pool.empty()) return std::nullopt;
        return CellValue{*pool[rng.uniform_u64(pool.size())]};
    }
    case TypeKind::text: {
        const std::size_t len =
            std::holds_alternative<std::string>(original) ? std::get<std::string>(original).size() : 1;
        for (int a = 0; a < kMaxAttempts; ++a) {
            CellValue v{random_alnum(rng, len)};
            if (v != original) return v;
        }
        return std::nullopt;
    }
    }
    return std::nullopt;
}

/// Outlier replacement: numeric and date cells move to mean +/- u with
/// u uniform in [3*sigma, 5*sigma]; categorical and string cells receive a
/// token outside the observed domain. Booleans are rejected at validation.
/// A cell whose value already sits in the band could draw itself back
/// (integer rounding); such draws are retried and ultimately skipped so
/// that every record changes its cell.
inline std::optional<CellValue> draw_outlier_value(const ColumnType& type,
                                                   const FeatureStats& stats,
                                                   const CellValue& original, Rng& rng) {
    constexpr int kMaxAttempts = 16;
    switch (type.kind) {
    case TypeKind::integer:
    case TypeKind::floating:
    case TypeKind::date: {
        for (int a = 0; a < kMaxAttempts; ++a) {
            const double sign = rng.next_bool() ? 1.0 : -1.0;
            const double u = rng.uniform_real(3.0 * stats.stddev, 5.0 * stats.stddev);
            const double v = stats.mean + sign * u;
            CellValue out;
            if (type.kind == TypeKind::floating)
                out = CellValue{v};
            else if (type.kind == TypeKind::integer)
                out = CellValue{static_cast<std::int64_t>(std::llround(v))};
            else
                out = CellValue{Date{static_cast<std::int64_t>(std::llround(v))}};
            if (out != original) return out;
        }
        return std::nullopt;
    }
    case TypeKind::categorical:
    case TypeKind::text: {
        for (;;) {
            std::string token = "OUTLIER_" + random_alnum(rng, 6);
            const bool in_domain =
                std::binary_search(stats.distinct.begin(), stats.distinct.end(), token);
            if (!in_domain && CellValue{token} != original) return CellValue{std::move(token)};
        }
    }
    case TypeKind::boolean:
        break;
    }
    throw ConfigError("outlier injection is undefined for boolean columns");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Injection engine
// ---------------------------------------------------------------------------

namespace detail {

struct InjectContext {
    const Dataset& clean;          // selection + statistics source
    Dataset& base;                 // prior corruption already replayed
    const ErrorModel& model;
    CorruptionManifest& manifest;  // records appended in place
    InjectLog* log = nullptr;
    std::unordered_map<std::int64_t, std::size_t> base_index;

    InjectContext(const Dataset& clean_ds, Dataset& base_ds, const ErrorModel& m,
                  CorruptionManifest& mf, InjectLog* lg)
        : clean(clean_ds), base(base_ds), model(m), manifest(mf), log(lg) {
        base_index.reserve(base.n_rows());
        for (std::size_t r = 0; r < base.n_rows(); ++r) base_index[base.row_ids[r]] = r;
    }

    std::size_t base_row(std::int64_t id) const {
        auto it = base_index.find(id);
        if (it == base_index.end())
            throw StateError("row " + std::to_string(id) + " missing from working dataset");
        return it->second;
    }

    void note_skip() const {
        if (log) ++log->skipped_degenerate_cells;
    }

    /// Rows whose cell in `col` is Missing in the working dataset; such rows
    /// hold no value to replace, so they never enter a cell selection.
    std::unordered_set<std::int64_t> missing_rows(std::size_t col) const {
        std::unordered_set<std::int64_t> out;
        for (std::size_t r = 0; r < base.n_rows(); ++r)
            if (is_missing(base.rows[r][col])) out.insert(base.row_ids[r]);
        return out;
    }
};

/// Shared per-feature cell loop for missing/noise/outlier: select rows over
/// the clean dataset (exclusions = already-corrupted plus already-missing),
/// then rewrite the selected cells in the working dataset.
template <typename DrawFn>
inline void inject_cells(InjectContext& ctx, const std::string& feature, DrawFn&& draw) {
    const std::size_t col = ctx.clean.schema.require_index(feature);

    std::unordered_set<std::int64_t> exclusions = ctx.missing_rows(col);
    for (auto id : ctx.manifest.touched_rows(ctx.model.kind, feature)) exclusions.insert(id);

    ErrorModel per_feature = ctx.model;
    per_feature.seed = derive_seed(ctx.model.seed, feature);
    const RowSelection sel = select_rows(ctx.clean, per_feature, exclusions);

    Rng value_rng(derive_seed(ctx.model.seed, feature, "values"));
    const std::string fp = ctx.model.fingerprint();
    for (std::int64_t id : sel.ids) {
        const std::size_t r = ctx.base_row(id);
        const CellValue original = ctx.base.rows[r][col];
        std::optional<CellValue> replacement = draw(original, value_rng);
        if (!replacement) {
            ctx.note_skip();
            continue;
        }
        ctx.base.rows[r][col] = *replacement;
        ctx.manifest.records.push_back(CorruptionRecord{
            id, feature, ctx.model.kind, original, *replacement, std::nullopt, fp});
    }
}

inline void run_missing(InjectContext& ctx) {
    for (const auto& feature : ctx.model.features) {
        inject_cells(ctx, feature,
                     [](const CellValue&, Rng&) { return std::optional<CellValue>{kMissing}; });
    }
}

inline void run_noise(InjectContext& ctx) {
    for (const auto& feature : ctx.model.features) {
        const std::size_t col = ctx.clean.schema.require_index(feature);
        const ColumnType& type = ctx.clean.schema.columns[col].type;
        const FeatureStats stats = column_stats(ctx.clean, feature);
        if (stats.empty()) continue;
        inject_cells(ctx, feature, [&](const CellValue& original, Rng& rng) {
            return draw_noise_value(type, stats, original, rng);
        });
    }
}

inline void run_outliers(InjectContext& ctx) {
    for (const auto& feature : ctx.model.features) {
        const std::size_t col = ctx.clean.schema.require_index(feature);
        const ColumnType& type = ctx.clean.schema.columns[col].type;
        if (type.kind == TypeKind::boolean)
            throw ConfigError("outlier injection is undefined for boolean column '" + feature + "'");
        const FeatureStats stats = column_stats(ctx.clean, feature);
        if (stats.empty()) continue;
        if ((type.is_numeric() || type.kind == TypeKind::date) && !(stats.stddev > 0.0))
            throw ConfigError("outlier injection requires nonzero spread in column '" + feature + "'");
        inject_cells(ctx, feature, [&](const CellValue& original, Rng& rng) {
            return draw_outlier_value(type, stats, original, rng);
        });
    }
}

inline void run_duplicates(InjectContext& ctx) {
    const std::size_t clean_rows = ctx.clean.n_rows();
    const std::size_t prior = ctx.manifest.count_records(ErrorKind::duplicate, "*");
    const std::size_t want = round_half_up(ctx.model.p * static_cast<double>(clean_rows));
    const std::size_t n_new = want > prior ? want - prior : 0;
    if (n_new == 0) return;

    const std::vector<std::int64_t> candidates = predicate_rows(ctx.clean, ctx.model);
    const std::vector<std::int64_t> parents =
        draw_rows(candidates, std::min(n_new, candidates.size()), ctx.model.eta, ctx.model.seed);

    Rng mutate_rng(derive_seed(ctx.model.seed, "mutate"));
    const std::string fp = ctx.model.fingerprint();

    // clean-column statistics for modified duplicates
    std::vector<std::pair<std::size_t, FeatureStats>> sigma;
    for (const auto& feature : ctx.model.features)
        sigma.emplace_back(ctx.clean.schema.require_index(feature), column_stats(ctx.clean, feature));

    std::int64_t next_id = ctx.base.next_row_id();
    for (std::int64_t parent : parents) {
        const std::size_t src = ctx.base_row(parent);
        const std::int64_t id = next_id++;
        ctx.base.rows.push_back(ctx.base.rows[src]);
        ctx.base.row_ids.push_back(id);
        ctx.base_index[id] = ctx.base.n_rows() - 1;
        ctx.manifest.records.push_back(CorruptionRecord{
            id, "*", ErrorKind::duplicate, CellValue{parent}, CellValue{id}, parent, fp});

        for (const auto& [col, stats] : sigma) {
            const ColumnType& type = ctx.clean.schema.columns[col].type;
            const CellValue original = ctx.base.rows.back()[col];
            auto replacement = draw_noise_value(type, stats, original, mutate_rng);
            if (!replacement) {
                ctx.note_skip();
                continue;
            }
            ctx.base.rows.back()[col] = *replacement;
            ctx.manifest.records.push_back(CorruptionRecord{
                id, ctx.clean.schema.columns[col].name, ErrorKind::duplicate, original,
                *replacement, parent, fp});
        }
    }
}

inline void run_mislabels(InjectContext& ctx) {
    const std::string target = *ctx.clean.schema.target;
    const std::size_t col = ctx.clean.schema.require_index(target);

    // observed class values, sorted for a deterministic draw order
    std::vector<CellValue> classes;
    {
        std::set<std::string> seen;
        for (const auto& row : ctx.clean.rows) {
            if (is_missing(row[col])) continue;
            if (seen.insert(render_cell(row[col])).second) classes.push_back(row[col]);
        }
        std::sort(classes.begin(), classes.end(), [](const CellValue& a, const CellValue& b) {
            return render_cell(a) < render_cell(b);
        });
    }
    if (classes.size() < 2)
        throw ConfigError("mislabel requires at least 2 classes in target '" + target + "'");

    std::unordered_set<std::int64_t> exclusions = ctx.missing_rows(col);
    for (auto id : ctx.manifest.touched_rows(ErrorKind::mislabel, target)) exclusions.insert(id);

    ErrorModel per_feature = ctx.model;
    per_feature.seed = derive_seed(ctx.model.seed, target);
    const RowSelection sel = select_rows(ctx.clean, per_feature, exclusions);

    Rng value_rng(derive_seed(ctx.model.seed, target, "values"));
    const std::string fp = ctx.model.fingerprint();
    for (std::int64_t id : sel.ids) {
        const std::size_t r = ctx.base_row(id);
        const CellValue original = ctx.base.rows[r][col];
        CellValue swapped;
        if (classes.size() == 2) {
            swapped = (classes[0] == original) ? classes[1] : classes[0];
        } else {
            std::vector<const CellValue*> pool;
            for (const auto& c : classes)
                if (c != original) pool.push_back(&c);
            swapped = *pool[value_rng.uniform_u64(pool.size())];
        }
        ctx.base.rows[r][col] = swapped;
        ctx.manifest.records.push_back(
            CorruptionRecord{id, target, ErrorKind::mislabel, original, swapped, std::nullopt, fp});
    }
}

inline void validate_model_against(const Dataset& ds, const ErrorModel& model) {
    model.validate_basic();
    bind_predicate(model.predicate, ds.schema); // checks columns and literal types
    for (const auto& f : model.features) ds.schema.require_index(f);
    if (model.kind == ErrorKind::mislabel) {
        if (!ds.schema.target) throw ConfigError("mislabel requires a designated target column");
        if (model.features.size() != 1 || model.features.front() != *ds.schema.target)
            throw ConfigError("mislabel features must name exactly the target column '" +
                              *ds.schema.target + "'");
        const ColumnType& t = ds.schema.columns[ds.schema.require_index(*ds.schema.target)].type;
        if (t.kind == TypeKind::floating || t.kind == TypeKind::date || t.kind == TypeKind::text)
            throw ConfigError("mislabel target must be categorical, integer-coded, or boolean");
    }
}

} // namespace detail

/// Applies one error model to a clean dataset, optionally on top of a prior
/// manifest (extended mode). Selection, ranges and statistics always come
/// from the clean dataset, so application is a pure function of
/// (dataset, model, prior). Returns the corrupted dataset and the cumulative
/// manifest (prior records first, then this run's).
inline std::pair<Dataset, CorruptionManifest> apply(const Dataset& ds, const ErrorModel& model,
                                                    const std::optional<CorruptionManifest>& prior =
                                                        std::nullopt,
                                                    InjectLog* log = nullptr) {
    detail::validate_model_against(ds, model);

    const std::string fp = dataset_fingerprint(ds);
    if (model.mode == Mode::extended && !prior)
        throw StateError("extended mode requires a prior manifest");
    if (prior && prior->dataset_fingerprint != fp)
        throw StateError(model.mode == Mode::fresh
                             ? "new mode requires the clean dataset fingerprint recorded in the manifest"
                             : "prior manifest fingerprint does not match the supplied dataset");

    CorruptionManifest manifest = prior ? *prior : CorruptionManifest{};
    manifest.dataset_fingerprint = fp;
    Dataset base = prior ? replay(ds, *prior) : ds;

    detail::InjectContext ctx(ds, base, model, manifest, log);
    switch (model.kind) {
    case ErrorKind::missing: detail::run_missing(ctx); break;
    case ErrorKind::noise: detail::run_noise(ctx); break;
    case ErrorKind::outlier: detail::run_outliers(ctx); break;
    case ErrorKind::duplicate: detail::run_duplicates(ctx); break;
    case ErrorKind::mislabel: detail::run_mislabels(ctx); break;
    }

    manifest.model_fingerprints.push_back(model.fingerprint());
    if (model.kind == ErrorKind::duplicate) {
        const auto key = CorruptionManifest::rate_key(model.kind, "*");
        manifest.cumulative_p[key] =
            static_cast<double>(manifest.count_records(ErrorKind::duplicate, "*")) /
            static_cast<double>(std::max<std::size_t>(ds.n_rows(), 1));
    } else {
        const std::size_t rho = predicate_rows(ds, model).size();
        for (const auto& feature : model.features) {
            const auto key = CorruptionManifest::rate_key(model.kind, feature);
            manifest.cumulative_p[key] =
                static_cast<double>(manifest.count_records(model.kind, feature)) /
                static_cast<double>(std::max<std::size_t>(rho, 1));
        }
    }
    return {std::move(base), std::move(manifest)};
}

/// Convenience wrappers with the per-family preconditions in their names.
inline std::pair<Dataset, CorruptionManifest> inject_missing(
    const Dataset& ds, const ErrorModel& m, const std::optional<CorruptionManifest>& prior = {},
    InjectLog* log = nullptr) {
    if (m.kind != ErrorKind::missing) throw ConfigError("inject_missing: model kind mismatch");
    return apply(ds, m, prior, log);
}

inline std::pair<Dataset, CorruptionManifest> inject_noise(
    const Dataset& ds, const ErrorModel& m, const std::optional<CorruptionManifest>& prior = {},
    InjectLog* log = nullptr) {
    if (m.kind != ErrorKind::noise) throw ConfigError("inject_noise: model kind mismatch");
    return apply(ds, m, prior, log);
}

inline std::pair<Dataset, CorruptionManifest> inject_outliers(
    const Dataset& ds, const ErrorModel& m, const std::optional<CorruptionManifest>& prior = {},
    InjectLog* log = nullptr) {
    if (m.kind != ErrorKind::outlier) throw ConfigError("inject_outliers: model kind mismatch");
    return apply(ds, m, prior, log);
}

inline std::pair<Dataset, CorruptionManifest> inject_duplicates(
    const Dataset& ds, const ErrorModel& m, const std::optional<CorruptionManifest>& prior = {},
    InjectLog* log = nullptr) {
    if (m.kind != ErrorKind::duplicate) throw ConfigError("inject_duplicates: model kind mismatch");
    return apply(ds, m, prior, log);
}

inline std::pair<Dataset, CorruptionManifest> inject_mislabels(
    const Dataset& ds, const ErrorModel& m, const std::optional<CorruptionManifest>& prior = {},
    InjectLog* log = nullptr) {
    if (m.kind != ErrorKind::mislabel) throw ConfigError("inject_mislabels: model kind mismatch");
    return apply(ds, m, prior, log);
}

} // namespace smudge
