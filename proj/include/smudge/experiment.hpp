#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "smudge/exceptions.hpp"
#include "smudge/inject.hpp"
#include "smudge/learners.hpp"
#include "smudge/metrics.hpp"
#include "smudge/preprocess.hpp"
#include "smudge/table.hpp"

namespace smudge {

// ---------------------------------------------------------------------------
// Spec
// ---------------------------------------------------------------------------

/// One row of the error grid: an error-model template expanded over a
/// feature list, a p list and a mode chain. Per-feature entries corrupt one
/// feature at a time; otherwise `sigma` is the model's feature set applied
/// in a single chain.
struct GridEntry {
    ErrorKind kind = ErrorKind::missing;
    bool per_feature = false;
    std::vector<std::string> sigma;          // explicit feature set; "all" resolved at expansion
    bool sigma_all = false;
    std::vector<std::string> feature_filter; // per-feature expansion subset (empty = all applicable)
    Predicate predicate;
    SelectionDistribution eta;
    std::vector<double> p_list;
    std::vector<Mode> modes; // aligned with p_list

    void validate(const std::string& where) const {
        if (p_list.empty()) throw ConfigError(where + ".p: required non-empty array");
        if (modes.size() != p_list.size())
            throw ConfigError(where + ": modes must align with p values");
        for (double p : p_list)
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(where + ".p: values must lie in [0,1]");
        if (modes.front() == Mode::extended)
            throw ConfigError(where + ": a chain cannot start in extended mode");
        bool extended = false;
        for (const auto m : modes) extended = extended || m == Mode::extended;
        if (extended) {
            for (std::size_t i = 1; i < p_list.size(); ++i)
                if (!(p_list[i - 1] < p_list[i]))
                    throw ConfigError(where + ".p: must be ascending when the chain uses extended mode");
        }
        if (kind == ErrorKind::duplicate && per_feature)
            throw ConfigError(where + ": duplicate entries do not support per_feature");
        if (kind == ErrorKind::mislabel && per_feature)
            throw ConfigError(where + ": mislabel always targets the target column");
        eta.validate(where + ".eta");
    }
};

struct ExperimentSpec {
    std::string dataset_path;
    std::string target;
    std::vector<nlohmann::json> binning_raw; // resolved against the training split
    double split_ratio = 0.8;
    std::uint64_t split_seed = 0;
    std::uint64_t master_seed = 0;
    std::vector<ClassifierKind> classifiers;
    std::vector<GridEntry> grid;
    std::string out_dir;
    int jobs = 1;
    std::size_t distinct_cap = 50;
    Hyper hyper;
};

namespace detail {

inline GridEntry parse_grid_entry(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    GridEntry e;
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError(path + ".kind: required string");
    auto kind = error_kind_from_name(j.at("kind").get<std::string>());
    if (!kind) throw ConfigError(path + ".kind: unknown kind");
    e.kind = *kind;
    e.per_feature = j.value("per_feature", false);
    if (j.contains("sigma")) {
        if (j.at("sigma").is_string() && j.at("sigma").get<std::string>() == "all")
            e.sigma_all = true;
        else if (j.at("sigma").is_array())
            e.sigma = j.at("sigma").get<std::vector<std::string>>();
        else
            throw ConfigError(path + ".sigma: expected \"all\" or an array of column names");
    }
    if (j.contains("features")) e.feature_filter = j.at("features").get<std::vector<std::string>>();
    if (j.contains("predicate")) e.predicate = parse_predicate(j.at("predicate"), path + ".predicate");
    if (j.contains("eta")) e.eta = parse_eta(j.at("eta"), path + ".eta");
    if (!j.contains("p")) throw ConfigError(path + ".p: required");
    if (j.at("p").is_number())
        e.p_list.push_back(j.at("p").get<double>());
    else if (j.at("p").is_array())
        e.p_list = j.at("p").get<std::vector<double>>();
    else
        throw ConfigError(path + ".p: expected a number or array");
    if (j.contains("modes")) {
        for (const auto& m : j.at("modes")) {
            auto mode = mode_from_name(m.get<std::string>());
            if (!mode) throw ConfigError(path + ".modes: must be 'new' or 'extended'");
            e.modes.push_back(*mode);
        }
    } else {
        // default chain: fresh first, incremental afterwards
        for (std::size_t i = 0; i < e.p_list.size(); ++i)
            e.modes.push_back(i == 0 ? Mode::fresh : Mode::extended);
    }
    e.validate(path);
    return e;
}

} // namespace detail

inline ExperimentSpec parse_experiment_spec(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("$: spec is not valid JSON");
    if (!j.is_object()) throw ConfigError("$: expected an object");
    ExperimentSpec spec;
    if (!j.contains("dataset") || !j.at("dataset").is_string())
        throw ConfigError("$.dataset: required string");
    spec.dataset_path = j.at("dataset").get<std::string>();
    if (!j.contains("target") || !j.at("target").is_string())
        throw ConfigError("$.target: required string");
    spec.target = j.at("target").get<std::string>();
    if (j.contains("split")) {
        const auto& s = j.at("split");
        spec.split_ratio = s.value("ratio", 0.8);
        spec.split_seed = s.value("seed", std::uint64_t{0});
    }
    spec.master_seed = j.value("seed", std::uint64_t{0});
    if (j.contains("classifiers")) {
        for (const auto& c : j.at("classifiers")) {
            auto kind = classifier_kind_from_name(c.get<std::string>());
            if (!kind) throw ConfigError("$.classifiers: unknown classifier '" +
                                         c.get<std::string>() + "'");
            spec.classifiers.push_back(*kind);
        }
    } else {
        spec.classifiers = {ClassifierKind::lda,         ClassifierKind::qda,
                            ClassifierKind::logreg,      ClassifierKind::gaussian_nb,
                            ClassifierKind::decision_tree, ClassifierKind::knn};
    }
    if (j.contains("binning")) {
        if (!j.at("binning").is_array()) throw ConfigError("$.binning: expected an array");
        for (const auto& b : j.at("binning")) spec.binning_raw.push_back(b);
    }
    if (j.contains("grid")) {
        if (!j.at("grid").is_array()) throw ConfigError("$.grid: expected an array");
        for (std::size_t i = 0; i < j.at("grid").size(); ++i)
            spec.grid.push_back(
                detail::parse_grid_entry(j.at("grid")[i], "$.grid[" + std::to_string(i) + "]"));
    }
    if (j.contains("out_dir")) spec.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("jobs")) spec.jobs = j.at("jobs").get<int>();
    if (j.contains("distinct_cap")) spec.distinct_cap = j.at("distinct_cap").get<std::size_t>();
    if (!(spec.split_ratio > 0.0 && spec.split_ratio < 1.0))
        throw ConfigError("$.split.ratio: must lie strictly in (0,1)");
    if (spec.jobs < 1) throw ConfigError("$.jobs: must be >= 1");
    return spec;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct RunResult {
    // grid coordinates, used only for canonical ordering
    std::size_t entry_index = 0, feature_index = 0, step_index = 0, classifier_index = 0;
    ClassifierKind classifier = ClassifierKind::lda;
    std::string error = "none"; // error kind, "none" for the clean baseline
    std::string feature = "all";
    double p = 0.0;
    std::string mode = "new";
    Metrics metrics;
    std::size_t train_dim = 0;
    std::size_t train_rows = 0;
    double duration_s = 0.0; // in-memory only; never written to artifacts
};

struct CellFailure {
    std::string cell; // "kind/feature@p/mode"
    std::string message;
};

enum class GainDirection { up, down, flat };

inline const char* gain_direction_name(GainDirection g) {
    switch (g) {
    case GainDirection::up: return "up";
    case GainDirection::down: return "down";
    case GainDirection::flat: return "flat";
    }
    return "?";
}

/// |delta| below this is "flat": the run reproduced its baseline exactly
/// up to float noise.
inline constexpr double kFlatEpsilon = 1e-9;

inline GainDirection gain_direction(double f1, double baseline_f1) {
    const double delta = f1 - baseline_f1;
    if (std::abs(delta) < kFlatEpsilon) return GainDirection::flat;
    return delta > 0.0 ? GainDirection::up : GainDirection::down;
}

struct GainEntry {
    std::size_t result_index = 0;
    double baseline_f1 = 0.0;
    GainDirection direction = GainDirection::flat;
};

/// Per-result gain direction versus the same classifier's clean baseline.
inline std::vector<GainEntry> compare(const std::vector<RunResult>& results,
                                      const std::vector<RunResult>& baseline) {
    std::map<ClassifierKind, double> base_f1;
    for (const auto& b : baseline) base_f1[b.classifier] = b.metrics.f1;
    std::vector<GainEntry> out;
    for (std::size_t i = 0; i < results.size(); ++i) {
        auto it = base_f1.find(results[i].classifier);
        if (it == base_f1.end())
            throw ConfigError(std::string("no baseline for classifier '") +
                              classifier_kind_name(results[i].classifier) + "'");
        out.push_back(GainEntry{i, it->second, gain_direction(results[i].metrics.f1, it->second)});
    }
    return out;
}

/// Results sorted by f1 descending, ties by (classifier, error, feature);
/// first k rows.
inline std::vector<RunResult> top_k(const std::vector<RunResult>& results, std::size_t k) {
    if (k < 1) throw ConfigError("top_k: k must be >= 1");
    std::vector<RunResult> sorted = results;
    std::sort(sorted.begin(), sorted.end(), [](const RunResult& a, const RunResult& b) {
        if (a.metrics.f1 != b.metrics.f1) return a.metrics.f1 > b.metrics.f1;
        const std::string ca = classifier_kind_name(a.classifier);
        const std::string cb = classifier_kind_name(b.classifier);
        return std::tie(ca, a.error, a.feature) < std::tie(cb, b.error, b.feature);
    });
    if (sorted.size() > k) sorted.resize(k);
    return sorted;
}

// ---------------------------------------------------------------------------
// Grid expansion
// ---------------------------------------------------------------------------

namespace detail {

struct CellChain {
    std::size_t entry_index = 0;
    std::size_t feature_index = 0;
    ErrorKind kind = ErrorKind::missing;
    std::string feature_label; // feature name, or "all"
    std::vector<std::string> sigma;
    Predicate predicate;
    SelectionDistribution eta;
    std::vector<std::pair<double, Mode>> steps;
};

inline bool outlier_applicable(const ColumnType& t) { return t.kind != TypeKind::boolean; }

inline std::vector<std::string> non_target_features(const Schema& schema) {
    std::vector<std::string> out;
    for (const auto& col : schema.columns)
        if (!schema.target || col.name != *schema.target) out.push_back(col.name);
    return out;
}

inline std::vector<CellChain> expand_grid(const ExperimentSpec& spec, const Schema& schema) {
    std::vector<CellChain> chains;
    for (std::size_t e = 0; e < spec.grid.size(); ++e) {
        const GridEntry& entry = spec.grid[e];
        CellChain base;
        base.entry_index = e;
        base.kind = entry.kind;
        base.predicate = entry.predicate;
        base.eta = entry.eta;
        for (std::size_t i = 0; i < entry.p_list.size(); ++i)
            base.steps.emplace_back(entry.p_list[i], entry.modes[i]);

        if (entry.per_feature) {
            std::vector<std::string> features =
                entry.feature_filter.empty() ? non_target_features(schema) : entry.feature_filter;
            std::size_t fi = 0;
            for (const auto& f : features) {
                const std::size_t col = schema.require_index(f);
                if (entry.kind == ErrorKind::outlier && !outlier_applicable(schema.columns[col].type))
                    continue;
                CellChain chain = base;
                chain.feature_index = fi++;
                chain.feature_label = f;
                chain.sigma = {f};
                chains.push_back(std::move(chain));
            }
        } else {
            CellChain chain = base;
            chain.feature_index = 0;
            if (entry.kind == ErrorKind::mislabel) {
                if (!schema.target) throw ConfigError("mislabel grid entry requires a target");
                chain.sigma = {*schema.target};
                chain.feature_label = *schema.target;
            } else if (entry.sigma_all) {
                chain.sigma = non_target_features(schema);
                chain.feature_label = "all";
            } else {
                chain.sigma = entry.sigma;
                chain.feature_label = entry.sigma.empty() ? "all" : [&] {
                    std::string label = entry.sigma.front();
                    for (std::size_t i = 1; i < entry.sigma.size(); ++i) label += "+" + entry.sigma[i];
                    return label;
                }();
            }
            chains.push_back(std::move(chain));
        }
    }
    return chains;
}

inline std::string sanitize_filename(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct ExperimentOutput {
    std::vector<RunResult> baseline;
    std::vector<RunResult> results;
    std::vector<CellFailure> failures;
    std::size_t corrupted_training_sets = 0;
    std::size_t train_rows = 0, test_rows = 0, encoded_dim = 0;
    std::size_t rows_loaded = 0, rows_after_drop = 0;
};

struct PreparedData {
    Dataset train;
    Dataset test;
    std::vector<BinningSpec> binning;
    std::size_t rows_loaded = 0, rows_after_drop = 0;
};

/// load -> drop rows with nulls -> stratified split -> bin (cuts resolved on
/// the training side). Corruption happens per grid cell, after this.
inline PreparedData prepare_data(const ExperimentSpec& spec) {
    ReadOptions opts;
    opts.target = spec.target;
    opts.infer.categorical_distinct_cap = spec.distinct_cap;
    Dataset raw = read_csv(spec.dataset_path, opts);
    PreparedData prep;
    prep.rows_loaded = raw.n_rows();
    Dataset clean = drop_missing_rows(raw);
    prep.rows_after_drop = clean.n_rows();
    SplitPair split = stratified_split(clean, spec.split_ratio, spec.split_seed);
    prep.train = std::move(split.train);
    prep.test = std::move(split.test);

    for (const auto& braw : spec.binning_raw) {
        BinningSpec b;
        if (!braw.contains("feature") || !braw.at("feature").is_string())
            throw ConfigError("$.binning[].feature: required string");
        b.feature = braw.at("feature").get<std::string>();
        if (braw.value("quartiles", false))
            b.cuts = quartile_cuts(prep.train, b.feature);
        else if (braw.contains("cuts"))
            b.cuts = braw.at("cuts").get<std::vector<double>>();
        else
            throw ConfigError("$.binning[].cuts: required unless quartiles=true");
        if (braw.contains("labels"))
            b.labels = braw.at("labels").get<std::vector<std::string>>();
        else
            b.labels = default_bin_labels(b.cuts.size() + 1);
        if (braw.contains("as")) b.as = braw.at("as").get<std::string>();
        b.validate();
        prep.train = bin_feature(prep.train, b);
        prep.test = bin_feature(prep.test, b);
        prep.binning.push_back(std::move(b));
    }
    return prep;
}

namespace detail {

/// Fit errors are per-classifier data, not crashes: a failing family is
/// reported and the remaining families still run.
inline std::vector<RunResult> evaluate_classifiers(const ExperimentSpec& spec,
                                                   const EncodedMatrix& train,
                                                   const EncodedMatrix& test,
                                                   const std::vector<int>& y_test,
                                                   std::vector<std::string>* errors = nullptr) {
    std::vector<RunResult> out;
    for (std::size_t ci = 0; ci < spec.classifiers.size(); ++ci) {
        RunResult r;
        r.classifier_index = ci;
        r.classifier = spec.classifiers[ci];
        r.train_dim = train.n_cols;
        r.train_rows = train.n_rows;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const Classifier c = fit(spec.classifiers[ci], train, spec.hyper);
            const std::vector<int> pred = c.predict(test);
            r.metrics = evaluate(y_test, pred);
        } catch (const FitError& e) {
            if (errors)
                errors->push_back(std::string(classifier_kind_name(spec.classifiers[ci])) + ": " +
                                  e.what());
            continue;
        }
        r.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace detail

/// One result per classifier on clean train -> clean test.
inline std::vector<RunResult> run_baseline(const ExperimentSpec& spec, const PreparedData& prep,
                                           std::vector<CellFailure>* failures = nullptr) {
    const Encoder enc = Encoder::fit(prep.train);
    const EncodedMatrix train = enc.transform(prep.train);
    const EncodedMatrix test = enc.transform(prep.test);
    std::vector<std::string> errors;
    auto results = detail::evaluate_classifiers(spec, train, test, test.y, &errors);
    if (failures)
        for (const auto& e : errors) failures->push_back(CellFailure{"baseline", e});
    return results;
}

/// Runs every grid cell: corrupt the training split only (extended steps
/// chain through the cell's manifest), drop rows the corruption blanked,
/// re-encode, fit every classifier, evaluate on the untouched clean test
/// split. Cell seeds derive from (master seed, coordinates), so execution
/// order and worker count cannot change any result.
inline void run_grid(const ExperimentSpec& spec, const PreparedData& prep, ExperimentOutput& out,
                     const std::string& manifest_dir = "") {
    const std::vector<detail::CellChain> chains = detail::expand_grid(spec, prep.train.schema);

    std::mutex sink_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> materialized{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= chains.size()) return;
            const detail::CellChain& chain = chains[i];
            std::optional<CorruptionManifest> prior;
            for (std::size_t s = 0; s < chain.steps.size(); ++s) {
                const auto [p, mode] = chain.steps[s];
                const std::string cell_name = std::string(error_kind_name(chain.kind)) + "/" +
                                              chain.feature_label + "@" + format_double(p) + "/" +
                                              mode_name(mode);
                try {
                    ErrorModel model;
                    model.kind = chain.kind;
                    model.features = chain.sigma;
                    model.predicate = chain.predicate;
                    model.p = p;
                    model.eta = chain.eta;
                    model.mode = mode;
                    model.seed = derive_seed(spec.master_seed, error_kind_name(chain.kind),
                                             chain.feature_label + "|" + format_double(p) + "|" +
                                                 mode_name(mode));
                    auto [corrupted, manifest] = apply(prep.train, model, prior);
                    prior = manifest;

                    if (!manifest_dir.empty()) {
                        const std::string fname =
                            "e" + std::to_string(chain.entry_index) + "_" +
                            detail::sanitize_filename(std::string(error_kind_name(chain.kind)) + "_" +
                                                      chain.feature_label + "_p" + format_double(p) +
                                                      "_" + mode_name(mode)) +
                            ".jsonl";
                        write_manifest(manifest, manifest_dir + "/" + fname);
                    }

                    const Dataset train_ds = drop_missing_rows(corrupted);
                    const Encoder enc = Encoder::fit(train_ds);
                    const EncodedMatrix train = enc.transform(train_ds);
                    const EncodedMatrix test = enc.transform(prep.test);
                    std::vector<std::string> fit_errors;
                    std::vector<RunResult> cell =
                        detail::evaluate_classifiers(spec, train, test, test.y, &fit_errors);
                    for (auto& r : cell) {
                        r.entry_index = chain.entry_index;
                        r.feature_index = chain.feature_index;
                        r.step_index = s;
                        r.error = error_kind_name(chain.kind);
                        r.feature = chain.feature_label;
                        r.p = p;
                        r.mode = mode_name(mode);
                    }
                    materialized.fetch_add(1);
                    std::lock_guard<std::mutex> lock(sink_mutex);
                    for (auto& r : cell) out.results.push_back(std::move(r));
                    for (const auto& e : fit_errors)
                        out.failures.push_back(CellFailure{cell_name, e});
                } catch (const Error& e) {
                    std::lock_guard<std::mutex> lock(sink_mutex);
                    out.failures.push_back(CellFailure{cell_name, e.what()});
                    // a failed step breaks this chain; later extended steps
                    // would have nothing to extend
                    break;
                }
            }
        }
    };

    const std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(spec.jobs, 1)), std::max<std::size_t>(chains.size(), 1));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    out.corrupted_training_sets = materialized.load();
    std::sort(out.results.begin(), out.results.end(), [](const RunResult& a, const RunResult& b) {
        return std::tie(a.entry_index, a.feature_index, a.step_index, a.classifier_index) <
               std::tie(b.entry_index, b.feature_index, b.step_index, b.classifier_index);
    });
}

// ---------------------------------------------------------------------------
// Artifact writers
// ---------------------------------------------------------------------------

inline std::string results_csv_string(const std::vector<RunResult>& baseline,
                                      const std::vector<RunResult>& results) {
    std::map<ClassifierKind, double> base_f1;
    for (const auto& b : baseline) base_f1[b.classifier] = b.metrics.f1;

    std::string out = "kind,error,feature,p,mode,accuracy,precision,recall,f1,gain\n";
    auto emit = [&](const RunResult& r, bool is_baseline) {
        std::string gain = "flat";
        if (!is_baseline) {
            auto it = base_f1.find(r.classifier);
            gain = it == base_f1.end()
                       ? "n/a"
                       : gain_direction_name(gain_direction(r.metrics.f1, it->second));
        }
        std::vector<std::string> fields{
            classifier_kind_name(r.classifier), r.error,
            r.feature,                          format_double(r.p),
            r.mode,                             format_fixed(r.metrics.accuracy, 6),
            format_fixed(r.metrics.precision, 6), format_fixed(r.metrics.recall, 6),
            format_fixed(r.metrics.f1, 6),      gain};
        out += csv::write_row(fields);
    };
    for (const auto& r : baseline) emit(r, true);
    for (const auto& r : results) emit(r, false);
    return out;
}

namespace detail {

inline const char* arrow(GainDirection g) {
    switch (g) {
    case GainDirection::up: return "↑";
    case GainDirection::down: return "↓";
    case GainDirection::flat: return "→";
    }
    return "?";
}

} // namespace detail

inline std::string summary_md_string(const ExperimentSpec& spec, const ExperimentOutput& out) {
    std::string md;
    md += "# Experiment summary\n\n";
    md += "- dataset: `" + spec.dataset_path + "`\n";
    md += "- target: `" + spec.target + "`\n";
    md += "- rows loaded: " + std::to_string(out.rows_loaded) + ", after null-row drop: " +
          std::to_string(out.rows_after_drop) + "\n";
    md += "- split: " + format_double(spec.split_ratio) + " train (" + std::to_string(out.train_rows) +
          " rows) / test (" + std::to_string(out.test_rows) + " rows), seed " +
          std::to_string(spec.split_seed) + "\n";
    md += "- encoded feature count: " + std::to_string(out.encoded_dim) + "\n";
    md += "- master seed: " + std::to_string(spec.master_seed) + "\n";
    md += "- corrupted training sets materialized: " + std::to_string(out.corrupted_training_sets) +
          "\n\n";

    md += "## Training constants\n\n";
    const Hyper& h = spec.hyper;
    md += "| constant | value |\n|---|---|\n";
    md += "| lda/qda ridge scale | " + format_double(h.ridge_scale) + " |\n";
    md += "| gaussian_nb variance floor | " + format_double(h.nb_var_floor) + " |\n";
    md += "| logreg lambda | " + format_double(h.logreg_lambda) + " |\n";
    md += "| logreg step | " + format_double(h.logreg_step) + " |\n";
    md += "| logreg max epochs | " + std::to_string(h.logreg_max_epochs) + " |\n";
    md += "| logreg gradient tolerance | " + format_double(h.logreg_tol) + " |\n";
    md += "| tree max depth | " + std::to_string(h.tree_max_depth) + " |\n";
    md += "| tree min leaf | " + std::to_string(h.tree_min_leaf) + " |\n";
    md += "| knn k | " + std::to_string(h.knn_k) + " |\n\n";

    md += "## Clean baseline\n\n";
    md += "| model | accuracy | precision | recall | f1 |\n|---|---|---|---|---|\n";
    for (const auto& r : out.baseline)
        md += std::string("| ") + classifier_kind_name(r.classifier) + " | " +
              format_fixed(r.metrics.accuracy, 4) + " | " + format_fixed(r.metrics.precision, 4) +
              " | " + format_fixed(r.metrics.recall, 4) + " | " + format_fixed(r.metrics.f1, 4) +
              " |\n";
    md += "\n";

    std::map<ClassifierKind, double> base_f1;
    for (const auto& b : out.baseline) base_f1[b.classifier] = b.metrics.f1;

    // per error kind: mean f1 over features for each (classifier, p)
    for (ErrorKind kind : {ErrorKind::mislabel, ErrorKind::duplicate, ErrorKind::missing,
                           ErrorKind::noise, ErrorKind::outlier}) {
        std::map<double, std::map<ClassifierKind, std::pair<double, std::size_t>>> agg;
        for (const auto& r : out.results) {
            if (r.error != error_kind_name(kind)) continue;
            auto& [sum, count] = agg[r.p][r.classifier];
            sum += r.metrics.f1;
            ++count;
        }
        if (agg.empty()) continue;
        md += std::string("## ") + error_kind_name(kind) + "\n\n";
        md += "| model |";
        for (const auto& [p, _] : agg)
            md += " mean f1 @" + format_double(p * 100.0) + "% | gain |";
        md += "\n|---|";
        for (std::size_t i = 0; i < agg.size(); ++i) md += "---|---|";
        md += "\n";
        for (const auto& c : spec.classifiers) {
            md += std::string("| ") + classifier_kind_name(c) + " |";
            for (const auto& [p, per_model] : agg) {
                auto it = per_model.find(c);
                if (it == per_model.end() || it->second.second == 0) {
                    md += " - | - |";
                    continue;
                }
                const double mean = it->second.first / static_cast<double>(it->second.second);
                md += " " + format_fixed(mean, 4) + " | " +
                      detail::arrow(gain_direction(mean, base_f1[c])) + " |";
            }
            md += "\n";
        }
        md += "\n";
    }

    md += "## Top runs\n\n";
    md += "| model | feature | error | percentage | f1 |\n|---|---|---|---|---|\n";
    for (const auto& r : top_k(out.results, 10))
        md += std::string("| ") + classifier_kind_name(r.classifier) + " | " + r.feature + " | " +
              r.error + " | " + format_double(r.p * 100.0) + " | " + format_fixed(r.metrics.f1, 4) +
              " |\n";
    md += "\n";

    if (!out.failures.empty()) {
        md += "## Failed cells\n\n";
        for (const auto& f : out.failures) md += "- `" + f.cell + "`: " + f.message + "\n";
        md += "\n";
    }
    return md;
}

/// Full workflow: prepare, baseline, grid, write results.csv + summary.md +
/// per-cell manifests under spec.out_dir.
inline ExperimentOutput run_experiment(const ExperimentSpec& spec) {
    if (spec.out_dir.empty()) throw ConfigError("experiment: output directory is required");
    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    const std::string manifest_dir = spec.out_dir + "/manifests";
    fs::create_directories(manifest_dir);

    const PreparedData prep = prepare_data(spec);
    ExperimentOutput out;
    out.rows_loaded = prep.rows_loaded;
    out.rows_after_drop = prep.rows_after_drop;
    out.train_rows = prep.train.n_rows();
    out.test_rows = prep.test.n_rows();

    out.baseline = run_baseline(spec, prep, &out.failures);
    out.encoded_dim = out.baseline.empty() ? 0 : out.baseline.front().train_dim;
    run_grid(spec, prep, out, manifest_dir);

    csv::write_file(spec.out_dir + "/results.csv", results_csv_string(out.baseline, out.results));
    csv::write_file(spec.out_dir + "/summary.md", summary_md_string(spec, out));
    return out;
}

} // namespace smudge
