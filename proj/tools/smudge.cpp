// smudge: corrupt tabular datasets with parameterized error models and
// measure how classifiers trained on the corrupted data hold up on clean
// test data.
//
//   smudge stats <csv> [--target NAME]
//   smudge corrupt <csv> --config <json> --out <csv> --manifest-out <jsonl>
//                  [--manifest-in <jsonl>] [--seed N] [--target NAME]
//   smudge experiment --spec <json> --out-dir <dir> [--jobs N]
//   smudge report <results.csv> --mode gains|topk [--k N]
//
// Exit codes: 0 success, 2 usage/config error, 3 state mismatch.
// The TOOL_SEED environment variable overrides configured seeds.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smudge/smudge.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitState = 3;

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("TOOL_SEED");
    if (!v || !*v) return std::nullopt;
    std::int64_t parsed = 0;
    if (!smudge::parse_int64(v, parsed))
        throw smudge::ConfigError("TOOL_SEED must be an integer");
    return static_cast<std::uint64_t>(parsed);
}

int cmd_stats(const std::string& path, const std::string& target) {
    using namespace smudge;
    ReadOptions opts;
    if (!target.empty()) opts.target = target;
    const Dataset ds = read_csv(path, opts);

    std::cout << "rows: " << ds.n_rows() << "\n";
    std::cout << "columns: " << ds.n_cols() << "\n";
    if (ds.schema.target) {
        std::cout << "target: " << *ds.schema.target << "\n";
        const std::size_t t = ds.schema.require_index(*ds.schema.target);
        std::map<std::string, std::size_t> counts;
        std::size_t total = 0;
        for (const auto& row : ds.rows) {
            if (is_missing(row[t])) continue;
            ++counts[render_cell(row[t])];
            ++total;
        }
        std::cout << "class balance:";
        for (const auto& [cls, count] : counts)
            std::cout << " " << cls << "="
                      << format_fixed(100.0 * static_cast<double>(count) /
                                          static_cast<double>(std::max<std::size_t>(total, 1)),
                                      1)
                      << "%";
        std::cout << "\n";
    }
    std::cout << "\n";
    for (const auto& col : ds.schema.columns) {
        const FeatureStats st = column_stats(ds, col.name);
        std::cout << col.name << " (" << type_kind_name(col.type.kind) << "): count=" << st.count;
        if (st.count > 0) {
            if (col.type.kind == TypeKind::categorical || col.type.kind == TypeKind::text) {
                std::cout << " distinct=" << st.distinct.size();
            } else if (col.type.kind == TypeKind::date) {
                std::cout << " min=" << format_date(*st.date_min)
                          << " max=" << format_date(*st.date_max);
            } else {
                std::cout << " mean=" << format_fixed(st.mean, 4)
                          << " std=" << format_fixed(st.stddev, 4) << " min=" << format_double(st.min)
                          << " max=" << format_double(st.max);
            }
        }
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_corrupt(const std::string& csv_path, const std::string& config_path,
                const std::string& out_path, const std::string& manifest_out,
                const std::string& manifest_in, std::uint64_t seed, bool seed_given,
                const std::string& target) {
    using namespace smudge;
    std::vector<ErrorModel> models = parse_error_model(csv::read_file(config_path));
    if (models.empty()) throw ConfigError("$.models: at least one model is required");

    nlohmann::json config = nlohmann::json::parse(csv::read_file(config_path));
    ReadOptions opts;
    if (!target.empty()) {
        opts.target = target;
    } else {
        for (const auto& m : models)
            if (m.kind == ErrorKind::mislabel && !m.features.empty()) opts.target = m.features.front();
    }
    const Dataset clean = read_csv(csv_path, opts);

    std::uint64_t base_seed = seed_given ? seed : 0;
    if (auto env = env_seed()) base_seed = *env;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const bool explicit_seed =
            config.at("models")[i].is_object() && config.at("models")[i].contains("seed");
        if (!explicit_seed && (seed_given || env_seed() || models[i].seed == 0))
            models[i].seed = derive_seed(base_seed, "model", std::to_string(i));
    }

    const bool wants_extended =
        std::any_of(models.begin(), models.end(),
                    [](const ErrorModel& m) { return m.mode == Mode::extended; });
    std::optional<CorruptionManifest> prior;
    if (!manifest_in.empty()) {
        prior = read_manifest(manifest_in, clean.schema);
    } else if (wants_extended) {
        throw StateError("extended mode requires --manifest-in");
    }

    Dataset current = clean;
    CorruptionManifest manifest;
    InjectLog log;
    for (const auto& model : models) {
        auto [corrupted, m] = apply(clean, model, prior, &log);
        current = std::move(corrupted);
        manifest = std::move(m);
        prior = manifest;
    }

    write_csv(current, out_path);
    write_manifest(manifest, manifest_out);
    std::cout << "wrote " << out_path << " (" << current.n_rows() << " rows) and " << manifest_out
              << " (" << manifest.records.size() << " records";
    if (log.skipped_degenerate_cells > 0)
        std::cout << ", " << log.skipped_degenerate_cells << " degenerate cells skipped";
    std::cout << ")\n";
    return kExitOk;
}

int cmd_experiment(const std::string& spec_path, const std::string& out_dir, int jobs,
                   bool jobs_given) {
    using namespace smudge;
    ExperimentSpec spec = parse_experiment_spec(csv::read_file(spec_path));
    if (!out_dir.empty()) spec.out_dir = out_dir;
    if (jobs_given) spec.jobs = jobs;
    if (auto env = env_seed()) spec.master_seed = *env;

    const ExperimentOutput out = run_experiment(spec);
    std::cout << "baseline models: " << out.baseline.size() << "\n";
    std::cout << "corrupted training sets: " << out.corrupted_training_sets << "\n";
    std::cout << "grid results: " << out.results.size() << "\n";
    std::cout << "failed cells: " << out.failures.size() << "\n";
    std::cout << "wrote " << spec.out_dir << "/results.csv, " << spec.out_dir << "/summary.md\n";
    return kExitOk;
}

int cmd_report(const std::string& results_path, const std::string& mode, std::size_t k) {
    using namespace smudge;
    const std::vector<ReportRow> rows = read_results_csv(results_path);
    if (mode == "gains") {
        std::cout << render_gains(rows);
    } else if (mode == "topk") {
        std::cout << render_topk(rows, k);
    } else {
        throw ConfigError("--mode must be 'gains' or 'topk'");
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabular data corruption and robustness benchmarking"};
    app.require_subcommand(1);

    std::string stats_csv, stats_target;
    auto* stats = app.add_subcommand("stats", "dataset summary: rows, class balance, column stats");
    stats->add_option("csv", stats_csv, "input CSV")->required();
    stats->add_option("--target", stats_target, "target column name");

    std::string cor_csv, cor_config, cor_out, cor_mout, cor_min, cor_target;
    std::uint64_t cor_seed = 0;
    auto* corrupt = app.add_subcommand("corrupt", "apply error models to a clean CSV");
    corrupt->add_option("csv", cor_csv, "clean input CSV")->required();
    corrupt->add_option("--config", cor_config, "error-model config JSON")->required();
    corrupt->add_option("--out", cor_out, "corrupted CSV output path")->required();
    corrupt->add_option("--manifest-out", cor_mout, "manifest JSONL output path")->required();
    corrupt->add_option("--manifest-in", cor_min, "prior manifest for extended mode");
    auto* seed_opt = corrupt->add_option("--seed", cor_seed, "base seed for models without one");
    corrupt->add_option("--target", cor_target, "target column name");

    std::string exp_spec, exp_out;
    int exp_jobs = 1;
    auto* experiment = app.add_subcommand("experiment", "run baseline + corruption grid");
    experiment->add_option("--spec", exp_spec, "experiment spec JSON")->required();
    experiment->add_option("--out-dir", exp_out, "output directory")->required();
    auto* jobs_opt = experiment->add_option("--jobs", exp_jobs, "parallel grid workers (default 1)");

    std::string rep_results, rep_mode = "gains";
    std::size_t rep_k = 10;
    auto* report = app.add_subcommand("report", "render markdown tables from results.csv");
    report->add_option("results", rep_results, "results.csv from the experiment command")->required();
    report->add_option("--mode", rep_mode, "gains|topk")->required();
    report->add_option("--k", rep_k, "row count for topk (default 10)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (stats->parsed()) return cmd_stats(stats_csv, stats_target);
        if (corrupt->parsed())
            return cmd_corrupt(cor_csv, cor_config, cor_out, cor_mout, cor_min, cor_seed,
                               seed_opt->count() > 0, cor_target);
        if (experiment->parsed())
            return cmd_experiment(exp_spec, exp_out, exp_jobs, jobs_opt->count() > 0);
        if (report->parsed()) return cmd_report(rep_results, rep_mode, rep_k);
    } catch (const smudge::StateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitState;
    } catch (const smudge::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
