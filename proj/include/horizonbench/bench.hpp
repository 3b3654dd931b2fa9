#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "horizonbench/dataset.hpp"
#include "horizonbench/learn.hpp"
#include "horizonbench/model.hpp"
#include "horizonbench/series.hpp"
#include "horizonbench/stats.hpp"

namespace hb::bench {

// Column h of the result is sqrt(mean over rows of (pred - target)^2).
std::vector<double> rmse_per_horizon(const Matrix& pred, const Matrix& target);
// All horizon columns pooled into one RMSE.
double rmse_pooled(const Matrix& pred, const Matrix& target);

struct ExperimentConfig {
    std::vector<std::string> datasets;
    std::vector<models::ModelKind> models;
    int runs = 30;
    std::uint64_t master_seed = 42;
    int embed_dim = 5;
    int lag = 1;
    int horizon = 10;
    double train_frac = 0.6;
    long truncate = 1000;  // first N points; 0 keeps the whole series
    bool scale_train_only = false;
    long max_epochs = 1000;
    long batch_size = 32;
    double adam_lr = 5e-3;  // from trial experiments; see README
    double sgd_lr = 1e-2;
    double gradient_clip = 0.0;  // 0 disables
    bool cell_state_sigmoid = false;
    int workers = 0;  // 0: HORIZON_BENCH_WORKERS env, else hardware
    // called after every finished run with (done, total); not serialized
    std::function<void(std::size_t, std::size_t)> progress;
};

struct RunOutcome {
    int run = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::vector<double> train_rmse, test_rmse;  // per horizon, scaled units
    double train_overall = 0.0, test_overall = 0.0;
    double wall_seconds = 0.0;  // logged only; kept out of the report
};

struct CellResult {
    std::string dataset;
    models::ModelKind model = models::ModelKind::Lstm;
    std::vector<RunOutcome> runs;

    int failed_runs() const;
    // Per-run values for one horizon column (ok runs only).
    std::vector<double> test_horizon_values(int horizon_index) const;
    std::vector<double> train_horizon_values(int horizon_index) const;
    std::vector<double> overall_values(bool test) const;
    // Mean over horizons of per-horizon test RMSE means (the ranking score).
    double ranking_score() const;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellResult> cells;

    const CellResult* find(const std::string& dataset, models::ModelKind model) const;
};

struct PreparedDataset {
    std::string name;
    data::ScaleParams scale;
    data::EmbeddedDataset train, test;
};

PreparedDataset prepare_dataset(const series::TimeSeries& raw, int embed_dim, int lag, int horizon,
                                double train_frac, long truncate, bool scale_train_only);

std::uint64_t derive_run_seed(std::uint64_t master_seed, const std::string& dataset,
                              models::ModelKind model, int run);

// Per-model training setup from the experiment defaults: FNN-SGD trains with
// SGD, everything else with Adam.
learn::TrainConfig train_config_for(const ExperimentConfig& config, models::ModelKind kind,
                                    std::uint64_t run_seed);

// Full protocol per (dataset, model, run): build -> train -> predict -> RMSE.
// Runs execute on a bounded worker pool; a failed run is recorded on its cell,
// never dropped. Output is a pure function of (master_seed, config).
ExperimentReport run_experiment(const std::vector<series::TimeSeries>& datasets,
                                const ExperimentConfig& config);

// Resolves a dataset name: simulated systems are generated (n points before
// truncation), real-world names load <data_dir>/<name>.csv.
series::TimeSeries resolve_dataset(const std::string& name, long gen_points,
                                   const std::string& data_dir);

// Ascending tied-min ranks of mean test RMSE per dataset plus the mean rank
// per model over datasets. Throws if any (dataset, model) cell is missing or
// has no successful runs.
struct RankTable {
    std::vector<std::string> datasets;
    std::vector<models::ModelKind> models;
    std::vector<std::vector<int>> ranks;  // [dataset][model]
    std::vector<double> mean_rank;        // per model
};
RankTable rank_models(const ExperimentReport& report);

nlohmann::ordered_json report_to_json(const ExperimentReport& report);
std::string render_csv(const nlohmann::ordered_json& report);
std::string render_markdown(const nlohmann::ordered_json& report);
// format: json | csv | markdown. Throws on unknown format, empty report, or
// unwritable path.
void emit_report(const nlohmann::ordered_json& report, const std::string& format,
                 const std::string& out_path);

// Test-segment actual-vs-predicted pairs for selected horizons (1-based), in
// original units, as csv columns horizon,index,actual,predicted.
void emit_predictions(const models::Model& model, const series::TimeSeries& raw, int lag,
                      double train_frac, long truncate, bool scale_train_only,
                      const std::vector<int>& horizons, const std::string& out_path);

}  // namespace hb::bench
