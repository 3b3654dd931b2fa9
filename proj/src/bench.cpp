#include "horizonbench/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <thread>

namespace hb::bench {

std::vector<double> rmse_per_horizon(const Matrix& pred, const Matrix& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw std::invalid_argument("rmse_per_horizon: shape mismatch");
    }
    if (pred.rows() == 0) throw std::invalid_argument("rmse_per_horizon: empty input");
    std::vector<double> out(pred.cols(), 0.0);
    for (std::size_t r = 0; r < pred.rows(); ++r) {
        for (std::size_t h = 0; h < pred.cols(); ++h) {
            const double d = pred(r, h) - target(r, h);
            out[h] += d * d;
        }
    }
    for (double& v : out) v = std::sqrt(v / static_cast<double>(pred.rows()));
    return out;
}

double rmse_pooled(const Matrix& pred, const Matrix& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw std::invalid_argument("rmse_pooled: shape mismatch");
    }
    if (pred.size() == 0) throw std::invalid_argument("rmse_pooled: empty input");
    double acc = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double d = pred.flat()[k] - target.flat()[k];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(pred.size()));
}

int CellResult::failed_runs() const {
    int n = 0;
    for (const auto& r : runs) n += r.ok ? 0 : 1;
    return n;
}

std::vector<double> CellResult::test_horizon_values(int horizon_index) const {
    std::vector<double> out;
    for (const auto& r : runs) {
        if (r.ok) out.push_back(r.test_rmse.at(static_cast<std::size_t>(horizon_index)));
    }
    return out;
}

std::vector<double> CellResult::train_horizon_values(int horizon_index) const {
    std::vector<double> out;
    for (const auto& r : runs) {
        if (r.ok) out.push_back(r.train_rmse.at(static_cast<std::size_t>(horizon_index)));
    }
    return out;
}

std::vector<double> CellResult::overall_values(bool test) const {
    std::vector<double> out;
    for (const auto& r : runs) {
        if (r.ok) out.push_back(test ? r.test_overall : r.train_overall);
    }
    return out;
}

double CellResult::ranking_score() const {
    std::size_t horizons = 0;
    for (const auto& r : runs) {
        if (r.ok) {
            horizons = r.test_rmse.size();
            break;
        }
    }
    if (horizons == 0) throw std::runtime_error("ranking_score: no successful runs");
    double acc = 0.0;
    for (std::size_t h = 0; h < horizons; ++h) {
        acc += mean_of(test_horizon_values(static_cast<int>(h)));
    }
    return acc / static_cast<double>(horizons);
}

const CellResult* ExperimentReport::find(const std::string& dataset,
                                         models::ModelKind model) const {
    for (const auto& c : cells) {
        if (c.dataset == dataset && c.model == model) return &c;
    }
    return nullptr;
}

PreparedDataset prepare_dataset(const series::TimeSeries& raw, int embed_dim, int lag, int horizon,
                                double train_frac, long truncate, bool scale_train_only) {
    series::TimeSeries working = raw;
    if (truncate > 0 && working.values.size() > static_cast<std::size_t>(truncate)) {
        working.values.resize(static_cast<std::size_t>(truncate));
    }

    data::ScaleParams scale;
    series::TimeSeries scaled{};
    if (scale_train_only) {
        const auto n_fit = static_cast<std::size_t>(
            std::floor(train_frac * static_cast<double>(working.values.size())));
        if (n_fit < 2) throw std::invalid_argument("prepare_dataset: train side too small to scale");
        series::TimeSeries head = working;
        head.values.resize(n_fit);
        scale = data::fit_scale(head).second;
        scaled = data::apply_scale(working, scale);
    } else {
        std::tie(scaled, scale) = data::fit_scale(working);
    }

    const auto embedded = data::embed(scaled, embed_dim, lag, horizon);
    auto [train, test] = data::split(embedded, train_frac);

    PreparedDataset out;
    out.name = raw.name;
    out.scale = scale;
    out.train = std::move(train);
    out.test = std::move(test);
    return out;
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, const std::string& dataset,
                              models::ModelKind model, int run) {
    std::uint64_t h = hash64(master_seed);
    h = hash64(dataset, h);
    h = hash64(models::to_string(model), h);
    h = hash64(static_cast<std::uint64_t>(run), h);
    return h;
}

learn::TrainConfig train_config_for(const ExperimentConfig& config, models::ModelKind kind,
                                    std::uint64_t run_seed) {
    learn::TrainConfig tc;
    tc.max_epochs = config.max_epochs;
    tc.batch_size = config.batch_size;
    if (kind == models::ModelKind::FnnSgd) {
        tc.optimizer = learn::OptimizerKind::Sgd;
        tc.learning_rate = config.sgd_lr;
    } else {
        tc.optimizer = learn::OptimizerKind::Adam;
        tc.learning_rate = config.adam_lr;
    }
    tc.shuffle_seed = hash64("shuffle", hash64(run_seed));
    if (config.gradient_clip > 0.0) tc.gradient_clip = config.gradient_clip;
    return tc;
}

namespace {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HORIZON_BENCH_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

RunOutcome execute_run(const PreparedDataset& prep, models::ModelKind kind, int run,
                       const ExperimentConfig& config) {
    RunOutcome out;
    out.run = run;
    out.seed = derive_run_seed(config.master_seed, prep.name, kind, run);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        models::ModelSpec spec = models::default_spec(kind, config.embed_dim, config.horizon);
        spec.cell_state_sigmoid = config.cell_state_sigmoid;
        Rng rng(out.seed, 0);
        auto model = models::build_model(spec, rng);
        learn::train(*model, prep.train, train_config_for(config, kind, out.seed));

        const Matrix pred_train = model->predict(prep.train.inputs);
        const Matrix pred_test = model->predict(prep.test.inputs);
        out.train_rmse = rmse_per_horizon(pred_train, prep.train.targets);
        out.test_rmse = rmse_per_horizon(pred_test, prep.test.targets);
        out.train_overall = rmse_pooled(pred_train, prep.train.targets);
        out.test_overall = rmse_pooled(pred_test, prep.test.targets);
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace

ExperimentReport run_experiment(const std::vector<series::TimeSeries>& datasets,
                                const ExperimentConfig& config) {
    if (config.runs < 1) throw std::invalid_argument("run_experiment: runs must be >= 1");
    if (datasets.empty()) throw std::invalid_argument("run_experiment: no datasets");
    if (config.models.empty()) throw std::invalid_argument("run_experiment: no models");

    // a dataset that fails preparation marks all of its runs failed instead of
    // aborting the rest of the grid
    std::vector<std::optional<PreparedDataset>> prepared(datasets.size());
    std::vector<std::string> prep_errors(datasets.size());
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        try {
            prepared[d] = prepare_dataset(datasets[d], config.embed_dim, config.lag,
                                          config.horizon, config.train_frac, config.truncate,
                                          config.scale_train_only);
        } catch (const std::exception& e) {
            prep_errors[d] = e.what();
        }
    }

    struct WorkItem {
        std::size_t dataset;
        std::size_t model;
        int run;
    };
    std::vector<WorkItem> items;
    for (std::size_t d = 0; d < prepared.size(); ++d) {
        for (std::size_t m = 0; m < config.models.size(); ++m) {
            for (int r = 0; r < config.runs; ++r) items.push_back({d, m, r});
        }
    }

    std::vector<RunOutcome> results(items.size());
    std::atomic<std::size_t> cursor{0};
    std::atomic<std::size_t> done{0};
    auto finish_one = [&] {
        const std::size_t d = done.fetch_add(1) + 1;
        if (config.progress) config.progress(d, items.size());
    };
    auto worker = [&] {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= items.size()) break;
            const WorkItem& w = items[i];
            if (!prepared[w.dataset]) {
                RunOutcome out;
                out.run = w.run;
                out.seed = derive_run_seed(config.master_seed, datasets[w.dataset].name,
                                           config.models[w.model], w.run);
                out.ok = false;
                out.error = prep_errors[w.dataset];
                results[i] = std::move(out);
                finish_one();
                continue;
            }
            results[i] = execute_run(*prepared[w.dataset], config.models[w.model], w.run, config);
            finish_one();
        }
    };

    const int n_workers =
        std::min<int>(resolve_workers(config.workers), static_cast<int>(items.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // deterministic assembly in (dataset, model, run) order
    ExperimentReport report;
    report.config = config;
    report.config.datasets.clear();
    for (const auto& raw : datasets) report.config.datasets.push_back(raw.name);
    std::size_t idx = 0;
    for (std::size_t d = 0; d < prepared.size(); ++d) {
        for (std::size_t m = 0; m < config.models.size(); ++m) {
            CellResult cell;
            cell.dataset = datasets[d].name;
            cell.model = config.models[m];
            for (int r = 0; r < config.runs; ++r) cell.runs.push_back(std::move(results[idx++]));
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

RankTable rank_models(const ExperimentReport& report) {
    RankTable table;
    table.datasets = report.config.datasets;
    table.models = report.config.models;
    table.mean_rank.assign(table.models.size(), 0.0);
    for (const auto& dataset : table.datasets) {
        std::vector<double> scores;
        for (auto kind : table.models) {
            const CellResult* cell = report.find(dataset, kind);
            if (!cell) {
                throw std::runtime_error("rank_models: missing cell " + dataset + " x " +
                                         models::to_string(kind));
            }
            scores.push_back(cell->ranking_score());
        }
        table.ranks.push_back(rank_with_ties(scores));
        for (std::size_t m = 0; m < table.models.size(); ++m) {
            table.mean_rank[m] += table.ranks.back()[m];
        }
    }
    for (auto& v : table.mean_rank) v /= static_cast<double>(table.datasets.size());
    return table;
}

series::TimeSeries resolve_dataset(const std::string& name, long gen_points,
                                   const std::string& data_dir) {
    if (series::is_simulated(name)) return series::generate_named(name, gen_points);
    const std::filesystem::path path = std::filesystem::path(data_dir) / (name + ".csv");
    if (!std::filesystem::exists(path)) {
        std::string known = "mackey_glass, lorenz, henon, rossler";
        throw std::runtime_error("dataset '" + name + "': no such simulated system (" + known +
                                 ") and no file " + path.string());
    }
    auto ts = series::load_csv(path.string());
    ts.name = name;
    return ts;
}

}  // namespace hb::bench
