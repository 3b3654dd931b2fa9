#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "horizonbench/bench.hpp"
#include "horizonbench/checkpoint.hpp"
#include "horizonbench/learn.hpp"
#include "horizonbench/series.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<int> parse_steps(const std::string& csv) {
    std::vector<int> out;
    for (const auto& tok : split_list(csv)) out.push_back(std::stoi(tok));
    return out;
}

hb::series::TimeSeries resolve(const std::string& name, long gen_points,
                               const std::string& data_dir, std::size_t csv_column) {
    if (hb::series::is_simulated(name)) return hb::series::generate_named(name, gen_points);
    auto ts = hb::bench::resolve_dataset(name, gen_points, data_dir);
    if (csv_column != 0) {
        // reload with the requested column
        ts = hb::series::load_csv(data_dir + "/" + name + ".csv", csv_column);
        ts.name = name;
    }
    return ts;
}

int run_command(const hb::bench::ExperimentConfig& config, const std::string& data_dir,
                std::size_t csv_column, const std::string& out_path) {
    std::vector<hb::series::TimeSeries> datasets;
    const long gen_points = config.truncate > 0 ? config.truncate : 2000;
    for (const auto& name : config.datasets) {
        datasets.push_back(resolve(name, gen_points, data_dir, csv_column));
        std::cerr << "dataset " << name << ": " << datasets.back().values.size() << " points\n";
    }

    hb::bench::ExperimentConfig cfg = config;
    cfg.progress = [](std::size_t done, std::size_t total) {
        const std::size_t stride = std::max<std::size_t>(1, total / 20);
        if (done % stride == 0 || done == total) {
            std::cerr << "progress: " << done << "/" << total << " runs\n";
        }
    };
    const auto report = hb::bench::run_experiment(datasets, cfg);
    double wall = 0.0;
    for (const auto& cell : report.cells) {
        double cell_wall = 0.0;
        for (const auto& r : cell.runs) cell_wall += r.wall_seconds;
        wall += cell_wall;
        std::cerr << cell.dataset << " x " << hb::models::to_string(cell.model) << ": "
                  << cell.runs.size() - cell.failed_runs() << "/" << cell.runs.size()
                  << " runs ok, " << cell_wall << "s\n";
    }
    std::cerr << "total training wall time " << wall << "s\n";

    hb::bench::emit_report(hb::bench::report_to_json(report), "json", out_path);
    if (out_path != "-") std::cerr << "report written to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-step-ahead time series prediction benchmark"};
    app.require_subcommand(1);

    // ---- run ----------------------------------------------------------
    hb::bench::ExperimentConfig config;
    std::string datasets_csv = "mackey_glass,lorenz,henon,rossler";
    std::string models_csv = "fnn_adam,fnn_sgd,lstm,bd_lstm,ed_lstm,rnn,cnn";
    std::string data_dir = "data";
    std::string run_out = "report.json";
    std::size_t csv_column = 0;

    auto* run = app.add_subcommand("run", "Run the multi-seed benchmark and write a JSON report");
    run->add_option("--datasets", datasets_csv, "Comma-separated dataset names");
    run->add_option("--models", models_csv, "Comma-separated model kinds");
    run->add_option("--runs", config.runs, "Runs per (dataset, model)")->check(CLI::PositiveNumber);
    run->add_option("--epochs", config.max_epochs, "Training epochs per run");
    run->add_option("--batch-size", config.batch_size, "Mini-batch size");
    run->add_option("--embed-dim", config.embed_dim, "Embedding dimension D");
    run->add_option("--lag", config.lag, "Time lag T");
    run->add_option("--horizon", config.horizon, "Prediction horizon H");
    run->add_option("--train-frac", config.train_frac, "Chronological training fraction");
    run->add_option("--master-seed", config.master_seed, "Master seed");
    run->add_option("--truncate", config.truncate, "Use only the first N points (0 = all)");
    run->add_option("--adam-lr", config.adam_lr, "Adam learning rate");
    run->add_option("--sgd-lr", config.sgd_lr, "SGD learning rate");
    run->add_option("--clip", config.gradient_clip, "Global-norm gradient clip (0 = off)");
    run->add_flag("--scale-train-only", config.scale_train_only,
                  "Fit min-max scaling on the training fraction only");
    run->add_flag("--cell-sigmoid", config.cell_state_sigmoid,
                  "Wrap the LSTM cell-state update in a sigmoid");
    run->add_option("--workers", config.workers,
                    "Parallel training workers (default: HORIZON_BENCH_WORKERS or hardware)");
    run->add_option("--data-dir", data_dir, "Directory with real-world CSV files");
    run->add_option("--csv-column", csv_column, "Column to read from CSV datasets");
    run->add_option("--out", run_out, "Output report path");

    // ---- report -------------------------------------------------------
    std::string report_in, report_format = "markdown", report_out = "-";
    auto* rep = app.add_subcommand("report", "Render a JSON report as markdown or csv");
    rep->add_option("--in", report_in, "Input report.json")->required();
    rep->add_option("--format", report_format, "json, csv or markdown");
    rep->add_option("--out", report_out, "Output path (- for stdout)");

    // ---- predict ------------------------------------------------------
    std::string ckpt_path, pred_dataset, steps_csv = "1,3,5,10", pred_out = "predictions.csv";
    auto* pred = app.add_subcommand("predict",
                                    "Emit actual-vs-predicted test values from a checkpoint");
    pred->add_option("--checkpoint", ckpt_path, "Model checkpoint")->required();
    pred->add_option("--dataset", pred_dataset, "Dataset name")->required();
    pred->add_option("--steps", steps_csv, "Comma-separated 1-based horizons");
    pred->add_option("--out", pred_out, "Output csv path");
    pred->add_option("--lag", config.lag, "Time lag T");
    pred->add_option("--train-frac", config.train_frac, "Training fraction");
    pred->add_option("--truncate", config.truncate, "Use only the first N points (0 = all)");
    pred->add_flag("--scale-train-only", config.scale_train_only, "Scale on train fraction only");
    pred->add_option("--data-dir", data_dir, "Directory with real-world CSV files");
    pred->add_option("--csv-column", csv_column, "Column to read from CSV datasets");

    // ---- train --------------------------------------------------------
    std::string train_dataset, train_model = "lstm", train_out = "model.ckpt";
    std::uint64_t train_seed = 42;
    auto* tr = app.add_subcommand("train", "Train one model and save a checkpoint");
    tr->add_option("--dataset", train_dataset, "Dataset name")->required();
    tr->add_option("--model", train_model, "Model kind");
    tr->add_option("--epochs", config.max_epochs, "Training epochs");
    tr->add_option("--batch-size", config.batch_size, "Mini-batch size");
    tr->add_option("--embed-dim", config.embed_dim, "Embedding dimension D");
    tr->add_option("--lag", config.lag, "Time lag T");
    tr->add_option("--horizon", config.horizon, "Prediction horizon H");
    tr->add_option("--train-frac", config.train_frac, "Training fraction");
    tr->add_option("--truncate", config.truncate, "Use only the first N points (0 = all)");
    tr->add_option("--seed", train_seed, "Run seed");
    tr->add_option("--adam-lr", config.adam_lr, "Adam learning rate");
    tr->add_option("--sgd-lr", config.sgd_lr, "SGD learning rate");
    tr->add_option("--clip", config.gradient_clip, "Global-norm gradient clip (0 = off)");
    tr->add_flag("--scale-train-only", config.scale_train_only, "Scale on train fraction only");
    tr->add_flag("--cell-sigmoid", config.cell_state_sigmoid, "Sigmoid cell-state update");
    tr->add_option("--data-dir", data_dir, "Directory with real-world CSV files");
    tr->add_option("--csv-column", csv_column, "Column to read from CSV datasets");
    tr->add_option("--out", train_out, "Checkpoint output path");

    // ---- gen ----------------------------------------------------------
    std::string gen_system = "lorenz", gen_out = "series.csv";
    long gen_n = 2000;
    auto* gen = app.add_subcommand("gen", "Generate a simulated chaotic series as csv");
    gen->add_option("--system", gen_system, "mackey_glass, lorenz, henon or rossler")->required();
    gen->add_option("--n", gen_n, "Number of samples");
    gen->add_option("--out", gen_out, "Output csv path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            config.datasets = split_list(datasets_csv);
            config.models.clear();
            for (const auto& name : split_list(models_csv)) {
                config.models.push_back(hb::models::model_kind_from_string(name));
            }
            return run_command(config, data_dir, csv_column, run_out);
        }
        if (*rep) {
            std::ifstream in(report_in);
            if (!in) throw std::runtime_error("cannot open " + report_in);
            nlohmann::ordered_json j;
            in >> j;
            hb::bench::emit_report(j, report_format, report_out);
            return 0;
        }
        if (*pred) {
            const auto model = hb::models::load_checkpoint(ckpt_path);
            const long gen_points = config.truncate > 0 ? config.truncate : 2000;
            const auto raw = resolve(pred_dataset, gen_points, data_dir, csv_column);
            hb::bench::emit_predictions(*model, raw, config.lag, config.train_frac,
                                        config.truncate, config.scale_train_only,
                                        parse_steps(steps_csv), pred_out);
            if (pred_out != "-") std::cerr << "predictions written to " << pred_out << "\n";
            return 0;
        }
        if (*tr) {
            const auto kind = hb::models::model_kind_from_string(train_model);
            const long gen_points = config.truncate > 0 ? config.truncate : 2000;
            const auto raw = resolve(train_dataset, gen_points, data_dir, csv_column);
            const auto prep = hb::bench::prepare_dataset(raw, config.embed_dim, config.lag,
                                                         config.horizon, config.train_frac,
                                                         config.truncate, config.scale_train_only);
            auto spec = hb::models::default_spec(kind, config.embed_dim, config.horizon);
            spec.cell_state_sigmoid = config.cell_state_sigmoid;
            hb::Rng rng(train_seed, 0);
            auto model = hb::models::build_model(spec, rng);
            const auto history =
                hb::learn::train(*model, prep.train, hb::bench::train_config_for(config, kind, train_seed));
            std::cerr << "final training loss " << history.back() << "\n";
            hb::models::save_checkpoint(*model, train_out);
            std::cerr << "checkpoint written to " << train_out << "\n";
            return 0;
        }
        if (*gen) {
            const auto ts = hb::series::generate_named(gen_system, gen_n);
            std::ofstream out(gen_out, std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open " + gen_out);
            out.precision(17);
            for (double v : ts.values) out << v << "\n";
            std::cerr << gen_system << ": " << ts.values.size() << " samples -> " << gen_out
                      << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
