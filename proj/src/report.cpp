#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "horizonbench/bench.hpp"

namespace hb::bench {

namespace {

using nlohmann::ordered_json;

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

ordered_json aggregate_json(const std::vector<double>& values) {
    ordered_json j;
    if (values.size() >= 2) {
        const Aggregate a = aggregate(values);
        j["mean"] = a.mean;
        j["ci"] = a.ci_half;
    } else {
        j["mean"] = values.at(0);
        j["ci"] = nullptr;
    }
    return j;
}

ordered_json split_aggregate_json(const CellResult& cell, bool test, int horizon) {
    ordered_json j;
    j["overall"] = aggregate_json(cell.overall_values(test));
    ordered_json steps = ordered_json::array();
    for (int h = 0; h < horizon; ++h) {
        steps.push_back(aggregate_json(test ? cell.test_horizon_values(h)
                                            : cell.train_horizon_values(h)));
    }
    j["per_horizon"] = std::move(steps);
    return j;
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path == "-" || out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("emit_report: cannot open " + out_path);
    out << text;
    if (!out) throw std::runtime_error("emit_report: write failed for " + out_path);
}

}  // namespace

ordered_json report_to_json(const ExperimentReport& report) {
    const ExperimentConfig& cfg = report.config;
    ordered_json j;
    j["schema_version"] = 1;

    ordered_json config;
    config["master_seed"] = cfg.master_seed;
    config["runs"] = cfg.runs;
    config["datasets"] = cfg.datasets;
    ordered_json model_names = ordered_json::array();
    for (auto m : cfg.models) model_names.push_back(models::to_string(m));
    config["models"] = std::move(model_names);
    config["embed_dim"] = cfg.embed_dim;
    config["lag"] = cfg.lag;
    config["horizon"] = cfg.horizon;
    config["train_frac"] = cfg.train_frac;
    config["truncate"] = cfg.truncate;
    config["scale_train_only"] = cfg.scale_train_only;
    config["max_epochs"] = cfg.max_epochs;
    config["batch_size"] = cfg.batch_size;
    config["adam_lr"] = cfg.adam_lr;
    config["sgd_lr"] = cfg.sgd_lr;
    config["gradient_clip"] = cfg.gradient_clip;
    config["cell_state_sigmoid"] = cfg.cell_state_sigmoid;
    j["config"] = std::move(config);

    ordered_json cells = ordered_json::array();
    bool all_cells_usable = !report.cells.empty();
    for (const auto& cell : report.cells) {
        ordered_json c;
        c["dataset"] = cell.dataset;
        c["model"] = models::to_string(cell.model);
        ordered_json runs = ordered_json::array();
        for (const auto& r : cell.runs) {
            ordered_json rj;
            rj["run"] = r.run;
            rj["seed"] = r.seed;
            rj["ok"] = r.ok;
            if (r.ok) {
                rj["train_rmse"] = r.train_rmse;
                rj["test_rmse"] = r.test_rmse;
                rj["train_overall"] = r.train_overall;
                rj["test_overall"] = r.test_overall;
            } else {
                rj["error"] = r.error;
            }
            runs.push_back(std::move(rj));
        }
        c["runs"] = std::move(runs);
        c["failed_runs"] = cell.failed_runs();
        const int ok_runs = static_cast<int>(cell.runs.size()) - cell.failed_runs();
        if (ok_runs >= 1) {
            ordered_json agg;
            agg["single_run"] = ok_runs == 1;
            agg["train"] = split_aggregate_json(cell, false, report.config.horizon);
            agg["test"] = split_aggregate_json(cell, true, report.config.horizon);
            c["aggregate"] = std::move(agg);
        } else {
            c["aggregate"] = nullptr;
            all_cells_usable = false;
        }
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);

    if (all_cells_usable) {
        const RankTable table = rank_models(report);
        ordered_json per_dataset;
        for (std::size_t d = 0; d < table.datasets.size(); ++d) {
            ordered_json row;
            for (std::size_t m = 0; m < table.models.size(); ++m) {
                row[models::to_string(table.models[m])] = table.ranks[d][m];
            }
            per_dataset[table.datasets[d]] = std::move(row);
        }
        ordered_json mean_rank;
        for (std::size_t m = 0; m < table.models.size(); ++m) {
            mean_rank[models::to_string(table.models[m])] = table.mean_rank[m];
        }
        ordered_json ranks;
        ranks["per_dataset"] = std::move(per_dataset);
        ranks["mean_rank"] = std::move(mean_rank);
        j["ranks"] = std::move(ranks);
    } else {
        j["ranks"] = nullptr;
    }
    return j;
}

std::string render_csv(const ordered_json& report) {
    std::ostringstream out;
    out << "dataset,model,split,horizon,mean,ci\n";
    for (const auto& cell : report.at("cells")) {
        if (cell.at("aggregate").is_null()) continue;
        const std::string dataset = cell.at("dataset");
        const std::string model = cell.at("model");
        for (const char* split : {"train", "test"}) {
            const auto& agg = cell.at("aggregate").at(split);
            auto emit_row = [&](const std::string& horizon, const ordered_json& a) {
                out << dataset << ',' << model << ',' << split << ',' << horizon << ','
                    << shortest(a.at("mean").get<double>()) << ',';
                if (!a.at("ci").is_null()) out << shortest(a.at("ci").get<double>());
                out << '\n';
            };
            emit_row("overall", agg.at("overall"));
            const auto& steps = agg.at("per_horizon");
            for (std::size_t h = 0; h < steps.size(); ++h) {
                emit_row(std::to_string(h + 1), steps[h]);
            }
        }
    }
    return out.str();
}

std::string render_markdown(const ordered_json& report) {
    std::ostringstream out;
    const auto& config = report.at("config");
    const auto model_names = config.at("models").get<std::vector<std::string>>();
    const int horizon = config.at("horizon").get<int>();

    auto header_row = [&] {
        std::ostringstream h;
        h << "| |";
        for (const auto& m : model_names) {
            h << ' ' << models::display_name(models::model_kind_from_string(m)) << " |";
        }
        h << "\n|---|";
        for (std::size_t i = 0; i < model_names.size(); ++i) h << "---|";
        h << '\n';
        return h.str();
    };

    auto cell_text = [](const ordered_json& a) {
        std::string s = fixed4(a.at("mean").get<double>());
        if (!a.at("ci").is_null()) s += " ± " + fixed4(a.at("ci").get<double>());
        return s;
    };

    for (const auto& dataset : config.at("datasets").get<std::vector<std::string>>()) {
        out << "## " << dataset << "\n\n" << header_row();
        auto find_cell = [&](const std::string& model) -> const ordered_json* {
            for (const auto& cell : report.at("cells")) {
                if (cell.at("dataset") == dataset && cell.at("model") == model) return &cell;
            }
            return nullptr;
        };
        auto emit_row = [&](const std::string& label, auto&& pick) {
            out << "| " << label << " |";
            for (const auto& m : model_names) {
                const ordered_json* cell = find_cell(m);
                if (!cell || cell->at("aggregate").is_null()) {
                    out << " n/a |";
                } else {
                    out << ' ' << cell_text(pick(cell->at("aggregate"))) << " |";
                }
            }
            out << '\n';
        };
        emit_row("Train", [](const ordered_json& a) -> const ordered_json& {
            return a.at("train").at("overall");
        });
        emit_row("Test", [](const ordered_json& a) -> const ordered_json& {
            return a.at("test").at("overall");
        });
        for (int h = 0; h < horizon; ++h) {
            emit_row("Step-" + std::to_string(h + 1),
                     [h](const ordered_json& a) -> const ordered_json& {
                         return a.at("test").at("per_horizon").at(static_cast<std::size_t>(h));
                     });
        }
        out << '\n';
    }

    if (!report.at("ranks").is_null()) {
        const auto& ranks = report.at("ranks");
        out << "## Ranks (test RMSE, lower is better)\n\n" << header_row();
        for (const auto& dataset : config.at("datasets").get<std::vector<std::string>>()) {
            out << "| " << dataset << " |";
            for (const auto& m : model_names) {
                out << ' ' << ranks.at("per_dataset").at(dataset).at(m).get<int>() << " |";
            }
            out << '\n';
        }
        out << "| Mean rank |";
        for (const auto& m : model_names) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f", ranks.at("mean_rank").at(m).get<double>());
            out << ' ' << buf << " |";
        }
        out << "\n";
    }
    return out.str();
}

void emit_report(const ordered_json& report, const std::string& format,
                 const std::string& out_path) {
    if (!report.contains("cells") || report.at("cells").empty()) {
        throw std::invalid_argument("emit_report: report has no cells");
    }
    if (format == "json") {
        write_text(report.dump(2) + "\n", out_path);
    } else if (format == "csv") {
        write_text(render_csv(report), out_path);
    } else if (format == "markdown") {
        write_text(render_markdown(report), out_path);
    } else {
        throw std::invalid_argument("emit_report: unknown format '" + format + "'");
    }
}

void emit_predictions(const models::Model& model, const series::TimeSeries& raw, int lag,
                      double train_frac, long truncate, bool scale_train_only,
                      const std::vector<int>& horizons, const std::string& out_path) {
    const int window = model.spec().input_dim;
    const int horizon = model.spec().output_dim;
    for (int h : horizons) {
        if (h < 1 || h > horizon) {
            throw std::invalid_argument("emit_predictions: horizon " + std::to_string(h) +
                                        " outside 1.." + std::to_string(horizon));
        }
    }
    const PreparedDataset prep =
        prepare_dataset(raw, window, lag, horizon, train_frac, truncate, scale_train_only);
    const Matrix pred = model.predict(prep.test.inputs);

    std::ostringstream out;
    out << "horizon,index,actual,predicted\n";
    for (int h : horizons) {
        const auto col = static_cast<std::size_t>(h - 1);
        for (std::size_t r = 0; r < pred.rows(); ++r) {
            out << h << ',' << r << ','
                << shortest(data::inverse_scale(prep.test.targets(r, col), prep.scale)) << ','
                << shortest(data::inverse_scale(pred(r, col), prep.scale)) << '\n';
        }
    }
    write_text(out.str(), out_path);
}

}  // namespace hb::bench
