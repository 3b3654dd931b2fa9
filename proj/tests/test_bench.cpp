#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "horizonbench/bench.hpp"
#include "horizonbench/checkpoint.hpp"

using namespace hb;
using namespace hb::bench;

namespace {

// Independent Student-t quantile: adaptive Simpson quadrature of the density
// plus bisection. Shares nothing with the incomplete-beta implementation.
double t_density(double x, double nu) {
    const double c =
        std::exp(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0)) / std::sqrt(nu * M_PI);
    return c * std::pow(1.0 + x * x / nu, -(nu + 1.0) / 2.0);
}

double simpson(double a, double b, double nu, int depth, double fa, double fm, double fb) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = t_density(lm, nu), frm = t_density(rm, nu);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth > 40 || std::abs(left + right - whole) < 1e-14) return left + right;
    return simpson(a, m, nu, depth + 1, fa, flm, fm) + simpson(m, b, nu, depth + 1, fm, frm, fb);
}

double t_cdf_quadrature(double x, double nu) {
    if (x == 0.0) return 0.5;
    const double fa = t_density(0.0, nu), fb = t_density(std::abs(x), nu);
    const double fm = t_density(std::abs(x) / 2.0, nu);
    const double integral = simpson(0.0, std::abs(x), nu, 0, fa, fm, fb);
    return x > 0 ? 0.5 + integral : 0.5 - integral;
}

double t_ppf_oracle(double p, int dof) {
    double lo = 0.0, hi = 1.0;
    while (t_cdf_quadrature(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 120; ++i) {
        const double mid = 0.5 * (lo + hi);
        (t_cdf_quadrature(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.datasets = {"lorenz"};
    cfg.models = {models::ModelKind::FnnAdam, models::ModelKind::Lstm};
    cfg.runs = 2;
    cfg.max_epochs = 4;
    cfg.truncate = 120;
    cfg.workers = 1;
    return cfg;
}

}  // namespace

TEST_CASE("per-horizon rmse follows the definition") {
    const Matrix target = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(rmse_per_horizon(target, target) == std::vector<double>{0, 0, 0});

    const Matrix single_pred = Matrix::from_rows({{4, 6}});
    const Matrix single_tgt = Matrix::from_rows({{1, 2}});
    const auto single = rmse_per_horizon(single_pred, single_tgt);
    CHECK(single[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(single[1] == doctest::Approx(4.0).epsilon(1e-15));

    // column errors {3, 4} across two rows -> sqrt((9+16)/2)
    const Matrix pred2 = Matrix::from_rows({{3}, {0}});
    const Matrix tgt2 = Matrix::from_rows({{0}, {4}});
    CHECK(rmse_per_horizon(pred2, tgt2)[0] == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));

    CHECK_THROWS_AS(rmse_per_horizon(Matrix(1, 2), Matrix(1, 3)), std::invalid_argument);
}

TEST_CASE("pooled rmse sits between the horizon extremes") {
    Rng rng(17);
    Matrix pred(8, 5), tgt(8, 5);
    for (auto& v : pred.flat()) v = rng.uniform(0.0, 1.0);
    for (auto& v : tgt.flat()) v = rng.uniform(0.0, 1.0);
    const auto per = rmse_per_horizon(pred, tgt);
    const double pooled = rmse_pooled(pred, tgt);
    CHECK(pooled >= *std::min_element(per.begin(), per.end()) - 1e-15);
    CHECK(pooled <= *std::max_element(per.begin(), per.end()) + 1e-15);
}

TEST_CASE("student t quantile matches an independent quadrature oracle") {
    CHECK(std::abs(student_t_ppf(0.975, 1) - 12.706204736) < 1e-6);
    for (int dof : {1, 2, 5, 9, 29}) {
        for (double p : {0.9, 0.975, 0.995}) {
            const double mine = student_t_ppf(p, dof);
            const double oracle = t_ppf_oracle(p, dof);
            CHECK(std::abs(mine - oracle) < 1e-9 * std::max(1.0, oracle));
        }
    }
}

TEST_CASE("aggregation reproduces the t-interval") {
    const std::vector<double> same(5, 0.125);
    const auto zero_ci = aggregate(same);
    CHECK(zero_ci.mean == 0.125);
    CHECK(zero_ci.ci_half == 0.0);

    const std::vector<double> two{1.0, 3.0};
    const auto pair = aggregate(two);
    CHECK(pair.mean == 2.0);
    // s = sqrt(2), s/sqrt(n) = 1, so the half-width is t(0.975, 1) itself
    CHECK(pair.ci_half == doctest::Approx(12.706204736).epsilon(1e-9));

    CHECK_THROWS_AS(aggregate(std::vector<double>{1.0}), std::invalid_argument);

    // 30 pseudo-random values against a fully independent computation
    Rng rng(404);
    std::vector<double> sample(30);
    for (auto& v : sample) v = rng.uniform(0.0, 1.0);
    const auto agg = aggregate(sample);
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= 30.0;
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    var /= 29.0;
    const double expected_half = t_ppf_oracle(0.975, 29) * std::sqrt(var / 30.0);
    CHECK(std::abs(agg.mean - mean) < 1e-12);
    CHECK(std::abs(agg.ci_half - expected_half) < 1e-9);
}

TEST_CASE("spearman correlation on ranks") {
    const std::vector<double> up{1, 2, 3, 4, 5};
    const std::vector<double> mono{0.1, 0.4, 0.9, 1.6, 2.5};
    CHECK(spearman_rho(up, mono) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> rev(mono.rbegin(), mono.rend());
    CHECK(spearman_rho(up, rev) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("tied-min ranking shares the minimum and skips the next rank") {
    const std::vector<double> distinct{0.3, 0.1, 0.2};
    CHECK(rank_with_ties(distinct) == std::vector<int>{3, 1, 2});

    const std::vector<double> tied{0.5, 0.1, 0.1, 0.4};
    CHECK(rank_with_ties(tied) == std::vector<int>{4, 1, 1, 3});

    CHECK(rank_with_ties(std::vector<double>{0.7}) == std::vector<int>{1});
}

TEST_CASE("mean ranks over the published rank table") {
    // columns: FNN-Adam, FNN-SGD, LSTM, BD-LSTM, ED-LSTM, RNN, CNN
    const std::vector<std::vector<double>> table = {
        {2, 7, 1, 3, 4, 5, 6}, {6, 7, 2, 1, 3, 4, 5}, {6, 7, 1, 2, 3, 5, 4},
        {6, 7, 3, 2, 1, 5, 4}, {6, 7, 2, 3, 1, 5, 4}, {6, 7, 4, 2, 1, 5, 1},
        {6, 7, 4, 1, 2, 5, 3},
    };
    std::vector<double> mean(7, 0.0);
    for (const auto& row : table) {
        for (std::size_t m = 0; m < 7; ++m) mean[m] += row[m];
    }
    for (auto& v : mean) v /= 7.0;
    CHECK(mean[3] == doctest::Approx(2.00).epsilon(1e-9));        // BD-LSTM
    CHECK(mean[4] == doctest::Approx(15.0 / 7.0).epsilon(1e-9));  // ED-LSTM ~2.14
    CHECK(mean[1] == doctest::Approx(7.00).epsilon(1e-9));        // FNN-SGD
}

TEST_CASE("run seeds are deterministic and well separated") {
    const auto a = derive_run_seed(42, "lorenz", models::ModelKind::Lstm, 0);
    CHECK(a == derive_run_seed(42, "lorenz", models::ModelKind::Lstm, 0));
    CHECK(a != derive_run_seed(42, "lorenz", models::ModelKind::Lstm, 1));
    CHECK(a != derive_run_seed(42, "lorenz", models::ModelKind::BdLstm, 0));
    CHECK(a != derive_run_seed(42, "rossler", models::ModelKind::Lstm, 0));
    CHECK(a != derive_run_seed(43, "lorenz", models::ModelKind::Lstm, 0));
}

TEST_CASE("dataset preparation truncates and splits chronologically") {
    const auto raw = series::gen_mackey_glass({}, 1500);
    const auto prep = prepare_dataset(raw, 5, 1, 10, 0.6, 1000, false);
    // 1000 points -> 986 windows -> 591 train, 395 test
    CHECK(prep.train.samples() == 591);
    CHECK(prep.test.samples() == 395);
    for (double v : prep.train.inputs.flat()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("experiment reports are byte-identical across worker counts") {
    auto cfg = tiny_config();
    const auto lorenz = series::generate_named("lorenz", cfg.truncate);

    cfg.workers = 1;
    const auto once = report_to_json(run_experiment({lorenz}, cfg)).dump(2);
    const auto twice = report_to_json(run_experiment({lorenz}, cfg)).dump(2);
    CHECK(once == twice);

    cfg.workers = 4;
    const auto parallel = report_to_json(run_experiment({lorenz}, cfg)).dump(2);
    CHECK(once == parallel);
}

TEST_CASE("single-run cells are flagged and carry no interval") {
    auto cfg = tiny_config();
    cfg.runs = 1;
    const auto report = run_experiment({series::generate_named("lorenz", cfg.truncate)}, cfg);
    const auto j = report_to_json(report);
    const auto& agg = j.at("cells").at(0).at("aggregate");
    CHECK(agg.at("single_run").get<bool>());
    CHECK(agg.at("test").at("overall").at("ci").is_null());
}

TEST_CASE("failed runs are recorded, not dropped") {
    auto cfg = tiny_config();
    cfg.datasets = {"lorenz", "shorty"};
    series::TimeSeries shorty{"shorty", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, "inline"};
    const auto report =
        run_experiment({series::generate_named("lorenz", cfg.truncate), shorty}, cfg);

    const auto* good = report.find("lorenz", models::ModelKind::Lstm);
    REQUIRE(good != nullptr);
    CHECK(good->failed_runs() == 0);

    const auto* bad = report.find("shorty", models::ModelKind::Lstm);
    REQUIRE(bad != nullptr);
    CHECK(bad->failed_runs() == cfg.runs);
    CHECK(bad->runs.at(0).error.find("too short") != std::string::npos);

    const auto j = report_to_json(report);
    CHECK(j.at("ranks").is_null());  // incomplete grid blocks ranking
    bool found_failed_cell = false;
    for (const auto& cell : j.at("cells")) {
        if (cell.at("dataset") == "shorty") {
            CHECK(cell.at("aggregate").is_null());
            CHECK(cell.at("failed_runs").get<int>() == cfg.runs);
            found_failed_cell = true;
        }
    }
    CHECK(found_failed_cell);
}

TEST_CASE("rank table in the report uses tied-min competition ranks") {
    auto cfg = tiny_config();
    cfg.runs = 2;
    const auto report = run_experiment({series::generate_named("lorenz", cfg.truncate)}, cfg);
    const auto j = report_to_json(report);
    REQUIRE(!j.at("ranks").is_null());
    const auto& row = j.at("ranks").at("per_dataset").at("lorenz");
    std::vector<int> ranks{row.at("fnn_adam").get<int>(), row.at("lstm").get<int>()};
    std::sort(ranks.begin(), ranks.end());
    CHECK(ranks == std::vector<int>{1, 2});
}

TEST_CASE("json report renders to csv and appendix-shaped markdown") {
    auto cfg = tiny_config();
    const auto report = run_experiment({series::generate_named("lorenz", cfg.truncate)}, cfg);
    const auto j = report_to_json(report);

    const std::string csv = render_csv(j);
    // header + 2 models * 2 splits * (overall + 10 horizons)
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2 * 11);

    const std::string md = render_markdown(j);
    CHECK(md.find("| Train |") != std::string::npos);
    CHECK(md.find("| Test |") != std::string::npos);
    for (int h = 1; h <= 10; ++h) {
        CHECK(md.find("| Step-" + std::to_string(h) + " |") != std::string::npos);
    }
    CHECK(md.find("FNN-Adam") != std::string::npos);
    CHECK(md.find(" ± ") != std::string::npos);

    CHECK_THROWS_AS(emit_report(j, "yaml", "-"), std::invalid_argument);
    nlohmann::ordered_json empty;
    empty["cells"] = nlohmann::ordered_json::array();
    CHECK_THROWS_AS(emit_report(empty, "json", "-"), std::invalid_argument);
}

TEST_CASE("report json round-trips through emit and parse") {
    auto cfg = tiny_config();
    const auto report = run_experiment({series::generate_named("lorenz", cfg.truncate)}, cfg);
    const auto j = report_to_json(report);
    const std::string path = "/tmp/horizonbench_report_roundtrip.json";
    emit_report(j, "json", path);
    std::ifstream in(path);
    nlohmann::ordered_json back;
    in >> back;
    CHECK(back == j);
    CHECK(back.at("schema_version").get<int>() == 1);
}

TEST_CASE("checkpoints restore models bit-exactly") {
    Rng rng(2025);
    auto spec = models::default_spec(models::ModelKind::EdLstm, 5, 10);
    auto model = models::build_model(spec, rng);
    const std::string path = "/tmp/horizonbench_ckpt_test.bin";
    models::save_checkpoint(*model, path);
    const auto loaded = models::load_checkpoint(path);
    CHECK(loaded->parameters() == model->parameters());
    CHECK(loaded->spec().kind == spec.kind);

    Matrix x(3, 5);
    Rng data(5);
    for (auto& v : x.flat()) v = data.uniform(0.0, 1.0);
    CHECK(loaded->predict(x) == model->predict(x));
}

TEST_CASE("prediction emission matches actuals for an exact model") {
    // arithmetic ramp: target step h is always x_last + (h+1) * increment, so
    // a hand-built linear model reproduces the series exactly
    const int n = 64;
    std::vector<double> ramp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ramp[static_cast<std::size_t>(i)] = 3.0 + 0.25 * i;
    const series::TimeSeries raw{"ramp", ramp, "inline"};

    auto spec = models::default_spec(models::ModelKind::FnnAdam, 5, 10);
    spec.fnn_hidden_activation = Activation::Identity;
    Rng rng(1);
    auto model = models::build_model(spec, rng);
    std::vector<double> params(model->param_count(), 0.0);
    // hidden unit 0 passes through the last window element
    params[0 * 5 + 4] = 1.0;
    const std::size_t w2_off = 50 + 10;
    const double step_scaled = 0.25 / (0.25 * (n - 1));
    for (int h = 0; h < 10; ++h) {
        params[w2_off + static_cast<std::size_t>(h) * 10 + 0] = 1.0;  // reads unit 0
        params[w2_off + 100 + static_cast<std::size_t>(h)] = (h + 1) * step_scaled;  // bias
    }
    model->load_parameters(params);

    const std::string path = "/tmp/horizonbench_pred_test.csv";
    emit_predictions(*model, raw, 1, 0.6, 0, false, {1, 3, 5, 10}, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "horizon,index,actual,predicted");
    int rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string horizon, index, actual, predicted;
        std::getline(ss, horizon, ',');
        std::getline(ss, index, ',');
        std::getline(ss, actual, ',');
        std::getline(ss, predicted, ',');
        CHECK(std::abs(std::stod(actual) - std::stod(predicted)) < 1e-9);
        ++rows;
    }
    // 64 points -> 50 windows -> 20 test rows, 4 horizons
    CHECK(rows == 4 * 20);

    CHECK_THROWS_AS(emit_predictions(*model, raw, 1, 0.6, 0, false, {11}, path),
                    std::invalid_argument);
}

TEST_CASE("dataset resolution dispatches simulated names and flags unknowns") {
    const auto ts = resolve_dataset("henon", 64, "/tmp");
    CHECK(ts.values.size() == 64);
    CHECK_THROWS_WITH_AS(resolve_dataset("nope", 64, "/tmp/definitely_missing_dir"),
                         doctest::Contains("no file"), std::runtime_error);
}

TEST_CASE("rank_models ranks cells per dataset and averages over datasets") {
    // hand-built report: scores are constant per-horizon RMSE values
    auto make_cell = [](const std::string& dataset, models::ModelKind kind, double score) {
        CellResult cell;
        cell.dataset = dataset;
        cell.model = kind;
        for (int r = 0; r < 2; ++r) {
            RunOutcome run;
            run.run = r;
            run.ok = true;
            run.train_rmse.assign(10, score);
            run.test_rmse.assign(10, score);
            run.train_overall = run.test_overall = score;
            cell.runs.push_back(std::move(run));
        }
        return cell;
    };

    ExperimentReport rep;
    rep.config.datasets = {"a", "b"};
    rep.config.models = {models::ModelKind::FnnSgd, models::ModelKind::Lstm,
                         models::ModelKind::EdLstm};
    // dataset a: distinct scores; dataset b: lstm and ed_lstm tied for best
    rep.cells.push_back(make_cell("a", models::ModelKind::FnnSgd, 0.9));
    rep.cells.push_back(make_cell("a", models::ModelKind::Lstm, 0.2));
    rep.cells.push_back(make_cell("a", models::ModelKind::EdLstm, 0.1));
    rep.cells.push_back(make_cell("b", models::ModelKind::FnnSgd, 0.8));
    rep.cells.push_back(make_cell("b", models::ModelKind::Lstm, 0.3));
    rep.cells.push_back(make_cell("b", models::ModelKind::EdLstm, 0.3));

    const auto table = rank_models(rep);
    CHECK(table.ranks[0] == std::vector<int>{3, 2, 1});
    CHECK(table.ranks[1] == std::vector<int>{3, 1, 1});  // tie shares rank 1, rank 2 skipped
    CHECK(table.mean_rank[0] == doctest::Approx(3.0));
    CHECK(table.mean_rank[1] == doctest::Approx(1.5));
    CHECK(table.mean_rank[2] == doctest::Approx(1.0));

    rep.cells.pop_back();  // drop a cell -> incomplete grid
    CHECK_THROWS_WITH_AS(rank_models(rep), doctest::Contains("missing cell"), std::runtime_error);
}

TEST_CASE("per-model training setup follows the optimizer assignment") {
    ExperimentConfig cfg;
    cfg.adam_lr = 0.005;
    cfg.sgd_lr = 0.01;
    cfg.gradient_clip = 5.0;

    const auto sgd = train_config_for(cfg, models::ModelKind::FnnSgd, 1);
    CHECK(sgd.optimizer == learn::OptimizerKind::Sgd);
    CHECK(sgd.learning_rate == 0.01);
    CHECK(sgd.gradient_clip.value() == 5.0);

    const auto adam = train_config_for(cfg, models::ModelKind::Cnn, 1);
    CHECK(adam.optimizer == learn::OptimizerKind::Adam);
    CHECK(adam.learning_rate == 0.005);

    cfg.gradient_clip = 0.0;
    CHECK(!train_config_for(cfg, models::ModelKind::Lstm, 1).gradient_clip.has_value());
    CHECK(train_config_for(cfg, models::ModelKind::Lstm, 1).shuffle_seed !=
          train_config_for(cfg, models::ModelKind::Lstm, 2).shuffle_seed);
}

TEST_CASE("corrupt checkpoint files are rejected") {
    const std::string path = "/tmp/horizonbench_not_a_ckpt.bin";
    {
        std::ofstream out(path, std::ios::trunc | std::ios::binary);
        out << "this is not a checkpoint";
    }
    CHECK_THROWS_WITH_AS(models::load_checkpoint(path), doctest::Contains("not a checkpoint"),
                         std::runtime_error);
    CHECK_THROWS_AS(models::load_checkpoint("/tmp/definitely/missing.ckpt"), std::runtime_error);
}

TEST_CASE("worker-count environment bound is honored without changing output") {
    auto cfg = tiny_config();
    cfg.workers = 1;
    const auto lorenz = series::generate_named("lorenz", cfg.truncate);
    const auto serial = report_to_json(run_experiment({lorenz}, cfg)).dump();

    setenv("HORIZON_BENCH_WORKERS", "3", 1);
    cfg.workers = 0;  // defer to the environment
    const auto env_run = report_to_json(run_experiment({lorenz}, cfg)).dump();
    unsetenv("HORIZON_BENCH_WORKERS");
    CHECK(serial == env_run);
}
