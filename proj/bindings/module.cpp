#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "horizonbench/bench.hpp"
#include "horizonbench/checkpoint.hpp"
#include "horizonbench/dataset.hpp"
#include "horizonbench/learn.hpp"
#include "horizonbench/model.hpp"
#include "horizonbench/series.hpp"

namespace py = pybind11;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

hb::Matrix to_matrix(const DoubleArray& arr) {
    const auto buf = arr.request();
    if (buf.ndim != 2) throw std::invalid_argument("expected a 2-d array");
    hb::Matrix m(static_cast<std::size_t>(buf.shape[0]), static_cast<std::size_t>(buf.shape[1]));
    const double* src = static_cast<const double*>(buf.ptr);
    std::copy(src, src + m.size(), m.flat().begin());
    return m;
}

py::array_t<double> from_matrix(const hb::Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.flat().begin(), m.flat().end(), out.mutable_data());
    return out;
}

hb::series::TimeSeries to_series(const std::vector<double>& values, const std::string& name) {
    return {name, values, "python"};
}

std::unique_ptr<hb::models::Model> build(const std::string& kind, int input_dim, int output_dim,
                                         std::uint64_t seed, bool cell_state_sigmoid) {
    auto spec = hb::models::default_spec(hb::models::model_kind_from_string(kind), input_dim,
                                         output_dim);
    spec.cell_state_sigmoid = cell_state_sigmoid;
    hb::Rng rng(seed, 0);
    return hb::models::build_model(spec, rng);
}

std::vector<double> train_model(hb::models::Model& model, const DoubleArray& inputs,
                                const DoubleArray& targets, long epochs, long batch_size,
                                const std::string& optimizer, double lr,
                                std::uint64_t shuffle_seed, double clip) {
    hb::data::EmbeddedDataset d;
    d.inputs = to_matrix(inputs);
    d.targets = to_matrix(targets);
    d.embed_dim = model.spec().input_dim;
    d.lag = 1;
    d.horizon = model.spec().output_dim;

    hb::learn::TrainConfig cfg;
    cfg.max_epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.learning_rate = lr;
    cfg.optimizer = optimizer == "sgd" ? hb::learn::OptimizerKind::Sgd
                                       : hb::learn::OptimizerKind::Adam;
    cfg.shuffle_seed = shuffle_seed;
    if (clip > 0.0) cfg.gradient_clip = clip;
    return hb::learn::train(model, d, cfg);
}

py::dict run_experiment_py(const std::vector<std::string>& datasets,
                           const std::vector<std::string>& model_kinds, int runs, long epochs,
                           std::uint64_t master_seed, int embed_dim, int lag, int horizon,
                           double train_frac, long truncate, long batch_size, double adam_lr,
                           double sgd_lr, double gradient_clip, bool scale_train_only,
                           bool cell_state_sigmoid, int workers, const std::string& data_dir) {
    hb::bench::ExperimentConfig cfg;
    cfg.datasets = datasets;
    for (const auto& name : model_kinds) {
        cfg.models.push_back(hb::models::model_kind_from_string(name));
    }
    cfg.runs = runs;
    cfg.max_epochs = epochs;
    cfg.master_seed = master_seed;
    cfg.embed_dim = embed_dim;
    cfg.lag = lag;
    cfg.horizon = horizon;
    cfg.train_frac = train_frac;
    cfg.truncate = truncate;
    cfg.batch_size = batch_size;
    cfg.adam_lr = adam_lr;
    cfg.sgd_lr = sgd_lr;
    cfg.gradient_clip = gradient_clip;
    cfg.scale_train_only = scale_train_only;
    cfg.cell_state_sigmoid = cell_state_sigmoid;
    cfg.workers = workers;

    std::vector<hb::series::TimeSeries> series;
    const long gen_points = cfg.truncate > 0 ? cfg.truncate : 2000;
    for (const auto& name : datasets) {
        series.push_back(hb::bench::resolve_dataset(name, gen_points, data_dir));
    }

    const auto report = hb::bench::run_experiment(series, cfg);
    const std::string text = hb::bench::report_to_json(report).dump();
    const py::object loads = py::module_::import("json").attr("loads");
    return loads(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-step-ahead time series prediction benchmark (native core)";

    m.def("generate", [](const std::string& system, long n) {
        return hb::series::generate_named(system, n).values;
    }, py::arg("system"), py::arg("n"),
        "Generate a simulated chaotic series with canonical parameters");

    m.def("simulated_systems", &hb::series::simulated_names);

    m.def("load_csv", [](const std::string& path, std::size_t column, bool skip_header) {
        return hb::series::load_csv(path, column, skip_header).values;
    }, py::arg("path"), py::arg("column") = 0, py::arg("skip_header") = false);

    m.def("fit_scale", [](const std::vector<double>& values) {
        const auto [scaled, params] = hb::data::fit_scale(to_series(values, "py"));
        return py::make_tuple(scaled.values, py::make_tuple(params.min, params.max));
    }, py::arg("values"), "Min-max scale to [0, 1]; returns (scaled, (min, max))");

    m.def("inverse_scale", [](const std::vector<double>& values, std::pair<double, double> p) {
        return hb::data::inverse_scale(values, {p.first, p.second});
    }, py::arg("values"), py::arg("params"));

    m.def("embed", [](const std::vector<double>& values, int embed_dim, int lag, int horizon) {
        const auto d = hb::data::embed(to_series(values, "py"), embed_dim, lag, horizon);
        return py::make_tuple(from_matrix(d.inputs), from_matrix(d.targets));
    }, py::arg("values"), py::arg("embed_dim") = 5, py::arg("lag") = 1, py::arg("horizon") = 10,
        "Sliding-window reconstruction; returns (inputs, targets)");

    m.def("train_test_split", [](const DoubleArray& inputs, const DoubleArray& targets,
                                 double train_frac) {
        hb::data::EmbeddedDataset d;
        d.inputs = to_matrix(inputs);
        d.targets = to_matrix(targets);
        d.embed_dim = static_cast<int>(d.inputs.cols());
        d.lag = 1;
        d.horizon = static_cast<int>(d.targets.cols());
        const auto [train, test] = hb::data::split(d, train_frac);
        return py::make_tuple(from_matrix(train.inputs), from_matrix(train.targets),
                              from_matrix(test.inputs), from_matrix(test.targets));
    }, py::arg("inputs"), py::arg("targets"), py::arg("train_frac") = 0.6);

    py::class_<hb::models::Model>(m, "Model")
        .def_property_readonly("kind",
                               [](const hb::models::Model& m_) {
                                   return hb::models::to_string(m_.spec().kind);
                               })
        .def_property_readonly("input_dim",
                               [](const hb::models::Model& m_) { return m_.spec().input_dim; })
        .def_property_readonly("output_dim",
                               [](const hb::models::Model& m_) { return m_.spec().output_dim; })
        .def_property_readonly("param_count", &hb::models::Model::param_count)
        .def("parameters",
             [](const hb::models::Model& m_) {
                 const auto p = m_.parameters();
                 py::array_t<double> out(p.size());
                 std::copy(p.begin(), p.end(), out.mutable_data());
                 return out;
             })
        .def("load_parameters",
             [](hb::models::Model& m_, const std::vector<double>& p) { m_.load_parameters(p); })
        .def("predict",
             [](const hb::models::Model& m_, const DoubleArray& inputs) {
                 return from_matrix(m_.predict(to_matrix(inputs)));
             })
        .def("save", [](const hb::models::Model& m_, const std::string& path) {
            hb::models::save_checkpoint(m_, path);
        });

    m.def("build_model", &build, py::arg("kind"), py::arg("input_dim") = 5,
          py::arg("output_dim") = 10, py::arg("seed") = 42,
          py::arg("cell_state_sigmoid") = false);

    m.def("load_checkpoint", &hb::models::load_checkpoint, py::arg("path"));

    m.def("model_kinds", [] {
        std::vector<std::string> names;
        for (auto k : hb::models::all_model_kinds()) names.push_back(hb::models::to_string(k));
        return names;
    });

    m.def("train", &train_model, py::arg("model"), py::arg("inputs"), py::arg("targets"),
          py::arg("epochs") = 1000, py::arg("batch_size") = 32, py::arg("optimizer") = "adam",
          py::arg("lr") = 5e-3, py::arg("shuffle_seed") = 0, py::arg("clip") = 0.0,
          "Mini-batch training; returns the per-epoch loss history");

    m.def("rmse_per_horizon", [](const DoubleArray& pred, const DoubleArray& target) {
        return hb::bench::rmse_per_horizon(to_matrix(pred), to_matrix(target));
    }, py::arg("pred"), py::arg("target"));

    m.def("aggregate", [](const std::vector<double>& values) {
        const auto a = hb::bench::aggregate(values);
        return py::make_tuple(a.mean, a.ci_half);
    }, py::arg("values"), "Mean and 95% t-interval half-width");

    m.def("student_t_ppf", &hb::bench::student_t_ppf, py::arg("p"), py::arg("dof"));
    m.def("spearman_rho", [](const std::vector<double>& a, const std::vector<double>& b) {
        return hb::bench::spearman_rho(a, b);
    });

    m.def("run_experiment", &run_experiment_py, py::arg("datasets"), py::arg("models"),
          py::arg("runs") = 30, py::arg("epochs") = 1000, py::arg("master_seed") = 42,
          py::arg("embed_dim") = 5, py::arg("lag") = 1, py::arg("horizon") = 10,
          py::arg("train_frac") = 0.6, py::arg("truncate") = 1000, py::arg("batch_size") = 32,
          py::arg("adam_lr") = 5e-3, py::arg("sgd_lr") = 1e-2, py::arg("gradient_clip") = 0.0,
          py::arg("scale_train_only") = false, py::arg("cell_state_sigmoid") = false,
          py::arg("workers") = 0, py::arg("data_dir") = "data",
          "Full multi-seed benchmark; returns the report as a dict");
}
