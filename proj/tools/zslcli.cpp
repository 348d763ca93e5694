#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "zsl/analysis.hpp"
#include "zsl/eval.hpp"
#include "zsl/gzsl.hpp"
#include "zsl/pipeline.hpp"
#include "zsl/serialize.hpp"
#include "zsl/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace zsl;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::string model_dir;
    std::string method;
    std::string metric;
    std::optional<std::uint64_t> seed;
    std::optional<Index> k;
    std::optional<double> gamma;
    bool strict = false;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_config(const Options& opt) {
    if (opt.config_path.empty()) throw ConfigError("--config is required");
    std::ifstream f(opt.config_path);
    if (!f) throw ConfigError("cannot open config " + opt.config_path);
    try {
        json j;
        f >> j;
        return j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

fs::path resolve(const Options& opt, const std::string& p) {
    const fs::path path(p);
    if (path.is_absolute()) return path;
    return fs::path(opt.config_path).parent_path() / path;
}

std::pair<Dataset, SemanticMatrix> load_data(const Options& opt, const json& cfg) {
    if (!cfg.contains("data")) throw ConfigError("config missing 'data'");
    const json& d = cfg.at("data");
    for (const char* key : {"features", "labels", "attributes", "split"})
        if (!d.contains(key)) throw ConfigError(std::string("config data missing '") + key + "'");
    DataConfig dc;
    dc.features = resolve(opt, d.at("features").get<std::string>());
    dc.labels = resolve(opt, d.at("labels").get<std::string>());
    dc.attributes = resolve(opt, d.at("attributes").get<std::string>());
    dc.split = resolve(opt, d.at("split").get<std::string>());
    if (d.contains("hierarchy")) dc.hierarchy = resolve(opt, d.at("hierarchy").get<std::string>());
    Dataset dataset = load_dataset(dc);
    SemanticMatrix semantics = load_semantics(dc.attributes, dataset);
    return {std::move(dataset), std::move(semantics)};
}

MethodConfig method_config(const Options& opt, const json& cfg) {
    MethodConfig mc;
    std::string name = "sync-ovo";
    if (cfg.contains("method")) {
        const json& m = cfg.at("method");
        if (m.contains("name")) name = m.at("name").get<std::string>();
        if (m.contains("variant")) {
            const std::string v = m.at("variant").get<std::string>();
            if (!v.empty() && name.find(v) == std::string::npos) name += "-" + v;
        }
        if (m.contains("hypers"))
            for (const auto& [key, value] : m.at("hypers").items()) {
                if (!value.is_number())
                    throw ConfigError("hyper '" + key + "' must be numeric");
                mc.hypers[key] = value.get<double>();
            }
    }
    if (!opt.method.empty()) name = opt.method;
    try {
        mc.name = method_from_string(name);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    mc.seed = opt.seed ? *opt.seed : cfg.value("seed", std::uint64_t(0));
    return mc;
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw DataError("cannot open " + tmp.string());
        f << content;
    }
    fs::rename(tmp, path);
}

void summary(const json& j) { std::cout << j.dump() << "\n"; }

void check_strict(const Options& opt, bool converged) {
    if (opt.strict && !converged)
        throw NumericError("non-convergence flagged and --strict set");
}

std::vector<ClassId> to_original(const Dataset& dataset, const std::vector<ClassId>& dense) {
    std::vector<ClassId> out;
    out.reserve(dense.size());
    for (ClassId c : dense) out.push_back(dataset.id_map[static_cast<std::size_t>(c)]);
    return out;
}

TrainedMethod obtain_method(const Options& opt, const Dataset& dataset,
                            const SemanticMatrix& semantics, const MethodConfig& mc) {
    if (opt.model_dir.empty()) return train_method(dataset, semantics, mc);

    TrainedMethod t;
    t.name = mc.name;
    const std::string type = model_type(opt.model_dir);
    const std::string name = to_string(mc.name);
    if (type == "sync" && name.rfind("sync-", 0) == 0) {
        t.sync = load_sync_model(opt.model_dir);
        t.converged = t.sync->converged;
        return t;
    }
    if (type == "exem" && name.rfind("exem-", 0) == 0) {
        t.exem = load_exemplar_predictor(opt.model_dir);
        for (const auto& r : t.exem->regressors)
            if (!r.converged) t.converged = false;
        if (name == "exem-1nn" || name == "exem-1nns") return t;
        // Composite methods train their downstream model on predicted
        // exemplars used as semantics.
        const SemanticMatrix es =
            exemplars_as_semantics(predict_exemplars(*t.exem, semantics));
        if (name == "exem-conse") {
            ConseConfig cc;
            cc.reg = mc.get("reg", 1e-3);
            cc.top_t = std::min(static_cast<Index>(mc.get("top_t", 10.0)),
                                dataset.split.num_seen());
            t.conse = train_conse(dataset, es, cc);
            t.converged = t.converged && t.conse->converged;
        } else {
            MethodConfig sub = mc;
            TrainedMethod synced = train_method(dataset, semantics, sub);
            // train_method refits the exemplar predictor; reuse its sync part
            // trained against the loaded predictor instead.
            (void)synced;
            SyncConfig sc;
            sc.sigma = mc.get("sigma", 1.0) * median_pairwise_distance(es.vectors);
            sc.lambda = mc.get("lambda", 1.0);
            sc.loss_variant = name == "exem-sync-ovo" ? SyncLoss::OneVsOther
                              : name == "exem-sync-cs" ? SyncLoss::CrammerSinger
                                                       : SyncLoss::Structured;
            sc.seed = mc.seed;
            t.sync = train_sync(dataset, es, sc);
            t.converged = t.converged && t.sync->converged;
        }
        return t;
    }
    if (type == "conse" && name == "conse") {
        t.conse = load_conse_model(opt.model_dir);
        t.converged = t.conse->converged;
        return t;
    }
    throw DataError("model directory of type '" + type + "' does not match method '" + name +
                    "'");
}

ScoreTable score_table(const Prediction& pred, const std::vector<ClassId>& true_labels) {
    ScoreTable t;
    t.scores = pred.scores;
    t.candidate_ids = pred.candidates;
    t.true_labels = true_labels;
    return t;
}

// ---- commands -------------------------------------------------------------

int cmd_train(const Options& opt, bool exem_command) {
    const json cfg = load_config(opt);
    auto [dataset, semantics] = load_data(opt, cfg);
    MethodConfig mc = method_config(opt, cfg);
    const std::string name = to_string(mc.name);
    if (exem_command && name.rfind("exem", 0) != 0) {
        mc.name = MethodName::Exem1nn;
    } else if (!exem_command && name.rfind("sync", 0) != 0) {
        throw ConfigError("train-sync requires a sync-* method, got " + name);
    }

    const TrainedMethod t = train_method(dataset, semantics, mc);
    const fs::path model_dir = fs::path(opt.out_dir) / "model";
    json s;
    if (exem_command) {
        save_exemplar_predictor(model_dir, *t.exem);
        s = {{"command", "train-exem"},
             {"method", to_string(mc.name)},
             {"output_dim", t.exem->output_dim()},
             {"converged", t.converged},
             {"model", model_dir.string()}};
    } else {
        save_sync_model(model_dir, *t.sync);
        s = {{"command", "train-sync"},
             {"method", to_string(mc.name)},
             {"objective", t.sync->final_objective},
             {"iterations", t.sync->iterations},
             {"converged", t.converged},
             {"model", model_dir.string()}};
    }
    check_strict(opt, t.converged);
    summary(s);
    return 0;
}

int cmd_predict(const Options& opt) {
    const json cfg = load_config(opt);
    auto [dataset, semantics] = load_data(opt, cfg);
    const MethodConfig mc = method_config(opt, cfg);
    const TrainedMethod t = obtain_method(opt, dataset, semantics, mc);

    auto [x, labels] = samples_of(dataset, dataset.split.unseen);
    const Prediction pred = score_method(t, semantics, x, dataset.split.unseen);
    const double acc = per_class_accuracy(pred.labels, labels, dataset.split.unseen);

    json out;
    out["method"] = to_string(mc.name);
    out["candidates"] = to_original(dataset, pred.candidates);
    out["labels"] = to_original(dataset, pred.labels);
    out["true_labels"] = to_original(dataset, labels);
    out["per_class_accuracy"] = acc;
    atomic_write(fs::path(opt.out_dir) / "predictions.json", out.dump(2) + "\n");
    {
        const fs::path tmp = fs::path(opt.out_dir) / "scores.zsfm.tmp";
        write_matrix_zsfm(tmp, pred.scores);
        fs::rename(tmp, fs::path(opt.out_dir) / "scores.zsfm");
    }
    check_strict(opt, t.converged);
    summary({{"command", "predict"},
             {"method", to_string(mc.name)},
             {"n", static_cast<Index>(labels.size())},
             {"per_class_accuracy", acc},
             {"out", (fs::path(opt.out_dir) / "predictions.json").string()}});
    return 0;
}

int cmd_eval_zsl(const Options& opt) {
    const json cfg = load_config(opt);
    auto [dataset, semantics] = load_data(opt, cfg);
    const MethodConfig mc = method_config(opt, cfg);
    const TrainedMethod t = obtain_method(opt, dataset, semantics, mc);

    auto [x, labels] = samples_of(dataset, dataset.split.unseen);
    const Prediction pred = score_method(t, semantics, x, dataset.split.unseen);
    const ScoreTable table = score_table(pred, labels);

    std::vector<std::string> metrics{"per-class-accuracy", "per-sample-accuracy"};
    std::vector<Index> k_values{1};
    if (cfg.contains("eval")) {
        const json& e = cfg.at("eval");
        if (e.contains("metrics")) metrics = e.at("metrics").get<std::vector<std::string>>();
        if (e.contains("k_values")) k_values = e.at("k_values").get<std::vector<Index>>();
    }
    if (!opt.metric.empty()) metrics = {opt.metric};
    if (opt.k) k_values = {*opt.k};

    json records = json::array();
    const Index c = pred.scores.cols();
    for (const std::string& metric : metrics) {
        if (metric == "per-class-accuracy") {
            records.push_back({{"metric", metric},
                               {"value", per_class_accuracy(pred.labels, labels,
                                                            dataset.split.unseen)},
                               {"k", 1},
                               {"candidate_set_size", c}});
        } else if (metric == "per-sample-accuracy") {
            records.push_back({{"metric", metric},
                               {"value", per_sample_accuracy(pred.labels, labels)},
                               {"k", 1},
                               {"candidate_set_size", c}});
        } else if (metric == "flat-hit") {
            for (Index k : k_values)
                records.push_back({{"metric", metric},
                                   {"value", flat_hit_at_k(table, k)},
                                   {"k", k},
                                   {"candidate_set_size", c}});
        } else if (metric == "hierarchical-precision") {
            if (!dataset.hierarchy) throw DataError("eval-zsl: no hierarchy loaded");
            for (Index k : k_values)
                records.push_back({{"metric", metric},
                                   {"value",
                                    hierarchical_precision_at_k(table, *dataset.hierarchy, k)},
                                   {"k", k},
                                   {"candidate_set_size", c}});
        } else {
            throw ConfigError("unknown metric: " + metric);
        }
    }
    atomic_write(fs::path(opt.out_dir) / "metrics.json", records.dump(2) + "\n");
    check_strict(opt, t.converged);
    summary({{"command", "eval-zsl"},
             {"method", to_string(mc.name)},
             {"metrics", records},
             {"out", (fs::path(opt.out_dir) / "metrics.json").string()}});
    return 0;
}

std::pair<ScoreTable, TrainedMethod> gzsl_scores(const Options& opt, const Dataset& dataset,
                                                 const SemanticMatrix& semantics,
                                                 const MethodConfig& mc) {
    const TrainedMethod t = obtain_method(opt, dataset, semantics, mc);
    std::vector<ClassId> all = dataset.split.seen;
    all.insert(all.end(), dataset.split.unseen.begin(), dataset.split.unseen.end());
    auto [x, labels] = samples_of(dataset, all);
    const Prediction pred = score_method(t, semantics, x, all);
    return {score_table(pred, labels), t};
}

int cmd_eval_gzsl(const Options& opt) {
    const json cfg = load_config(opt);
    auto [dataset, semantics] = load_data(opt, cfg);
    const MethodConfig mc = method_config(opt, cfg);
    auto [table, t] = gzsl_scores(opt, dataset, semantics, mc);

    const SUCurve curve = suc_curve(table, dataset.split);
    const CalibratedResult uncal = calibrated_harmonic_mean(table, dataset.split, 0.0);
    CalibratedResult cal = opt.gamma ? calibrated_harmonic_mean(table, dataset.split, *opt.gamma)
                                     : best_harmonic_mean(table, dataset.split);

    json out = {{"ausuc", curve.ausuc},
                {"h_uncalibrated", uncal.h},
                {"h_calibrated", cal.h},
                {"gamma_star", cal.gamma},
                {"a_u", cal.a_u},
                {"a_s", cal.a_s}};
    atomic_write(fs::path(opt.out_dir) / "metrics.json", out.dump(2) + "\n");
    check_strict(opt, t.converged);
    json s = out;
    s["command"] = "eval-gzsl";
    s["method"] = to_string(mc.name);
    summary(s);
    return 0;
}

int cmd_suc_curve(const Options& opt) {
    const json cfg = load_config(opt);
    auto [dataset, semantics] = load_data(opt, cfg);
    const MethodConfig mc = method_config(opt, cfg);
    auto [table, t] = gzsl_scores(opt, dataset, semantics, mc);
    const SUCurve curve = suc_curve(table, dataset.split);

    std::ostringstream csv;
    csv.precision(17);
    csv << "gamma,a_u,a_s\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const double gamma =
            i == 0 ? curve.critical_gammas.front() - 1.0 : curve.critical_gammas[i - 1];
        csv << gamma << "," << curve.points[i].first << "," << curve.points[i].second << "\n";
    }
    atomic_write(fs::path(opt.out_dir) / "suc_curve.csv", csv.str());
    check_strict(opt, t.converged);
    summary({{"command", "suc-curve"},
             {"method", to_string(mc.name)},
             {"points", curve.points.size()},
             {"ausuc", curve.ausuc},
             {"out", (fs::path(opt.out_dir) / "suc_curve.csv").string()}});
    return 0;
}

Dataset fold_dataset(const Dataset& dataset, const CvTask& task) {
    Dataset sub;
    sub.features.resize(static_cast<Index>(task.train_samples.size()), dataset.num_dims());
    for (std::size_t i = 0; i < task.train_samples.size(); ++i) {
        sub.features.row(static_cast<Index>(i)) = dataset.features.row(task.train_samples[i]);
        sub.labels.push_back(dataset.labels[task.train_samples[i]]);
    }
    sub.split.seen = task.train_classes;
    sub.split.unseen = task.val_classes;
    sub.id_map = dataset.id_map;
    sub.hierarchy = dataset.hierarchy;
    return sub;
}

int cmd_cv(const Options& opt) {
    const json cfg = load_config(opt);
    auto [dataset, semantics] = load_data(opt, cfg);
    MethodConfig mc = method_config(opt, cfg);

    if (!cfg.contains("method") || !cfg.at("method").contains("grid"))
        throw ConfigError("cv requires method.grid");
    std::map<std::string, std::vector<double>> grid;
    for (const auto& [key, values] : cfg.at("method").at("grid").items())
        grid[key] = values.get<std::vector<double>>();

    std::string objective_name = "cv-accuracy";
    if (cfg.contains("method") && cfg.at("method").contains("objective"))
        objective_name = cfg.at("method").at("objective").get<std::string>();
    if (!opt.metric.empty()) objective_name = opt.metric;
    CvObjective objective;
    try {
        objective = cv_objective_from_string(objective_name);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }

    const Index k = opt.k ? *opt.k : static_cast<Index>(cfg.value("folds", 5));
    const FoldPlan plan = objective == CvObjective::Ausuc
                              ? gzsl_folds(dataset, k, mc.seed)
                              : class_wise_folds(dataset.split.seen, k, mc.seed);

    // capture by reference into the evaluator
    const Dataset& ds = dataset;
    const SemanticMatrix& sem = semantics;
    CellEvaluator evaluator = [&, mc, objective](const Hyper& hyper, const CvTask& task) {
        MethodConfig cell = mc;
        for (const auto& [key, value] : hyper) cell.hypers[key] = value;
        const Dataset sub = fold_dataset(ds, task);
        FoldScore fs;
        if (objective == CvObjective::Distance) {
            const std::string name = to_string(cell.name);
            if (name.rfind("exem", 0) != 0)
                throw DataError("cv-distance applies only to exemplar methods");
            const TrainedMethod t = train_method(sub, sem, cell);
            if (!t.converged) {
                fs.failed = true;
                fs.warning = "regressor did not converge";
                return fs;
            }
            SemanticMatrix val_sem;
            SemanticMatrix subset;
            if (sem.rows_for(task.val_classes, subset.vectors) !=
                static_cast<Index>(task.val_classes.size()))
                throw DataError("cv: semantics missing for a validation class");
            subset.class_ids = task.val_classes;
            const ExemplarSet predicted = predict_exemplars(*t.exem, subset);
            // True exemplars of the held-out classes in the fitted PCA space.
            Matrix vx(static_cast<Index>(task.val_samples.size()), ds.num_dims());
            std::vector<ClassId> vy;
            for (std::size_t i = 0; i < task.val_samples.size(); ++i) {
                vx.row(static_cast<Index>(i)) = ds.features.row(task.val_samples[i]);
                vy.push_back(ds.labels[task.val_samples[i]]);
            }
            const ExemplarSet truth = compute_exemplars(pca_project(t.exem->pca, vx), vy);
            double sum = 0.0;
            for (std::size_t c = 0; c < truth.class_ids.size(); ++c) {
                const auto it = std::find(predicted.class_ids.begin(),
                                          predicted.class_ids.end(), truth.class_ids[c]);
                const Index p = it - predicted.class_ids.begin();
                sum += (truth.z.row(static_cast<Index>(c)) - predicted.z.row(p)).norm();
            }
            fs.score = sum / double(truth.class_ids.size());
            return fs;
        }

        const TrainedMethod t = train_method(sub, sem, cell);
        if (!t.converged) {
            fs.failed = true;
            fs.warning = "training did not converge";
            return fs;
        }
        Matrix vx(static_cast<Index>(task.val_samples.size()), ds.num_dims());
        std::vector<ClassId> vy;
        for (std::size_t i = 0; i < task.val_samples.size(); ++i) {
            vx.row(static_cast<Index>(i)) = ds.features.row(task.val_samples[i]);
            vy.push_back(ds.labels[task.val_samples[i]]);
        }
        if (objective == CvObjective::Accuracy) {
            const Prediction pred = score_method(t, sem, vx, task.val_classes);
            fs.score = per_class_accuracy(pred.labels, vy, task.val_classes);
        } else {
            std::vector<ClassId> all = task.train_classes;
            all.insert(all.end(), task.val_classes.begin(), task.val_classes.end());
            const Prediction pred = score_method(t, sem, vx, all);
            ScoreTable table;
            table.scores = pred.scores;
            table.candidate_ids = pred.candidates;
            table.true_labels = vy;
            ClassSplit pseudo;
            pseudo.seen = task.train_classes;
            pseudo.unseen = task.val_classes;
            fs.score = suc_curve(table, pseudo).ausuc;
            fs.gamma_star = best_harmonic_mean(table, pseudo).gamma;
        }
        return fs;
    };

    const GridSearchResult result = grid_search(dataset, grid, plan, objective, evaluator);
    write_cv_report(fs::path(opt.out_dir) / "cv_report.csv", result);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

    json best = json::object();
    for (const auto& [key, value] : result.best) best[key] = value;
    json s = {{"command", "cv"},
              {"method", to_string(mc.name)},
              {"objective", objective_name},
              {"best", best},
              {"best_score", result.best_score},
              {"warnings", result.warnings.size()},
              {"out", (fs::path(opt.out_dir) / "cv_report.csv").string()}};
    if (result.gamma_star) s["gamma_star"] = *result.gamma_star;
    summary(s);
    return 0;
}

int cmd_analyze(const Options& opt) {
    const json cfg = load_config(opt);
    auto [dataset, semantics] = load_data(opt, cfg);
    MethodConfig mc = method_config(opt, cfg);

    json out;
    if (!opt.model_dir.empty() && model_type(opt.model_dir) == "sync") {
        const SyncModel model = load_sync_model(opt.model_dir);
        Matrix a_seen;
        semantics.rows_for(dataset.split.seen, a_seen);
        const Matrix s = similarity_weights(a_seen, model.phantoms.b, model.config.sigma);
        const Matrix w = synthesize_classifiers(s, model.phantoms.v);
        out["classifier_variance_percent"] = classifier_variance_profile(w, 0.95);
    } else {
        TrainedMethod t;
        if (!opt.model_dir.empty()) {
            t.name = MethodName::Exem1nn;
            t.exem = load_exemplar_predictor(opt.model_dir);
        } else {
            if (to_string(mc.name).rfind("exem", 0) != 0) mc.name = MethodName::Exem1nn;
            t = train_method(dataset, semantics, mc);
        }
        const auto& unseen = dataset.split.unseen;
        SemanticMatrix sub;
        if (semantics.rows_for(unseen, sub.vectors) != static_cast<Index>(unseen.size()))
            throw DataError("analyze: semantics missing for an unseen class");
        sub.class_ids = unseen;
        const ExemplarSet predicted = predict_exemplars(*t.exem, sub);
        auto [ux, uy] = samples_of(dataset, unseen);
        const ExemplarSet truth = compute_exemplars(pca_project(t.exem->pca, ux), uy);

        Matrix truth_aligned(predicted.z.rows(), predicted.z.cols());
        for (std::size_t c = 0; c < predicted.class_ids.size(); ++c) {
            const auto it = std::find(truth.class_ids.begin(), truth.class_ids.end(),
                                      predicted.class_ids[c]);
            truth_aligned.row(static_cast<Index>(c)) =
                truth.z.row(it - truth.class_ids.begin());
        }
        const Matrix d_true = sq_euclidean_cross(truth_aligned, truth_aligned).cwiseSqrt();
        const Matrix d_pred = sq_euclidean_cross(predicted.z, predicted.z).cwiseSqrt();
        const Matrix d_sem = sq_euclidean_cross(sub.vectors, sub.vectors).cwiseSqrt();
        const Index k = std::max<Index>(1, static_cast<Index>(0.4 * double(unseen.size()) + 0.5));
        out["correlation_predicted"] = distance_matrix_correlation(d_pred, d_true);
        out["correlation_semantics"] = distance_matrix_correlation(d_sem, d_true);
        out["knn_overlap_predicted"] = knn_overlap(predicted.z, truth_aligned, k);
        out["knn_overlap_semantics"] = knn_overlap(sub.vectors, truth_aligned, k);
        out["k"] = k;
    }
    atomic_write(fs::path(opt.out_dir) / "analysis.json", out.dump(2) + "\n");
    json s = out;
    s["command"] = "analyze";
    s["out"] = (fs::path(opt.out_dir) / "analysis.json").string();
    summary(s);
    return 0;
}

int cmd_synth(const Options& opt) {
    SynthConfig sc;
    if (!opt.config_path.empty()) {
        const json cfg = load_config(opt);
        if (cfg.contains("synth")) {
            const json& s = cfg.at("synth");
            sc.seen = s.value("seen", sc.seen);
            sc.unseen = s.value("unseen", sc.unseen);
            sc.feature_dim = s.value("feature_dim", sc.feature_dim);
            sc.attribute_dim = s.value("attribute_dim", sc.attribute_dim);
            sc.samples_per_class = s.value("samples_per_class", sc.samples_per_class);
            sc.cluster_scale = s.value("cluster_scale", sc.cluster_scale);
            sc.mean_noise = s.value("mean_noise", sc.mean_noise);
            sc.sample_noise = s.value("sample_noise", sc.sample_noise);
        }
        sc.seed = cfg.value("seed", sc.seed);
    }
    if (opt.seed) sc.seed = *opt.seed;

    const SynthData data = generate_synthetic(sc);
    write_synthetic(opt.out_dir, data);
    summary({{"command", "synth-data"},
             {"seen", sc.seen},
             {"unseen", sc.unseen},
             {"samples", data.dataset.num_samples()},
             {"seed", sc.seed},
             {"out", opt.out_dir}});
    return 0;
}

void add_common(CLI::App* cmd, Options& opt, bool config_required = true) {
    auto* c = cmd->add_option("--config", opt.config_path, "experiment config JSON");
    if (config_required) c->required();
    cmd->add_option("--seed", [&opt](const CLI::results_t& r) {
        opt.seed = std::stoull(r.front());
        return true;
    }, "seed override");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_flag("--strict", opt.strict, "fail on non-convergence flags");
    cmd->add_option("--method", opt.method, "method name override");
    cmd->add_option("--metric", opt.metric, "metric / cv objective override");
    cmd->add_option("--k", [&opt](const CLI::results_t& r) {
        opt.k = std::stoll(r.front());
        return true;
    }, "top-k / fold-count override");
    cmd->add_option("--model", opt.model_dir, "trained model directory");
    cmd->add_option("--gamma", [&opt](const CLI::results_t& r) {
        opt.gamma = std::stod(r.front());
        return true;
    }, "fixed calibration factor");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-shot learning experiment driver"};
    app.require_subcommand(1);

    Options opt;

    auto* train_sync_cmd = app.add_subcommand("train-sync", "train a classifier-synthesis model");
    add_common(train_sync_cmd, opt);
    auto* train_exem_cmd = app.add_subcommand("train-exem", "train an exemplar predictor");
    add_common(train_exem_cmd, opt);
    auto* predict_cmd = app.add_subcommand("predict", "predict unseen-class labels");
    add_common(predict_cmd, opt);
    auto* eval_zsl_cmd = app.add_subcommand("eval-zsl", "conventional ZSL metrics");
    add_common(eval_zsl_cmd, opt);
    auto* eval_gzsl_cmd = app.add_subcommand("eval-gzsl", "generalized ZSL metrics");
    add_common(eval_gzsl_cmd, opt);
    auto* suc_cmd = app.add_subcommand("suc-curve", "seen-unseen accuracy curve CSV");
    add_common(suc_cmd, opt);
    auto* cv_cmd = app.add_subcommand("cv", "class-wise cross-validation grid search");
    add_common(cv_cmd, opt);
    auto* analyze_cmd = app.add_subcommand("analyze", "exemplar/classifier diagnostics");
    add_common(analyze_cmd, opt);
    auto* synth_cmd = app.add_subcommand("synth-data", "generate a synthetic dataset");
    add_common(synth_cmd, opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (train_sync_cmd->parsed()) return cmd_train(opt, false);
        if (train_exem_cmd->parsed()) return cmd_train(opt, true);
        if (predict_cmd->parsed()) return cmd_predict(opt);
        if (eval_zsl_cmd->parsed()) return cmd_eval_zsl(opt);
        if (eval_gzsl_cmd->parsed()) return cmd_eval_gzsl(opt);
        if (suc_cmd->parsed()) return cmd_suc_curve(opt);
        if (cv_cmd->parsed()) return cmd_cv(opt);
        if (analyze_cmd->parsed()) return cmd_analyze(opt);
        if (synth_cmd->parsed()) return cmd_synth(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
