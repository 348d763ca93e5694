#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "zsl/eval.hpp"
#include "zsl/pipeline.hpp"
#include "zsl/serialize.hpp"

using namespace zsl;
using nlohmann::json;
namespace fs = std::filesystem;

#ifndef ZSLCLI_PATH
#define ZSLCLI_PATH "zslcli"
#endif

namespace {

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(ZSLCLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct Workspace {
    fs::path root;
    fs::path log;
    fs::path config;

    Workspace() {
        root = fs::temp_directory_path() / ("zsl-cli-" + std::to_string(std::random_device{}()));
        fs::create_directories(root / "data");
        log = root / "log.txt";
        config = root / "config.json";

        const json synth_cfg = {
            {"seed", 7},
            {"synth",
             {{"seen", 8},
              {"unseen", 3},
              {"feature_dim", 10},
              {"attribute_dim", 5},
              {"samples_per_class", 12}}}};
        std::ofstream(root / "synth.json") << synth_cfg.dump();
        REQUIRE(run("synth-data --config " + (root / "synth.json").string() + " --out " +
                        (root / "data").string(),
                    log) == 0);

        const json cfg = {{"data",
                           {{"features", "data/features.zsfm"},
                            {"labels", "data/labels.txt"},
                            {"attributes", "data/attributes.csv"},
                            {"split", "data/split.json"}}},
                          {"method", {{"name", "exem-1nn"}, {"hypers", {{"lambda_svr", 40.0}}}}},
                          {"seed", 7}};
        std::ofstream(config) << cfg.dump();
    }
    ~Workspace() { fs::remove_all(root); }

    std::pair<Dataset, SemanticMatrix> load() const {
        DataConfig dc;
        dc.features = root / "data/features.zsfm";
        dc.labels = root / "data/labels.txt";
        dc.attributes = root / "data/attributes.csv";
        dc.split = root / "data/split.json";
        Dataset d = load_dataset(dc);
        SemanticMatrix s = load_semantics(dc.attributes, d);
        return {std::move(d), std::move(s)};
    }
};

} // namespace

TEST_CASE("argument and config errors exit with code 1") {
    Workspace w;
    CHECK(run("predict --config " + w.config.string() + " --bogus-flag", w.log) == 1);
    CHECK(slurp(w.log).find("--bogus-flag") != std::string::npos);
    CHECK(run("predict", w.log) == 1); // --config required
    CHECK(run("predict --config " + (w.root / "missing.json").string(), w.log) == 1);

    const fs::path bad = w.root / "bad.json";
    std::ofstream(bad) << "{\"data\":{}}";
    CHECK(run("predict --config " + bad.string(), w.log) == 1);

    CHECK(run("predict --config " + w.config.string() + " --method nonsense", w.log) == 1);
}

TEST_CASE("data and numeric errors use exit codes 2 and 3") {
    Workspace w;
    const json cfg = {{"data",
                       {{"features", "data/absent.zsfm"},
                        {"labels", "data/labels.txt"},
                        {"attributes", "data/attributes.csv"},
                        {"split", "data/split.json"}}}};
    const fs::path bad = w.root / "bad_data.json";
    std::ofstream(bad) << cfg.dump();
    CHECK(run("predict --config " + bad.string(), w.log) == 2);

    // d larger than the feature dimension breaks the PCA step.
    json numeric = json::parse(slurp(w.config));
    numeric["method"]["hypers"]["d"] = 50.0;
    const fs::path nc = w.root / "numeric.json";
    std::ofstream(nc) << numeric.dump();
    CHECK(run("predict --config " + nc.string(), w.log) == 3);
}

TEST_CASE("train, reload, and predict round trip through the model directory") {
    Workspace w;
    REQUIRE(run("train-exem --config " + w.config.string() + " --out " +
                    (w.root / "run").string(),
                w.log) == 0);
    const std::string summary = slurp(w.log);
    CHECK(summary.find("\"command\":\"train-exem\"") != std::string::npos);
    CHECK(fs::exists(w.root / "run/model/model.json"));

    REQUIRE(run("predict --config " + w.config.string() + " --model " +
                    (w.root / "run/model").string() + " --out " + (w.root / "run").string(),
                w.log) == 0);
    const json pred = json::parse(slurp(w.root / "run/predictions.json"));
    CHECK(pred.at("labels").size() == 3 * 12);
    const double acc = pred.at("per_class_accuracy").get<double>();
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(fs::exists(w.root / "run/scores.zsfm"));

    SUBCASE("reruns are byte identical") {
        REQUIRE(run("predict --config " + w.config.string() + " --model " +
                        (w.root / "run/model").string() + " --out " + (w.root / "b").string(),
                    w.log) == 0);
        CHECK(slurp(w.root / "run/predictions.json") == slurp(w.root / "b/predictions.json"));
        CHECK(slurp(w.root / "run/scores.zsfm") == slurp(w.root / "b/scores.zsfm"));
    }
    SUBCASE("the loaded model matches the library run exactly") {
        auto [dataset, semantics] = w.load();
        const ExemplarPredictor p = load_exemplar_predictor(w.root / "run/model");
        TrainedMethod t;
        t.name = MethodName::Exem1nn;
        t.exem = p;
        auto [x, labels] = samples_of(dataset, dataset.split.unseen);
        const Prediction mine = score_method(t, semantics, x, dataset.split.unseen);
        const double my_acc = per_class_accuracy(mine.labels, labels, dataset.split.unseen);
        CHECK(my_acc == acc); // exact double equality
        for (std::size_t i = 0; i < mine.labels.size(); ++i)
            CHECK(dataset.id_map[static_cast<std::size_t>(mine.labels[i])] ==
                  pred.at("labels")[i].get<ClassId>());
    }
    SUBCASE("a model directory of the wrong type is rejected") {
        CHECK(run("predict --config " + w.config.string() + " --method sync-ovo --model " +
                      (w.root / "run/model").string(),
                  w.log) == 2);
    }
}

TEST_CASE("in-process training matches the api without serialization") {
    Workspace w;
    REQUIRE(run("predict --config " + w.config.string() + " --out " + (w.root / "a").string(),
                w.log) == 0);
    const json pred = json::parse(slurp(w.root / "a/predictions.json"));

    auto [dataset, semantics] = w.load();
    MethodConfig mc;
    mc.name = MethodName::Exem1nn;
    mc.seed = 7;
    mc.hypers["lambda_svr"] = 40.0;
    const TrainedMethod t = train_method(dataset, semantics, mc);
    auto [x, labels] = samples_of(dataset, dataset.split.unseen);
    const Prediction mine = score_method(t, semantics, x, dataset.split.unseen);
    CHECK(per_class_accuracy(mine.labels, labels, dataset.split.unseen) ==
          pred.at("per_class_accuracy").get<double>());
}

TEST_CASE("evaluation commands write their reports") {
    Workspace w;
    REQUIRE(run("eval-zsl --config " + w.config.string() + " --out " + (w.root / "e").string(),
                w.log) == 0);
    const json metrics = json::parse(slurp(w.root / "e/metrics.json"));
    REQUIRE(metrics.is_array());
    CHECK(metrics[0].at("metric") == "per-class-accuracy");

    CHECK(run("eval-zsl --config " + w.config.string() + " --metric nonsense", w.log) == 1);

    SUBCASE("gzsl metrics and curve") {
        REQUIRE(run("eval-gzsl --config " + w.config.string() + " --out " +
                        (w.root / "g").string(),
                    w.log) == 0);
        const json g = json::parse(slurp(w.root / "g/metrics.json"));
        CHECK(g.at("ausuc").get<double>() >= 0.0);
        CHECK(g.at("h_calibrated").get<double>() + 1e-12 >= g.at("h_uncalibrated").get<double>());

        REQUIRE(run("suc-curve --config " + w.config.string() + " --out " +
                        (w.root / "g").string(),
                    w.log) == 0);
        const std::string csv = slurp(w.root / "g/suc_curve.csv");
        CHECK(csv.rfind("gamma,a_u,a_s\n", 0) == 0);

        // Determinism across reruns.
        REQUIRE(run("suc-curve --config " + w.config.string() + " --out " +
                        (w.root / "g2").string(),
                    w.log) == 0);
        CHECK(csv == slurp(w.root / "g2/suc_curve.csv"));
    }
}

TEST_CASE("cross-validation smoke run") {
    Workspace w;
    json cfg = json::parse(slurp(w.config));
    cfg["method"]["grid"] = {{"lambda_svr", {8.0, 40.0}}};
    cfg["method"]["objective"] = "cv-accuracy";
    cfg["folds"] = 3;
    const fs::path cv_cfg = w.root / "cv.json";
    std::ofstream(cv_cfg) << cfg.dump();

    REQUIRE(run("cv --config " + cv_cfg.string() + " --out " + (w.root / "cv").string(),
                w.log) == 0);
    const std::string summary = slurp(w.log);
    CHECK(summary.find("\"best\"") != std::string::npos);
    CHECK(fs::exists(w.root / "cv/cv_report.csv"));

    // A grid-less cv config is a config error.
    json no_grid = json::parse(slurp(w.config));
    const fs::path ng = w.root / "nogrid.json";
    std::ofstream(ng) << no_grid.dump();
    CHECK(run("cv --config " + ng.string(), w.log) == 1);
}

TEST_CASE("analyze reports exemplar diagnostics") {
    Workspace w;
    REQUIRE(run("analyze --config " + w.config.string() + " --out " + (w.root / "an").string(),
                w.log) == 0);
    const json a = json::parse(slurp(w.root / "an/analysis.json"));
    CHECK(a.contains("correlation_predicted"));
    CHECK(a.contains("knn_overlap_predicted"));
    CHECK(a.at("k").get<Index>() == 1); // round(0.4 * 3)
}
