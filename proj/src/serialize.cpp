#include "zsl/serialize.hpp"

#include <fstream>

#include <json.hpp>

namespace zsl {

namespace {

using nlohmann::json;

void ensure_dir(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
}

void write_json(const std::filesystem::path& path, const json& j) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp);
        if (!f) throw DataError("cannot open " + tmp.string());
        f << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

json read_json(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path.string());
    json j;
    f >> j;
    return j;
}

void write_block(const std::filesystem::path& dir, const std::string& name, const Matrix& m) {
    const std::filesystem::path tmp = dir / (name + ".zsfm.tmp");
    write_matrix_zsfm(tmp, m);
    std::filesystem::rename(tmp, dir / (name + ".zsfm"));
}

Matrix read_block(const std::filesystem::path& dir, const std::string& name) {
    return read_matrix_zsfm(dir / (name + ".zsfm"));
}

void expect_type(const json& j, const std::string& type) {
    if (j.value("type", "") != type)
        throw DataError("model directory holds type '" + j.value("type", "") +
                        "', expected '" + type + "'");
}

} // namespace

std::string model_type(const std::filesystem::path& dir) {
    return read_json(dir / "model.json").value("type", "");
}

void save_sync_model(const std::filesystem::path& dir, const SyncModel& model) {
    ensure_dir(dir);
    json j;
    j["type"] = "sync";
    j["final_objective"] = model.final_objective;
    j["iterations"] = model.iterations;
    j["converged"] = model.converged;
    j["has_beta"] = model.phantoms.beta.has_value();
    const SyncConfig& c = model.config;
    j["config"] = {{"sigma", c.sigma},
                   {"lambda", c.lambda},
                   {"loss_variant", to_string(c.loss_variant)},
                   {"regularize_bases", c.regularize_bases},
                   {"eta", c.eta},
                   {"gamma_reg", c.gamma_reg},
                   {"norm_target", c.norm_target},
                   {"phantom_count", c.phantom_count},
                   {"seed", c.seed},
                   {"max_iterations", c.max_iterations},
                   {"tolerance", c.tolerance},
                   {"subgradient_step", c.subgradient_step},
                   {"outer_iterations", c.outer_iterations},
                   {"outer_tolerance", c.outer_tolerance},
                   {"beta_iterations", c.beta_iterations}};
    write_block(dir, "phantom_b", model.phantoms.b);
    write_block(dir, "phantom_v", model.phantoms.v);
    if (model.phantoms.beta) write_block(dir, "phantom_beta", *model.phantoms.beta);
    write_json(dir / "model.json", j);
}

SyncModel load_sync_model(const std::filesystem::path& dir) {
    const json j = read_json(dir / "model.json");
    expect_type(j, "sync");
    SyncModel model;
    model.final_objective = j.at("final_objective").get<double>();
    model.iterations = j.at("iterations").get<Index>();
    model.converged = j.at("converged").get<bool>();
    const json& c = j.at("config");
    model.config.sigma = c.at("sigma").get<double>();
    model.config.lambda = c.at("lambda").get<double>();
    model.config.loss_variant = sync_loss_from_string(c.at("loss_variant").get<std::string>());
    model.config.regularize_bases = c.at("regularize_bases").get<bool>();
    model.config.eta = c.at("eta").get<double>();
    model.config.gamma_reg = c.at("gamma_reg").get<double>();
    model.config.norm_target = c.at("norm_target").get<double>();
    model.config.phantom_count = c.at("phantom_count").get<Index>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.config.max_iterations = c.at("max_iterations").get<Index>();
    model.config.tolerance = c.at("tolerance").get<double>();
    model.config.subgradient_step = c.at("subgradient_step").get<double>();
    model.config.outer_iterations = c.at("outer_iterations").get<Index>();
    model.config.outer_tolerance = c.at("outer_tolerance").get<double>();
    model.config.beta_iterations = c.at("beta_iterations").get<Index>();
    model.phantoms.b = read_block(dir, "phantom_b");
    model.phantoms.v = read_block(dir, "phantom_v");
    if (j.at("has_beta").get<bool>()) model.phantoms.beta = read_block(dir, "phantom_beta");
    return model;
}

void save_exemplar_predictor(const std::filesystem::path& dir, const ExemplarPredictor& p) {
    ensure_dir(dir);
    const Index d = p.output_dim();
    json j;
    j["type"] = "exem";
    j["output_dim"] = d;
    j["exemplar_class_ids"] = p.seen_exemplars.class_ids;
    json regs = json::array();
    Matrix coeffs(d, d > 0 ? p.regressors.front().support_coefficients.size() : 0);
    for (Index i = 0; i < d; ++i) {
        const SvrModel& r = p.regressors[static_cast<std::size_t>(i)];
        coeffs.row(i) = r.support_coefficients.transpose();
        regs.push_back({{"bias", r.bias},
                        {"epsilon", r.epsilon},
                        {"bandwidth", r.kernel.bandwidth},
                        {"combination_weight", r.kernel.combination_weight},
                        {"converged", r.converged},
                        {"degenerate", r.degenerate},
                        {"c_box", r.c_box},
                        {"dual_objective", r.dual_objective}});
    }
    j["regressors"] = regs;
    write_block(dir, "pca_mean", p.pca.mean);
    write_block(dir, "pca_projection", p.pca.projection);
    write_block(dir, "pca_variance", p.pca.explained_variance.transpose());
    write_block(dir, "intra_class_std", p.intra_class_std.transpose());
    write_block(dir, "seen_exemplars", p.seen_exemplars.z);
    write_block(dir, "svr_coefficients", coeffs);
    if (d > 0) write_block(dir, "svr_inputs", p.regressors.front().training_inputs);
    write_json(dir / "model.json", j);
}

ExemplarPredictor load_exemplar_predictor(const std::filesystem::path& dir) {
    const json j = read_json(dir / "model.json");
    expect_type(j, "exem");
    ExemplarPredictor p;
    p.pca.mean = read_block(dir, "pca_mean").row(0);
    p.pca.projection = read_block(dir, "pca_projection");
    p.pca.explained_variance = read_block(dir, "pca_variance").row(0).transpose();
    p.intra_class_std = read_block(dir, "intra_class_std").row(0).transpose();
    p.seen_exemplars.z = read_block(dir, "seen_exemplars");
    p.seen_exemplars.class_ids = j.at("exemplar_class_ids").get<std::vector<ClassId>>();

    const Index d = j.at("output_dim").get<Index>();
    const Matrix coeffs = d > 0 ? read_block(dir, "svr_coefficients") : Matrix();
    const Matrix inputs = d > 0 ? read_block(dir, "svr_inputs") : Matrix();
    const json& regs = j.at("regressors");
    for (Index i = 0; i < d; ++i) {
        SvrModel r;
        r.support_coefficients = coeffs.row(i).transpose();
        r.training_inputs = inputs;
        const json& rj = regs.at(static_cast<std::size_t>(i));
        r.bias = rj.at("bias").get<double>();
        r.epsilon = rj.at("epsilon").get<double>();
        r.kernel.bandwidth = rj.at("bandwidth").get<double>();
        r.kernel.combination_weight = rj.at("combination_weight").get<double>();
        r.converged = rj.at("converged").get<bool>();
        r.degenerate = rj.at("degenerate").get<bool>();
        r.c_box = rj.at("c_box").get<double>();
        r.dual_objective = rj.at("dual_objective").get<double>();
        p.regressors.push_back(std::move(r));
    }
    return p;
}

void save_conse_model(const std::filesystem::path& dir, const ConseModel& model) {
    ensure_dir(dir);
    json j;
    j["type"] = "conse";
    j["seen_ids"] = model.seen_ids;
    j["top_t"] = model.top_t;
    j["converged"] = model.converged;
    write_block(dir, "weights", model.weights);
    write_block(dir, "bias", model.bias.transpose());
    write_block(dir, "semantics_seen", model.semantics_seen);
    write_json(dir / "model.json", j);
}

ConseModel load_conse_model(const std::filesystem::path& dir) {
    const json j = read_json(dir / "model.json");
    expect_type(j, "conse");
    ConseModel model;
    model.seen_ids = j.at("seen_ids").get<std::vector<ClassId>>();
    model.top_t = j.at("top_t").get<Index>();
    model.converged = j.at("converged").get<bool>();
    model.weights = read_block(dir, "weights");
    model.bias = read_block(dir, "bias").row(0).transpose();
    model.semantics_seen = read_block(dir, "semantics_seen");
    return model;
}

} // namespace zsl
