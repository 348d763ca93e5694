#include "zsl/synth.hpp"

#include <fstream>
#include <random>

#include <json.hpp>

namespace zsl {

SynthData generate_synthetic(const SynthConfig& config) {
    const Index c = config.seen + config.unseen;
    const Index n = c * config.samples_per_class;
    if (config.seen < 2 || config.unseen < 1)
        throw DataError("generate_synthetic: need >= 2 seen and >= 1 unseen classes");

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Matrix attributes(c, config.attribute_dim);
    for (Index i = 0; i < c; ++i)
        for (Index j = 0; j < config.attribute_dim; ++j) attributes(i, j) = gauss(rng);
    attributes = l2_normalize_rows(attributes);

    // Anisotropic map: column scales spread over a decade so attribute-space
    // distances are a distorted proxy for cluster-mean distances.
    Matrix map(config.feature_dim, config.attribute_dim);
    for (Index i = 0; i < config.feature_dim; ++i)
        for (Index j = 0; j < config.attribute_dim; ++j) map(i, j) = gauss(rng);
    for (Index j = 0; j < config.attribute_dim; ++j) {
        const double t = config.attribute_dim > 1 ? double(j) / double(config.attribute_dim - 1)
                                                  : 0.0;
        map.col(j) *= 0.3 + 2.7 * t;
    }

    SynthData data;
    data.cluster_means = attributes * map.transpose() * config.cluster_scale;
    for (Index i = 0; i < c; ++i)
        for (Index j = 0; j < config.feature_dim; ++j)
            data.cluster_means(i, j) += config.mean_noise * gauss(rng);

    data.dataset.features.resize(n, config.feature_dim);
    data.dataset.labels.reserve(static_cast<std::size_t>(n));
    Index row = 0;
    for (Index cls = 0; cls < c; ++cls)
        for (Index s = 0; s < config.samples_per_class; ++s, ++row) {
            for (Index j = 0; j < config.feature_dim; ++j)
                data.dataset.features(row, j) =
                    data.cluster_means(cls, j) + config.sample_noise * gauss(rng);
            data.dataset.labels.push_back(cls);
        }

    for (Index cls = 0; cls < config.seen; ++cls) data.dataset.split.seen.push_back(cls);
    for (Index cls = config.seen; cls < c; ++cls) data.dataset.split.unseen.push_back(cls);
    for (Index cls = 0; cls < c; ++cls) data.dataset.id_map.push_back(cls);

    data.semantics.vectors = attributes;
    for (Index cls = 0; cls < c; ++cls) data.semantics.class_ids.push_back(cls);
    return data;
}

void write_synthetic(const std::filesystem::path& dir, const SynthData& data) {
    std::filesystem::create_directories(dir);
    write_matrix_zsfm(dir / "features.zsfm", data.dataset.features);

    {
        std::ofstream f(dir / "labels.txt");
        if (!f) throw DataError("write_synthetic: cannot open labels.txt");
        for (ClassId y : data.dataset.labels) f << y << "\n";
    }
    {
        std::ofstream f(dir / "attributes.csv");
        if (!f) throw DataError("write_synthetic: cannot open attributes.csv");
        f.precision(17);
        for (Index i = 0; i < data.semantics.vectors.rows(); ++i) {
            f << data.semantics.class_ids[static_cast<std::size_t>(i)];
            for (Index j = 0; j < data.semantics.vectors.cols(); ++j)
                f << "," << data.semantics.vectors(i, j);
            f << "\n";
        }
    }
    {
        nlohmann::json j;
        j["seen"] = data.dataset.split.seen;
        j["unseen"] = data.dataset.split.unseen;
        std::ofstream f(dir / "split.json");
        if (!f) throw DataError("write_synthetic: cannot open split.json");
        f << j.dump(2) << "\n";
    }
}

} // namespace zsl
