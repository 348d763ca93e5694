#pragma once

#include <filesystem>

#include "zsl/data.hpp"

namespace zsl {

struct SynthConfig {
    Index seen = 20;
    Index unseen = 5;
    Index feature_dim = 30;
    Index attribute_dim = 10;
    Index samples_per_class = 50;
    double cluster_scale = 4.0;  // attribute-to-mean map magnitude
    double mean_noise = 0.15;    // perturbation of the affine tie
    double sample_noise = 0.6;   // within-cluster stddev
    std::uint64_t seed = 0;
};

struct SynthData {
    Dataset dataset;        // dense ids, seen classes first
    SemanticMatrix semantics;
    Matrix cluster_means;   // C x D, for diagnostics
};

/// Gaussian clusters whose means are an anisotropic linear map of the
/// normalized attribute vectors plus noise.
SynthData generate_synthetic(const SynthConfig& config);

/// Writes features.zsfm, labels.txt, attributes.csv and split.json.
void write_synthetic(const std::filesystem::path& dir, const SynthData& data);

} // namespace zsl
