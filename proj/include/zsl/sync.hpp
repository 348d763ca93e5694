#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "zsl/data.hpp"
#include "zsl/types.hpp"

namespace zsl {

enum class SyncLoss { OneVsOther, CrammerSinger, Structured };

SyncLoss sync_loss_from_string(const std::string& s);
std::string to_string(SyncLoss loss);

enum class PhantomInit { Identity, KMeans, Mixed };

struct PhantomSet {
    Matrix b;                   // R x A phantom semantic vectors
    Matrix v;                   // R x D base classifiers
    std::optional<Matrix> beta; // R x S combination weights, b = beta * A_seen

    Index count() const { return b.rows(); }
};

struct SyncConfig {
    double sigma = 1.0;   // bandwidth of the similarity softmax
    double lambda = 1.0;  // classifier regularization
    SyncLoss loss_variant = SyncLoss::OneVsOther;
    bool regularize_bases = false; // Sum||v_r||^2 instead of Sum||w_c||^2
    double eta = 0.0;              // l1 penalty on beta
    double gamma_reg = 0.0;        // phantom-norm penalty
    double norm_target = 1.0;      // h: target norm of phantom vectors

    Index phantom_count = 0; // 0 means R = S with identity init
    PhantomInit init = PhantomInit::Identity;
    std::uint64_t seed = 0;

    Index max_iterations = 2000;
    double tolerance = 1e-6;
    // Subgradient step a/sqrt(t) for the Crammer-Singer variants.
    double subgradient_step = 1.0;

    Index outer_iterations = 20;   // alternating v/beta rounds
    double outer_tolerance = 1e-5;
    Index beta_iterations = 50;    // ISTA steps per beta round
};

struct SyncModel {
    PhantomSet phantoms;
    SyncConfig config;
    double final_objective = 0.0;
    Index iterations = 0;
    bool converged = false;
};

/// Softmax over phantoms of -||a_c - b_r||^2 / sigma^2; rows sum to 1.
Matrix similarity_weights(const Matrix& a, const Matrix& phantoms_b, double sigma);

/// w = s * v.
Matrix synthesize_classifiers(const Matrix& s, const Matrix& v);

/// Objective and (sub)gradient with respect to v, holding the similarity
/// weights fixed. Ties in the Crammer-Singer max break toward the smallest
/// class index.
struct ObjectiveValue {
    double objective = 0.0;
    Matrix grad_v;
};
ObjectiveValue sync_objective_and_gradient(const SyncModel& model, const Dataset& dataset,
                                           const SemanticMatrix& semantics);

/// Initialize phantom semantic vectors; rows come out l2-normalized.
PhantomSet init_phantoms(const Matrix& semantics_seen, Index r, PhantomInit strategy,
                         std::uint64_t seed);

/// Learn base classifiers v with phantoms fixed.
SyncModel train_sync(const Dataset& dataset, const SemanticMatrix& semantics,
                     const SyncConfig& config);

/// Alternating optimization over v and the phantom combination weights beta.
SyncModel learn_phantom_semantics(const Dataset& dataset, const SemanticMatrix& semantics,
                                  const SyncConfig& config);

/// Scores w_c^T x for c in restrict; argmax with ties to the smallest id.
Prediction predict_sync(const SyncModel& model, const SemanticMatrix& semantics_target,
                        const Matrix& x, const std::vector<ClassId>& restrict_ids);

/// Full joint objective of the phantom-learning problem (loss + classifier
/// regularizer + l1 and norm penalties on beta). Exposed for tests.
double sync_phantom_objective(const SyncModel& model, const Dataset& dataset,
                              const SemanticMatrix& semantics, const Matrix& beta);

} // namespace zsl
