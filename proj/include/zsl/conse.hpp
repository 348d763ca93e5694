#pragma once

#include <vector>

#include "zsl/data.hpp"
#include "zsl/types.hpp"

namespace zsl {

struct ConseModel {
    Matrix weights;       // S x D multinomial logistic weights over seen classes
    Vector bias;          // length S
    Matrix semantics_seen; // S x A, row order = seen_ids
    std::vector<ClassId> seen_ids;
    Index top_t = 10;
    bool converged = false;
};

struct ConseConfig {
    double reg = 1e-3;            // l2 penalty on the weights
    Index top_t = 10;             // classes combined into the embedding
    Index max_iterations = 5000;
    double tolerance = 1e-7;      // relative loss change
};

/// Softmax class probabilities, rows sum to 1.
Matrix conse_probabilities(const ConseModel& model, const Matrix& x);

/// Regularized negative log-likelihood and its gradient wrt (weights|bias).
struct ConseObjective {
    double loss = 0.0;
    Matrix grad_weights;
    Vector grad_bias;
};
ConseObjective conse_objective(const Matrix& weights, const Vector& bias, const Matrix& x,
                               const std::vector<Index>& y, double reg);

ConseModel train_conse(const Dataset& dataset, const SemanticMatrix& semantics_seen,
                       const ConseConfig& config);

/// embed(x) = normalize(sum over top-T seen classes of p(c|x) a_c); candidates
/// scored by cosine, or by negative Euclidean distance when the candidate
/// semantics live in (unnormalized) exemplar space.
Prediction predict_conse(const ConseModel& model, const SemanticMatrix& semantics_target,
                         const Matrix& x, const std::vector<ClassId>& restrict_ids);

} // namespace zsl
