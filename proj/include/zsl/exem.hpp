#pragma once

#include <vector>

#include "zsl/data.hpp"
#include "zsl/linalg.hpp"
#include "zsl/svr.hpp"
#include "zsl/types.hpp"

namespace zsl {

struct ExemplarSet {
    Matrix z;                       // C x d, row c = exemplar z_c
    std::vector<ClassId> class_ids; // length C
};

enum class ExemplarMetric { Euclidean, Standardized };

ExemplarMetric exemplar_metric_from_string(const std::string& s);
std::string to_string(ExemplarMetric metric);

struct ExemplarPredictor {
    PcaModel pca;
    std::vector<SvrModel> regressors; // one per exemplar dimension
    Vector intra_class_std;           // length d, mean of per-class stddevs
    ExemplarSet seen_exemplars;       // training targets, kept for inspection

    Index output_dim() const { return static_cast<Index>(regressors.size()); }
};

struct ExemHyper {
    double lambda = 1.0;
    double nu = 0.5;
    KernelSpec kernel; // bandwidth for the semantic-space RBF
    SvrOptions solver;
};

/// z_c = mean over the class's rows of the projected features.
ExemplarSet compute_exemplars(const Matrix& x_pca, const std::vector<ClassId>& labels);

/// PCA on seen-class features, per-class exemplars, then d independent
/// nu-SVR regressors mapping semantics to exemplar coordinates.
ExemplarPredictor fit_exemplar_predictor(const Dataset& dataset,
                                         const SemanticMatrix& semantics_seen, Index d,
                                         const ExemHyper& hyper);

/// Row c = (f_1(a_c), ..., f_d(a_c)).
ExemplarSet predict_exemplars(const ExemplarPredictor& p, const SemanticMatrix& semantics);

struct NearestExemplarResult {
    std::vector<ClassId> labels; // one per sample
    Matrix distances;            // N x C, column order = exemplars.class_ids
};

/// 1NN over exemplars in PCA space; ties go to the smallest class id. The
/// standardized metric divides each dimension by std before the norm.
NearestExemplarResult classify_nearest_exemplar(const ExemplarSet& exemplars, const Matrix& x,
                                                const PcaModel& pca, ExemplarMetric metric,
                                                const Vector& std_dev = Vector());

/// Exemplar rows reinterpreted as semantic vectors, not re-normalized;
/// exemplar_space is set so sigma grids re-scale by median pairwise distance.
SemanticMatrix exemplars_as_semantics(const ExemplarSet& exemplars);

} // namespace zsl
