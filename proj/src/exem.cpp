#include "zsl/exem.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace zsl {

ExemplarMetric exemplar_metric_from_string(const std::string& s) {
    if (s == "euclidean") return ExemplarMetric::Euclidean;
    if (s == "standardized") return ExemplarMetric::Standardized;
    throw DataError("unknown exemplar metric: " + s);
}

std::string to_string(ExemplarMetric metric) {
    return metric == ExemplarMetric::Euclidean ? "euclidean" : "standardized";
}

ExemplarSet compute_exemplars(const Matrix& x_pca, const std::vector<ClassId>& labels) {
    if (static_cast<Index>(labels.size()) != x_pca.rows())
        throw DataError("compute_exemplars: label count mismatch");
    std::map<ClassId, std::vector<Index>> groups;
    for (Index i = 0; i < x_pca.rows(); ++i) groups[labels[i]].push_back(i);

    ExemplarSet set;
    set.z.resize(static_cast<Index>(groups.size()), x_pca.cols());
    Index row = 0;
    for (const auto& [cls, idx] : groups) {
        if (idx.empty()) throw DataError("compute_exemplars: empty class");
        RowVector mean = RowVector::Zero(x_pca.cols());
        for (Index i : idx) mean += x_pca.row(i);
        set.z.row(row++) = mean / double(idx.size());
        set.class_ids.push_back(cls);
    }
    if (!set.z.allFinite()) throw NumericError("compute_exemplars: non-finite exemplar");
    return set;
}

ExemplarPredictor fit_exemplar_predictor(const Dataset& dataset,
                                         const SemanticMatrix& semantics_seen, Index d,
                                         const ExemHyper& hyper) {
    const auto& seen = dataset.split.seen;
    if (seen.size() < 2)
        throw DataError("fit_exemplar_predictor: need at least 2 seen classes");

    std::vector<Index> rows;
    std::vector<ClassId> labels;
    for (Index i = 0; i < dataset.num_samples(); ++i) {
        const ClassId y = dataset.labels[i];
        if (std::find(seen.begin(), seen.end(), y) != seen.end()) {
            rows.push_back(i);
            labels.push_back(y);
        }
    }
    Matrix x(static_cast<Index>(rows.size()), dataset.num_dims());
    for (Index i = 0; i < x.rows(); ++i) x.row(i) = dataset.features.row(rows[i]);

    ExemplarPredictor p;
    p.pca = fit_pca(x, d);
    const Matrix x_pca = pca_project(p.pca, x);
    p.seen_exemplars = compute_exemplars(x_pca, labels);

    Matrix a_seen;
    if (semantics_seen.rows_for(p.seen_exemplars.class_ids, a_seen) !=
        static_cast<Index>(p.seen_exemplars.class_ids.size()))
        throw DataError("fit_exemplar_predictor: semantics missing for a seen class");

    p.regressors.reserve(d);
    for (Index dim = 0; dim < d; ++dim)
        p.regressors.push_back(train_nu_svr(a_seen, p.seen_exemplars.z.col(dim), hyper.lambda,
                                            hyper.nu, hyper.kernel, hyper.solver));

    // Mean over seen classes of the per-class per-dimension sample stddev.
    std::map<ClassId, std::vector<Index>> groups;
    for (Index i = 0; i < x_pca.rows(); ++i) groups[labels[i]].push_back(i);
    p.intra_class_std = Vector::Zero(d);
    Index counted = 0;
    for (const auto& [cls, idx] : groups) {
        if (idx.size() < 2) continue;
        RowVector mean = RowVector::Zero(d);
        for (Index i : idx) mean += x_pca.row(i);
        mean /= double(idx.size());
        RowVector var = RowVector::Zero(d);
        for (Index i : idx) var += (x_pca.row(i) - mean).array().square().matrix();
        var /= double(idx.size() - 1);
        p.intra_class_std += var.array().sqrt().matrix().transpose();
        ++counted;
    }
    if (counted > 0) p.intra_class_std /= double(counted);
    else p.intra_class_std.setOnes();
    return p;
}

ExemplarSet predict_exemplars(const ExemplarPredictor& p, const SemanticMatrix& semantics) {
    const Index d = p.output_dim();
    if (d == 0) throw NumericError("predict_exemplars: untrained predictor");
    if (semantics.vectors.cols() != p.regressors.front().training_inputs.cols())
        throw DataError("predict_exemplars: semantic dimension mismatch");
    ExemplarSet set;
    set.class_ids = semantics.class_ids;
    set.z.resize(semantics.vectors.rows(), d);
    for (Index dim = 0; dim < d; ++dim)
        set.z.col(dim) = p.regressors[dim].predict(semantics.vectors);
    return set;
}

NearestExemplarResult classify_nearest_exemplar(const ExemplarSet& exemplars, const Matrix& x,
                                                const PcaModel& pca, ExemplarMetric metric,
                                                const Vector& std_dev) {
    Matrix x_pca = pca_project(pca, x);
    Matrix z = exemplars.z;
    if (metric == ExemplarMetric::Standardized) {
        if (std_dev.size() != z.cols())
            throw NumericError("classify_nearest_exemplar: std length mismatch");
        if ((std_dev.array() <= 0.0).any())
            throw NumericError("classify_nearest_exemplar: zero std dimension");
        const RowVector inv = std_dev.cwiseInverse().transpose();
        x_pca = x_pca.array().rowwise() * inv.array();
        z = z.array().rowwise() * inv.array();
    }

    NearestExemplarResult result;
    result.distances = sq_euclidean_cross(x_pca, z).cwiseSqrt();
    result.labels.resize(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) {
        Index best;
        result.distances.row(i).minCoeff(&best); // first minimum: smallest index
        ClassId best_id = exemplars.class_ids[best];
        for (Index c = 0; c < result.distances.cols(); ++c)
            if (result.distances(i, c) == result.distances(i, best) &&
                exemplars.class_ids[c] < best_id)
                best_id = exemplars.class_ids[c];
        result.labels[static_cast<std::size_t>(i)] = best_id;
    }
    return result;
}

SemanticMatrix exemplars_as_semantics(const ExemplarSet& exemplars) {
    SemanticMatrix s;
    s.vectors = exemplars.z;
    s.class_ids = exemplars.class_ids;
    s.exemplar_space = true;
    return s;
}

} // namespace zsl
