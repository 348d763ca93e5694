#pragma once

#include "zsl/types.hpp"

namespace zsl {

/// Mean over rows of the Pearson correlation between corresponding rows of
/// two distance matrices.
double distance_matrix_correlation(const Matrix& d1, const Matrix& d2);

/// Mean percent overlap of the k nearest Euclidean neighbors (self excluded,
/// ties to the smaller index) computed in each representation.
double knn_overlap(const Matrix& a1, const Matrix& a2, Index k);

/// Smallest m whose leading PCA components capture `threshold` of the
/// variance of w's rows, as a percent of min(S, D).
double classifier_variance_profile(const Matrix& w, double threshold);

} // namespace zsl
