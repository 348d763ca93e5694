#pragma once

#include "zsl/types.hpp"

namespace zsl {

struct KernelSpec {
    double bandwidth = 1.0;          // RBF sigma_k, > 0
    double combination_weight = 1.0; // in [0,1], for two-kernel mixing
};

struct PcaModel {
    RowVector mean;              // length D
    Matrix projection;           // d x D, rows = principal directions
    Vector explained_variance;   // length d, non-increasing

    Index input_dim() const { return projection.cols(); }
    Index output_dim() const { return projection.rows(); }
};

/// Entry (p,q) = ||a_p - b_q||^2, clamped to >= 0.
Matrix sq_euclidean_cross(const Matrix& a, const Matrix& b);

/// Entry (p,q) = exp(-||a_p - b_q||^2 / (2 * bandwidth^2)).
Matrix rbf_kernel(const Matrix& a, const Matrix& b, const KernelSpec& spec);

/// w * k1 + (1 - w) * k2.
Matrix combine_kernels(const Matrix& k1, const Matrix& k2, double w);

/// Top-d principal directions of the sample covariance (1/(N-1) scaling),
/// ordered by decreasing eigenvalue. Uses the N x N Gram matrix when D > N.
/// Sign convention: the largest-magnitude component of each row is
/// non-negative.
PcaModel fit_pca(const Matrix& x, Index d);

/// Rows = projection * (x_row - mean).
Matrix pca_project(const PcaModel& model, const Matrix& x);

/// Median over all pairwise distances between distinct rows; used to build
/// scale-free bandwidth grids.
double median_pairwise_distance(const Matrix& x);

} // namespace zsl
