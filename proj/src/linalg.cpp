#include "zsl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace zsl {

Matrix sq_euclidean_cross(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw NumericError("sq_euclidean_cross: column counts differ (" +
                           std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) + ")");
    const Vector a2 = a.rowwise().squaredNorm();
    const Vector b2 = b.rowwise().squaredNorm();
    Matrix d = (-2.0 * a * b.transpose()).colwise() + a2;
    d.rowwise() += b2.transpose();
    return d.cwiseMax(0.0);
}

Matrix rbf_kernel(const Matrix& a, const Matrix& b, const KernelSpec& spec) {
    if (spec.bandwidth <= 0.0)
        throw NumericError("rbf_kernel: bandwidth must be positive");
    const double scale = -1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
    return (sq_euclidean_cross(a, b) * scale).array().exp();
}

Matrix combine_kernels(const Matrix& k1, const Matrix& k2, double w) {
    if (k1.rows() != k2.rows() || k1.cols() != k2.cols())
        throw NumericError("combine_kernels: shape mismatch");
    if (w < 0.0 || w > 1.0)
        throw NumericError("combine_kernels: weight outside [0,1]");
    return w * k1 + (1.0 - w) * k2;
}

namespace {

// Flip rows so the largest-magnitude coordinate is non-negative.
void fix_signs(Matrix& rows) {
    for (Index r = 0; r < rows.rows(); ++r) {
        Index imax;
        rows.row(r).cwiseAbs().maxCoeff(&imax);
        if (rows(r, imax) < 0.0) rows.row(r) = -rows.row(r);
    }
}

} // namespace

PcaModel fit_pca(const Matrix& x, Index d) {
    const Index n = x.rows();
    const Index dim = x.cols();
    if (n < 2) throw NumericError("fit_pca: need at least 2 samples");
    if (d < 1 || d > std::min(n, dim))
        throw NumericError("fit_pca: d out of range [1, " +
                           std::to_string(std::min(n, dim)) + "]");

    PcaModel model;
    model.mean = x.colwise().mean();
    Matrix centered = x.rowwise() - model.mean;

    Vector eigvals;
    Matrix directions; // columns, before sorting
    if (dim <= n) {
        Matrix cov = centered.transpose() * centered / double(n - 1);
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
        eigvals = es.eigenvalues();
        directions = es.eigenvectors();
    } else {
        // Gram trick: eigenvectors of (1/(n-1)) X X^T lift to directions X^T u.
        Matrix gram = centered * centered.transpose() / double(n - 1);
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
        eigvals = es.eigenvalues();
        directions.resize(dim, n);
        for (Index i = 0; i < n; ++i) {
            Vector v = centered.transpose() * es.eigenvectors().col(i);
            const double norm = v.norm();
            directions.col(i) = norm > 0 ? Vector(v / norm) : v;
        }
    }

    // SelfAdjointEigenSolver returns ascending eigenvalues; take from the top.
    const double max_ev = std::max(eigvals.maxCoeff(), 0.0);
    const double rank_tol = std::max(max_ev, 1.0) * 1e-12;
    Index rank = 0;
    for (Index i = 0; i < eigvals.size(); ++i)
        if (eigvals(i) > rank_tol) ++rank;
    if (rank < d)
        throw NumericError("fit_pca: requested " + std::to_string(d) +
                           " components but achievable rank is " + std::to_string(rank));

    model.projection.resize(d, dim);
    model.explained_variance.resize(d);
    for (Index i = 0; i < d; ++i) {
        const Index src = eigvals.size() - 1 - i;
        model.projection.row(i) = directions.col(src).transpose();
        model.explained_variance(i) = std::max(eigvals(src), 0.0);
    }
    fix_signs(model.projection);
    return model;
}

Matrix pca_project(const PcaModel& model, const Matrix& x) {
    if (x.cols() != model.input_dim())
        throw NumericError("pca_project: dimension mismatch");
    return (x.rowwise() - model.mean) * model.projection.transpose();
}

double median_pairwise_distance(const Matrix& x) {
    const Index n = x.rows();
    if (n < 2) throw NumericError("median_pairwise_distance: need at least 2 rows");
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            d.push_back((x.row(i) - x.row(j)).norm());
    std::sort(d.begin(), d.end());
    const std::size_t m = d.size();
    return m % 2 == 1 ? d[m / 2] : 0.5 * (d[m / 2 - 1] + d[m / 2]);
}

} // namespace zsl
